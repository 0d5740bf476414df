// Copyright (c) 2026 The gradstyle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GSA_CORE_PARAMS_HPP_
#define GSA_CORE_PARAMS_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "core/autodiff.hpp"

namespace gsa {

enum class Init { kXavier, kZeros, kOnes };

struct ParamShape {
  std::string name;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Init init = Init::kXavier;
};

// Ordered name -> matrix table. Iteration order is the name order, which
// keeps initialisation, checkpoints and optimiser sweeps deterministic.
class ParamTable {
 public:
  void set(const std::string& name, Matrix value);
  const Matrix& get(const std::string& name) const;
  Matrix& get_mutable(const std::string& name);
  bool contains(const std::string& name) const;
  size_t size() const { return table_.size(); }
  size_t total_elements() const;
  std::vector<std::string> names() const;

  auto begin() const { return table_.begin(); }
  auto end() const { return table_.end(); }
  auto begin() { return table_.begin(); }
  auto end() { return table_.end(); }

  // Fresh table with the same shapes, all zero.
  ParamTable zeros_like() const;

 private:
  std::map<std::string, Matrix> table_;
};

// Seeded uniform Xavier initialisation; values are rounded to float32 so the
// table survives a float32 checkpoint round trip unchanged.
ParamTable init_params(const std::vector<ParamShape>& shapes, uint64_t seed);

// Checks every declared shape is present with matching dimensions.
void validate_params(const ParamTable& params,
                     const std::vector<ParamShape>& shapes);

void round_to_float(Matrix& m);
void round_to_float(ParamTable& table);

// Binds table entries onto a tape on first use.
class Binder {
 public:
  Binder(ad::Tape& tape, const ParamTable& params, bool requires_grad);

  ad::Var operator()(const std::string& name);
  ad::Tape& tape() { return tape_; }
  bool training() const { return requires_grad_; }

  // Adds the gradients of every bound parameter into `grads`.
  void accumulate_grads(ParamTable& grads) const;

 private:
  ad::Tape& tape_;
  const ParamTable& params_;
  bool requires_grad_;
  std::unordered_map<std::string, ad::Var> bound_;
};

}  // namespace gsa

#endif  // GSA_CORE_PARAMS_HPP_
