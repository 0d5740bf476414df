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

#include "core/params.hpp"

#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

namespace gsa {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kUnsupported: return "unsupported";
    case ErrorCode::kDegenerateInput: return "degenerate-input";
    case ErrorCode::kConfiguration: return "configuration";
    case ErrorCode::kBounds: return "bounds";
    case ErrorCode::kTraining: return "training";
    case ErrorCode::kData: return "data";
    case ErrorCode::kVersion: return "version";
    case ErrorCode::kUsage: return "usage";
    case ErrorCode::kDegenerateOutput: return "degenerate-output";
  }
  return "unknown";
}

int worker_threads() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GSA_NUM_THREADS")) {
    const int requested = std::atoi(env);
    if (requested > 0) n = requested;
  }
  return std::max(n, 1);
}

void ParamTable::set(const std::string& name, Matrix value) {
  table_[name] = std::move(value);
}

const Matrix& ParamTable::get(const std::string& name) const {
  auto it = table_.find(name);
  if (it == table_.end()) {
    fail(ErrorCode::kConfiguration, "missing parameter '" + name + "'");
  }
  return it->second;
}

Matrix& ParamTable::get_mutable(const std::string& name) {
  auto it = table_.find(name);
  if (it == table_.end()) {
    fail(ErrorCode::kConfiguration, "missing parameter '" + name + "'");
  }
  return it->second;
}

bool ParamTable::contains(const std::string& name) const {
  return table_.count(name) > 0;
}

size_t ParamTable::total_elements() const {
  size_t n = 0;
  for (const auto& [_, m] : table_) n += static_cast<size_t>(m.size());
  return n;
}

std::vector<std::string> ParamTable::names() const {
  std::vector<std::string> out;
  out.reserve(table_.size());
  for (const auto& [name, _] : table_) out.push_back(name);
  return out;
}

ParamTable ParamTable::zeros_like() const {
  ParamTable out;
  for (const auto& [name, m] : table_) {
    out.set(name, Matrix::Zero(m.rows(), m.cols()));
  }
  return out;
}

void round_to_float(Matrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = static_cast<double>(static_cast<float>(m.data()[i]));
  }
}

void round_to_float(ParamTable& table) {
  for (auto& [_, m] : table) round_to_float(m);
}

ParamTable init_params(const std::vector<ParamShape>& shapes, uint64_t seed) {
  std::map<std::string, const ParamShape*> ordered;
  for (const ParamShape& s : shapes) {
    require(ordered.emplace(s.name, &s).second, ErrorCode::kConfiguration,
            "parameter declared twice: " + s.name);
  }
  std::mt19937_64 rng(seed);
  ParamTable table;
  for (const auto& [name, s] : ordered) {
    Matrix m;
    switch (s->init) {
      case Init::kZeros:
        m = Matrix::Zero(s->rows, s->cols);
        break;
      case Init::kOnes:
        m = Matrix::Ones(s->rows, s->cols);
        break;
      case Init::kXavier: {
        const double limit =
            std::sqrt(6.0 / static_cast<double>(s->rows + s->cols));
        std::uniform_real_distribution<double> dist(-limit, limit);
        m.resize(s->rows, s->cols);
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
        break;
      }
    }
    round_to_float(m);
    table.set(name, std::move(m));
  }
  return table;
}

void validate_params(const ParamTable& params,
                     const std::vector<ParamShape>& shapes) {
  for (const ParamShape& s : shapes) {
    const Matrix& m = params.get(s.name);
    if (m.rows() != s.rows || m.cols() != s.cols) {
      fail(ErrorCode::kConfiguration,
           "parameter '" + s.name + "' has shape " + std::to_string(m.rows()) +
               "x" + std::to_string(m.cols()) + ", expected " +
               std::to_string(s.rows) + "x" + std::to_string(s.cols));
    }
  }
}

Binder::Binder(ad::Tape& tape, const ParamTable& params, bool requires_grad)
    : tape_(tape), params_(params), requires_grad_(requires_grad) {}

ad::Var Binder::operator()(const std::string& name) {
  auto it = bound_.find(name);
  if (it != bound_.end()) return it->second;
  const Matrix& m = params_.get(name);
  ad::Var v = requires_grad_ ? tape_.variable(m) : tape_.constant(m);
  bound_.emplace(name, v);
  return v;
}

void Binder::accumulate_grads(ParamTable& grads) const {
  for (const auto& [name, v] : bound_) {
    Matrix g = tape_.grad(v);
    if (g.size() == 0) continue;
    if (!grads.contains(name)) {
      grads.set(name, std::move(g));
    } else {
      grads.get_mutable(name) += g;
    }
  }
}

}  // namespace gsa
