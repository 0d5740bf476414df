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

// Reverse-mode automatic differentiation over dense row-major matrices.
//
// A Tape owns every intermediate value of one forward pass. Operations are
// free functions taking and returning Var handles; each records a closure
// that propagates the upstream gradient to its inputs. Nodes that do not
// depend on any gradient-carrying input store no closure, so inference-only
// passes pay nothing for the bookkeeping.

#ifndef GSA_CORE_AUTODIFF_HPP_
#define GSA_CORE_AUTODIFF_HPP_

#include <deque>
#include <functional>
#include <vector>

#include "core/common.hpp"

namespace gsa::ad {

class Tape;

class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  bool valid() const { return tape_ != nullptr; }
  Tape* tape() const { return tape_; }
  int id() const { return id_; }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, const Matrix& upstream)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  Var variable(Matrix value);

  // Records a derived node. `backward` is dropped when no parent carries
  // gradient.
  Var record(Matrix value, std::initializer_list<Var> parents,
             BackwardFn backward);
  Var record(Matrix value, const std::vector<Var>& parents,
             BackwardFn backward);

  // Seeds d(root)/d(root) = 1 for a 1x1 root and runs the reverse sweep.
  void backward(const Var& root);

  // Zero-shaped matrix when the node received no gradient.
  Matrix grad(const Var& v) const;

  const Matrix& value(int id) const { return nodes_[id].value; }
  bool requires_grad(const Var& v) const {
    return nodes_[v.id()].requires_grad;
  }
  // Adds `g` into the gradient buffer of `v` (no-op for constants).
  template <typename Expr>
  void accumulate(const Var& v, const Expr& g) {
    Node& n = nodes_[v.id()];
    if (!n.requires_grad) return;
    if (n.grad.size() == 0) {
      n.grad = g;
    } else {
      n.grad.array() += g.array();
    }
  }

  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    BackwardFn backward;
  };
  std::deque<Node> nodes_;
};

inline const Matrix& Var::value() const { return tape_->value(id_); }

// ---- elementwise and linear algebra -------------------------------------
Var matmul(const Var& a, const Var& b);
Var transpose(const Var& a);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& a, double s);
// a (R x C) + row (1 x C) broadcast over rows.
Var add_row(const Var& a, const Var& row);
// a (R x C) * row (1 x C) broadcast over rows.
Var mul_row(const Var& a, const Var& row);

Var sigmoid(const Var& a);
Var mish(const Var& a);
Var gelu(const Var& a);

// ---- shape -----------------------------------------------------------------
Var cols(const Var& a, Eigen::Index start, Eigen::Index count);
Var concat_cols(const std::vector<Var>& parts);
Var concat_rows(const std::vector<Var>& parts);
// out.row(i) = a.row(index[i]); gradient scatter-adds.
Var gather_rows(const Var& a, const std::vector<int>& index);
// Rows of a unfolded into windows of `kernel` centred rows with zero padding:
// output row t = [a(t-p), ..., a(t+p)], p = kernel / 2.
Var unfold(const Var& a, int kernel);

// ---- reductions and normalisation -----------------------------------------
Var mean_rows(const Var& a);
Var sum_all(const Var& a);
Var softmax_rows(const Var& a);
// Per-row (x - mean) / sqrt(var + eps), population variance.
Var normalize_rows(const Var& a, double eps);

// Replaces every row with `row`; no gradient reaches `a`.
Var replace_rows(const Var& a, const RowVector& row);

}  // namespace gsa::ad

#endif  // GSA_CORE_AUTODIFF_HPP_
