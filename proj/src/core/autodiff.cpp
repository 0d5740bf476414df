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

#include "core/autodiff.hpp"

#include <cmath>
#include <sstream>

namespace gsa::ad {

namespace {

void check_same_tape(const Var& a, const Var& b) {
  require(a.valid() && b.valid() && a.tape() == b.tape(),
          ErrorCode::kInvalidArgument, "operands live on different tapes");
}

void check_shape(bool ok, const char* op, const Var& a, const Var& b) {
  if (ok) return;
  std::ostringstream os;
  os << op << ": shape mismatch " << a.rows() << "x" << a.cols() << " vs "
     << b.rows() << "x" << b.cols();
  fail(ErrorCode::kConfiguration, os.str());
}

double softplus(double x) {
  return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0);
}

}  // namespace

Var Tape::constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), Matrix(), false, nullptr});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::variable(Matrix value) {
  nodes_.push_back(Node{std::move(value), Matrix(), true, nullptr});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::record(Matrix value, std::initializer_list<Var> parents,
                 BackwardFn backward) {
  bool needs = false;
  for (const Var& p : parents) needs = needs || nodes_[p.id()].requires_grad;
  nodes_.push_back(
      Node{std::move(value), Matrix(), needs, needs ? std::move(backward)
                                                    : BackwardFn()});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::record(Matrix value, const std::vector<Var>& parents,
                 BackwardFn backward) {
  bool needs = false;
  for (const Var& p : parents) needs = needs || nodes_[p.id()].requires_grad;
  nodes_.push_back(
      Node{std::move(value), Matrix(), needs, needs ? std::move(backward)
                                                    : BackwardFn()});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

void Tape::backward(const Var& root) {
  require(root.tape() == this, ErrorCode::kInvalidArgument,
          "backward root belongs to another tape");
  require(root.rows() == 1 && root.cols() == 1, ErrorCode::kInvalidArgument,
          "backward root must be a scalar");
  if (!nodes_[root.id()].requires_grad) return;
  nodes_[root.id()].grad = Matrix::Ones(1, 1);
  for (int id = root.id(); id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.backward || n.grad.size() == 0) continue;
    // Copy: the closure may accumulate into nodes appended before this one,
    // which never reallocates `n`, but keep the upstream immutable anyway.
    const Matrix upstream = n.grad;
    n.backward(*this, upstream);
  }
}

Matrix Tape::grad(const Var& v) const {
  const Node& n = nodes_[v.id()];
  if (n.grad.size() == 0) return Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

Var matmul(const Var& a, const Var& b) {
  check_same_tape(a, b);
  check_shape(a.cols() == b.rows(), "matmul", a, b);
  Tape& t = *a.tape();
  Matrix out = a.value() * b.value();
  return t.record(std::move(out), {a, b}, [a, b](Tape& t, const Matrix& g) {
    if (t.requires_grad(a)) t.accumulate(a, g * b.value().transpose());
    if (t.requires_grad(b)) t.accumulate(b, a.value().transpose() * g);
  });
}

Var transpose(const Var& a) {
  Tape& t = *a.tape();
  Matrix out = a.value().transpose();
  return t.record(std::move(out), {a}, [a](Tape& t, const Matrix& g) {
    t.accumulate(a, g.transpose());
  });
}

Var add(const Var& a, const Var& b) {
  check_same_tape(a, b);
  check_shape(a.rows() == b.rows() && a.cols() == b.cols(), "add", a, b);
  Tape& t = *a.tape();
  Matrix out = a.value() + b.value();
  return t.record(std::move(out), {a, b}, [a, b](Tape& t, const Matrix& g) {
    t.accumulate(a, g);
    t.accumulate(b, g);
  });
}

Var sub(const Var& a, const Var& b) {
  check_same_tape(a, b);
  check_shape(a.rows() == b.rows() && a.cols() == b.cols(), "sub", a, b);
  Tape& t = *a.tape();
  Matrix out = a.value() - b.value();
  return t.record(std::move(out), {a, b}, [a, b](Tape& t, const Matrix& g) {
    t.accumulate(a, g);
    t.accumulate(b, -g);
  });
}

Var mul(const Var& a, const Var& b) {
  check_same_tape(a, b);
  check_shape(a.rows() == b.rows() && a.cols() == b.cols(), "mul", a, b);
  Tape& t = *a.tape();
  Matrix out = a.value().cwiseProduct(b.value());
  return t.record(std::move(out), {a, b}, [a, b](Tape& t, const Matrix& g) {
    if (t.requires_grad(a)) t.accumulate(a, g.cwiseProduct(b.value()));
    if (t.requires_grad(b)) t.accumulate(b, g.cwiseProduct(a.value()));
  });
}

Var scale(const Var& a, double s) {
  Tape& t = *a.tape();
  Matrix out = a.value() * s;
  return t.record(std::move(out), {a},
                  [a, s](Tape& t, const Matrix& g) { t.accumulate(a, g * s); });
}

Var add_row(const Var& a, const Var& row) {
  check_same_tape(a, row);
  check_shape(row.rows() == 1 && row.cols() == a.cols(), "add_row", a, row);
  Tape& t = *a.tape();
  Matrix out = a.value().rowwise() + row.value().row(0);
  return t.record(std::move(out), {a, row},
                  [a, row](Tape& t, const Matrix& g) {
                    t.accumulate(a, g);
                    if (t.requires_grad(row)) {
                      t.accumulate(row, g.colwise().sum());
                    }
                  });
}

Var mul_row(const Var& a, const Var& row) {
  check_same_tape(a, row);
  check_shape(row.rows() == 1 && row.cols() == a.cols(), "mul_row", a, row);
  Tape& t = *a.tape();
  Matrix out = a.value().array().rowwise() * row.value().row(0).array();
  return t.record(
      std::move(out), {a, row}, [a, row](Tape& t, const Matrix& g) {
        if (t.requires_grad(a)) {
          Matrix ga = g.array().rowwise() * row.value().row(0).array();
          t.accumulate(a, ga);
        }
        if (t.requires_grad(row)) {
          t.accumulate(row, g.cwiseProduct(a.value()).colwise().sum());
        }
      });
}

Var sigmoid(const Var& a) {
  Tape& t = *a.tape();
  Matrix out =
      a.value().unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
  Matrix y = out;
  return t.record(std::move(out), {a},
                  [a, y = std::move(y)](Tape& t, const Matrix& g) {
                    t.accumulate(a, g.array() * y.array() * (1.0 - y.array()));
                  });
}

Var mish(const Var& a) {
  Tape& t = *a.tape();
  Matrix out = a.value().unaryExpr(
      [](double x) { return x * std::tanh(softplus(x)); });
  return t.record(std::move(out), {a}, [a](Tape& t, const Matrix& g) {
    Matrix d = a.value().unaryExpr([](double x) {
      const double th = std::tanh(softplus(x));
      const double sg = 1.0 / (1.0 + std::exp(-x));
      return th + x * (1.0 - th * th) * sg;
    });
    t.accumulate(a, g.cwiseProduct(d));
  });
}

Var gelu(const Var& a) {
  constexpr double kC = 0.7978845608028654;  // sqrt(2 / pi)
  constexpr double kA = 0.044715;
  Tape& t = *a.tape();
  Matrix out = a.value().unaryExpr([](double x) {
    return 0.5 * x * (1.0 + std::tanh(kC * (x + kA * x * x * x)));
  });
  return t.record(std::move(out), {a}, [a](Tape& t, const Matrix& g) {
    Matrix d = a.value().unaryExpr([](double x) {
      const double th = std::tanh(kC * (x + kA * x * x * x));
      return 0.5 * (1.0 + th) +
             0.5 * x * (1.0 - th * th) * kC * (1.0 + 3.0 * kA * x * x);
    });
    t.accumulate(a, g.cwiseProduct(d));
  });
}

Var cols(const Var& a, Eigen::Index start, Eigen::Index count) {
  require(start >= 0 && count >= 0 && start + count <= a.cols(),
          ErrorCode::kBounds, "cols: column range out of bounds");
  Tape& t = *a.tape();
  Matrix out = a.value().middleCols(start, count);
  return t.record(std::move(out), {a},
                  [a, start, count](Tape& t, const Matrix& g) {
                    Matrix full = Matrix::Zero(a.rows(), a.cols());
                    full.middleCols(start, count) = g;
                    t.accumulate(a, full);
                  });
}

Var concat_cols(const std::vector<Var>& parts) {
  require(!parts.empty(), ErrorCode::kInvalidArgument,
          "concat_cols: no inputs");
  Tape& t = *parts.front().tape();
  const Eigen::Index rows = parts.front().rows();
  Eigen::Index total = 0;
  for (const Var& p : parts) {
    check_same_tape(parts.front(), p);
    check_shape(p.rows() == rows, "concat_cols", parts.front(), p);
    total += p.cols();
  }
  Matrix out(rows, total);
  Eigen::Index c = 0;
  for (const Var& p : parts) {
    out.middleCols(c, p.cols()) = p.value();
    c += p.cols();
  }
  return t.record(std::move(out), parts, [parts](Tape& t, const Matrix& g) {
    Eigen::Index c = 0;
    for (const Var& p : parts) {
      t.accumulate(p, g.middleCols(c, p.cols()));
      c += p.cols();
    }
  });
}

Var concat_rows(const std::vector<Var>& parts) {
  require(!parts.empty(), ErrorCode::kInvalidArgument,
          "concat_rows: no inputs");
  Tape& t = *parts.front().tape();
  const Eigen::Index ncols = parts.front().cols();
  Eigen::Index total = 0;
  for (const Var& p : parts) {
    check_same_tape(parts.front(), p);
    check_shape(p.cols() == ncols, "concat_rows", parts.front(), p);
    total += p.rows();
  }
  Matrix out(total, ncols);
  Eigen::Index r = 0;
  for (const Var& p : parts) {
    out.middleRows(r, p.rows()) = p.value();
    r += p.rows();
  }
  return t.record(std::move(out), parts, [parts](Tape& t, const Matrix& g) {
    Eigen::Index r = 0;
    for (const Var& p : parts) {
      t.accumulate(p, g.middleRows(r, p.rows()));
      r += p.rows();
    }
  });
}

Var gather_rows(const Var& a, const std::vector<int>& index) {
  Tape& t = *a.tape();
  Matrix out(static_cast<Eigen::Index>(index.size()), a.cols());
  for (size_t i = 0; i < index.size(); ++i) {
    require(index[i] >= 0 && index[i] < a.rows(), ErrorCode::kBounds,
            "gather_rows: index out of range");
    out.row(static_cast<Eigen::Index>(i)) = a.value().row(index[i]);
  }
  return t.record(std::move(out), {a}, [a, index](Tape& t, const Matrix& g) {
    Matrix ga = Matrix::Zero(a.rows(), a.cols());
    for (size_t i = 0; i < index.size(); ++i) {
      ga.row(index[i]) += g.row(static_cast<Eigen::Index>(i));
    }
    t.accumulate(a, ga);
  });
}

Var unfold(const Var& a, int kernel) {
  require(kernel >= 1 && kernel % 2 == 1, ErrorCode::kConfiguration,
          "unfold: kernel must be odd and positive");
  Tape& t = *a.tape();
  const Eigen::Index rows = a.rows();
  const Eigen::Index ch = a.cols();
  const int pad = kernel / 2;
  Matrix out = Matrix::Zero(rows, ch * kernel);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (int k = 0; k < kernel; ++k) {
      const Eigen::Index src = r + k - pad;
      if (src < 0 || src >= rows) continue;
      out.block(r, k * ch, 1, ch) = a.value().row(src);
    }
  }
  return t.record(std::move(out), {a},
                  [a, kernel, pad](Tape& t, const Matrix& g) {
                    const Eigen::Index rows = a.rows();
                    const Eigen::Index ch = a.cols();
                    Matrix ga = Matrix::Zero(rows, ch);
                    for (Eigen::Index r = 0; r < rows; ++r) {
                      for (int k = 0; k < kernel; ++k) {
                        const Eigen::Index src = r + k - pad;
                        if (src < 0 || src >= rows) continue;
                        ga.row(src) += g.block(r, k * ch, 1, ch);
                      }
                    }
                    t.accumulate(a, ga);
                  });
}

Var mean_rows(const Var& a) {
  Tape& t = *a.tape();
  const double n = static_cast<double>(a.rows());
  Matrix out = a.value().colwise().sum() / n;
  return t.record(std::move(out), {a}, [a, n](Tape& t, const Matrix& g) {
    Matrix ga = g.replicate(a.rows(), 1) / n;
    t.accumulate(a, ga);
  });
}

Var sum_all(const Var& a) {
  Tape& t = *a.tape();
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return t.record(std::move(out), {a}, [a](Tape& t, const Matrix& g) {
    t.accumulate(a, Matrix::Constant(a.rows(), a.cols(), g(0, 0)));
  });
}

Var softmax_rows(const Var& a) {
  Tape& t = *a.tape();
  Matrix out(a.rows(), a.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    const double m = a.value().row(r).maxCoeff();
    out.row(r) = (a.value().row(r).array() - m).exp();
    out.row(r) /= out.row(r).sum();
  }
  Matrix y = out;
  return t.record(std::move(out), {a},
                  [a, y = std::move(y)](Tape& t, const Matrix& g) {
                    Eigen::VectorXd dot = g.cwiseProduct(y).rowwise().sum();
                    Matrix ga = y.array() * (g.colwise() - dot).array();
                    t.accumulate(a, ga);
                  });
}

Var normalize_rows(const Var& a, double eps) {
  Tape& t = *a.tape();
  const Eigen::Index n = a.cols();
  Matrix out(a.rows(), n);
  Eigen::VectorXd inv_std(a.rows());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    const double mu = a.value().row(r).mean();
    const double var =
        (a.value().row(r).array() - mu).square().sum() / static_cast<double>(n);
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    out.row(r) = (a.value().row(r).array() - mu) * inv_std(r);
  }
  Matrix y = out;
  return t.record(
      std::move(out), {a},
      [a, y = std::move(y), inv_std = std::move(inv_std)](Tape& t,
                                                          const Matrix& g) {
        const double n = static_cast<double>(y.cols());
        Matrix ga(y.rows(), y.cols());
        for (Eigen::Index r = 0; r < y.rows(); ++r) {
          const double mean_g = g.row(r).sum() / n;
          const double mean_gy = g.row(r).dot(y.row(r)) / n;
          ga.row(r) = inv_std(r) *
                      (g.row(r).array() - mean_g - y.row(r).array() * mean_gy);
        }
        t.accumulate(a, ga);
      });
}

Var replace_rows(const Var& a, const RowVector& row) {
  require(row.cols() == a.cols(), ErrorCode::kConfiguration,
          "replace_rows: width mismatch");
  Matrix out = row.replicate(a.rows(), 1);
  return a.tape()->constant(std::move(out));
}

}  // namespace gsa::ad
