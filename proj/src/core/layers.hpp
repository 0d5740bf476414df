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

#ifndef GSA_CORE_LAYERS_HPP_
#define GSA_CORE_LAYERS_HPP_

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "core/params.hpp"

namespace gsa::nn {

// Training-time dropout; a null rng means evaluation mode.
struct Dropout {
  double rate = 0.0;
  std::mt19937_64* rng = nullptr;
};

ad::Var dropout(const ad::Var& x, const Dropout& d);

// Post-softmax attention override.
//   kReplace: every row becomes `weights` (no renormalisation).
//   kKeyMask: every row is multiplied elementwise by `weights` (0/1 key mask).
struct AttentionOverride {
  enum class Mode { kReplace, kKeyMask };
  Mode mode = Mode::kReplace;
  RowVector weights;
};

// One N x N post-override weight matrix per head.
using HeadWeights = std::vector<Matrix>;

void declare_linear(std::vector<ParamShape>& shapes, const std::string& prefix,
                    Eigen::Index in, Eigen::Index out);
ad::Var linear(Binder& p, const ad::Var& x, const std::string& prefix);

// Same-padded 1-D convolution over rows; weights are (kernel*in) x out.
void declare_conv1d(std::vector<ParamShape>& shapes, const std::string& prefix,
                    Eigen::Index in, Eigen::Index out, int kernel);
ad::Var conv1d(Binder& p, const ad::Var& x, const std::string& prefix,
               int kernel);

constexpr double kNormEps = 1e-5;

void declare_layer_norm(std::vector<ParamShape>& shapes,
                        const std::string& prefix, Eigen::Index dim);
ad::Var layer_norm(Binder& p, const ad::Var& x, const std::string& prefix);

// gamma(w) * (x - mean) / sqrt(var + eps) + beta(w), gamma(w) = w E_gamma,
// beta(w) = w E_beta, broadcast over the rows of x. `w` is 1 x d_style.
ad::Var conditional_layer_norm(const ad::Var& x, const ad::Var& w,
                               const ad::Var& e_gamma, const ad::Var& e_beta);
void declare_cln(std::vector<ParamShape>& shapes, const std::string& prefix,
                 Eigen::Index d_style, Eigen::Index d_model);
ad::Var cln(Binder& p, const ad::Var& x, const ad::Var& w,
            const std::string& prefix);

void declare_attention(std::vector<ParamShape>& shapes,
                       const std::string& prefix, Eigen::Index dim);
// Scaled dot-product self-attention with output projection. When `capture` is
// non-null it receives the effective per-head weights.
ad::Var self_attention(Binder& p, const ad::Var& x, const std::string& prefix,
                       int n_heads, const AttentionOverride* override_weights,
                       HeadWeights* capture, const Dropout& drop);

}  // namespace gsa::nn

#endif  // GSA_CORE_LAYERS_HPP_
