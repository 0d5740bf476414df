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

#include "core/layers.hpp"

#include <cmath>

namespace gsa::nn {

ad::Var dropout(const ad::Var& x, const Dropout& d) {
  if (d.rng == nullptr || d.rate <= 0.0) return x;
  std::bernoulli_distribution keep(1.0 - d.rate);
  const double s = 1.0 / (1.0 - d.rate);
  Matrix mask(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = keep(*d.rng) ? s : 0.0;
  }
  return ad::mul(x, x.tape()->constant(std::move(mask)));
}

void declare_linear(std::vector<ParamShape>& shapes, const std::string& prefix,
                    Eigen::Index in, Eigen::Index out) {
  shapes.push_back({prefix + ".W", in, out, Init::kXavier});
  shapes.push_back({prefix + ".b", 1, out, Init::kZeros});
}

ad::Var linear(Binder& p, const ad::Var& x, const std::string& prefix) {
  return ad::add_row(ad::matmul(x, p(prefix + ".W")), p(prefix + ".b"));
}

void declare_conv1d(std::vector<ParamShape>& shapes, const std::string& prefix,
                    Eigen::Index in, Eigen::Index out, int kernel) {
  shapes.push_back({prefix + ".W", in * kernel, out, Init::kXavier});
  shapes.push_back({prefix + ".b", 1, out, Init::kZeros});
}

ad::Var conv1d(Binder& p, const ad::Var& x, const std::string& prefix,
               int kernel) {
  return linear(p, ad::unfold(x, kernel), prefix);
}

void declare_layer_norm(std::vector<ParamShape>& shapes,
                        const std::string& prefix, Eigen::Index dim) {
  shapes.push_back({prefix + ".gamma", 1, dim, Init::kOnes});
  shapes.push_back({prefix + ".beta", 1, dim, Init::kZeros});
}

ad::Var layer_norm(Binder& p, const ad::Var& x, const std::string& prefix) {
  ad::Var y = ad::normalize_rows(x, kNormEps);
  return ad::add_row(ad::mul_row(y, p(prefix + ".gamma")),
                     p(prefix + ".beta"));
}

ad::Var conditional_layer_norm(const ad::Var& x, const ad::Var& w,
                               const ad::Var& e_gamma, const ad::Var& e_beta) {
  ad::Var gamma = ad::matmul(w, e_gamma);
  ad::Var beta = ad::matmul(w, e_beta);
  return ad::add_row(ad::mul_row(ad::normalize_rows(x, kNormEps), gamma),
                     beta);
}

void declare_cln(std::vector<ParamShape>& shapes, const std::string& prefix,
                 Eigen::Index d_style, Eigen::Index d_model) {
  shapes.push_back({prefix + ".E_gamma", d_style, d_model, Init::kXavier});
  shapes.push_back({prefix + ".E_beta", d_style, d_model, Init::kXavier});
}

ad::Var cln(Binder& p, const ad::Var& x, const ad::Var& w,
            const std::string& prefix) {
  return conditional_layer_norm(x, w, p(prefix + ".E_gamma"),
                                p(prefix + ".E_beta"));
}

void declare_attention(std::vector<ParamShape>& shapes,
                       const std::string& prefix, Eigen::Index dim) {
  declare_linear(shapes, prefix + ".q", dim, dim);
  declare_linear(shapes, prefix + ".k", dim, dim);
  declare_linear(shapes, prefix + ".v", dim, dim);
  declare_linear(shapes, prefix + ".o", dim, dim);
}

ad::Var self_attention(Binder& p, const ad::Var& x, const std::string& prefix,
                       int n_heads, const AttentionOverride* override_weights,
                       HeadWeights* capture, const Dropout& drop) {
  const Eigen::Index dim = x.cols();
  require(n_heads >= 1 && dim % n_heads == 0, ErrorCode::kConfiguration,
          "attention width " + std::to_string(dim) +
              " not divisible by head count " + std::to_string(n_heads));
  if (override_weights != nullptr) {
    require(override_weights->weights.cols() == x.rows(),
            ErrorCode::kConfiguration,
            "attention override has " +
                std::to_string(override_weights->weights.cols()) +
                " weights for " + std::to_string(x.rows()) + " keys");
    const RowVector& w = override_weights->weights;
    require(w.allFinite() && w.minCoeff() >= 0.0 && w.maxCoeff() > 0.0,
            ErrorCode::kInvalidArgument,
            "attention override weights must be finite, non-negative and "
            "not all zero");
  }
  const Eigen::Index d_head = dim / n_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_head));

  ad::Var q = linear(p, x, prefix + ".q");
  ad::Var k = linear(p, x, prefix + ".k");
  ad::Var v = linear(p, x, prefix + ".v");

  if (capture != nullptr) capture->clear();
  std::vector<ad::Var> heads;
  heads.reserve(static_cast<size_t>(n_heads));
  for (int h = 0; h < n_heads; ++h) {
    ad::Var qh = ad::cols(q, h * d_head, d_head);
    ad::Var kh = ad::cols(k, h * d_head, d_head);
    ad::Var vh = ad::cols(v, h * d_head, d_head);
    ad::Var scores = ad::scale(ad::matmul(qh, ad::transpose(kh)), scale);
    ad::Var weights = ad::softmax_rows(scores);
    if (override_weights != nullptr) {
      if (override_weights->mode == AttentionOverride::Mode::kReplace) {
        weights = ad::replace_rows(weights, override_weights->weights);
      } else {
        ad::Var mask = x.tape()->constant(override_weights->weights);
        weights = ad::mul_row(weights, mask);
      }
    }
    if (capture != nullptr) capture->push_back(weights.value());
    weights = dropout(weights, drop);
    heads.push_back(ad::matmul(weights, vh));
  }
  ad::Var merged = n_heads == 1 ? heads.front() : ad::concat_cols(heads);
  return linear(p, merged, prefix + ".o");
}

}  // namespace gsa::nn
