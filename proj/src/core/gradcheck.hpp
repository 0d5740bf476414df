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

// Central finite-difference verification of the analytic gradients.

#ifndef GSA_CORE_GRADCHECK_HPP_
#define GSA_CORE_GRADCHECK_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/params.hpp"

namespace gsa {

struct GradCheckOptions {
  uint64_t seed = 0;
  double eps = 1e-5;
  // Fraction of each tensor's elements probed (at least one per tensor).
  double sample_fraction = 1.0;
  // When set, the analytic gradient of the largest-magnitude element of this
  // parameter is scaled by (1 + fault_scale) before comparison.
  std::string fault_param;
  double fault_scale = 0.1;
};

struct GradGroupError {
  std::string name;
  double max_rel_error = 0.0;
  int checked = 0;
};

struct GradCheckReport {
  std::string selector;
  std::vector<GradGroupError> groups;
  double max_rel_error = 0.0;
  int checked = 0;
};

using LossFn = std::function<ad::Var(Binder&)>;

// Probes `params` against the scalar produced by `loss`. Per tensor the error
// is max|a - n| / max(max|a|, max|n|, f) over the probed elements, where the
// floor f is 1e-6 of the largest analytic gradient seen in any tensor.
GradCheckReport check_gradients(const ParamTable& params, const LossFn& loss,
                                const GradCheckOptions& opts);

// Selectors: affine, lse, gse, gsa, cln, fft_block, pitch_pred, dur_pred,
// end_to_end. Each builds small random dimensions from the seed.
GradCheckReport grad_check(const std::string& selector,
                           const GradCheckOptions& opts = {});
const std::vector<std::string>& grad_check_selectors();

}  // namespace gsa

#endif  // GSA_CORE_GRADCHECK_HPP_
