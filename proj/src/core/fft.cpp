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

#include "core/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>

#include "core/common.hpp"

namespace gsa {

namespace {
// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(int n) : n_(n) {
  require(n >= 1, ErrorCode::kInvalidArgument, "FFT size must be positive");
  std::lock_guard<std::mutex> lock(planner_mutex());
  real_ = fftw_alloc_real(static_cast<size_t>(n));
  auto* spec = fftw_alloc_complex(static_cast<size_t>(n / 2 + 1));
  spectrum_ = spec;
  forward_plan_ = fftw_plan_dft_r2c_1d(n, real_, spec, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(n, spec, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_free(real_);
  fftw_free(spectrum_);
}

void RealFft::forward(const double* in, std::complex<double>* out) {
  std::memcpy(real_, in, sizeof(double) * static_cast<size_t>(n_));
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  const auto* spec = static_cast<const fftw_complex*>(spectrum_);
  for (int k = 0; k <= n_ / 2; ++k) out[k] = {spec[k][0], spec[k][1]};
}

void RealFft::inverse(const std::complex<double>* in, double* out) {
  auto* spec = static_cast<fftw_complex*>(spectrum_);
  for (int k = 0; k <= n_ / 2; ++k) {
    spec[k][0] = in[k].real();
    spec[k][1] = in[k].imag();
  }
  // c2r destroys its input; the copy above keeps `in` intact.
  fftw_execute(static_cast<fftw_plan>(inverse_plan_));
  std::memcpy(out, real_, sizeof(double) * static_cast<size_t>(n_));
}

std::vector<double> magnitude_spectrum(const std::vector<double>& signal) {
  require(!signal.empty(), ErrorCode::kDegenerateInput, "empty signal");
  RealFft fft(static_cast<int>(signal.size()));
  std::vector<std::complex<double>> spec(signal.size() / 2 + 1);
  fft.forward(signal.data(), spec.data());
  std::vector<double> mag(spec.size());
  std::transform(spec.begin(), spec.end(), mag.begin(),
                 [](const std::complex<double>& c) { return std::abs(c); });
  return mag;
}

}  // namespace gsa
