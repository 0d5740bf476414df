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

#ifndef GSA_CORE_FFT_HPP_
#define GSA_CORE_FFT_HPP_

#include <complex>
#include <vector>

namespace gsa {

// Real-input FFT of fixed size backed by FFTW. Plan creation is serialised
// internally, so instances may be built from any thread; a single instance
// is not shareable across threads.
class RealFft {
 public:
  explicit RealFft(int n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return n_; }
  // `in` has n samples; returns n/2+1 bins.
  void forward(const double* in, std::complex<double>* out);
  // Unnormalised inverse: the result is n times the original signal.
  void inverse(const std::complex<double>* in, double* out);

 private:
  int n_;
  double* real_ = nullptr;
  void* spectrum_ = nullptr;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

// Magnitude spectrum of an arbitrary-length signal (n/2+1 bins).
std::vector<double> magnitude_spectrum(const std::vector<double>& signal);

}  // namespace gsa

#endif  // GSA_CORE_FFT_HPP_
