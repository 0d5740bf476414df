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

#include <cmath>
#include <complex>
#include <random>

#include "core/dsp.hpp"
#include "core/fft.hpp"

namespace gsa {

namespace {

using Complex = std::complex<double>;
using ComplexFrames = std::vector<std::vector<Complex>>;

// Frames live on the extended (already padded) signal: frame t covers
// [t*hop, t*hop + win). Without re-padding, STFT and the least-squares
// inverse below form an exact projection pair.
struct Stft {
  const MelConfig& cfg;
  std::vector<double> window;
  RealFft fft;

  explicit Stft(const MelConfig& c)
      : cfg(c), window(static_cast<size_t>(c.win_length)), fft(c.n_fft) {
    for (int i = 0; i < cfg.win_length; ++i) {
      window[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / cfg.win_length);
    }
  }

  size_t signal_length(int frames) const {
    return static_cast<size_t>(frames - 1) * cfg.hop_length + cfg.win_length;
  }

  ComplexFrames forward(const std::vector<double>& x, int frames) {
    ComplexFrames out(frames, std::vector<Complex>(cfg.n_bins()));
    std::vector<double> buf(static_cast<size_t>(cfg.n_fft));
    for (int t = 0; t < frames; ++t) {
      std::fill(buf.begin(), buf.end(), 0.0);
      const size_t start = static_cast<size_t>(t) * cfg.hop_length;
      for (int i = 0; i < cfg.win_length; ++i) {
        buf[i] = x[start + i] * window[i];
      }
      fft.forward(buf.data(), out[t].data());
    }
    return out;
  }

  std::vector<double> inverse(const ComplexFrames& spec) {
    const int frames = static_cast<int>(spec.size());
    std::vector<double> x(signal_length(frames), 0.0);
    std::vector<double> norm(x.size(), 0.0);
    std::vector<double> buf(static_cast<size_t>(cfg.n_fft));
    for (int t = 0; t < frames; ++t) {
      fft.inverse(spec[t].data(), buf.data());
      const size_t start = static_cast<size_t>(t) * cfg.hop_length;
      for (int i = 0; i < cfg.win_length; ++i) {
        x[start + i] += window[i] * buf[i] / cfg.n_fft;
        norm[start + i] += window[i] * window[i];
      }
    }
    for (size_t i = 0; i < x.size(); ++i) {
      x[i] = norm[i] > 1e-10 ? x[i] / norm[i] : 0.0;
    }
    return x;
  }
};

double spectral_convergence(const ComplexFrames& est, const Matrix& target) {
  double num = 0.0, den = 0.0;
  for (size_t t = 0; t < est.size(); ++t) {
    for (size_t k = 0; k < est[t].size(); ++k) {
      const double d = std::abs(est[t][k]) - target(t, k);
      num += d * d;
      den += target(t, k) * target(t, k);
    }
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace

Matrix mel_to_linear(const Matrix& mel_magnitude, const Matrix& filterbank,
                     int steps) {
  require(mel_magnitude.cols() == filterbank.rows(), ErrorCode::kConfiguration,
          "mel width does not match the filterbank");
  // Lipschitz constant of the gradient: largest eigenvalue of F^T F.
  const Matrix gram = filterbank.transpose() * filterbank;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(gram.cols());
  double lipschitz = 1.0;
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd next = gram * v;
    const double norm = next.norm();
    if (norm <= 0.0) break;
    lipschitz = norm / v.norm();
    v = next / norm;
  }
  const double step = 1.0 / (lipschitz * 1.01);

  // Rows are frames: S F^T ~ M, solved for all frames at once.
  const Matrix target = mel_magnitude * filterbank;  // M F
  Eigen::VectorXd col_mass = gram * Eigen::VectorXd::Ones(gram.cols());
  Matrix s(mel_magnitude.rows(), filterbank.cols());
  for (Eigen::Index k = 0; k < s.cols(); ++k) {
    const double denom = col_mass(k) > 1e-12 ? col_mass(k) : 1.0;
    s.col(k) = target.col(k).cwiseMax(0.0) / denom;
  }
  for (int it = 0; it < steps; ++it) {
    const Matrix grad = s * gram - target;
    s = (s - step * grad).cwiseMax(0.0);
  }
  return s;
}

GriffinLimResult griffin_lim_invert(const MelSpectrogram& mel, int n_iters,
                                    uint64_t seed, int nnls_steps) {
  require(n_iters >= 1, ErrorCode::kInvalidArgument,
          "Griffin-Lim needs at least one iteration");
  const MelConfig& cfg = mel.config;
  cfg.validate();
  require(mel.n_mels() == cfg.n_mels, ErrorCode::kConfiguration,
          "mel width does not match its config");
  const int frames = mel.num_frames();
  require(frames >= 1, ErrorCode::kDegenerateInput, "empty mel");

  const Matrix fb = mel_filterbank(cfg);
  Matrix mel_mag = mel.frames.array().exp();
  // Entries at the floor carry no energy.
  const double floor_level = cfg.log_floor * (1.0 + 1e-6);
  mel_mag = mel_mag.unaryExpr(
      [floor_level](double x) { return x <= floor_level ? 0.0 : x; });
  const Matrix target = mel_to_linear(mel_mag, fb, nnls_steps);

  Stft stft(cfg);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase_dist(-M_PI, M_PI);
  ComplexFrames spec(frames, std::vector<Complex>(cfg.n_bins()));
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k < cfg.n_bins(); ++k) {
      spec[t][k] = std::polar(target(t, k), phase_dist(rng));
    }
  }

  GriffinLimResult result;
  std::vector<double> x;
  for (int it = 0; it < n_iters; ++it) {
    x = stft.inverse(spec);
    ComplexFrames est = stft.forward(x, frames);
    result.convergence.push_back(spectral_convergence(est, target));
    for (int t = 0; t < frames; ++t) {
      for (int k = 0; k < cfg.n_bins(); ++k) {
        const double mag = std::abs(est[t][k]);
        const Complex unit = mag > 1e-12 ? est[t][k] / mag : Complex(1.0, 0.0);
        spec[t][k] = target(t, k) * unit;
      }
    }
  }
  x = stft.inverse(spec);

  // Undo the centre padding used during analysis.
  const size_t pad = static_cast<size_t>(cfg.win_length / 2);
  const size_t length = static_cast<size_t>(frames - 1) * cfg.hop_length;
  result.audio.sample_rate_hz = cfg.sample_rate_hz;
  result.audio.samples.assign(length > 0 ? length : 1, 0.0);
  for (size_t i = 0; i < result.audio.samples.size() && pad + i < x.size();
       ++i) {
    result.audio.samples[i] = std::clamp(x[pad + i], -1.0, 1.0);
  }
  return result;
}

}  // namespace gsa
