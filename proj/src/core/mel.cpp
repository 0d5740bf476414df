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

#include "core/binio.hpp"
#include "core/dsp.hpp"
#include "core/fft.hpp"

namespace gsa {

namespace {

// Slaney scale: linear below 1 kHz, logarithmic above.
constexpr double kMelLinearStep = 200.0 / 3.0;
constexpr double kMelBreakHz = 1000.0;
constexpr double kMelBreak = kMelBreakHz / kMelLinearStep;  // 15
const double kMelLogStep = std::log(6.4) / 27.0;

constexpr char kMelMagic[] = "GSAMEL1";

size_t reflect_index(int64_t i, int64_t n) {
  if (n == 1) return 0;
  const int64_t period = 2 * (n - 1);
  int64_t m = i % period;
  if (m < 0) m += period;
  return static_cast<size_t>(m < n ? m : period - m);
}

}  // namespace

void MelConfig::validate() const {
  auto bad = [](const std::string& msg) {
    fail(ErrorCode::kConfiguration, "mel config: " + msg);
  };
  if (sample_rate_hz <= 0) bad("sample_rate_hz must be positive");
  if (hop_length <= 0) bad("hop_length must be positive");
  if (!(hop_length <= win_length && win_length <= n_fft)) {
    bad("require hop_length <= win_length <= n_fft");
  }
  if (n_mels < 1) bad("n_mels must be >= 1");
  if (!(0.0 <= f_min_hz && f_min_hz < f_max_hz &&
        f_max_hz <= sample_rate_hz / 2.0)) {
    bad("require 0 <= f_min_hz < f_max_hz <= sample_rate_hz / 2");
  }
  if (!(log_floor > 0.0)) bad("log_floor must be positive");
}

int MelConfig::num_frames(size_t num_samples) const {
  const int64_t pad = win_length / 2;
  const int64_t padded = static_cast<int64_t>(num_samples) + 2 * pad;
  if (padded < win_length) return 0;
  return static_cast<int>(1 + (padded - win_length) / hop_length);
}

double hz_to_mel(double hz) {
  if (hz < kMelBreakHz) return hz / kMelLinearStep;
  return kMelBreak + std::log(hz / kMelBreakHz) / kMelLogStep;
}

double mel_to_hz(double mel) {
  if (mel < kMelBreak) return mel * kMelLinearStep;
  return kMelBreakHz * std::exp(kMelLogStep * (mel - kMelBreak));
}

namespace {
std::vector<double> mel_edges_hz(const MelConfig& cfg) {
  const double lo = hz_to_mel(cfg.f_min_hz);
  const double hi = hz_to_mel(cfg.f_max_hz);
  std::vector<double> edges(static_cast<size_t>(cfg.n_mels) + 2);
  for (size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(lo + (hi - lo) * static_cast<double>(i) /
                                  static_cast<double>(edges.size() - 1));
  }
  return edges;
}
}  // namespace

Matrix mel_filterbank(const MelConfig& cfg) {
  cfg.validate();
  const std::vector<double> edges = mel_edges_hz(cfg);
  const int bins = cfg.n_bins();
  Matrix fb = Matrix::Zero(cfg.n_mels, bins);
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    const double norm = 2.0 / (hi - lo);
    bool any = false;
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * cfg.sample_rate_hz / cfg.n_fft;
      const double up = (f - lo) / (mid - lo);
      const double down = (hi - f) / (hi - mid);
      const double w = std::max(0.0, std::min(up, down));
      fb(m, k) = w * norm;
      any = any || w > 0.0;
    }
    if (!any) {
      fail(ErrorCode::kConfiguration,
           "mel filter " + std::to_string(m) +
               " covers no FFT bin; reduce n_mels or increase n_fft");
    }
  }
  return fb;
}

std::vector<double> mel_center_frequencies(const MelConfig& cfg) {
  const std::vector<double> edges = mel_edges_hz(cfg);
  return std::vector<double>(edges.begin() + 1, edges.end() - 1);
}

Matrix stft_magnitude(const std::vector<double>& samples, const MelConfig& cfg) {
  cfg.validate();
  require(!samples.empty(), ErrorCode::kDegenerateInput, "empty audio");
  const int frames = cfg.num_frames(samples.size());
  require(frames >= 1, ErrorCode::kDegenerateInput,
          "audio shorter than one analysis window");
  const int64_t pad = cfg.win_length / 2;
  const auto n = static_cast<int64_t>(samples.size());

  // Periodic Hann.
  std::vector<double> window(static_cast<size_t>(cfg.win_length));
  for (int i = 0; i < cfg.win_length; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / cfg.win_length);
  }

  RealFft fft(cfg.n_fft);
  std::vector<double> buf(static_cast<size_t>(cfg.n_fft));
  std::vector<std::complex<double>> spec(static_cast<size_t>(cfg.n_bins()));
  Matrix mag(frames, cfg.n_bins());
  for (int t = 0; t < frames; ++t) {
    std::fill(buf.begin(), buf.end(), 0.0);
    const int64_t start = static_cast<int64_t>(t) * cfg.hop_length - pad;
    for (int i = 0; i < cfg.win_length; ++i) {
      buf[i] = samples[reflect_index(start + i, n)] * window[i];
    }
    fft.forward(buf.data(), spec.data());
    for (int k = 0; k < cfg.n_bins(); ++k) mag(t, k) = std::abs(spec[k]);
  }
  return mag;
}

MelSpectrogram mel_spectrogram(const AudioClip& clip, const MelConfig& cfg) {
  cfg.validate();
  require(clip.sample_rate_hz == cfg.sample_rate_hz, ErrorCode::kInvalidArgument,
          "audio rate " + std::to_string(clip.sample_rate_hz) +
              " Hz differs from mel config rate " +
              std::to_string(cfg.sample_rate_hz) + " Hz");
  const Matrix mag = stft_magnitude(clip.samples, cfg);
  const Matrix fb = mel_filterbank(cfg);
  MelSpectrogram mel;
  mel.config = cfg;
  mel.frames = mag * fb.transpose();
  const double floor = cfg.log_floor;
  mel.frames = mel.frames.unaryExpr(
      [floor](double x) { return std::log(std::max(x, floor)); });
  return mel;
}

void save_mel(const MelSpectrogram& mel, const std::string& path) {
  binio::Writer w(path);
  w.magic(std::string_view(kMelMagic, 7));
  w.pod(static_cast<uint32_t>(mel.frames.rows()));
  w.pod(static_cast<uint32_t>(mel.frames.cols()));
  for (Eigen::Index i = 0; i < mel.frames.size(); ++i) {
    w.f32(mel.frames.data()[i]);
  }
  w.close();
}

MelSpectrogram load_mel(const std::string& path, const MelConfig& cfg) {
  binio::Reader r(path);
  r.expect_magic(std::string_view(kMelMagic, 7));
  const auto t = r.pod<uint32_t>();
  const auto m = r.pod<uint32_t>();
  require(t >= 1 && m >= 1 && static_cast<uint64_t>(t) * m < (1ull << 31),
          ErrorCode::kFormat, "'" + path + "': invalid mel dimensions");
  require(static_cast<int>(m) == cfg.n_mels, ErrorCode::kConfiguration,
          "'" + path + "' has " + std::to_string(m) + " mel bands, config expects " +
              std::to_string(cfg.n_mels));
  MelSpectrogram mel;
  mel.config = cfg;
  mel.frames.resize(t, m);
  for (Eigen::Index i = 0; i < mel.frames.size(); ++i) {
    mel.frames.data()[i] = r.f32();
    require(std::isfinite(mel.frames.data()[i]), ErrorCode::kFormat,
            "'" + path + "': non-finite mel value");
  }
  return mel;
}

}  // namespace gsa
