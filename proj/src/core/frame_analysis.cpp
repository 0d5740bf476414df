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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/dsp.hpp"

namespace gsa {

namespace {

size_t reflect(int64_t i, int64_t n) {
  if (n == 1) return 0;
  const int64_t period = 2 * (n - 1);
  int64_t m = i % period;
  if (m < 0) m += period;
  return static_cast<size_t>(m < n ? m : period - m);
}

// Normalised autocorrelation of `x` at `lag` over the overlapping region.
double normalized_autocorr(const std::vector<double>& x, int lag) {
  const size_t n = x.size() - static_cast<size_t>(lag);
  double xy = 0.0, xx = 0.0, yy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    xy += x[i] * x[i + lag];
    xx += x[i] * x[i];
    yy += x[i + lag] * x[i + lag];
  }
  const double denom = std::sqrt(xx * yy);
  return denom > 0.0 ? xy / denom : 0.0;
}

}  // namespace

double FrameAnalysis::voiced_ratio() const {
  if (voiced.empty()) return 0.0;
  const auto n = std::count(voiced.begin(), voiced.end(), true);
  return static_cast<double>(n) / static_cast<double>(voiced.size());
}

FrameAnalysis analyze_frames(const AudioClip& clip, const MelConfig& cfg,
                             double f0_min, double f0_max,
                             double voicing_threshold) {
  cfg.validate();
  require(0.0 < f0_min && f0_min < f0_max &&
              f0_max < clip.sample_rate_hz / 2.0,
          ErrorCode::kInvalidArgument,
          "require 0 < f0_min < f0_max < sample_rate / 2");
  require(!clip.samples.empty(), ErrorCode::kDegenerateInput, "empty audio");
  const int frames = cfg.num_frames(clip.samples.size());
  require(frames >= 1, ErrorCode::kDegenerateInput,
          "audio shorter than one analysis window");

  const double rate = clip.sample_rate_hz;
  const int min_lag = std::max(1, static_cast<int>(std::floor(rate / f0_max)));
  const int max_lag = std::min(cfg.win_length / 2,
                               static_cast<int>(std::ceil(rate / f0_min)));
  require(min_lag + 1 < max_lag, ErrorCode::kConfiguration,
          "pitch search range is empty for this window length");

  const int64_t pad = cfg.win_length / 2;
  const auto n = static_cast<int64_t>(clip.samples.size());
  FrameAnalysis out;
  out.energy.resize(frames);
  out.f0_hz.assign(frames, 0.0);
  out.voiced.assign(frames, false);

  std::vector<double> frame(static_cast<size_t>(cfg.win_length));
  std::vector<double> r(static_cast<size_t>(max_lag) + 2, 0.0);
  for (int t = 0; t < frames; ++t) {
    const int64_t start = static_cast<int64_t>(t) * cfg.hop_length - pad;
    for (int i = 0; i < cfg.win_length; ++i) {
      frame[i] = clip.samples[reflect(start + i, n)];
    }
    out.energy[t] = rms(frame);
    if (out.energy[t] < kVoicingEnergyGate) continue;

    double best = -1.0;
    for (int lag = min_lag - 1; lag <= max_lag + 1; ++lag) {
      r[lag] = lag >= 1 ? normalized_autocorr(frame, lag) : 1.0;
      if (lag >= min_lag && lag <= max_lag) best = std::max(best, r[lag]);
    }
    // Shortest-lag local peak close to the global best avoids octave-down
    // errors on strongly periodic frames.
    int chosen = -1;
    for (int lag = min_lag; lag <= max_lag; ++lag) {
      if (r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1] &&
          r[lag] >= 0.9 * best) {
        chosen = lag;
        break;
      }
    }
    if (chosen < 0 || r[chosen] < voicing_threshold) continue;

    double offset = 0.0;
    const double denom = r[chosen - 1] - 2.0 * r[chosen] + r[chosen + 1];
    if (std::abs(denom) > 1e-12) {
      offset = std::clamp(0.5 * (r[chosen - 1] - r[chosen + 1]) / denom, -0.5,
                          0.5);
    }
    const double f0 =
        std::clamp(rate / (chosen + offset), f0_min, f0_max);
    out.f0_hz[t] = f0;
    out.voiced[t] = true;
  }
  return out;
}

void save_frame_analysis(const FrameAnalysis& a, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  require(out.good(), ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out.precision(9);
  for (size_t i = 0; i < a.size(); ++i) {
    out << a.energy[i] << ' ' << a.f0_hz[i] << ' ' << (a.voiced[i] ? 1 : 0)
        << '\n';
  }
  require(out.good(), ErrorCode::kIo, "write to '" + path + "' failed");
}

FrameAnalysis load_frame_analysis(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::kIo, "cannot open '" + path + "'");
  FrameAnalysis a;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream is(line);
    double e = 0.0, f0 = 0.0;
    int v = 0;
    if (!(is >> e >> f0 >> v) || (v != 0 && v != 1) || ((f0 > 0.0) != (v == 1))) {
      fail(ErrorCode::kFormat,
           "'" + path + "' line " + std::to_string(lineno) + ": bad record");
    }
    a.energy.push_back(e);
    a.f0_hz.push_back(f0);
    a.voiced.push_back(v == 1);
  }
  return a;
}

}  // namespace gsa
