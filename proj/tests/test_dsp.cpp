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
#include <random>

#include "doctest.h"
#include "core/dsp.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace gsa;

namespace {

AudioClip clip_of(std::vector<double> x, int rate) {
  AudioClip c;
  c.samples = std::move(x);
  c.sample_rate_hz = rate;
  return c;
}

// Peak bin of a direct DFT over the middle of the signal, in Hz.
double peak_hz(const std::vector<double>& x, int rate, size_t n = 4096) {
  const size_t start = (x.size() - n) / 2;
  std::vector<double> frame(x.begin() + start, x.begin() + start + n);
  const double pi = std::acos(-1.0);
  for (size_t i = 0; i < n; ++i) {
    frame[i] *= 0.5 - 0.5 * std::cos(2.0 * pi * i / (n - 1));
  }
  auto mag = oracle::dft_magnitude(frame);
  const size_t k = std::max_element(mag.begin(), mag.end()) - mag.begin();
  return static_cast<double>(k) * rate / n;
}

}  // namespace

TEST_SUITE("dsp") {

TEST_CASE("wav loading scales pcm16 and averages channels") {
  testutil::TempDir dir("dsp");
  testutil::write_pcm16(dir.file("zeros.wav"), std::vector<int16_t>(22050, 0), 1,
                        22050);
  AudioClip z = load_wav(dir.file("zeros.wav"));
  CHECK(z.sample_rate_hz == 22050);
  REQUIRE(z.samples.size() == 22050);
  CHECK(std::all_of(z.samples.begin(), z.samples.end(),
                    [](double v) { return v == 0.0; }));

  std::vector<int16_t> stereo;
  for (int i = 0; i < 100; ++i) {
    const int16_t v = static_cast<int16_t>((i * 397) % 20000 - 10000);
    stereo.push_back(v);
    stereo.push_back(static_cast<int16_t>(-v));
  }
  testutil::write_pcm16(dir.file("stereo.wav"), stereo, 2, 16000);
  AudioClip s = load_wav(dir.file("stereo.wav"));
  CHECK(s.samples.size() == 100);
  for (double v : s.samples) CHECK(v == 0.0);

  testutil::write_pcm16(dir.file("half.wav"), {16384}, 1, 8000);
  CHECK(load_wav(dir.file("half.wav")).samples[0] ==
        doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("wav errors") {
  testutil::TempDir dir("dsp");
  CHECK_THROWS_AS(load_wav(dir.file("missing.wav")), Error);
  testutil::write_file(dir.file("bad.wav"), "RIFF0000WAVEjunk");
  CHECK_THROWS_AS(load_wav(dir.file("bad.wav")), Error);
}

TEST_CASE("wav save round trip") {
  testutil::TempDir dir("dsp");
  AudioClip c = clip_of(testutil::sine(300, 0.1, 16000, 0.5), 16000);
  save_wav(c, dir.file("a.wav"));
  AudioClip r = load_wav(dir.file("a.wav"));
  REQUIRE(r.samples.size() == c.samples.size());
  for (size_t i = 0; i < c.samples.size(); ++i) {
    CHECK(std::abs(r.samples[i] - c.samples[i]) <= 1.0 / 32768.0 + 1e-12);
  }
}

TEST_CASE("resampling") {
  AudioClip c = clip_of(testutil::sine(440, 0.3, 22050, 0.3), 22050);
  AudioClip same = resample(c, 22050);
  CHECK(same.samples == c.samples);

  AudioClip dc = resample(clip_of(std::vector<double>(8000, 0.25), 16000), 22050);
  CHECK(dc.sample_rate_hz == 22050);
  for (size_t i = 200; i + 200 < dc.samples.size(); ++i) {
    CHECK(dc.samples[i] == doctest::Approx(0.25).epsilon(1e-3));
  }

  AudioClip hi = clip_of(testutil::sine(440, 0.5, 44100, 0.5), 44100);
  AudioClip lo = resample(hi, 22050);
  CHECK(lo.samples.size() == doctest::Approx(hi.samples.size() / 2.0).epsilon(0.01));
  CHECK(std::abs(peak_hz(lo.samples, 22050) - peak_hz(hi.samples, 44100)) < 11.0);
  CHECK(std::abs(peak_hz(lo.samples, 22050) - 440.0) < 6.0);
}

TEST_CASE("loudness normalisation") {
  const double amp27 = testutil::db_to_amp(-27.0) * std::sqrt(2.0);
  AudioClip at27 = clip_of(testutil::sine(200, 0.5, 16000, amp27), 16000);
  auto r0 = normalize_loudness(at27, -27.0);
  CHECK(r0.gain == doctest::Approx(1.0).epsilon(1e-5));
  for (size_t i = 0; i < at27.samples.size(); ++i) {
    CHECK(std::abs(r0.clip.samples[i] - at27.samples[i]) <= 1e-6);
  }

  AudioClip at20 = clip_of(testutil::sine(200, 0.5, 16000,
                                          testutil::db_to_amp(-20.0) * std::sqrt(2.0)),
                           16000);
  CHECK(rms_dbfs(at20) == doctest::Approx(-20.0).epsilon(1e-3));
  auto r1 = normalize_loudness(at20, -27.0);
  CHECK(r1.gain == doctest::Approx(std::pow(10.0, -7.0 / 20.0)).epsilon(1e-4));

  std::vector<double> sq(16000);
  for (size_t i = 0; i < sq.size(); ++i) sq[i] = (i / 40) % 2 ? 1.0 : -1.0;
  auto r2 = normalize_loudness(clip_of(sq, 16000), -27.0);
  CHECK(std::abs(rms_dbfs(r2.clip) + 27.0) <= 0.1);
  CHECK(r2.clipped_samples == 0);

  CHECK_THROWS_AS(normalize_loudness(clip_of(std::vector<double>(100, 0.0), 16000), -27.0),
                  Error);
}

TEST_CASE("mel filterbank and spectrogram") {
  MelConfig cfg;
  Matrix fb = mel_filterbank(cfg);
  CHECK(fb.rows() == cfg.n_mels);
  CHECK(fb.cols() == cfg.n_bins());
  for (Eigen::Index r = 0; r < fb.rows(); ++r) {
    CHECK(fb.row(r).minCoeff() >= 0.0);
    CHECK(fb.row(r).maxCoeff() > 0.0);
  }

  AudioClip silence = clip_of(std::vector<double>(22050, 0.0), 22050);
  MelSpectrogram s = mel_spectrogram(silence, cfg);
  CHECK(s.num_frames() == cfg.num_frames(22050));
  CHECK((s.frames.array() == std::log(cfg.log_floor)).all());

  AudioClip tone = clip_of(testutil::sine(1000, 0.5, 22050, 0.5), 22050);
  MelSpectrogram m = mel_spectrogram(tone, cfg);
  auto centers = mel_center_frequencies(cfg);
  size_t nearest = 0;
  for (size_t i = 0; i < centers.size(); ++i) {
    if (std::abs(centers[i] - 1000.0) < std::abs(centers[nearest] - 1000.0)) nearest = i;
  }
  const Eigen::Index mid = m.num_frames() / 2;
  Eigen::Index arg = 0;
  m.frames.row(mid).maxCoeff(&arg);
  CHECK(std::abs(static_cast<long>(arg) - static_cast<long>(nearest)) <= 1);

  MelSpectrogram again = mel_spectrogram(tone, cfg);
  CHECK((again.frames.array() == m.frames.array()).all());
}

TEST_CASE("stft matches a direct dft on an interior frame") {
  MelConfig cfg;
  cfg.n_fft = 64;
  cfg.win_length = 64;
  cfg.hop_length = 16;
  cfg.n_mels = 8;
  cfg.sample_rate_hz = 8000;
  cfg.f_max_hz = 4000;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 0.3);
  std::vector<double> x(400);
  for (double& v : x) v = n(rng);
  Matrix mag = stft_magnitude(x, cfg);
  // Frame f is centred on sample f*hop; frame 5 covers [80-32, 80+32).
  const int f = 5;
  const double pi = std::acos(-1.0);
  std::vector<double> frame(64);
  for (int i = 0; i < 64; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * pi * i / 64.0);
    frame[i] = x[f * 16 - 32 + i] * w;
  }
  auto ref = oracle::dft_magnitude(frame);
  for (int k = 0; k <= 32; ++k) CHECK(mag(f, k) == doctest::Approx(ref[k]).epsilon(1e-9));
}

TEST_CASE("mel file round trip and config check") {
  testutil::TempDir dir("dsp");
  MelConfig cfg;
  cfg.n_mels = 20;
  AudioClip tone = clip_of(testutil::sine(300, 0.2, 22050, 0.5), 22050);
  MelSpectrogram m = mel_spectrogram(tone, cfg);
  save_mel(m, dir.file("a.mel"));
  MelSpectrogram r = load_mel(dir.file("a.mel"), cfg);
  CHECK(r.frames.rows() == m.frames.rows());
  CHECK((r.frames - m.frames).cwiseAbs().maxCoeff() < 1e-5);
  MelConfig other = cfg;
  other.n_mels = 40;
  CHECK_THROWS_AS(load_mel(dir.file("a.mel"), other), Error);
}

TEST_CASE("voicing analysis") {
  MelConfig cfg;
  AudioClip silence = clip_of(std::vector<double>(11025, 0.0), 22050);
  FrameAnalysis s = analyze_frames(silence, cfg, 60, 400, 0.3);
  for (size_t i = 0; i < s.size(); ++i) {
    CHECK_FALSE(s.voiced[i]);
    CHECK(s.f0_hz[i] == 0.0);
  }

  const double amp = testutil::db_to_amp(-20.0) * std::sqrt(2.0);
  AudioClip tone = clip_of(testutil::sine(220, 1.0, 22050, amp), 22050);
  FrameAnalysis t = analyze_frames(tone, cfg, 60, 400, 0.3);
  int interior = 0, good = 0;
  for (size_t i = 4; i + 4 < t.size(); ++i) {
    ++interior;
    if (t.voiced[i] && std::abs(t.f0_hz[i] - 220.0) <= 5.0) ++good;
  }
  CHECK(good >= 0.95 * interior);

  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, testutil::db_to_amp(-20.0));
  std::vector<double> noise(22050);
  for (double& v : noise) v = n(rng);
  FrameAnalysis w = analyze_frames(clip_of(noise, 22050), cfg, 60, 400, 0.3);
  CHECK(w.voiced_ratio() <= 0.20);
}

TEST_CASE("frame analysis sidecar round trip") {
  testutil::TempDir dir("dsp");
  MelConfig cfg;
  AudioClip tone = clip_of(testutil::sine(220, 0.3, 22050, 0.3), 22050);
  FrameAnalysis a = analyze_frames(tone, cfg, 60, 400, 0.3);
  save_frame_analysis(a, dir.file("a.txt"));
  FrameAnalysis b = load_frame_analysis(dir.file("a.txt"));
  CHECK(b.voiced == a.voiced);
  REQUIRE(b.size() == a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(b.f0_hz[i] == doctest::Approx(a.f0_hz[i]));
  }
}

TEST_CASE("griffin-lim") {
  MelConfig cfg;
  MelSpectrogram floor;
  floor.config = cfg;
  floor.frames = Matrix::Constant(40, cfg.n_mels, std::log(cfg.log_floor));
  CHECK(rms(griffin_lim_invert(floor, 5).audio.samples) < 1e-3);

  AudioClip tone = clip_of(testutil::sine(440, 1.0, 22050, 0.5), 22050);
  MelSpectrogram m = mel_spectrogram(tone, cfg);
  GriffinLimResult r = griffin_lim_invert(m, 60);
  CHECK(r.audio.sample_rate_hz == 22050);
  CHECK(std::abs(peak_hz(r.audio.samples, 22050, 8192) - 440.0) <= 20.0);
  REQUIRE(r.convergence.size() == 60);
  CHECK(r.convergence.back() <= r.convergence.front());
}

}  // TEST_SUITE
