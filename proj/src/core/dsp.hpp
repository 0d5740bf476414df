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

// Audio I/O, resampling, loudness, mel features, voicing analysis and a
// Griffin-Lim inverter. Everything here is a pure function of its inputs.

#ifndef GSA_CORE_DSP_HPP_
#define GSA_CORE_DSP_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "core/common.hpp"

namespace gsa {

struct AudioClip {
  std::vector<double> samples;
  int sample_rate_hz = 0;

  double duration_sec() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

// RIFF/WAVE, PCM16 or float32, any channel count (averaged to mono).
AudioClip load_wav(const std::string& path);
// PCM16 mono.
void save_wav(const AudioClip& clip, const std::string& path);

// Kaiser-windowed sinc, polyphase.
AudioClip resample(const AudioClip& clip, int target_hz);

double rms(const std::vector<double>& samples);
double rms_dbfs(const AudioClip& clip);

struct LoudnessResult {
  AudioClip clip;
  double gain = 1.0;
  size_t clipped_samples = 0;
};
// Plain RMS dBFS normalisation; samples beyond [-1, 1] are clipped and
// counted.
LoudnessResult normalize_loudness(const AudioClip& clip, double target_dbfs);

struct MelConfig {
  int sample_rate_hz = 22050;
  int n_fft = 1024;
  int hop_length = 256;
  int win_length = 1024;
  int n_mels = 80;
  double f_min_hz = 0.0;
  double f_max_hz = 8000.0;
  double log_floor = 1e-5;

  void validate() const;
  int n_bins() const { return n_fft / 2 + 1; }
  // Frames produced for `num_samples` input samples (centre padding).
  int num_frames(size_t num_samples) const;
};

struct MelSpectrogram {
  Matrix frames;  // T x n_mels, natural-log energies
  MelConfig config;

  int num_frames() const { return static_cast<int>(frames.rows()); }
  int n_mels() const { return static_cast<int>(frames.cols()); }
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// n_mels x n_bins, Slaney mel scale with area-normalised triangles.
Matrix mel_filterbank(const MelConfig& cfg);
std::vector<double> mel_center_frequencies(const MelConfig& cfg);

// |STFT| with Hann window and reflect padding of win_length/2: T x n_bins.
Matrix stft_magnitude(const std::vector<double>& samples, const MelConfig& cfg);

MelSpectrogram mel_spectrogram(const AudioClip& clip, const MelConfig& cfg);

// "GSAMEL1" little-endian binary.
void save_mel(const MelSpectrogram& mel, const std::string& path);
MelSpectrogram load_mel(const std::string& path, const MelConfig& cfg);

struct VoicingConfig {
  double f0_min_hz = 60.0;
  double f0_max_hz = 400.0;
  double threshold = 0.3;
};

constexpr double kVoicingEnergyGate = 1e-4;

struct FrameAnalysis {
  std::vector<double> energy;
  std::vector<double> f0_hz;
  std::vector<bool> voiced;

  size_t size() const { return energy.size(); }
  double voiced_ratio() const;
};

FrameAnalysis analyze_frames(const AudioClip& clip, const MelConfig& cfg,
                             double f0_min, double f0_max,
                             double voicing_threshold);

// Text sidecar: one "energy f0 voiced" line per frame.
void save_frame_analysis(const FrameAnalysis& a, const std::string& path);
FrameAnalysis load_frame_analysis(const std::string& path);

// Non-negative least squares fit of linear magnitudes to mel magnitudes by
// projected gradient: rows of the result are T x n_bins.
Matrix mel_to_linear(const Matrix& mel_magnitude, const Matrix& filterbank,
                     int steps);

struct GriffinLimResult {
  AudioClip audio;
  // Spectral convergence || |STFT(x_i)| - S || / ||S|| after each iteration.
  std::vector<double> convergence;
};

GriffinLimResult griffin_lim_invert(const MelSpectrogram& mel, int n_iters,
                                    uint64_t seed = 0, int nnls_steps = 50);

}  // namespace gsa

#endif  // GSA_CORE_DSP_HPP_
