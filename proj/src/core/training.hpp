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

#ifndef GSA_CORE_TRAINING_HPP_
#define GSA_CORE_TRAINING_HPP_

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "core/config.hpp"

namespace gsa {

struct LossWeights {
  double mel = 1.0;
  double pitch = 0.1;
  double dur = 0.1;
};

struct LossReport {
  double mel_loss = 0.0;
  double pitch_loss = 0.0;
  double dur_loss = 0.0;
  double total = 0.0;
  int step = 0;
};

// Squared-error sums and element counts. Batches add their utterances' sums
// and divide once, so the loss does not depend on utterance order.
struct LossSums {
  double mel_se = 0.0;
  double pitch_se = 0.0;
  double dur_se = 0.0;
  long mel_count = 0;
  long pitch_count = 0;
  long dur_count = 0;

  void add(const Matrix& pred_mel, const Matrix& gt_mel,
           const std::vector<double>& pred_pitch,
           const std::vector<double>& gt_pitch,
           const std::vector<double>& pred_logdur,
           const std::vector<double>& gt_logdur,
           const std::vector<bool>& valid);
  LossReport report(const LossWeights& w) const;
};

// Mean squared errors: mel over all entries, pitch and duration over the
// symbols flagged valid (non-pad).
LossReport total_loss(const Matrix& pred_mel, const Matrix& gt_mel,
                      const std::vector<double>& pred_pitch,
                      const std::vector<double>& gt_pitch,
                      const std::vector<double>& pred_logdur,
                      const std::vector<double>& gt_logdur,
                      const std::vector<bool>& valid, const LossWeights& w);

double noam_lr(int step, int d_model, int warmup, double scale);

struct AdamMoments {
  ParamTable m;
  ParamTable v;
};

AdamMoments zero_moments(const ParamTable& params);

// Bias-corrected Adam. Non-finite gradients raise a training error naming the
// parameter before anything is modified.
void adam_step(ParamTable& params, const ParamTable& grads,
               AdamMoments& moments, int t, const TrainConfig& cfg, double lr);

// Rescales `grads` to global L2 norm `max_norm` when larger; returns the
// norm before clipping. max_norm <= 0 disables clipping.
double clip_grad_norm(ParamTable& grads, double max_norm);

// ---- data -----------------------------------------------------------------

struct ManifestEntry {
  std::string id;
  std::string wav_path;
  std::string transcript;
  std::string duration_path;
  std::string timestamp_path;
};

// "wav | transcript | durations | timestamps" per line; relative paths are
// resolved against the manifest's directory. Blank lines and '#' comments are
// skipped.
std::vector<ManifestEntry> load_manifest(const std::string& path);

std::vector<int> load_durations(const std::string& path);

struct PreparedUtterance {
  std::string id;
  std::string transcript;
  std::vector<int> symbols;
  std::vector<int> durations;
  AudioClip audio;  // resampled and loudness normalised
  MelSpectrogram mel;
  FrameAnalysis analysis;
  std::vector<WordInterval> intervals;
  std::vector<double> log_f0;  // per symbol; NaN when no voiced frame
  std::vector<double> pitch;   // normalised targets, 0 when unvoiced or pad
};

// resample -> loudness -> mel -> frame analysis -> durations/timestamps.
// Feature mismatches raise data errors naming the entry.
PreparedUtterance prepare_utterance(const ManifestEntry& entry,
                                    const RunConfig& cfg);

struct PitchStats {
  double mean = 0.0;
  double std = 1.0;
};

// Mean and standard deviation of per-symbol log-F0 over voiced symbols.
PitchStats pitch_stats(const std::vector<PreparedUtterance>& data);
void apply_pitch_targets(std::vector<PreparedUtterance>& data,
                         const PitchStats& stats);

// Style intervals for an utterance: its word intervals, or random slices in
// the random_slices ablation (seeded).
std::vector<WordInterval> style_intervals(const PreparedUtterance& utt,
                                          const RunConfig& cfg,
                                          uint64_t seed);

struct ForwardResult {
  AcousticOutput acoustic;
  StyleEncoding style;
};

// Self-referenced, teacher-forced forward pass. A null `rng` disables
// dropout.
ForwardResult forward_utterance(Binder& p, const PreparedUtterance& utt,
                                const RunConfig& cfg, std::mt19937_64* rng,
                                uint64_t style_seed);

// ---- loop -------------------------------------------------------------------

struct TrainState {
  ParamTable params;
  AdamMoments moments;
  int step = 0;
  PitchStats pitch;
};

TrainState init_train_state(const RunConfig& cfg);

struct TrainCallbacks {
  std::function<void(const LossReport&)> on_step;
  std::function<void(const TrainState&)> on_checkpoint;
};

struct TrainResult {
  TrainState state;
  std::vector<LossReport> losses;
};

// Steps from `start` (fresh initialisation when null) until the step counter
// reaches cfg.train.max_steps. `data` must already carry pitch targets.
TrainResult train(const std::vector<PreparedUtterance>& data,
                  const RunConfig& cfg, const TrainCallbacks& callbacks = {},
                  const TrainState* start = nullptr);

// Mean absolute error per mel entry over the corpus, evaluation mode,
// teacher-forced, self-referenced.
double teacher_forced_l1(const ParamTable& params,
                         const std::vector<PreparedUtterance>& data,
                         const RunConfig& cfg);

}  // namespace gsa

#endif  // GSA_CORE_TRAINING_HPP_
