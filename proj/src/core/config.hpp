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

#ifndef GSA_CORE_CONFIG_HPP_
#define GSA_CORE_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/acoustic.hpp"
#include "core/gsa.hpp"

namespace gsa {

struct TrainConfig {
  double lr_scale = 1.0;
  int warmup_steps = 4000;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double adam_eps = 1e-9;
  int batch_size = 8;
  int max_steps = 1000;
  uint64_t seed = 1234;
  double w_mel = 1.0;
  double w_pitch = 0.1;
  double w_dur = 0.1;
  double grad_clip = 1.0;  // global L2 norm; <= 0 disables
  int checkpoint_every = 0;  // 0: final checkpoint only
  int log_every = 100;

  void validate() const;
};

struct EvalConfig {
  int agg_layer = -1;  // -1: last GSE layer
  int agg_head = -1;   // -1: mean over heads
  int griffin_lim_iters = 60;
};

// Merged view of every component configuration.
struct RunConfig {
  MelConfig mel;
  VoicingConfig voicing;
  double loudness_dbfs = -27.0;
  GsaConfig gsa;
  int random_slice_frames = kDefaultRandomSliceFrames;
  AcousticConfig acoustic;
  TrainConfig train;
  EvalConfig eval;

  // Copies shared dimensions (n_mels, d_style) into the component configs
  // and validates everything.
  void resolve();

  // Flat "section.key" -> value view, in emission order.
  std::vector<std::pair<std::string, std::string>> entries() const;
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;

  std::string to_text() const;
  static RunConfig from_text(const std::string& text,
                             const std::string& source = "<memory>");
  static RunConfig load(const std::string& path);
  void save(const std::string& path) const;

  bool operator==(const RunConfig& other) const {
    return entries() == other.entries();
  }
};

// Small configuration for desk-scale experiments and tests.
RunConfig toy_run_config();

std::vector<ParamShape> model_param_shapes(const RunConfig& cfg);

std::string format_double(double v);

}  // namespace gsa

#endif  // GSA_CORE_CONFIG_HPP_
