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

// End-to-end commands behind the command-line tool. Each returns the text it
// would print; progress goes to the optional log sink.

#ifndef GSA_CORE_PIPELINE_HPP_
#define GSA_CORE_PIPELINE_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/checkpoint.hpp"
#include "core/eval.hpp"

namespace gsa {

using LogFn = std::function<void(const std::string&)>;

struct Reference {
  AudioClip audio;  // resampled and loudness normalised
  MelSpectrogram mel;
};

Reference load_reference(const std::string& wav_path, const RunConfig& cfg);

// Resample, normalise, extract mel and frame analysis per manifest entry.
// Writes <id>.mel, <id>.frames.txt, config.ini and summary.txt. Entry
// failures are logged and skipped; it is an error when every entry fails.
std::string cmd_preprocess(const RunConfig& cfg, const std::string& manifest,
                           const std::string& outdir, const LogFn& log = {});

struct SegmentOptions {
  std::string mode;        // timestamps | attention | random
  std::string audio;       // reference wav
  std::string mel;         // or a GSAMEL1 file
  std::string timestamps;
  std::string attention;   // GSAATT1 file
  uint64_t seed = 0;
  int min_frames = 0;      // random mode; 0 takes the config value
  std::string plot;        // PNG path
};

std::string cmd_segment(const RunConfig& cfg, const SegmentOptions& opts);

// Writes model.ckpt (plus periodic ckpt_<step>.ckpt), loss.tsv and
// config.ini.
std::string cmd_train(const RunConfig& cfg, const std::string& manifest,
                      const std::string& outdir, const LogFn& log = {});

// "word=weight,word#2=weight"; #k picks the k-th occurrence (1-based).
struct WordWeight {
  std::string word;
  int occurrence = 1;
  double weight = 0.0;
};
std::vector<WordWeight> parse_word_overrides(const std::string& spec);

// Replacement vector: the aggregated baseline weights with the named
// segments set to their requested weights. Unknown words raise a usage
// error listing the available ones.
nn::AttentionOverride word_override(const std::vector<WordInterval>& intervals,
                                    const RowVector& baseline,
                                    const std::vector<WordWeight>& words);

struct StyleReference {
  std::string audio;
  std::string timestamps;
  std::string attention;
  uint64_t seed = 0;  // random_slices ablation
};

struct SynthOptions {
  std::string text;
  StyleReference reference;
  std::string out_mel;
  std::string out_wav;   // Griffin-Lim audio when set
  std::string overrides;
};

std::string cmd_synth(const Checkpoint& ckpt, const SynthOptions& opts);

struct EvalOptions {
  std::string manifest;
  std::string outdir;
  std::string hyp_dir;          // <id>.txt, <id>.base.txt, <id>.override.txt
  std::string other_reference;  // wav of a different speaker
  std::vector<PosTag> pos_override;
  bool plot = false;
};

std::string cmd_eval(const Checkpoint& ckpt, const EvalOptions& opts,
                     const LogFn& log = {});

struct InspectOptions {
  StyleReference reference;
  std::string outdir;
  std::string overrides;
  bool plot = false;
};

std::string cmd_inspect(const Checkpoint& ckpt, const InspectOptions& opts);

std::string cmd_embed(const RunConfig& cfg, const std::string& wav,
                      const std::string& out);

// Toy corpus plus a matching config.ini.
std::string cmd_make_toy(const std::string& outdir, uint64_t seed);

}  // namespace gsa

#endif  // GSA_CORE_PIPELINE_HPP_
