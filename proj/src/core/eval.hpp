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

// Objective metrics and attention analytics.

#ifndef GSA_CORE_EVAL_HPP_
#define GSA_CORE_EVAL_HPP_

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/gsa.hpp"
#include "core/training.hpp"

namespace gsa {

struct EditCounts {
  int distance = 0;
  int substitutions = 0;
  int insertions = 0;
  int deletions = 0;
};

// Unit-cost Levenshtein distance. Counts come from a backtrace that prefers
// substitution (or match), then deletion, then insertion.
EditCounts edit_distance(const std::vector<std::string>& ref,
                         const std::vector<std::string>& hyp);
EditCounts edit_distance(const std::string& ref, const std::string& hyp);

// Lower-case, punctuation to spaces, collapsed and trimmed whitespace.
std::string normalize_text(const std::string& text);
std::vector<std::string> split_words(const std::string& text);

// Percentages. An empty normalised reference is a degenerate-input error.
double wer(const std::string& ref, const std::string& hyp);
double cer(const std::string& ref, const std::string& hyp);

struct SpeakerEmbedding {
  RowVector vector;  // unit L2 norm
  std::string embedder_id;
};

constexpr char kStatsEmbedderId[] = "stats-v1";
constexpr char kExternalEmbedderId[] = "external";

SpeakerEmbedding make_embedding(const RowVector& raw, const std::string& id);
double secs(const SpeakerEmbedding& a, const SpeakerEmbedding& b);

// Per-band mel mean and std, voiced log-F0 mean and std, frame-energy mean
// and std; L2-normalised. Clips shorter than 0.5 s are rejected.
SpeakerEmbedding embed_speaker(const AudioClip& clip, const MelConfig& cfg,
                               const VoicingConfig& voicing = {});

// "GSAEMB1": magic, u32 dim, float32 vector.
void save_embedding(const SpeakerEmbedding& e, const std::string& path);
SpeakerEmbedding load_embedding(const std::string& path);

constexpr size_t kNumPosTags = 4;

// Untagged intervals count as ETC.
PosTag effective_tag(const WordInterval& iv);

struct VoicedFrameRatio {
  std::array<long, kNumPosTags> voiced{};
  std::array<long, kNumPosTags> total{};

  void add(const FrameAnalysis& analysis,
           const std::vector<WordInterval>& intervals);
  // Undefined (nullopt) for tags that never occurred.
  std::optional<double> ratio(PosTag tag) const;
};

VoicedFrameRatio voiced_frame_ratio(const FrameAnalysis& analysis,
                                    const std::vector<WordInterval>& intervals);

// Index of the largest entry; the lowest index wins ties.
int argmax_lowest(const RowVector& v);

struct PosAttentionStats {
  std::array<long, kNumPosTags> counts{};
  long utterances = 0;

  void add(PosTag tag) {
    ++counts[static_cast<size_t>(tag)];
    ++utterances;
  }
  double fraction(PosTag tag) const;
};

// Per record: aggregate (layer, head), pick the segment with the largest
// weight and tally its tag.
PosAttentionStats pos_attention_stats(const std::vector<AttentionRecord>& records,
                                      int layer = -1, int head = -1);

// Key mask keeping the segments whose tag is in `targets`. Returns nullopt
// when no segment matches.
std::optional<nn::AttentionOverride> pos_override(
    const std::vector<WordInterval>& intervals,
    const std::vector<PosTag>& targets);

struct OverrideRow {
  std::string id;
  bool fallback = false;  // no segment carried a target tag
  std::optional<double> wer_base;
  std::optional<double> wer_override;
  std::optional<double> delta_wer;
  std::optional<double> secs_base;
  std::optional<double> secs_override;
  double mel_max_abs_diff = 0.0;
};

struct OverrideExperiment {
  std::vector<PosTag> targets;
  std::vector<OverrideRow> rows;
  int fallbacks = 0;
};

// Hypothesis transcript of utterance `id` under condition "base" or
// "override", when one was supplied.
using HypothesisLookup = std::function<std::optional<std::string>(
    const std::string& id, const std::string& condition)>;

// Synthesises every utterance's transcript from its own reference with and
// without the POS key mask. Without hypothesis transcripts, bit-identical
// outputs give a WER delta of 0 and other rows leave it undefined.
OverrideExperiment pos_override_experiment(
    const ParamTable& params, const RunConfig& cfg,
    const std::vector<PreparedUtterance>& data,
    const std::vector<PosTag>& targets, const HypothesisLookup& hyps = {});

// "key=value" lines and tab-separated tables.
std::string format_pos_stats(const PosAttentionStats& s);
std::string format_voiced_ratio(const VoicedFrameRatio& r);
std::string format_override_experiment(const OverrideExperiment& e);

}  // namespace gsa

#endif  // GSA_CORE_EVAL_HPP_
