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

// Word-level style segmentation of reference mels.
//
// Word intervals come either from externally produced word timestamps or from
// a monotone DTW path through an ASR cross-attention matrix (tokens x frames).
// A random-slice segmenter provides the ablation baseline.

#ifndef GSA_CORE_SEGMENTATION_HPP_
#define GSA_CORE_SEGMENTATION_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/dsp.hpp"

namespace gsa {

enum class PosTag { kNoun, kVerb, kAdj, kEtc };

constexpr PosTag kAllPosTags[] = {PosTag::kNoun, PosTag::kVerb, PosTag::kAdj,
                                  PosTag::kEtc};

const char* pos_tag_name(PosTag tag);
// Accepts NOUN/VERB/ADJ/ETC (case-insensitive); anything else is an error.
PosTag parse_pos_tag(const std::string& text);

struct CrossAttentionMatrix {
  Matrix weights;                // N tokens x T frames, entries >= 0
  std::vector<int> token_to_word;  // non-decreasing, length N
  std::vector<std::string> words;

  void validate() const;
};

// "GSAATT1" little-endian binary.
void save_cross_attention(const CrossAttentionMatrix& attn,
                          const std::string& path);
CrossAttentionMatrix load_cross_attention(const std::string& path);

struct AlignmentPath {
  std::vector<std::pair<int, int>> steps;  // (token, frame)
};

struct WordInterval {
  int word_index = 0;
  int start_frame = 0;
  int end_frame = 0;  // exclusive
  std::optional<PosTag> pos_tag;
  std::string word;

  int length() const { return end_frame - start_frame; }
  bool operator==(const WordInterval&) const = default;
};

struct StyleSegment {
  Matrix mel;  // L x M
  WordInterval interval;
  int padded_frames = 0;  // trailing edge-replicated rows

  // Rows copied from the source mel, without padding.
  Matrix core() const { return mel.topRows(mel.rows() - padded_frames); }
};

constexpr int kDefaultMinSegmentFrames = 8;
constexpr int kDefaultRandomSliceFrames = 40;

// Minimum-cost monotone path with cost(i, j) = -weights(i, j) and moves
// (i+1, j+1), (i, j+1), (i+1, j); ties prefer diagonal, then frame advance,
// then token advance.
AlignmentPath dtw_align(const CrossAttentionMatrix& attn);
double path_cost(const AlignmentPath& path, const Matrix& weights);
void validate_path(const AlignmentPath& path, Eigen::Index tokens,
                   Eigen::Index frames);

struct IntervalResult {
  std::vector<WordInterval> intervals;
  // Words whose frames were all claimed by earlier words.
  int dropped_words = 0;
};

// Each frame belongs to the earliest word that visits it; words are unions of
// their tokens' frame spans.
IntervalResult intervals_from_path(const AlignmentPath& path,
                                   const CrossAttentionMatrix& attn);

std::vector<StyleSegment> slice_segments(
    const MelSpectrogram& mel, const std::vector<WordInterval>& intervals,
    int min_segment_frames = kDefaultMinSegmentFrames);

struct RandomSliceResult {
  std::vector<StyleSegment> segments;
  // Set when the mel is shorter than min_frames: one whole-mel segment.
  bool fallback = false;
};

RandomSliceResult random_slice_segments(
    const MelSpectrogram& mel, int min_frames = kDefaultRandomSliceFrames,
    uint64_t seed = 0);

struct TimestampResult {
  std::vector<WordInterval> intervals;
  int dropped_empty = 0;
};

// Tab-separated "word start_sec end_sec [pos_tag]" records.
TimestampResult load_timestamps(const std::string& path,
                                const MelSpectrogram& mel);
TimestampResult parse_timestamps(const std::string& text,
                                 const MelConfig& cfg, int num_frames,
                                 const std::string& source = "<memory>");
void save_timestamps(const std::vector<WordInterval>& intervals,
                     const MelConfig& cfg, const std::string& path);

}  // namespace gsa

#endif  // GSA_CORE_SEGMENTATION_HPP_
