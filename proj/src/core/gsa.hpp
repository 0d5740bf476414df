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

// Gradual style adaptor.
//
// The local style encoder (LSE) maps one word-aligned mel segment to a
// d_style vector:
//   spectral:  affine(n_mels -> d) -> mish -> affine(d -> d)
//   temporal:  2 x [x + GLU(conv1d(x))]   (conv emits 2d channels)
//   attention: x + MHA(x)
//   pooling:   mean over frames
//
// The global style encoder (GSE) contextualises the N local styles with
// post-norm Transformer blocks (no positional encoding), mean-pools them and
// adds back the plain mean of the local styles. Without positions the result
// is invariant to the order of the segments.

#ifndef GSA_CORE_GSA_HPP_
#define GSA_CORE_GSA_HPP_

#include <string>
#include <vector>

#include "core/layers.hpp"
#include "core/segmentation.hpp"

namespace gsa {

enum class Ablation { kFull, kNoGse, kNoLse, kRandomSlices };

const char* ablation_name(Ablation a);
Ablation parse_ablation(const std::string& text);

struct GsaConfig {
  int d_style = 384;
  int n_mels = 80;
  int lse_kernel = 5;
  int lse_heads = 2;
  int gse_layers = 2;
  int gse_heads = 2;
  int ffn_hidden = 1536;
  double dropout_rate = 0.1;
  int min_segment_frames = kDefaultMinSegmentFrames;
  Ablation ablation = Ablation::kFull;

  void validate() const;
};

std::vector<ParamShape> gsa_param_shapes(const GsaConfig& cfg);

struct AttentionRecord {
  std::vector<nn::HeadWeights> layers;  // [layer][head] -> N x N
  std::vector<WordInterval> intervals;

  bool empty() const { return layers.empty(); }
  size_t num_segments() const { return intervals.size(); }
  // Query-averaged key weights of `layer` (-1 = last); head -1 averages the
  // heads. Empty records (no GSE) aggregate to uniform weights.
  RowVector aggregate(int layer = -1, int head = -1) const;
};

// Tab-separated "layer head query_idx key_idx weight" table.
std::string attention_table(const AttentionRecord& record);

struct LocalStyle {
  RowVector vector;
  WordInterval interval;
};

struct GlobalStyle {
  RowVector vector;
};

// ---- differentiable building blocks ---------------------------------------

ad::Var lse_forward(Binder& p, const ad::Var& segment, const GsaConfig& cfg,
                    const nn::Dropout& drop);

ad::Var mean_local_styles(const std::vector<ad::Var>& locals);

struct GseOutput {
  ad::Var global;  // 1 x d_style
  AttentionRecord record;
};

GseOutput gse_forward(Binder& p, const std::vector<ad::Var>& locals,
                      const GsaConfig& cfg,
                      const nn::AttentionOverride* override_weights,
                      const nn::Dropout& drop);

struct StyleEncoding {
  ad::Var global;
  std::vector<ad::Var> locals;
  AttentionRecord record;
};

// slice -> LSE per segment (order preserved) -> GSE.
StyleEncoding encode_style(Binder& p, const MelSpectrogram& mel,
                           const std::vector<WordInterval>& intervals,
                           const GsaConfig& cfg,
                           const nn::AttentionOverride* override_weights,
                           const nn::Dropout& drop);

// ---- evaluation-mode value API ---------------------------------------------

RowVector mean_local_styles(const std::vector<LocalStyle>& locals);

struct StyleResult {
  GlobalStyle global;
  std::vector<LocalStyle> locals;
  AttentionRecord record;
};

StyleResult encode_style(const ParamTable& params, const MelSpectrogram& mel,
                         const std::vector<WordInterval>& intervals,
                         const GsaConfig& cfg,
                         const nn::AttentionOverride* override_weights = nullptr);

LocalStyle lse_forward(const ParamTable& params, const StyleSegment& segment,
                       const GsaConfig& cfg);

std::pair<GlobalStyle, AttentionRecord> gse_forward(
    const ParamTable& params, const std::vector<LocalStyle>& locals,
    const GsaConfig& cfg,
    const nn::AttentionOverride* override_weights = nullptr);

}  // namespace gsa

#endif  // GSA_CORE_GSA_HPP_
