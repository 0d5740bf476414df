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

#include "core/gsa.hpp"

#include <sstream>

namespace gsa {

namespace {

std::string gse_prefix(int layer) {
  return "gse.layer" + std::to_string(layer);
}

}  // namespace

const char* ablation_name(Ablation a) {
  switch (a) {
    case Ablation::kFull: return "full";
    case Ablation::kNoGse: return "no_gse";
    case Ablation::kNoLse: return "no_lse";
    case Ablation::kRandomSlices: return "random_slices";
  }
  return "full";
}

Ablation parse_ablation(const std::string& text) {
  for (Ablation a : {Ablation::kFull, Ablation::kNoGse, Ablation::kNoLse,
                     Ablation::kRandomSlices}) {
    if (text == ablation_name(a)) return a;
  }
  fail(ErrorCode::kConfiguration,
       "unknown ablation '" + text +
           "' (expected full, no_gse, no_lse or random_slices)");
}

void GsaConfig::validate() const {
  auto bad = [](const std::string& msg) {
    fail(ErrorCode::kConfiguration, "gsa config: " + msg);
  };
  if (d_style < 1) bad("d_style must be positive");
  if (n_mels < 1) bad("n_mels must be positive");
  if (lse_heads < 1 || d_style % lse_heads != 0) {
    bad("d_style must be divisible by lse_heads");
  }
  if (gse_heads < 1 || d_style % gse_heads != 0) {
    bad("d_style must be divisible by gse_heads");
  }
  if (lse_kernel < 1 || lse_kernel % 2 == 0) bad("lse_kernel must be odd");
  if (gse_layers < 0) bad("gse_layers must be >= 0");
  if (ffn_hidden < 1) bad("ffn_hidden must be positive");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    bad("dropout_rate must lie in [0, 1)");
  }
  if (min_segment_frames < 1) bad("min_segment_frames must be >= 1");
}

std::vector<ParamShape> gsa_param_shapes(const GsaConfig& cfg) {
  cfg.validate();
  std::vector<ParamShape> shapes;
  const Eigen::Index d = cfg.d_style;
  if (cfg.ablation == Ablation::kNoLse) {
    nn::declare_linear(shapes, "lse.proj", cfg.n_mels, d);
  } else {
    nn::declare_linear(shapes, "lse.spectral.0", cfg.n_mels, d);
    nn::declare_linear(shapes, "lse.spectral.1", d, d);
    for (int i = 0; i < 2; ++i) {
      nn::declare_conv1d(shapes, "lse.conv." + std::to_string(i), d, 2 * d,
                         cfg.lse_kernel);
    }
    nn::declare_attention(shapes, "lse.attn", d);
  }
  if (cfg.ablation != Ablation::kNoGse) {
    for (int l = 0; l < cfg.gse_layers; ++l) {
      const std::string pre = gse_prefix(l);
      nn::declare_attention(shapes, pre + ".attn", d);
      nn::declare_layer_norm(shapes, pre + ".norm1", d);
      nn::declare_linear(shapes, pre + ".ffn.0", d, cfg.ffn_hidden);
      nn::declare_linear(shapes, pre + ".ffn.1", cfg.ffn_hidden, d);
      nn::declare_layer_norm(shapes, pre + ".norm2", d);
    }
  }
  return shapes;
}

RowVector AttentionRecord::aggregate(int layer, int head) const {
  const auto n = static_cast<Eigen::Index>(intervals.size());
  if (layers.empty()) {
    require(n >= 1, ErrorCode::kDegenerateInput, "empty attention record");
    return RowVector::Constant(n, 1.0 / static_cast<double>(n));
  }
  const int l = layer < 0 ? static_cast<int>(layers.size()) + layer : layer;
  require(l >= 0 && l < static_cast<int>(layers.size()), ErrorCode::kBounds,
          "attention layer " + std::to_string(layer) + " out of range");
  const nn::HeadWeights& heads = layers[l];
  require(head < static_cast<int>(heads.size()), ErrorCode::kBounds,
          "attention head " + std::to_string(head) + " out of range");
  RowVector acc = RowVector::Zero(heads.front().cols());
  if (head < 0) {
    for (const Matrix& m : heads) acc += m.colwise().mean();
    acc /= static_cast<double>(heads.size());
  } else {
    acc = heads[head].colwise().mean();
  }
  return acc;
}

std::string attention_table(const AttentionRecord& record) {
  std::ostringstream os;
  os.precision(9);
  os << "layer\thead\tquery_idx\tkey_idx\tweight\n";
  for (size_t l = 0; l < record.layers.size(); ++l) {
    for (size_t h = 0; h < record.layers[l].size(); ++h) {
      const Matrix& m = record.layers[l][h];
      for (Eigen::Index q = 0; q < m.rows(); ++q) {
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
          os << l << '\t' << h << '\t' << q << '\t' << k << '\t' << m(q, k)
             << '\n';
        }
      }
    }
  }
  return os.str();
}

ad::Var lse_forward(Binder& p, const ad::Var& segment, const GsaConfig& cfg,
                    const nn::Dropout& drop) {
  require(segment.rows() >= 1, ErrorCode::kDegenerateInput,
          "style segment has no frames");
  require(segment.cols() == cfg.n_mels, ErrorCode::kConfiguration,
          "segment has " + std::to_string(segment.cols()) +
              " mel bins, config expects " + std::to_string(cfg.n_mels));
  if (cfg.ablation == Ablation::kNoLse) {
    return nn::linear(p, ad::mean_rows(segment), "lse.proj");
  }
  ad::Var x = nn::linear(p, segment, "lse.spectral.0");
  x = nn::dropout(ad::mish(x), drop);
  x = nn::linear(p, x, "lse.spectral.1");

  const Eigen::Index d = cfg.d_style;
  for (int i = 0; i < 2; ++i) {
    ad::Var h = nn::conv1d(p, x, "lse.conv." + std::to_string(i),
                           cfg.lse_kernel);
    ad::Var glu = ad::mul(ad::cols(h, 0, d), ad::sigmoid(ad::cols(h, d, d)));
    x = ad::add(x, nn::dropout(glu, drop));
  }
  ad::Var a = nn::self_attention(p, x, "lse.attn", cfg.lse_heads, nullptr,
                                 nullptr, drop);
  x = ad::add(x, nn::dropout(a, drop));
  return ad::mean_rows(x);
}

ad::Var mean_local_styles(const std::vector<ad::Var>& locals) {
  require(!locals.empty(), ErrorCode::kDegenerateInput,
          "no local styles to average");
  return ad::mean_rows(ad::concat_rows(locals));
}

GseOutput gse_forward(Binder& p, const std::vector<ad::Var>& locals,
                      const GsaConfig& cfg,
                      const nn::AttentionOverride* override_weights,
                      const nn::Dropout& drop) {
  require(!locals.empty(), ErrorCode::kDegenerateInput,
          "global style encoder needs at least one local style");
  ad::Var stacked = ad::concat_rows(locals);
  ad::Var mean = ad::mean_rows(stacked);
  GseOutput out;
  if (cfg.ablation == Ablation::kNoGse) {
    out.global = mean;
    return out;
  }
  ad::Var x = stacked;
  for (int l = 0; l < cfg.gse_layers; ++l) {
    const std::string pre = gse_prefix(l);
    nn::HeadWeights heads;
    ad::Var a = nn::self_attention(p, x, pre + ".attn", cfg.gse_heads,
                                   override_weights, &heads, drop);
    out.record.layers.push_back(std::move(heads));
    x = nn::layer_norm(p, ad::add(x, nn::dropout(a, drop)), pre + ".norm1");
    ad::Var f = nn::linear(p, x, pre + ".ffn.0");
    f = nn::linear(p, nn::dropout(ad::gelu(f), drop), pre + ".ffn.1");
    x = nn::layer_norm(p, ad::add(x, nn::dropout(f, drop)), pre + ".norm2");
  }
  out.global = ad::add(ad::mean_rows(x), mean);
  return out;
}

StyleEncoding encode_style(Binder& p, const MelSpectrogram& mel,
                           const std::vector<WordInterval>& intervals,
                           const GsaConfig& cfg,
                           const nn::AttentionOverride* override_weights,
                           const nn::Dropout& drop) {
  require(!intervals.empty(), ErrorCode::kDegenerateInput,
          "style encoding needs at least one interval");
  const std::vector<StyleSegment> segments =
      slice_segments(mel, intervals, cfg.min_segment_frames);
  StyleEncoding enc;
  enc.locals.reserve(segments.size());
  for (const StyleSegment& seg : segments) {
    enc.locals.push_back(
        lse_forward(p, p.tape().constant(seg.mel), cfg, drop));
  }
  GseOutput g = gse_forward(p, enc.locals, cfg, override_weights, drop);
  enc.global = g.global;
  enc.record = std::move(g.record);
  enc.record.intervals = intervals;
  return enc;
}

RowVector mean_local_styles(const std::vector<LocalStyle>& locals) {
  require(!locals.empty(), ErrorCode::kDegenerateInput,
          "no local styles to average");
  RowVector acc = RowVector::Zero(locals.front().vector.cols());
  for (const LocalStyle& l : locals) acc += l.vector;
  return acc / static_cast<double>(locals.size());
}

StyleResult encode_style(const ParamTable& params, const MelSpectrogram& mel,
                         const std::vector<WordInterval>& intervals,
                         const GsaConfig& cfg,
                         const nn::AttentionOverride* override_weights) {
  ad::Tape tape;
  Binder p(tape, params, false);
  StyleEncoding enc =
      encode_style(p, mel, intervals, cfg, override_weights, nn::Dropout{});
  StyleResult r;
  r.global.vector = enc.global.value();
  for (size_t i = 0; i < enc.locals.size(); ++i) {
    r.locals.push_back(LocalStyle{enc.locals[i].value(), intervals[i]});
  }
  r.record = std::move(enc.record);
  return r;
}

LocalStyle lse_forward(const ParamTable& params, const StyleSegment& segment,
                       const GsaConfig& cfg) {
  ad::Tape tape;
  Binder p(tape, params, false);
  ad::Var v = lse_forward(p, tape.constant(segment.mel), cfg, nn::Dropout{});
  return LocalStyle{v.value(), segment.interval};
}

std::pair<GlobalStyle, AttentionRecord> gse_forward(
    const ParamTable& params, const std::vector<LocalStyle>& locals,
    const GsaConfig& cfg, const nn::AttentionOverride* override_weights) {
  ad::Tape tape;
  Binder p(tape, params, false);
  std::vector<ad::Var> vars;
  std::vector<WordInterval> intervals;
  for (const LocalStyle& l : locals) {
    vars.push_back(tape.constant(l.vector));
    intervals.push_back(l.interval);
  }
  GseOutput g = gse_forward(p, vars, cfg, override_weights, nn::Dropout{});
  g.record.intervals = std::move(intervals);
  return {GlobalStyle{g.global.value()}, std::move(g.record)};
}

}  // namespace gsa
