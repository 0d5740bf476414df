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

#include "core/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "core/binio.hpp"

namespace gsa {

namespace {

template <typename Seq>
EditCounts levenshtein(const Seq& ref, const Seq& hyp) {
  const size_t n = ref.size(), m = hyp.size();
  std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1, 0));
  for (size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int>(i);
  for (size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      const int sub = d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      d[i][j] = std::min({sub, d[i - 1][j] + 1, d[i][j - 1] + 1});
    }
  }
  EditCounts c;
  c.distance = d[n][m];
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (d[i][j] == d[i - 1][j - 1] + (same ? 0 : 1)) {
        if (!same) ++c.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      ++c.deletions;
      --i;
    } else {
      ++c.insertions;
      --j;
    }
  }
  return c;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v, double mean) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size()));
}

std::string opt(const std::optional<double>& v) {
  if (!v) return "n/a";
  std::ostringstream os;
  os.precision(6);
  os << *v;
  return os.str();
}

}  // namespace

EditCounts edit_distance(const std::vector<std::string>& ref,
                         const std::vector<std::string>& hyp) {
  return levenshtein(ref, hyp);
}

EditCounts edit_distance(const std::string& ref, const std::string& hyp) {
  return levenshtein(ref, hyp);
}

std::string normalize_text(const std::string& text) {
  std::string out;
  bool pending_space = false;
  for (unsigned char ch : text) {
    if (std::isspace(ch) || std::ispunct(ch)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(ch)));
  }
  return out;
}

std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> words;
  std::istringstream in(text);
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

double wer(const std::string& ref, const std::string& hyp) {
  const auto r = split_words(normalize_text(ref));
  require(!r.empty(), ErrorCode::kDegenerateInput,
          "WER: reference is empty after normalisation");
  const auto h = split_words(normalize_text(hyp));
  return 100.0 * edit_distance(r, h).distance / static_cast<double>(r.size());
}

double cer(const std::string& ref, const std::string& hyp) {
  const std::string r = normalize_text(ref);
  require(!r.empty(), ErrorCode::kDegenerateInput,
          "CER: reference is empty after normalisation");
  return 100.0 * edit_distance(r, normalize_text(hyp)).distance /
         static_cast<double>(r.size());
}

SpeakerEmbedding make_embedding(const RowVector& raw, const std::string& id) {
  require(raw.size() > 0 && raw.allFinite(), ErrorCode::kDegenerateInput,
          "embedding must be non-empty and finite");
  const double n = raw.norm();
  require(n > 0.0, ErrorCode::kDegenerateInput, "embedding has zero norm");
  return SpeakerEmbedding{raw / n, id};
}

double secs(const SpeakerEmbedding& a, const SpeakerEmbedding& b) {
  require(a.embedder_id == b.embedder_id, ErrorCode::kConfiguration,
          "SECS: embedder mismatch ('" + a.embedder_id + "' vs '" +
              b.embedder_id + "')");
  require(a.vector.size() == b.vector.size(), ErrorCode::kConfiguration,
          "SECS: embedding dimensions differ");
  return std::clamp(a.vector.dot(b.vector), -1.0, 1.0);
}

SpeakerEmbedding embed_speaker(const AudioClip& input, const MelConfig& cfg,
                               const VoicingConfig& voicing) {
  require(input.sample_rate_hz > 0 &&
              input.samples.size() * 2 >=
                  static_cast<size_t>(input.sample_rate_hz),
          ErrorCode::kDegenerateInput,
          "speaker embedding needs at least 0.5 s of audio");
  const AudioClip clip = input.sample_rate_hz == cfg.sample_rate_hz
                             ? input
                             : resample(input, cfg.sample_rate_hz);
  const MelSpectrogram mel = mel_spectrogram(clip, cfg);
  const FrameAnalysis fa = analyze_frames(clip, cfg, voicing.f0_min_hz,
                                          voicing.f0_max_hz, voicing.threshold);
  const Eigen::Index m = mel.frames.cols();
  RowVector raw(2 * m + 4);
  const RowVector mean = mel.frames.colwise().mean();
  raw.head(m) = mean;
  for (Eigen::Index b = 0; b < m; ++b) {
    const double var =
        (mel.frames.col(b).array() - mean(b)).square().mean();
    raw(m + b) = std::sqrt(var);
  }
  std::vector<double> lf0;
  for (size_t t = 0; t < fa.size(); ++t) {
    if (fa.voiced[t]) lf0.push_back(std::log(fa.f0_hz[t]));
  }
  const double f0_mean = mean_of(lf0);
  const double e_mean = mean_of(fa.energy);
  raw(2 * m) = f0_mean;
  raw(2 * m + 1) = std_of(lf0, f0_mean);
  raw(2 * m + 2) = e_mean;
  raw(2 * m + 3) = std_of(fa.energy, e_mean);
  return make_embedding(raw, kStatsEmbedderId);
}

void save_embedding(const SpeakerEmbedding& e, const std::string& path) {
  binio::Writer w(path);
  w.magic("GSAEMB1");
  w.pod(static_cast<uint32_t>(e.vector.size()));
  for (Eigen::Index i = 0; i < e.vector.size(); ++i) w.f32(e.vector(i));
  w.close();
}

SpeakerEmbedding load_embedding(const std::string& path) {
  binio::Reader r(path);
  r.expect_magic("GSAEMB1");
  const auto dim = r.pod<uint32_t>();
  require(dim >= 1 && dim < (1u << 24), ErrorCode::kFormat,
          "'" + path + "': bad embedding dimension");
  RowVector v(dim);
  for (uint32_t i = 0; i < dim; ++i) v(i) = r.f32();
  require(r.at_end(), ErrorCode::kFormat, "'" + path + "': trailing bytes");
  return make_embedding(v, kExternalEmbedderId);
}

PosTag effective_tag(const WordInterval& iv) {
  return iv.pos_tag.value_or(PosTag::kEtc);
}

void VoicedFrameRatio::add(const FrameAnalysis& analysis,
                           const std::vector<WordInterval>& intervals) {
  for (const auto& iv : intervals) {
    require(iv.start_frame >= 0 && iv.start_frame <= iv.end_frame &&
                static_cast<size_t>(iv.end_frame) <= analysis.size(),
            ErrorCode::kBounds,
            "interval [" + std::to_string(iv.start_frame) + ", " +
                std::to_string(iv.end_frame) + ") exceeds " +
                std::to_string(analysis.size()) + " analysed frames");
    const auto k = static_cast<size_t>(effective_tag(iv));
    for (int t = iv.start_frame; t < iv.end_frame; ++t) {
      ++total[k];
      if (analysis.voiced[t]) ++voiced[k];
    }
  }
}

std::optional<double> VoicedFrameRatio::ratio(PosTag tag) const {
  const auto k = static_cast<size_t>(tag);
  if (total[k] == 0) return std::nullopt;
  return static_cast<double>(voiced[k]) / static_cast<double>(total[k]);
}

VoicedFrameRatio voiced_frame_ratio(const FrameAnalysis& analysis,
                                    const std::vector<WordInterval>& intervals) {
  VoicedFrameRatio r;
  r.add(analysis, intervals);
  return r;
}

int argmax_lowest(const RowVector& v) {
  require(v.size() >= 1, ErrorCode::kDegenerateInput, "argmax of empty vector");
  int best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = static_cast<int>(i);
  }
  return best;
}

double PosAttentionStats::fraction(PosTag tag) const {
  if (utterances == 0) return 0.0;
  return static_cast<double>(counts[static_cast<size_t>(tag)]) /
         static_cast<double>(utterances);
}

PosAttentionStats pos_attention_stats(const std::vector<AttentionRecord>& records,
                                      int layer, int head) {
  PosAttentionStats s;
  for (const auto& rec : records) {
    require(rec.num_segments() >= 1, ErrorCode::kDegenerateInput,
            "attention record without segments");
    const RowVector agg = rec.aggregate(layer, head);
    require(static_cast<size_t>(agg.size()) == rec.num_segments(),
            ErrorCode::kData, "attention record and intervals disagree");
    s.add(effective_tag(rec.intervals[argmax_lowest(agg)]));
  }
  return s;
}

std::optional<nn::AttentionOverride> pos_override(
    const std::vector<WordInterval>& intervals,
    const std::vector<PosTag>& targets) {
  nn::AttentionOverride o;
  o.mode = nn::AttentionOverride::Mode::kKeyMask;
  o.weights = RowVector::Zero(static_cast<Eigen::Index>(intervals.size()));
  bool any = false;
  for (size_t i = 0; i < intervals.size(); ++i) {
    const PosTag t = effective_tag(intervals[i]);
    if (std::find(targets.begin(), targets.end(), t) != targets.end()) {
      o.weights(static_cast<Eigen::Index>(i)) = 1.0;
      any = true;
    }
  }
  if (!any) return std::nullopt;
  return o;
}

OverrideExperiment pos_override_experiment(
    const ParamTable& params, const RunConfig& cfg,
    const std::vector<PreparedUtterance>& data,
    const std::vector<PosTag>& targets, const HypothesisLookup& hyps) {
  OverrideExperiment ex;
  ex.targets = targets;
  auto audio_secs = [&](const MelSpectrogram& mel,
                        const SpeakerEmbedding& ref) -> std::optional<double> {
    MelSpectrogram clamped = mel;
    clamped.frames = clamped.frames.cwiseMax(std::log(cfg.mel.log_floor));
    const AudioClip audio =
        griffin_lim_invert(clamped, cfg.eval.griffin_lim_iters).audio;
    try {
      return secs(embed_speaker(audio, cfg.mel, cfg.voicing), ref);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kDegenerateInput) return std::nullopt;
      throw;
    }
  };
  for (const auto& u : data) {
    OverrideRow row;
    row.id = u.id;
    const std::optional<nn::AttentionOverride> o =
        pos_override(u.intervals, targets);
    const StyleResult base_style =
        encode_style(params, u.mel, u.intervals, cfg.gsa, nullptr);
    const SynthesisResult base = synthesize_mel(
        params, u.symbols, base_style.global.vector, cfg.acoustic, cfg.mel);
    SynthesisResult over = base;
    if (o) {
      const StyleResult s =
          encode_style(params, u.mel, u.intervals, cfg.gsa, &*o);
      over = synthesize_mel(params, u.symbols, s.global.vector, cfg.acoustic,
                            cfg.mel);
    } else {
      row.fallback = true;
      ++ex.fallbacks;
    }
    const bool same_shape = base.mel.frames.rows() == over.mel.frames.rows();
    row.mel_max_abs_diff =
        same_shape ? (base.mel.frames - over.mel.frames).cwiseAbs().maxCoeff()
                   : std::numeric_limits<double>::infinity();

    std::optional<SpeakerEmbedding> ref;
    try {
      ref = embed_speaker(u.audio, cfg.mel, cfg.voicing);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerateInput) throw;
    }
    if (ref) {
      row.secs_base = audio_secs(base.mel, *ref);
      row.secs_override = row.mel_max_abs_diff == 0.0
                              ? row.secs_base
                              : audio_secs(over.mel, *ref);
    }
    if (hyps) {
      const auto hb = hyps(u.id, "base");
      const auto ho = hyps(u.id, "override");
      if (hb) row.wer_base = wer(u.transcript, *hb);
      if (ho) row.wer_override = wer(u.transcript, *ho);
    }
    if (row.wer_base && row.wer_override) {
      row.delta_wer = *row.wer_override - *row.wer_base;
    } else if (row.mel_max_abs_diff == 0.0) {
      row.delta_wer = 0.0;
    }
    ex.rows.push_back(std::move(row));
  }
  return ex;
}

std::string format_pos_stats(const PosAttentionStats& s) {
  std::ostringstream os;
  os.precision(6);
  os << "utterances=" << s.utterances << '\n';
  for (PosTag t : kAllPosTags) {
    os << "count." << pos_tag_name(t) << '=' << s.counts[static_cast<size_t>(t)]
       << '\n';
    os << "fraction." << pos_tag_name(t) << '=' << s.fraction(t) << '\n';
  }
  return os.str();
}

std::string format_voiced_ratio(const VoicedFrameRatio& r) {
  std::ostringstream os;
  for (PosTag t : kAllPosTags) {
    const auto k = static_cast<size_t>(t);
    os << "voiced_ratio." << pos_tag_name(t) << '=' << opt(r.ratio(t))
       << " (" << r.voiced[k] << '/' << r.total[k] << ")\n";
  }
  return os.str();
}

std::string format_override_experiment(const OverrideExperiment& e) {
  std::ostringstream os;
  os << "targets=";
  for (size_t i = 0; i < e.targets.size(); ++i) {
    os << (i ? "," : "") << pos_tag_name(e.targets[i]);
  }
  os << "\nutterances=" << e.rows.size() << "\nfallbacks=" << e.fallbacks
     << '\n';
  std::vector<double> dw, sb, so;
  for (const auto& r : e.rows) {
    if (r.delta_wer) dw.push_back(*r.delta_wer);
    if (r.secs_base) sb.push_back(*r.secs_base);
    if (r.secs_override) so.push_back(*r.secs_override);
  }
  auto mean_or = [](const std::vector<double>& v) -> std::optional<double> {
    if (v.empty()) return std::nullopt;
    return mean_of(v);
  };
  os << "delta_wer_rows=" << dw.size() << '\n';
  os << "mean_delta_wer=" << opt(mean_or(dw)) << '\n';
  os << "mean_secs_base=" << opt(mean_or(sb)) << '\n';
  os << "mean_secs_override=" << opt(mean_or(so)) << '\n';
  os << "id\tfallback\twer_base\twer_override\tdelta_wer\tsecs_base\t"
        "secs_override\tmel_max_abs_diff\n";
  for (const auto& r : e.rows) {
    os << r.id << '\t' << (r.fallback ? 1 : 0) << '\t' << opt(r.wer_base)
       << '\t' << opt(r.wer_override) << '\t' << opt(r.delta_wer) << '\t'
       << opt(r.secs_base) << '\t' << opt(r.secs_override) << '\t'
       << r.mel_max_abs_diff << '\n';
  }
  return os.str();
}

}  // namespace gsa
