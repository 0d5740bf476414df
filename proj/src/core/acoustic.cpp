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

#include "core/acoustic.hpp"

#include <cctype>
#include <cfenv>
#include <cmath>
#include <numeric>

namespace gsa {

namespace {

constexpr char kInventory[] = "_ abcdefghijklmnopqrstuvwxyz0123456789.,!?'-;:\"";

std::string block_prefix(const char* stack, int i) {
  return std::string("am.") + stack + "." + std::to_string(i);
}

double round_half_even(double x) {
  const int saved = std::fegetround();
  std::fesetround(FE_TONEAREST);
  const double r = std::nearbyint(x);
  std::fesetround(saved);
  return r;
}

std::vector<double> column_values(const ad::Var& v) {
  std::vector<double> out(static_cast<size_t>(v.rows()));
  for (Eigen::Index i = 0; i < v.rows(); ++i) out[i] = v.value()(i, 0);
  return out;
}

}  // namespace

SymbolTable::SymbolTable() : symbols_(kInventory) {
  std::fill(std::begin(index_), std::end(index_), -1);
  for (size_t i = 1; i < symbols_.size(); ++i) {
    index_[static_cast<unsigned char>(symbols_[i])] = static_cast<int>(i);
  }
}

const SymbolTable& SymbolTable::standard() {
  static const SymbolTable table;
  return table;
}

std::vector<int> SymbolTable::encode(const std::string& text) const {
  std::vector<int> ids;
  ids.reserve(text.size());
  for (char raw : text) {
    const auto c =
        static_cast<unsigned char>(std::tolower(static_cast<unsigned char>(raw)));
    const int id = index_[c];
    if (id < 0) {
      fail(ErrorCode::kInvalidArgument,
           std::string("character '") + raw + "' is not in the symbol inventory");
    }
    ids.push_back(id);
  }
  require(!ids.empty(), ErrorCode::kDegenerateInput, "empty text");
  return ids;
}

std::string SymbolTable::decode(const std::vector<int>& ids) const {
  std::string out;
  for (int id : ids) {
    require(id >= 0 && id < size(), ErrorCode::kBounds, "symbol id out of range");
    out.push_back(symbols_[id]);
  }
  return out;
}

void AcousticConfig::validate() const {
  auto bad = [](const std::string& msg) {
    fail(ErrorCode::kConfiguration, "acoustic config: " + msg);
  };
  if (d_model < 1 || n_heads < 1 || d_model % n_heads != 0) {
    bad("d_model must be divisible by n_heads");
  }
  if (n_enc_blocks < 0 || n_dec_blocks < 0) bad("block counts must be >= 0");
  if (conv_kernel < 1 || conv_kernel % 2 == 0) bad("conv_kernel must be odd");
  if (n_mels < 1 || d_style < 1 || d_ffn < 1 || predictor_filters < 1) {
    bad("dimensions must be positive");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    bad("dropout_rate must lie in [0, 1)");
  }
}

std::vector<ParamShape> acoustic_param_shapes(const AcousticConfig& cfg) {
  cfg.validate();
  const int n_symbols =
      cfg.n_symbols > 0 ? cfg.n_symbols : SymbolTable::standard().size();
  std::vector<ParamShape> shapes;
  const Eigen::Index d = cfg.d_model;
  shapes.push_back({"am.embed", n_symbols, d, Init::kXavier});
  auto declare_block = [&](const std::string& pre) {
    nn::declare_cln(shapes, pre + ".norm1", cfg.d_style, d);
    nn::declare_attention(shapes, pre + ".attn", d);
    nn::declare_cln(shapes, pre + ".norm2", cfg.d_style, d);
    nn::declare_conv1d(shapes, pre + ".ffn.0", d, cfg.d_ffn, cfg.conv_kernel);
    nn::declare_conv1d(shapes, pre + ".ffn.1", cfg.d_ffn, d, cfg.conv_kernel);
  };
  for (int i = 0; i < cfg.n_enc_blocks; ++i) declare_block(block_prefix("enc", i));
  for (int i = 0; i < cfg.n_dec_blocks; ++i) declare_block(block_prefix("dec", i));
  for (const char* name : {"am.pitch_pred", "am.dur_pred"}) {
    const std::string pre = name;
    nn::declare_conv1d(shapes, pre + ".conv.0", d, cfg.predictor_filters, 3);
    nn::declare_layer_norm(shapes, pre + ".norm.0", cfg.predictor_filters);
    nn::declare_conv1d(shapes, pre + ".conv.1", cfg.predictor_filters,
                       cfg.predictor_filters, 3);
    nn::declare_layer_norm(shapes, pre + ".norm.1", cfg.predictor_filters);
    nn::declare_linear(shapes, pre + ".proj", cfg.predictor_filters, 1);
  }
  nn::declare_conv1d(shapes, "am.pitch_emb", 1, d, 3);
  nn::declare_linear(shapes, "am.out", d, cfg.n_mels);
  return shapes;
}

Matrix sinusoid_positions(Eigen::Index rows, Eigen::Index dim) {
  Matrix pe(rows, dim);
  for (Eigen::Index pos = 0; pos < rows; ++pos) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double freq =
          std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / dim);
      const double angle = static_cast<double>(pos) * freq;
      pe(pos, i) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  }
  return pe;
}

ad::Var cln(const ad::Var& x, const ad::Var& w, const ad::Var& e_gamma,
            const ad::Var& e_beta) {
  require(w.rows() == 1 && w.cols() == e_gamma.rows() &&
              e_gamma.rows() == e_beta.rows() &&
              e_gamma.cols() == x.cols() && e_beta.cols() == x.cols(),
          ErrorCode::kConfiguration, "cln: inconsistent shapes");
  return nn::conditional_layer_norm(x, w, e_gamma, e_beta);
}

ad::Var fft_block(Binder& p, const ad::Var& x, const ad::Var* w,
                  const std::string& prefix, const AcousticConfig& cfg,
                  const nn::Dropout& drop) {
  require(x.cols() == cfg.d_model, ErrorCode::kConfiguration,
          "fft_block: input width " + std::to_string(x.cols()) +
              " differs from d_model " + std::to_string(cfg.d_model));
  auto norm = [&](const ad::Var& v, const std::string& site) {
    if (w == nullptr) return ad::normalize_rows(v, nn::kNormEps);
    return cln(v, *w, p(prefix + site + ".E_gamma"),
               p(prefix + site + ".E_beta"));
  };
  ad::Var a = nn::self_attention(p, norm(x, ".norm1"), prefix + ".attn",
                                 cfg.n_heads, nullptr, nullptr, drop);
  ad::Var y = ad::add(x, nn::dropout(a, drop));
  ad::Var f = nn::conv1d(p, norm(y, ".norm2"), prefix + ".ffn.0",
                         cfg.conv_kernel);
  f = nn::conv1d(p, nn::dropout(ad::gelu(f), drop), prefix + ".ffn.1",
                 cfg.conv_kernel);
  return ad::add(y, nn::dropout(f, drop));
}

namespace {
std::vector<int> expansion_index(const std::vector<int>& durations,
                                 Eigen::Index rows) {
  require(static_cast<Eigen::Index>(durations.size()) == rows,
          ErrorCode::kConfiguration,
          "duration count differs from the number of symbols");
  std::vector<int> index;
  for (size_t i = 0; i < durations.size(); ++i) {
    require(durations[i] >= 0, ErrorCode::kInvalidArgument,
            "durations must be non-negative");
    index.insert(index.end(), static_cast<size_t>(durations[i]),
                 static_cast<int>(i));
  }
  require(!index.empty(), ErrorCode::kDegenerateInput,
          "all durations are zero");
  return index;
}
}  // namespace

ad::Var length_regulate(const ad::Var& h, const std::vector<int>& durations) {
  return ad::gather_rows(h, expansion_index(durations, h.rows()));
}

Matrix length_regulate(const Matrix& h, const std::vector<int>& durations) {
  const std::vector<int> index = expansion_index(durations, h.rows());
  Matrix out(static_cast<Eigen::Index>(index.size()), h.cols());
  for (size_t t = 0; t < index.size(); ++t) {
    out.row(static_cast<Eigen::Index>(t)) = h.row(index[t]);
  }
  return out;
}

ad::Var variance_predictor(Binder& p, const ad::Var& h,
                           const std::string& prefix, const AcousticConfig& cfg,
                           const nn::Dropout& drop) {
  require(h.cols() == cfg.d_model, ErrorCode::kConfiguration,
          "predictor input width differs from d_model");
  ad::Var x = h;
  for (int i = 0; i < 2; ++i) {
    const std::string k = std::to_string(i);
    x = ad::gelu(nn::conv1d(p, x, prefix + ".conv." + k, 3));
    x = nn::dropout(nn::layer_norm(p, x, prefix + ".norm." + k), drop);
  }
  return nn::linear(p, x, prefix + ".proj");
}

ad::Var predict_pitch(Binder& p, const ad::Var& h, const AcousticConfig& cfg,
                      const nn::Dropout& drop) {
  return variance_predictor(p, h, "am.pitch_pred", cfg, drop);
}

ad::Var predict_duration(Binder& p, const ad::Var& h, const AcousticConfig& cfg,
                         const nn::Dropout& drop) {
  return variance_predictor(p, h, "am.dur_pred", cfg, drop);
}

std::vector<int> durations_from_log(const std::vector<double>& log_durations,
                                    const std::vector<int>& symbol_ids,
                                    int pad_id) {
  require(log_durations.size() == symbol_ids.size(), ErrorCode::kConfiguration,
          "duration prediction length differs from symbol count");
  std::vector<int> out(log_durations.size());
  for (size_t i = 0; i < out.size(); ++i) {
    if (symbol_ids[i] == pad_id) {
      out[i] = 0;
      continue;
    }
    const double frames = round_half_even(std::exp(log_durations[i]) - 1.0);
    out[i] = static_cast<int>(std::clamp(frames, 1.0, 1e6));
  }
  return out;
}

AcousticOutput acoustic_forward(Binder& p, const std::vector<int>& symbols,
                                const ad::Var& w, const AcousticConfig& cfg,
                                const Teacher* teacher,
                                const nn::Dropout& drop) {
  require(!symbols.empty(), ErrorCode::kDegenerateInput, "empty text");
  require(w.rows() == 1 && w.cols() == cfg.d_style, ErrorCode::kConfiguration,
          "style vector has width " + std::to_string(w.cols()) +
              ", expected " + std::to_string(cfg.d_style));
  const auto s = static_cast<Eigen::Index>(symbols.size());
  ad::Tape& tape = p.tape();

  ad::Var x = ad::gather_rows(p("am.embed"), symbols);
  x = ad::add(x, tape.constant(sinusoid_positions(s, cfg.d_model)));
  for (int i = 0; i < cfg.n_enc_blocks; ++i) {
    x = fft_block(p, x, &w, block_prefix("enc", i), cfg, drop);
  }

  AcousticOutput out;
  out.pitch_pred = predict_pitch(p, x, cfg, drop);
  out.logdur_pred = predict_duration(p, x, cfg, drop);

  ad::Var pitch = out.pitch_pred;
  if (teacher != nullptr) {
    require(teacher->pitch.size() == symbols.size() &&
                teacher->durations.size() == symbols.size(),
            ErrorCode::kData, "teacher sequences differ in length from text");
    Matrix tp(s, 1);
    for (Eigen::Index i = 0; i < s; ++i) tp(i, 0) = teacher->pitch[i];
    pitch = tape.constant(std::move(tp));
    out.durations = teacher->durations;
  } else {
    out.durations = durations_from_log(column_values(out.logdur_pred), symbols,
                                       SymbolTable::standard().pad_id());
    if (std::accumulate(out.durations.begin(), out.durations.end(), 0) == 0) {
      fail(ErrorCode::kDegenerateOutput, "predicted durations are all zero");
    }
  }
  x = ad::add(x, nn::conv1d(p, pitch, "am.pitch_emb", 3));

  ad::Var y = length_regulate(x, out.durations);
  y = ad::add(y, tape.constant(sinusoid_positions(y.rows(), cfg.d_model)));
  for (int i = 0; i < cfg.n_dec_blocks; ++i) {
    y = fft_block(p, y, &w, block_prefix("dec", i), cfg, drop);
  }
  out.mel = nn::linear(p, y, "am.out");
  return out;
}

SynthesisResult synthesize_mel(const ParamTable& params,
                               const std::vector<int>& symbols,
                               const RowVector& style,
                               const AcousticConfig& cfg,
                               const MelConfig& mel_cfg,
                               const Teacher* teacher) {
  ad::Tape tape;
  Binder p(tape, params, false);
  ad::Var w = tape.constant(style);
  AcousticOutput o =
      acoustic_forward(p, symbols, w, cfg, teacher, nn::Dropout{});
  SynthesisResult r;
  r.mel.config = mel_cfg;
  r.mel.frames = o.mel.value();
  r.pitch_pred = column_values(o.pitch_pred);
  r.logdur_pred = column_values(o.logdur_pred);
  r.durations = std::move(o.durations);
  return r;
}

}  // namespace gsa
