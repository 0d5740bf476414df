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

#include "core/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace gsa {

namespace {

struct Field {
  std::string key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* expected) {
  fail(ErrorCode::kConfiguration, "config key '" + key + "': '" + value +
                                      "' is not " + expected);
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  bad_value(key, value, "an integer");
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  bad_value(key, value, "a finite number");
}

template <typename T>
Field int_field(std::string key, T RunConfig::*group, int T::*member) {
  return Field{
      key,
      [group, member](const RunConfig& c) {
        return std::to_string(c.*group.*member);
      },
      [key, group, member](RunConfig& c, const std::string& v) {
        c.*group.*member = static_cast<int>(parse_int(key, v));
      }};
}

template <typename T>
Field double_field(std::string key, T RunConfig::*group, double T::*member) {
  return Field{
      key,
      [group, member](const RunConfig& c) {
        return format_double(c.*group.*member);
      },
      [key, group, member](RunConfig& c, const std::string& v) {
        c.*group.*member = parse_double(key, v);
      }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    using R = RunConfig;
    std::vector<Field> f;
    f.push_back(int_field("mel.sample_rate_hz", &R::mel, &MelConfig::sample_rate_hz));
    f.push_back(int_field("mel.n_fft", &R::mel, &MelConfig::n_fft));
    f.push_back(int_field("mel.hop_length", &R::mel, &MelConfig::hop_length));
    f.push_back(int_field("mel.win_length", &R::mel, &MelConfig::win_length));
    f.push_back(int_field("mel.n_mels", &R::mel, &MelConfig::n_mels));
    f.push_back(double_field("mel.f_min_hz", &R::mel, &MelConfig::f_min_hz));
    f.push_back(double_field("mel.f_max_hz", &R::mel, &MelConfig::f_max_hz));
    f.push_back(double_field("mel.log_floor", &R::mel, &MelConfig::log_floor));

    f.push_back(double_field("voicing.f0_min_hz", &R::voicing, &VoicingConfig::f0_min_hz));
    f.push_back(double_field("voicing.f0_max_hz", &R::voicing, &VoicingConfig::f0_max_hz));
    f.push_back(double_field("voicing.threshold", &R::voicing, &VoicingConfig::threshold));

    f.push_back(Field{
        "preprocess.loudness_dbfs",
        [](const R& c) { return format_double(c.loudness_dbfs); },
        [](R& c, const std::string& v) {
          c.loudness_dbfs = parse_double("preprocess.loudness_dbfs", v);
        }});

    f.push_back(int_field("gsa.d_style", &R::gsa, &GsaConfig::d_style));
    f.push_back(int_field("gsa.lse_kernel", &R::gsa, &GsaConfig::lse_kernel));
    f.push_back(int_field("gsa.lse_heads", &R::gsa, &GsaConfig::lse_heads));
    f.push_back(int_field("gsa.gse_layers", &R::gsa, &GsaConfig::gse_layers));
    f.push_back(int_field("gsa.gse_heads", &R::gsa, &GsaConfig::gse_heads));
    f.push_back(int_field("gsa.ffn_hidden", &R::gsa, &GsaConfig::ffn_hidden));
    f.push_back(double_field("gsa.dropout_rate", &R::gsa, &GsaConfig::dropout_rate));
    f.push_back(int_field("gsa.min_segment_frames", &R::gsa, &GsaConfig::min_segment_frames));
    f.push_back(Field{
        "gsa.ablation",
        [](const R& c) { return std::string(ablation_name(c.gsa.ablation)); },
        [](R& c, const std::string& v) { c.gsa.ablation = parse_ablation(v); }});
    f.push_back(Field{
        "gsa.random_slice_frames",
        [](const R& c) { return std::to_string(c.random_slice_frames); },
        [](R& c, const std::string& v) {
          c.random_slice_frames =
              static_cast<int>(parse_int("gsa.random_slice_frames", v));
        }});

    f.push_back(int_field("acoustic.d_model", &R::acoustic, &AcousticConfig::d_model));
    f.push_back(int_field("acoustic.n_enc_blocks", &R::acoustic, &AcousticConfig::n_enc_blocks));
    f.push_back(int_field("acoustic.n_dec_blocks", &R::acoustic, &AcousticConfig::n_dec_blocks));
    f.push_back(int_field("acoustic.conv_kernel", &R::acoustic, &AcousticConfig::conv_kernel));
    f.push_back(int_field("acoustic.n_heads", &R::acoustic, &AcousticConfig::n_heads));
    f.push_back(int_field("acoustic.d_ffn", &R::acoustic, &AcousticConfig::d_ffn));
    f.push_back(int_field("acoustic.predictor_filters", &R::acoustic, &AcousticConfig::predictor_filters));
    f.push_back(double_field("acoustic.dropout_rate", &R::acoustic, &AcousticConfig::dropout_rate));

    f.push_back(double_field("train.lr_scale", &R::train, &TrainConfig::lr_scale));
    f.push_back(int_field("train.warmup_steps", &R::train, &TrainConfig::warmup_steps));
    f.push_back(double_field("train.beta1", &R::train, &TrainConfig::beta1));
    f.push_back(double_field("train.beta2", &R::train, &TrainConfig::beta2));
    f.push_back(double_field("train.adam_eps", &R::train, &TrainConfig::adam_eps));
    f.push_back(int_field("train.batch_size", &R::train, &TrainConfig::batch_size));
    f.push_back(int_field("train.max_steps", &R::train, &TrainConfig::max_steps));
    f.push_back(Field{
        "train.seed",
        [](const R& c) { return std::to_string(c.train.seed); },
        [](R& c, const std::string& v) {
          const std::string t = trim(v);
          try {
            size_t used = 0;
            if (!t.empty() && t[0] != '-') {
              const unsigned long long s = std::stoull(t, &used);
              if (used == t.size()) {
                c.train.seed = s;
                return;
              }
            }
          } catch (const std::exception&) {
          }
          bad_value("train.seed", v, "a non-negative integer");
        }});
    f.push_back(double_field("train.w_mel", &R::train, &TrainConfig::w_mel));
    f.push_back(double_field("train.w_pitch", &R::train, &TrainConfig::w_pitch));
    f.push_back(double_field("train.w_dur", &R::train, &TrainConfig::w_dur));
    f.push_back(double_field("train.grad_clip", &R::train, &TrainConfig::grad_clip));
    f.push_back(int_field("train.checkpoint_every", &R::train, &TrainConfig::checkpoint_every));
    f.push_back(int_field("train.log_every", &R::train, &TrainConfig::log_every));

    f.push_back(int_field("eval.agg_layer", &R::eval, &EvalConfig::agg_layer));
    f.push_back(int_field("eval.agg_head", &R::eval, &EvalConfig::agg_head));
    f.push_back(int_field("eval.griffin_lim_iters", &R::eval, &EvalConfig::griffin_lim_iters));
    return f;
  }();
  return table;
}

const Field& find_field(const std::string& key) {
  for (const Field& f : fields()) {
    if (f.key == key) return f;
  }
  fail(ErrorCode::kConfiguration, "unknown config key '" + key + "'");
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void TrainConfig::validate() const {
  auto bad = [](const std::string& msg) {
    fail(ErrorCode::kConfiguration, "train config: " + msg);
  };
  if (!(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0)) {
    bad("betas must lie in (0, 1)");
  }
  if (warmup_steps < 1) bad("warmup_steps must be >= 1");
  if (w_mel < 0.0 || w_pitch < 0.0 || w_dur < 0.0) {
    bad("loss weights must be >= 0");
  }
  if (!(adam_eps > 0.0)) bad("adam_eps must be positive");
  if (!(lr_scale > 0.0)) bad("lr_scale must be positive");
  if (batch_size < 1) bad("batch_size must be >= 1");
  if (max_steps < 0) bad("max_steps must be >= 0");
  if (checkpoint_every < 0 || log_every < 0) bad("intervals must be >= 0");
}

void RunConfig::resolve() {
  mel.validate();
  gsa.n_mels = mel.n_mels;
  acoustic.n_mels = mel.n_mels;
  acoustic.d_style = gsa.d_style;
  if (acoustic.n_symbols == 0) acoustic.n_symbols = SymbolTable::standard().size();
  gsa.validate();
  acoustic.validate();
  train.validate();
  require(0.0 < voicing.f0_min_hz && voicing.f0_min_hz < voicing.f0_max_hz &&
              voicing.f0_max_hz < mel.sample_rate_hz / 2.0,
          ErrorCode::kConfiguration,
          "voicing config: require 0 < f0_min < f0_max < sample_rate / 2");
  require(random_slice_frames >= 1, ErrorCode::kConfiguration,
          "gsa.random_slice_frames must be >= 1");
  require(eval.griffin_lim_iters >= 1, ErrorCode::kConfiguration,
          "eval.griffin_lim_iters must be >= 1");
  require(gsa.gse_layers == 0 || (eval.agg_layer >= -gsa.gse_layers &&
                                  eval.agg_layer < gsa.gse_layers),
          ErrorCode::kConfiguration,
          "eval.agg_layer must lie in [-gse_layers, gse_layers)");
  require(eval.agg_head >= -1 && eval.agg_head < gsa.gse_heads,
          ErrorCode::kConfiguration,
          "eval.agg_head must be -1 (mean) or a head index");
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Field& f : fields()) out.emplace_back(f.key, f.get(*this));
  return out;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  find_field(key).set(*this, trim(value));
}

std::string RunConfig::get(const std::string& key) const {
  return find_field(key).get(*this);
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  std::string section;
  for (const auto& [key, value] : entries()) {
    const size_t dot = key.find('.');
    const std::string sec = key.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) os << '\n';
      os << '[' << sec << "]\n";
      section = sec;
    }
    os << key.substr(dot + 1) << " = " << value << '\n';
  }
  return os.str();
}

RunConfig RunConfig::from_text(const std::string& text,
                               const std::string& source) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorCode::kConfiguration, where + "bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::kConfiguration, where + "expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    try {
      cfg.set(key, line.substr(eq + 1));
    } catch (const Error& e) {
      fail(e.code(), where + e.what());
    }
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::kIo, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str(), path);
}

void RunConfig::save(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  require(out.good(), ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out << to_text();
  require(out.good(), ErrorCode::kIo, "write to '" + path + "' failed");
}

RunConfig toy_run_config() {
  RunConfig c;
  c.gsa.d_style = 32;
  c.gsa.ffn_hidden = 64;
  c.acoustic.d_model = 32;
  c.acoustic.n_enc_blocks = 2;
  c.acoustic.n_dec_blocks = 2;
  c.acoustic.d_ffn = 64;
  c.acoustic.predictor_filters = 32;
  c.train.batch_size = 8;
  c.train.max_steps = 2000;
  c.train.warmup_steps = 200;
  c.train.log_every = 100;
  c.resolve();
  return c;
}

std::vector<ParamShape> model_param_shapes(const RunConfig& cfg) {
  std::vector<ParamShape> shapes = gsa_param_shapes(cfg.gsa);
  std::vector<ParamShape> am = acoustic_param_shapes(cfg.acoustic);
  shapes.insert(shapes.end(), am.begin(), am.end());
  return shapes;
}

}  // namespace gsa
