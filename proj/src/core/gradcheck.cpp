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

#include "core/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "core/acoustic.hpp"
#include "core/gsa.hpp"

namespace gsa {

namespace {

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c,
                     double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

// Xavier init plus noise so that norm gains and biases are non-trivial.
ParamTable random_params(const std::vector<ParamShape>& shapes,
                         std::mt19937_64& rng) {
  ParamTable t = init_params(shapes, rng());
  for (auto& [name, m] : t) m += random_matrix(rng, m.rows(), m.cols(), 0.1);
  return t;
}

std::vector<ParamShape> with_prefix(const std::vector<ParamShape>& shapes,
                                    const std::string& prefix) {
  std::vector<ParamShape> out;
  for (const auto& s : shapes) {
    if (s.name.compare(0, prefix.size(), prefix) == 0) out.push_back(s);
  }
  return out;
}

// sum(R * y) + 0.1 * sum(y * y): a generic scalar read-out.
ad::Var readout(Binder& p, const ad::Var& y, const Matrix& r) {
  ad::Tape& t = p.tape();
  return ad::add(ad::sum_all(ad::mul(y, t.constant(r))),
                 ad::scale(ad::sum_all(ad::mul(y, y)), 0.1));
}

double evaluate(const ParamTable& params, const LossFn& loss) {
  ad::Tape tape;
  Binder p(tape, params, false);
  return loss(p).value()(0, 0);
}

AcousticConfig small_acoustic(int d_model, int d_style, int n_mels) {
  AcousticConfig c;
  c.d_model = d_model;
  c.d_style = d_style;
  c.n_mels = n_mels;
  c.n_enc_blocks = 1;
  c.n_dec_blocks = 1;
  c.n_heads = 2;
  c.conv_kernel = 3;
  c.d_ffn = 2 * d_model;
  c.predictor_filters = d_model;
  c.dropout_rate = 0.0;
  c.n_symbols = SymbolTable::standard().size();
  return c;
}

GsaConfig small_gsa(int d_style, int n_mels) {
  GsaConfig g;
  g.d_style = d_style;
  g.n_mels = n_mels;
  g.ffn_hidden = 2 * d_style;
  g.dropout_rate = 0.0;
  return g;
}

}  // namespace

GradCheckReport check_gradients(const ParamTable& params, const LossFn& loss,
                                const GradCheckOptions& opts) {
  require(opts.eps > 0.0, ErrorCode::kInvalidArgument, "eps must be positive");
  require(opts.sample_fraction > 0.0 && opts.sample_fraction <= 1.0,
          ErrorCode::kInvalidArgument, "sample_fraction must lie in (0, 1]");
  ParamTable analytic;
  {
    ad::Tape tape;
    Binder p(tape, params, true);
    ad::Var l = loss(p);
    require(l.rows() == 1 && l.cols() == 1, ErrorCode::kInvalidArgument,
            "gradient check needs a scalar loss");
    tape.backward(l);
    p.accumulate_grads(analytic);
  }
  if (!opts.fault_param.empty()) {
    require(analytic.contains(opts.fault_param), ErrorCode::kInvalidArgument,
            "fault parameter '" + opts.fault_param + "' has no gradient");
    Matrix& g = analytic.get_mutable(opts.fault_param);
    Eigen::Index idx = 0;
    g.cwiseAbs().reshaped<Eigen::RowMajor>().maxCoeff(&idx);
    g.data()[idx] *= 1.0 + opts.fault_scale;
  }

  std::mt19937_64 rng(opts.seed ^ 0x6a09e667f3bcc908ULL);
  ParamTable probe = params;
  GradCheckReport report;
  struct Probe {
    double diff = 0.0, a = 0.0, n = 0.0;
  };
  std::vector<Probe> probes;
  for (const auto& [name, value] : params) {
    const Matrix a = analytic.contains(name)
                         ? analytic.get(name)
                         : Matrix::Zero(value.rows(), value.cols());
    std::vector<Eigen::Index> idx(static_cast<size_t>(value.size()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    const auto want = std::max<size_t>(
        1, static_cast<size_t>(std::ceil(opts.sample_fraction * idx.size())));
    if (want < idx.size()) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(want);
      std::sort(idx.begin(), idx.end());
    }
    Matrix& m = probe.get_mutable(name);
    double max_diff = 0.0, max_a = 0.0, max_n = 0.0;
    for (Eigen::Index i : idx) {
      const double saved = m.data()[i];
      m.data()[i] = saved + opts.eps;
      const double up = evaluate(probe, loss);
      m.data()[i] = saved - opts.eps;
      const double down = evaluate(probe, loss);
      m.data()[i] = saved;
      const double n = (up - down) / (2.0 * opts.eps);
      const double an = a.data()[i];
      max_diff = std::max(max_diff, std::abs(an - n));
      max_a = std::max(max_a, std::abs(an));
      max_n = std::max(max_n, std::abs(n));
    }
    GradGroupError g;
    g.name = name;
    g.checked = static_cast<int>(idx.size());
    report.checked += g.checked;
    report.groups.push_back(g);
    probes.push_back({max_diff, max_a, max_n});
  }
  // Tensors with an identically zero gradient (e.g. attention key biases,
  // which softmax cancels) are compared against the overall gradient scale.
  double scale = 0.0;
  for (const Probe& pr : probes) scale = std::max(scale, pr.a);
  const double floor = std::max(1e-6 * scale, 1e-8);
  for (size_t i = 0; i < probes.size(); ++i) {
    const Probe& pr = probes[i];
    report.groups[i].max_rel_error = pr.diff / std::max({pr.a, pr.n, floor});
    report.max_rel_error =
        std::max(report.max_rel_error, report.groups[i].max_rel_error);
  }
  return report;
}

const std::vector<std::string>& grad_check_selectors() {
  static const std::vector<std::string> names = {
      "affine", "lse",      "gse",     "gsa",       "cln",
      "fft_block", "pitch_pred", "dur_pred", "end_to_end"};
  return names;
}

GradCheckReport grad_check(const std::string& selector,
                           const GradCheckOptions& opts) {
  std::mt19937_64 rng(opts.seed * 0x9e3779b97f4a7c15ULL + 17);
  ParamTable params;
  LossFn loss;

  if (selector == "affine") {
    std::vector<ParamShape> shapes;
    nn::declare_linear(shapes, "affine", 6, 5);
    params = random_params(shapes, rng);
    const Matrix x = random_matrix(rng, 4, 6);
    const Matrix r = random_matrix(rng, 4, 5);
    loss = [x, r](Binder& p) {
      return readout(p, nn::linear(p, p.tape().constant(x), "affine"), r);
    };
  } else if (selector == "lse") {
    const GsaConfig cfg = small_gsa(16, 12);
    params = random_params(with_prefix(gsa_param_shapes(cfg), "lse."), rng);
    const Matrix seg = random_matrix(rng, 10, 12);
    const Matrix r = random_matrix(rng, 1, 16);
    loss = [cfg, seg, r](Binder& p) {
      return readout(p, lse_forward(p, p.tape().constant(seg), cfg, {}), r);
    };
  } else if (selector == "gse") {
    const GsaConfig cfg = small_gsa(16, 12);
    params = random_params(with_prefix(gsa_param_shapes(cfg), "gse."), rng);
    std::vector<Matrix> locals;
    for (int i = 0; i < 4; ++i) locals.push_back(random_matrix(rng, 1, 16));
    const Matrix r = random_matrix(rng, 1, 16);
    loss = [cfg, locals, r](Binder& p) {
      std::vector<ad::Var> vars;
      for (const Matrix& l : locals) vars.push_back(p.tape().constant(l));
      return readout(p, gse_forward(p, vars, cfg, nullptr, {}).global, r);
    };
  } else if (selector == "gsa") {
    const GsaConfig cfg = small_gsa(16, 12);
    params = random_params(gsa_param_shapes(cfg), rng);
    MelSpectrogram mel;
    mel.config.n_mels = 12;
    mel.frames = random_matrix(rng, 30, 12);
    std::vector<WordInterval> iv(3);
    iv[0].word_index = 0; iv[0].start_frame = 0; iv[0].end_frame = 12;
    iv[1].word_index = 1; iv[1].start_frame = 12; iv[1].end_frame = 15;
    iv[2].word_index = 2; iv[2].start_frame = 15; iv[2].end_frame = 30;
    const Matrix r = random_matrix(rng, 1, 16);
    loss = [cfg, mel, iv, r](Binder& p) {
      return readout(p, encode_style(p, mel, iv, cfg, nullptr, {}).global, r);
    };
  } else if (selector == "cln") {
    std::vector<ParamShape> shapes;
    nn::declare_cln(shapes, "cln", 8, 16);
    shapes.push_back({"input.w", 1, 8, Init::kXavier});
    params = random_params(shapes, rng);
    const Matrix x = random_matrix(rng, 5, 16);
    const Matrix r = random_matrix(rng, 5, 16);
    loss = [x, r](Binder& p) {
      return readout(p, nn::cln(p, p.tape().constant(x), p("input.w"), "cln"),
                     r);
    };
  } else if (selector == "fft_block") {
    const AcousticConfig cfg = small_acoustic(16, 8, 12);
    std::vector<ParamShape> shapes =
        with_prefix(acoustic_param_shapes(cfg), "am.enc.0.");
    shapes.push_back({"input.w", 1, 8, Init::kXavier});
    params = random_params(shapes, rng);
    const Matrix x = random_matrix(rng, 6, 16);
    const Matrix r = random_matrix(rng, 6, 16);
    loss = [cfg, x, r](Binder& p) {
      ad::Var w = p("input.w");
      return readout(
          p, fft_block(p, p.tape().constant(x), &w, "am.enc.0", cfg, {}), r);
    };
  } else if (selector == "pitch_pred" || selector == "dur_pred") {
    const AcousticConfig cfg = small_acoustic(16, 8, 12);
    const bool pitch = selector == "pitch_pred";
    params = random_params(
        with_prefix(acoustic_param_shapes(cfg),
                    pitch ? "am.pitch_pred." : "am.dur_pred."),
        rng);
    const Matrix h = random_matrix(rng, 7, 16);
    const Matrix r = random_matrix(rng, 7, 1);
    loss = [cfg, h, r, pitch](Binder& p) {
      ad::Var x = p.tape().constant(h);
      return readout(p, pitch ? predict_pitch(p, x, cfg, {})
                              : predict_duration(p, x, cfg, {}),
                     r);
    };
  } else if (selector == "end_to_end") {
    const GsaConfig gcfg = small_gsa(16, 12);
    const AcousticConfig acfg = small_acoustic(16, 16, 12);
    std::vector<ParamShape> shapes = gsa_param_shapes(gcfg);
    const auto am = acoustic_param_shapes(acfg);
    shapes.insert(shapes.end(), am.begin(), am.end());
    params = random_params(shapes, rng);
    const std::vector<int> symbols = SymbolTable::standard().encode("ab c");
    const Teacher teacher{{3, 2, 1, 4}, {0.5, -0.3, 0.0, 1.2}};
    MelSpectrogram mel;
    mel.config.n_mels = 12;
    mel.frames = random_matrix(rng, 10, 12);
    std::vector<WordInterval> iv(2);
    iv[0].start_frame = 0; iv[0].end_frame = 5;
    iv[1].word_index = 1; iv[1].start_frame = 6; iv[1].end_frame = 10;
    const Matrix target = mel.frames;
    loss = [gcfg, acfg, symbols, teacher, mel, iv, target](Binder& p) {
      ad::Var w = encode_style(p, mel, iv, gcfg, nullptr, {}).global;
      AcousticOutput o = acoustic_forward(p, symbols, w, acfg, &teacher, {});
      ad::Var d = ad::sub(o.mel, p.tape().constant(target));
      return ad::scale(ad::sum_all(ad::mul(d, d)),
                       1.0 / static_cast<double>(target.size()));
    };
  } else {
    fail(ErrorCode::kInvalidArgument, "unknown gradient-check selector '" +
                                          selector + "'");
  }
  GradCheckReport report = check_gradients(params, loss, opts);
  report.selector = selector;
  return report;
}

}  // namespace gsa
