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

#include "core/training.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

namespace gsa {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

void check_same(size_t a, size_t b, const char* what) {
  require(a == b, ErrorCode::kInvalidArgument,
          std::string(what) + ": length mismatch (" + std::to_string(a) +
              " vs " + std::to_string(b) + ")");
}

std::mt19937_64 seeded_rng(uint64_t seed, uint64_t a, uint64_t b) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(a), static_cast<uint32_t>(a >> 32),
                    static_cast<uint32_t>(b)};
  return std::mt19937_64(seq);
}

std::vector<bool> valid_symbols(const std::vector<int>& symbols) {
  const int pad = SymbolTable::standard().pad_id();
  std::vector<bool> valid(symbols.size());
  for (size_t i = 0; i < symbols.size(); ++i) valid[i] = symbols[i] != pad;
  return valid;
}

std::vector<double> log_durations(const std::vector<int>& d) {
  std::vector<double> out(d.size());
  for (size_t i = 0; i < d.size(); ++i) out[i] = std::log(d[i] + 1.0);
  return out;
}

Matrix column(const std::vector<double>& v) {
  Matrix m(static_cast<Eigen::Index>(v.size()), 1);
  for (size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = v[i];
  return m;
}

Matrix mask_column(const std::vector<bool>& valid) {
  Matrix m(static_cast<Eigen::Index>(valid.size()), 1);
  for (size_t i = 0; i < valid.size(); ++i) {
    m(static_cast<Eigen::Index>(i), 0) = valid[i] ? 1.0 : 0.0;
  }
  return m;
}

// Weighted squared error of one utterance, normalised by batch totals.
ad::Var utterance_loss(ad::Tape& tape, const AcousticOutput& out,
                       const PreparedUtterance& utt, const LossWeights& w,
                       const LossSums& totals) {
  auto squared = [&](const ad::Var& pred, const Matrix& gt,
                     const Matrix* mask) {
    ad::Var d = ad::sub(pred, tape.constant(gt));
    if (mask != nullptr) d = ad::mul(d, tape.constant(*mask));
    return ad::sum_all(ad::mul(d, d));
  };
  std::vector<ad::Var> terms;
  if (w.mel > 0.0 && totals.mel_count > 0) {
    terms.push_back(ad::scale(squared(out.mel, utt.mel.frames, nullptr),
                              w.mel / static_cast<double>(totals.mel_count)));
  }
  const Matrix mask = mask_column(valid_symbols(utt.symbols));
  if (w.pitch > 0.0 && totals.pitch_count > 0) {
    terms.push_back(
        ad::scale(squared(out.pitch_pred, column(utt.pitch), &mask),
                  w.pitch / static_cast<double>(totals.pitch_count)));
  }
  if (w.dur > 0.0 && totals.dur_count > 0) {
    terms.push_back(ad::scale(
        squared(out.logdur_pred, column(log_durations(utt.durations)), &mask),
        w.dur / static_cast<double>(totals.dur_count)));
  }
  require(!terms.empty(), ErrorCode::kTraining, "all loss terms are disabled");
  ad::Var total = terms.front();
  for (size_t i = 1; i < terms.size(); ++i) total = ad::add(total, terms[i]);
  return total;
}

LossWeights weights_of(const TrainConfig& t) {
  return LossWeights{t.w_mel, t.w_pitch, t.w_dur};
}

void add_into(ParamTable& acc, const ParamTable& g) {
  for (const auto& [name, m] : g) {
    if (acc.contains(name)) {
      acc.get_mutable(name) += m;
    } else {
      acc.set(name, m);
    }
  }
}

}  // namespace

// ---- losses -----------------------------------------------------------------

void LossSums::add(const Matrix& pred_mel, const Matrix& gt_mel,
                   const std::vector<double>& pred_pitch,
                   const std::vector<double>& gt_pitch,
                   const std::vector<double>& pred_logdur,
                   const std::vector<double>& gt_logdur,
                   const std::vector<bool>& valid) {
  require(pred_mel.rows() == gt_mel.rows() && pred_mel.cols() == gt_mel.cols(),
          ErrorCode::kInvalidArgument,
          "mel shape mismatch: " + std::to_string(pred_mel.rows()) + "x" +
              std::to_string(pred_mel.cols()) + " vs " +
              std::to_string(gt_mel.rows()) + "x" +
              std::to_string(gt_mel.cols()));
  check_same(pred_pitch.size(), gt_pitch.size(), "pitch");
  check_same(pred_logdur.size(), gt_logdur.size(), "duration");
  check_same(pred_pitch.size(), valid.size(), "symbol mask");
  check_same(pred_logdur.size(), valid.size(), "symbol mask");
  mel_se += (pred_mel - gt_mel).squaredNorm();
  mel_count += static_cast<long>(gt_mel.size());
  for (size_t i = 0; i < valid.size(); ++i) {
    if (!valid[i]) continue;
    const double dp = pred_pitch[i] - gt_pitch[i];
    const double dd = pred_logdur[i] - gt_logdur[i];
    pitch_se += dp * dp;
    dur_se += dd * dd;
    ++pitch_count;
    ++dur_count;
  }
}

LossReport LossSums::report(const LossWeights& w) const {
  LossReport r;
  r.mel_loss = mel_count > 0 ? mel_se / static_cast<double>(mel_count) : 0.0;
  r.pitch_loss =
      pitch_count > 0 ? pitch_se / static_cast<double>(pitch_count) : 0.0;
  r.dur_loss = dur_count > 0 ? dur_se / static_cast<double>(dur_count) : 0.0;
  r.total = w.mel * r.mel_loss + w.pitch * r.pitch_loss + w.dur * r.dur_loss;
  return r;
}

LossReport total_loss(const Matrix& pred_mel, const Matrix& gt_mel,
                      const std::vector<double>& pred_pitch,
                      const std::vector<double>& gt_pitch,
                      const std::vector<double>& pred_logdur,
                      const std::vector<double>& gt_logdur,
                      const std::vector<bool>& valid, const LossWeights& w) {
  LossSums s;
  s.add(pred_mel, gt_mel, pred_pitch, gt_pitch, pred_logdur, gt_logdur, valid);
  return s.report(w);
}

double noam_lr(int step, int d_model, int warmup, double scale) {
  require(step >= 1, ErrorCode::kInvalidArgument, "noam_lr: step must be >= 1");
  require(d_model >= 1 && warmup >= 1, ErrorCode::kInvalidArgument,
          "noam_lr: d_model and warmup must be positive");
  const double s = step;
  return scale / std::sqrt(static_cast<double>(d_model)) *
         std::min(1.0 / std::sqrt(s), s * std::pow(warmup, -1.5));
}

// ---- optimiser --------------------------------------------------------------

AdamMoments zero_moments(const ParamTable& params) {
  return AdamMoments{params.zeros_like(), params.zeros_like()};
}

void adam_step(ParamTable& params, const ParamTable& grads,
               AdamMoments& moments, int t, const TrainConfig& cfg,
               double lr) {
  require(t >= 1, ErrorCode::kInvalidArgument, "adam_step: t must be >= 1");
  for (const auto& [name, g] : grads) {
    require(params.contains(name), ErrorCode::kTraining,
            "gradient for unknown parameter '" + name + "'");
    const Matrix& p = params.get(name);
    require(g.rows() == p.rows() && g.cols() == p.cols(), ErrorCode::kTraining,
            "gradient shape mismatch for '" + name + "'");
    require(g.allFinite(), ErrorCode::kTraining,
            "non-finite gradient in parameter '" + name + "'");
  }
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  for (const auto& [name, g] : grads) {
    if (!moments.m.contains(name)) {
      moments.m.set(name, Matrix::Zero(g.rows(), g.cols()));
      moments.v.set(name, Matrix::Zero(g.rows(), g.cols()));
    }
    Matrix& m = moments.m.get_mutable(name);
    Matrix& v = moments.v.get_mutable(name);
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v.array() = cfg.beta2 * v.array() + (1.0 - cfg.beta2) * g.array().square();
    params.get_mutable(name).array() -=
        lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + cfg.adam_eps);
  }
}

double clip_grad_norm(ParamTable& grads, double max_norm) {
  double sq = 0.0;
  for (const auto& [name, g] : grads) sq += g.squaredNorm();
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double f = max_norm / norm;
    for (auto& [name, g] : grads) g *= f;
  }
  return norm;
}

// ---- data -------------------------------------------------------------------

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::kIo, "cannot open manifest '" + path + "'");
  const std::filesystem::path base =
      std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return (fp.is_absolute() ? fp : base / fp).string();
  };
  std::vector<ManifestEntry> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(t);
    std::string f;
    while (std::getline(ss, f, '|')) fields.push_back(trim(f));
    require(fields.size() == 4, ErrorCode::kFormat,
            path + ":" + std::to_string(lineno) +
                ": expected 4 '|'-separated fields, got " +
                std::to_string(fields.size()));
    ManifestEntry e;
    e.wav_path = resolve(fields[0]);
    e.transcript = fields[1];
    e.duration_path = resolve(fields[2]);
    e.timestamp_path = resolve(fields[3]);
    e.id = std::filesystem::path(fields[0]).stem().string();
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<int> load_durations(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::kIo, "cannot open durations '" + path + "'");
  std::vector<int> d;
  std::string tok;
  while (in >> tok) {
    size_t used = 0;
    long v = -1;
    try {
      v = std::stol(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    require(used == tok.size() && v >= 0, ErrorCode::kFormat,
            path + ": '" + tok + "' is not a non-negative integer");
    d.push_back(static_cast<int>(v));
  }
  return d;
}

PreparedUtterance prepare_utterance(const ManifestEntry& entry,
                                    const RunConfig& cfg) {
  PreparedUtterance u;
  u.id = entry.id;
  u.transcript = entry.transcript;
  try {
    u.symbols = SymbolTable::standard().encode(entry.transcript);
    require(!u.symbols.empty(), ErrorCode::kData, "empty transcript");
    AudioClip clip = load_wav(entry.wav_path);
    if (clip.sample_rate_hz != cfg.mel.sample_rate_hz) {
      clip = resample(clip, cfg.mel.sample_rate_hz);
    }
    u.audio = normalize_loudness(clip, cfg.loudness_dbfs).clip;
    u.mel = mel_spectrogram(u.audio, cfg.mel);
    u.analysis = analyze_frames(u.audio, cfg.mel, cfg.voicing.f0_min_hz,
                                cfg.voicing.f0_max_hz, cfg.voicing.threshold);
    u.durations = load_durations(entry.duration_path);
    require(u.durations.size() == u.symbols.size(), ErrorCode::kData,
            "duration file has " + std::to_string(u.durations.size()) +
                " values for " + std::to_string(u.symbols.size()) +
                " symbols");
    const int total =
        std::accumulate(u.durations.begin(), u.durations.end(), 0);
    require(total == u.mel.num_frames(), ErrorCode::kData,
            "durations sum to " + std::to_string(total) + " frames, mel has " +
                std::to_string(u.mel.num_frames()));
    u.intervals = load_timestamps(entry.timestamp_path, u.mel).intervals;
    require(!u.intervals.empty(), ErrorCode::kData,
            "timestamps yield no word interval");
  } catch (const Error& e) {
    fail(e.code() == ErrorCode::kIo ? ErrorCode::kIo : ErrorCode::kData,
         "entry '" + entry.id + "': " + e.what());
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  u.log_f0.assign(u.symbols.size(), nan);
  u.pitch.assign(u.symbols.size(), 0.0);
  const int pad = SymbolTable::standard().pad_id();
  int frame = 0;
  for (size_t i = 0; i < u.symbols.size(); ++i) {
    double acc = 0.0;
    int n = 0;
    for (int t = frame; t < frame + u.durations[i]; ++t) {
      if (u.analysis.voiced[t]) {
        acc += std::log(u.analysis.f0_hz[t]);
        ++n;
      }
    }
    if (n > 0 && u.symbols[i] != pad) u.log_f0[i] = acc / n;
    frame += u.durations[i];
  }
  return u;
}

PitchStats pitch_stats(const std::vector<PreparedUtterance>& data) {
  double sum = 0.0, sq = 0.0;
  long n = 0;
  for (const auto& u : data) {
    for (double v : u.log_f0) {
      if (std::isfinite(v)) {
        sum += v;
        sq += v * v;
        ++n;
      }
    }
  }
  PitchStats s;
  if (n == 0) return s;
  s.mean = sum / n;
  const double var = sq / n - s.mean * s.mean;
  s.std = var > 1e-12 ? std::sqrt(var) : 1.0;
  return s;
}

void apply_pitch_targets(std::vector<PreparedUtterance>& data,
                         const PitchStats& stats) {
  for (auto& u : data) {
    u.pitch.assign(u.log_f0.size(), 0.0);
    for (size_t i = 0; i < u.log_f0.size(); ++i) {
      if (std::isfinite(u.log_f0[i])) {
        u.pitch[i] = (u.log_f0[i] - stats.mean) / stats.std;
      }
    }
  }
}

std::vector<WordInterval> style_intervals(const PreparedUtterance& utt,
                                          const RunConfig& cfg,
                                          uint64_t seed) {
  if (cfg.gsa.ablation != Ablation::kRandomSlices) return utt.intervals;
  RandomSliceResult r =
      random_slice_segments(utt.mel, cfg.random_slice_frames, seed);
  std::vector<WordInterval> out;
  for (const auto& s : r.segments) out.push_back(s.interval);
  return out;
}

ForwardResult forward_utterance(Binder& p, const PreparedUtterance& utt,
                                const RunConfig& cfg, std::mt19937_64* rng,
                                uint64_t style_seed) {
  const nn::Dropout style_drop{rng ? cfg.gsa.dropout_rate : 0.0, rng};
  const nn::Dropout am_drop{rng ? cfg.acoustic.dropout_rate : 0.0, rng};
  ForwardResult r;
  r.style = encode_style(p, utt.mel, style_intervals(utt, cfg, style_seed),
                         cfg.gsa, nullptr, style_drop);
  const Teacher teacher{utt.durations, utt.pitch};
  r.acoustic = acoustic_forward(p, utt.symbols, r.style.global, cfg.acoustic,
                                &teacher, am_drop);
  return r;
}

// ---- loop -------------------------------------------------------------------

TrainState init_train_state(const RunConfig& cfg) {
  TrainState s;
  s.params = init_params(model_param_shapes(cfg), cfg.train.seed);
  s.moments = zero_moments(s.params);
  return s;
}

TrainResult train(const std::vector<PreparedUtterance>& data,
                  const RunConfig& cfg, const TrainCallbacks& callbacks,
                  const TrainState* start) {
  cfg.train.validate();
  TrainResult result;
  result.state = start != nullptr ? *start : init_train_state(cfg);
  TrainState& st = result.state;
  validate_params(st.params, model_param_shapes(cfg));
  if (st.step >= cfg.train.max_steps) return result;
  require(!data.empty(), ErrorCode::kData, "training set is empty");
  for (const auto& u : data) {
    require(u.pitch.size() == u.symbols.size(), ErrorCode::kData,
            "entry '" + u.id + "' has no pitch targets");
  }

  const size_t n = data.size();
  const size_t batch = static_cast<size_t>(cfg.train.batch_size);
  const LossWeights weights = weights_of(cfg.train);
  const uint64_t seed = cfg.train.seed;

  // Epoch e visits the utterances in a permutation drawn from (seed, e); the
  // k-th sample of training is therefore a pure function of k.
  std::vector<size_t> order;
  uint64_t order_epoch = std::numeric_limits<uint64_t>::max();
  auto sample = [&](uint64_t k) {
    const uint64_t epoch = k / n;
    if (epoch != order_epoch) {
      order.resize(n);
      std::iota(order.begin(), order.end(), size_t{0});
      std::mt19937_64 rng = seeded_rng(seed, 0x5eed0000ULL, epoch);
      std::shuffle(order.begin(), order.end(), rng);
      order_epoch = epoch;
    }
    return order[k % n];
  };

  const int threads = std::min<int>(worker_threads(), static_cast<int>(batch));
  std::vector<size_t> slots(batch);
  std::vector<ParamTable> slot_grads(batch);
  std::vector<std::string> slot_errors(batch);

  while (st.step < cfg.train.max_steps) {
    const int step = st.step + 1;
    for (size_t j = 0; j < batch; ++j) {
      slots[j] = sample(static_cast<uint64_t>(step - 1) * batch + j);
    }
    LossSums totals;
    for (size_t j = 0; j < batch; ++j) {
      const PreparedUtterance& u = data[slots[j]];
      totals.mel_count += static_cast<long>(u.mel.frames.size());
      const auto valid = valid_symbols(u.symbols);
      const long v = std::count(valid.begin(), valid.end(), true);
      totals.pitch_count += v;
      totals.dur_count += v;
    }

    std::vector<LossSums> slot_sums(batch);
    auto run_slot = [&](size_t j) {
      const PreparedUtterance& u = data[slots[j]];
      std::mt19937_64 rng = seeded_rng(seed, static_cast<uint64_t>(step), j);
      ad::Tape tape;
      Binder p(tape, st.params, true);
      ForwardResult f = forward_utterance(p, u, cfg, &rng,
                                          seed ^ (static_cast<uint64_t>(step) << 20) ^ j);
      ad::Var loss = utterance_loss(tape, f.acoustic, u, weights, totals);
      tape.backward(loss);
      slot_grads[j] = ParamTable();
      p.accumulate_grads(slot_grads[j]);
      std::vector<double> pp(f.acoustic.pitch_pred.rows());
      std::vector<double> pd(f.acoustic.logdur_pred.rows());
      for (size_t i = 0; i < pp.size(); ++i) {
        pp[i] = f.acoustic.pitch_pred.value()(static_cast<Eigen::Index>(i), 0);
        pd[i] = f.acoustic.logdur_pred.value()(static_cast<Eigen::Index>(i), 0);
      }
      slot_sums[j].add(f.acoustic.mel.value(), u.mel.frames, pp, u.pitch, pd,
                       log_durations(u.durations), valid_symbols(u.symbols));
    };

    if (threads <= 1) {
      for (size_t j = 0; j < batch; ++j) run_slot(j);
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
          for (size_t j = static_cast<size_t>(t); j < batch;
               j += static_cast<size_t>(threads)) {
            try {
              run_slot(j);
            } catch (const std::exception& e) {
              slot_errors[j] = e.what();
            }
          }
        });
      }
      for (auto& th : pool) th.join();
      for (size_t j = 0; j < batch; ++j) {
        if (!slot_errors[j].empty()) {
          fail(ErrorCode::kTraining, "step " + std::to_string(step) + ": " +
                                         slot_errors[j]);
        }
      }
    }

    // Fixed slot order keeps the reduction independent of thread timing.
    ParamTable grads;
    LossSums sums;
    for (size_t j = 0; j < batch; ++j) {
      add_into(grads, slot_grads[j]);
      sums.mel_se += slot_sums[j].mel_se;
      sums.pitch_se += slot_sums[j].pitch_se;
      sums.dur_se += slot_sums[j].dur_se;
      sums.mel_count += slot_sums[j].mel_count;
      sums.pitch_count += slot_sums[j].pitch_count;
      sums.dur_count += slot_sums[j].dur_count;
    }
    clip_grad_norm(grads, cfg.train.grad_clip);
    const double lr = noam_lr(step, cfg.acoustic.d_model,
                              cfg.train.warmup_steps, cfg.train.lr_scale);
    adam_step(st.params, grads, st.moments, step, cfg.train, lr);
    round_to_float(st.params);
    round_to_float(st.moments.m);
    round_to_float(st.moments.v);
    st.step = step;

    LossReport report = sums.report(weights);
    report.step = step;
    require(std::isfinite(report.total), ErrorCode::kTraining,
            "loss became non-finite at step " + std::to_string(step));
    result.losses.push_back(report);
    if (callbacks.on_step) callbacks.on_step(report);
    if (callbacks.on_checkpoint && cfg.train.checkpoint_every > 0 &&
        step % cfg.train.checkpoint_every == 0 &&
        step != cfg.train.max_steps) {
      callbacks.on_checkpoint(st);
    }
  }
  return result;
}

double teacher_forced_l1(const ParamTable& params,
                         const std::vector<PreparedUtterance>& data,
                         const RunConfig& cfg) {
  require(!data.empty(), ErrorCode::kData, "empty evaluation set");
  double abs_sum = 0.0;
  double count = 0.0;
  for (const auto& u : data) {
    ad::Tape tape;
    Binder p(tape, params, false);
    ForwardResult f = forward_utterance(p, u, cfg, nullptr, cfg.train.seed);
    abs_sum += (f.acoustic.mel.value() - u.mel.frames).cwiseAbs().sum();
    count += static_cast<double>(u.mel.frames.size());
  }
  return abs_sum / count;
}

}  // namespace gsa
