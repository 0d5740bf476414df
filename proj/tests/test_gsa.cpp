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

#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "core/gsa.hpp"
#include "oracles.hpp"

using namespace gsa;

namespace {

GsaConfig small_cfg() {
  GsaConfig c;
  c.d_style = 16;
  c.n_mels = 12;
  c.ffn_hidden = 32;
  c.lse_heads = 2;
  c.gse_heads = 2;
  c.gse_layers = 2;
  return c;
}

ParamTable zeroed(const ParamTable& p) { return p.zeros_like(); }

std::vector<LocalStyle> random_locals(std::mt19937_64& rng, int n, int d) {
  std::vector<LocalStyle> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(LocalStyle{oracle::random_matrix(rng, 1, d, -1.0, 1.0),
                             WordInterval{i, i, i + 1, std::nullopt, ""}});
  }
  return out;
}

MelSpectrogram random_mel(std::mt19937_64& rng, int frames, int bins) {
  MelSpectrogram m;
  m.config.n_mels = bins;
  m.frames = oracle::random_matrix(rng, frames, bins, -8.0, 0.0);
  return m;
}

}  // namespace

TEST_SUITE("gsa") {

TEST_CASE("config validation") {
  GsaConfig c = small_cfg();
  CHECK_NOTHROW(c.validate());
  c.d_style = 15;
  CHECK_THROWS_AS(c.validate(), Error);
  c = small_cfg();
  c.dropout_rate = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK(parse_ablation("no_gse") == Ablation::kNoGse);
  CHECK(std::string(ablation_name(Ablation::kRandomSlices)) == "random_slices");
  CHECK_THROWS_AS(parse_ablation("half"), Error);
}

TEST_CASE("local style encoder") {
  const GsaConfig cfg = small_cfg();
  std::mt19937_64 rng(1);
  ParamTable params = init_params(gsa_param_shapes(cfg), 4);
  StyleSegment seg;
  seg.mel = oracle::random_matrix(rng, 9, cfg.n_mels);
  LocalStyle l = lse_forward(params, seg, cfg);
  CHECK(l.vector.cols() == cfg.d_style);
  CHECK(l.vector.allFinite());
  CHECK((lse_forward(zeroed(params), seg, cfg).vector.array() == 0.0).all());

  seg.mel = oracle::random_matrix(rng, 1, cfg.n_mels);
  LocalStyle one = lse_forward(params, seg, cfg);
  CHECK(one.vector.cols() == cfg.d_style);
  CHECK(one.vector.allFinite());
}

TEST_CASE("mean of local styles") {
  auto mk = [](std::initializer_list<double> v) {
    RowVector r(v.size());
    int i = 0;
    for (double x : v) r(i++) = x;
    return LocalStyle{r, {}};
  };
  CHECK(mean_local_styles({mk({1, 2})}) == mk({1, 2}).vector);
  CHECK((mean_local_styles({mk({1, -2}), mk({-1, 2})}).array() == 0.0).all());
  RowVector m = mean_local_styles({mk({1, 0}), mk({0, 1}), mk({1, 1})});
  CHECK(m(0) == doctest::Approx(2.0 / 3.0));
  CHECK(m(1) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(mean_local_styles(std::vector<LocalStyle>{}), Error);
}

TEST_CASE("global style encoder basics") {
  const GsaConfig cfg = small_cfg();
  std::mt19937_64 rng(2);
  ParamTable params = init_params(gsa_param_shapes(cfg), 5);
  auto single = gse_forward(params, random_locals(rng, 1, cfg.d_style), cfg);
  REQUIRE(single.second.layers.size() == 2);
  for (const auto& layer : single.second.layers) {
    for (const Matrix& h : layer) {
      REQUIRE(h.rows() == 1);
      CHECK(h(0, 0) == 1.0);
    }
  }
  CHECK(single.first.vector.allFinite());

  auto locals = random_locals(rng, 5, cfg.d_style);
  auto res = gse_forward(params, locals, cfg);
  for (const auto& layer : res.second.layers) {
    for (const Matrix& h : layer) {
      for (Eigen::Index r = 0; r < h.rows(); ++r) {
        CHECK(h.row(r).sum() == doctest::Approx(1.0));
      }
    }
  }
  RowVector agg = res.second.aggregate();
  CHECK(agg.sum() == doctest::Approx(1.0));
  CHECK_THROWS_AS(gse_forward(params, {}, cfg), Error);
}

TEST_CASE("permutation and duplication invariance") {
  const GsaConfig cfg = small_cfg();
  std::mt19937_64 rng(3);
  ParamTable params = init_params(gsa_param_shapes(cfg), 6);
  for (int n = 2; n <= 8; ++n) {
    auto locals = random_locals(rng, n, cfg.d_style);
    const RowVector base = gse_forward(params, locals, cfg).first.vector;
    for (int trial = 0; trial < 5; ++trial) {
      std::shuffle(locals.begin(), locals.end(), rng);
      const RowVector v = gse_forward(params, locals, cfg).first.vector;
      CHECK((v - base).cwiseAbs().maxCoeff() <= 1e-5);
    }
    auto doubled = locals;
    doubled.insert(doubled.end(), locals.begin(), locals.end());
    const RowVector d = gse_forward(params, doubled, cfg).first.vector;
    CHECK((d - base).cwiseAbs().maxCoeff() <= 1e-5);
  }
}

TEST_CASE("attention overrides") {
  const GsaConfig cfg = small_cfg();
  std::mt19937_64 rng(4);
  ParamTable params = init_params(gsa_param_shapes(cfg), 7);
  auto locals = random_locals(rng, 4, cfg.d_style);

  nn::AttentionOverride hot;
  hot.weights = RowVector::Zero(4);
  hot.weights(2) = 1.0;
  auto r = gse_forward(params, locals, cfg, &hot);
  for (const auto& layer : r.second.layers) {
    for (const Matrix& h : layer) {
      for (Eigen::Index q = 0; q < h.rows(); ++q) {
        CHECK((h.row(q).array() == hot.weights.array()).all());
      }
    }
  }

  nn::AttentionOverride arb;
  arb.weights = oracle::random_matrix(rng, 1, 4, 0.0, 3.0);
  r = gse_forward(params, locals, cfg, &arb);
  for (const auto& layer : r.second.layers) {
    for (const Matrix& h : layer) {
      for (Eigen::Index q = 0; q < h.rows(); ++q) {
        CHECK((h.row(q).array() == arb.weights.array()).all());
      }
    }
  }

  nn::AttentionOverride full;
  full.mode = nn::AttentionOverride::Mode::kKeyMask;
  full.weights = RowVector::Ones(4);
  auto masked = gse_forward(params, locals, cfg, &full);
  auto base = gse_forward(params, locals, cfg);
  CHECK((masked.first.vector.array() == base.first.vector.array()).all());

  nn::AttentionOverride bad;
  bad.weights = RowVector::Ones(3);
  CHECK_THROWS_AS(gse_forward(params, locals, cfg, &bad), Error);
  bad.weights = RowVector::Ones(4);
  bad.weights(1) = -0.5;
  CHECK_THROWS_AS(gse_forward(params, locals, cfg, &bad), Error);
}

TEST_CASE("full adaptor") {
  const GsaConfig cfg = small_cfg();
  std::mt19937_64 rng(5);
  ParamTable params = init_params(gsa_param_shapes(cfg), 8);
  MelSpectrogram mel = random_mel(rng, 30, cfg.n_mels);
  std::vector<WordInterval> whole = {{0, 0, 30, std::nullopt, "all"}};
  StyleResult a = encode_style(params, mel, whole, cfg);
  StyleSegment seg;
  seg.mel = mel.frames;
  seg.interval = whole[0];
  LocalStyle l = lse_forward(params, seg, cfg);
  auto g = gse_forward(params, {l}, cfg);
  CHECK((a.global.vector - g.first.vector).cwiseAbs().maxCoeff() <= 1e-12);

  CHECK((encode_style(zeroed(params), mel, whole, cfg).global.vector.array() == 0.0).all());

  std::vector<WordInterval> three = {{0, 0, 8, std::nullopt, "a"},
                                     {1, 8, 20, std::nullopt, "b"},
                                     {2, 22, 30, std::nullopt, "c"}};
  StyleResult b = encode_style(params, mel, three, cfg);
  CHECK(b.locals.size() == 3);
  CHECK(b.record.num_segments() == 3);
  CHECK(b.record.intervals == three);
  CHECK_THROWS_AS(encode_style(params, mel, {}, cfg), Error);
}

TEST_CASE("ablations") {
  GsaConfig cfg = small_cfg();
  std::mt19937_64 rng(6);
  MelSpectrogram mel = random_mel(rng, 30, cfg.n_mels);
  std::vector<WordInterval> ivs = {{0, 0, 10, std::nullopt, "a"},
                                   {1, 10, 30, std::nullopt, "b"}};
  cfg.ablation = Ablation::kNoGse;
  ParamTable p = init_params(gsa_param_shapes(cfg), 9);
  StyleResult r = encode_style(p, mel, ivs, cfg);
  CHECK(r.record.empty());
  CHECK((r.global.vector - mean_local_styles(r.locals)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(r.record.aggregate().isApprox(RowVector::Constant(2, 0.5)));

  cfg.ablation = Ablation::kNoLse;
  p = init_params(gsa_param_shapes(cfg), 9);
  CHECK(p.contains("lse.proj.W"));
  CHECK_FALSE(p.contains("lse.attn.q.W"));
  r = encode_style(p, mel, ivs, cfg);
  CHECK(r.global.vector.cols() == cfg.d_style);
}

TEST_CASE("attention table and aggregation") {
  AttentionRecord rec;
  Matrix h0(2, 2), h1(2, 2);
  h0 << 0.9, 0.1, 0.6, 0.4;
  h1 << 0.5, 0.5, 0.3, 0.7;
  rec.layers = {{h0, h1}};
  rec.intervals = {{0, 0, 1, {}, "a"}, {1, 1, 2, {}, "b"}};
  RowVector m = rec.aggregate(-1, -1);
  CHECK(m(0) == doctest::Approx((0.9 + 0.6 + 0.5 + 0.3) / 4));
  RowVector h = rec.aggregate(0, 1);
  CHECK(h(1) == doctest::Approx((0.5 + 0.7) / 2));
  CHECK_THROWS_AS(rec.aggregate(1, -1), Error);
  CHECK_THROWS_AS(rec.aggregate(0, 2), Error);
  const std::string table = attention_table(rec);
  CHECK(std::count(table.begin(), table.end(), '\n') == 9);
}

}  // TEST_SUITE
