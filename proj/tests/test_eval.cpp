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

#include <cmath>
#include <random>

#include "doctest.h"
#include "core/eval.hpp"
#include "core/toy_corpus.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace gsa;

namespace {

std::string random_word_string(std::mt19937_64& rng, int max_len) {
  static const char* vocab[] = {"a", "b", "cat", "dog", "e"};
  std::uniform_int_distribution<int> len(0, max_len), pick(0, 4);
  std::string s;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += vocab[pick(rng)];
  }
  return s;
}

std::string random_chars(std::mt19937_64& rng, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len), pick(0, 2);
  std::string s(len(rng), 'a');
  for (char& c : s) c = static_cast<char>('a' + pick(rng));
  return s;
}

AudioClip tone(double hz, double sec) { return sine_tone(hz, sec, 22050, 0.3); }

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("edit distance fixtures") {
  CHECK(edit_distance(std::string("abc"), std::string("abc")).distance == 0);
  EditCounts ins = edit_distance(std::vector<std::string>{},
                                 std::vector<std::string>{"x", "y", "z"});
  CHECK(ins.distance == 3);
  CHECK(ins.insertions == 3);
  EditCounts k = edit_distance(std::string("kitten"), std::string("sitting"));
  CHECK(k.distance == 3);
  CHECK(k.distance == oracle::levenshtein(std::string("kitten"), std::string("sitting")));
  CHECK(k.substitutions == 2);
  CHECK(k.insertions == 1);
}

TEST_CASE("edit distance matches the oracle and is a metric") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 300; ++i) {
    const std::string a = random_chars(rng, 6), b = random_chars(rng, 6),
                      c = random_chars(rng, 6);
    const EditCounts ab = edit_distance(a, b);
    CHECK(ab.distance == oracle::levenshtein(a, b));
    CHECK(ab.distance == ab.substitutions + ab.insertions + ab.deletions);
    CHECK(ab.distance == edit_distance(b, a).distance);
    CHECK(edit_distance(a, c).distance <= ab.distance + edit_distance(b, c).distance);
    CHECK((edit_distance(a, a).distance == 0));
    CHECK(static_cast<int>(b.size()) - static_cast<int>(a.size()) ==
          ab.insertions - ab.deletions);
  }
}

TEST_CASE("wer and cer") {
  CHECK(wer("the cat", "the cat") == 0.0);
  CHECK(wer("a b c", "a x c") == doctest::Approx(100.0 / 3.0));
  CHECK(cer("ab", "") == 100.0);
  CHECK(wer("The, CAT!", "the cat") == 0.0);
  CHECK(normalize_text("  Hello,   World! ") == "hello world");
  CHECK(split_words("a  b") == std::vector<std::string>{"a", "b"});
  CHECK_THROWS_AS(wer("", "x"), Error);
  CHECK_THROWS_AS(cer(" ,. ", "x"), Error);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    std::string r = random_word_string(rng, 6);
    if (r.empty()) r = "a";
    const std::string h = random_word_string(rng, 6);
    const auto rw = split_words(r), hw = split_words(h);
    CHECK(wer(r, h) == 100.0 * oracle::levenshtein(rw, hw) / rw.size());
    CHECK(cer(r, h) == 100.0 * oracle::levenshtein(r, h) / r.size());
  }
}

TEST_CASE("secs") {
  RowVector a(3), b(3);
  a << 1, 2, 3;
  b << -2, 1, 0;
  SpeakerEmbedding ea = make_embedding(a, "x"), eb = make_embedding(b, "x");
  CHECK(secs(ea, ea) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(secs(ea, eb)) < 1e-12);
  CHECK(secs(ea, make_embedding(-a, "x")) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(secs(ea, make_embedding(a, "y")), Error);
  CHECK_THROWS_AS(make_embedding(RowVector::Zero(3), "x"), Error);
}

TEST_CASE("speaker embedder") {
  MelConfig cfg;
  SpeakerEmbedding e1 = embed_speaker(tone(220, 1.0), cfg);
  SpeakerEmbedding e2 = embed_speaker(tone(220, 1.0), cfg);
  CHECK(e1.embedder_id == kStatsEmbedderId);
  CHECK(std::abs(secs(e1, e2) - 1.0) <= 1e-6);
  CHECK(e1.vector.norm() == doctest::Approx(1.0));
  SpeakerEmbedding low = embed_speaker(tone(110, 1.0), cfg);
  CHECK(secs(e1, low) < 1.0);
  AudioClip quiet = tone(220, 1.0);
  for (double& s : quiet.samples) s *= 0.5;
  const double scaled = secs(e1, embed_speaker(quiet, cfg));
  CHECK(std::isfinite(scaled));
  CHECK(scaled < 1.0);
  CHECK_THROWS_AS(embed_speaker(tone(220, 0.2), cfg), Error);

  testutil::TempDir dir("eval");
  save_embedding(e1, dir.file("a.emb"));
  SpeakerEmbedding back = load_embedding(dir.file("a.emb"));
  CHECK(back.embedder_id == kExternalEmbedderId);
  CHECK((back.vector - e1.vector).cwiseAbs().maxCoeff() < 1e-6);
  testutil::write_file(dir.file("bad.emb"), "GSAEMB1\x02");
  CHECK_THROWS_AS(load_embedding(dir.file("bad.emb")), Error);
}

TEST_CASE("voiced frame ratio") {
  FrameAnalysis a;
  a.voiced = {true, true, false, false, true, false};
  a.energy.assign(6, 1.0);
  a.f0_hz.assign(6, 100.0);
  std::vector<WordInterval> ivs = {{0, 0, 2, PosTag::kNoun, "n"},
                                   {1, 2, 4, PosTag::kVerb, "v"},
                                   {2, 4, 6, std::nullopt, "x"}};
  VoicedFrameRatio r = voiced_frame_ratio(a, ivs);
  CHECK(*r.ratio(PosTag::kNoun) == 1.0);
  CHECK(*r.ratio(PosTag::kVerb) == 0.0);
  CHECK(*r.ratio(PosTag::kEtc) == 0.5);
  CHECK_FALSE(r.ratio(PosTag::kAdj).has_value());
  CHECK(format_voiced_ratio(r).find("ADJ=n/a") != std::string::npos);

  a.voiced.assign(6, true);
  VoicedFrameRatio all = voiced_frame_ratio(a, ivs);
  CHECK(*all.ratio(PosTag::kVerb) == 1.0);
  std::vector<WordInterval> out_of_range = {{0, 4, 9, PosTag::kNoun, "n"}};
  CHECK_THROWS_AS(voiced_frame_ratio(a, out_of_range), Error);
}

TEST_CASE("pos attention statistics") {
  AttentionRecord rec;
  Matrix h(3, 3);
  h << 0.5, 0.3, 0.2, 0.5, 0.3, 0.2, 0.5, 0.3, 0.2;
  rec.layers = {{h}};
  rec.intervals = {{0, 0, 1, PosTag::kNoun, "n"},
                   {1, 1, 2, PosTag::kVerb, "v"},
                   {2, 2, 3, PosTag::kAdj, "a"}};
  PosAttentionStats s = pos_attention_stats({rec});
  CHECK(s.fraction(PosTag::kNoun) == 1.0);

  AttentionRecord tie = rec;
  tie.layers = {{Matrix::Constant(3, 3, 1.0 / 3.0)}};
  tie.intervals[0].pos_tag = PosTag::kVerb;
  CHECK(argmax_lowest(tie.aggregate()) == 0);
  PosAttentionStats t = pos_attention_stats({tie, rec});
  CHECK(t.fraction(PosTag::kVerb) == 0.5);
  CHECK(t.fraction(PosTag::kNoun) == 0.5);
  double total = 0.0;
  for (PosTag tag : kAllPosTags) total += t.fraction(tag);
  CHECK(total == doctest::Approx(1.0));
  CHECK(PosAttentionStats{}.fraction(PosTag::kNoun) == 0.0);
}

TEST_CASE("pos override masks") {
  std::vector<WordInterval> ivs = {{0, 0, 1, PosTag::kNoun, "n"},
                                   {1, 1, 2, PosTag::kAdj, "a"},
                                   {2, 2, 3, std::nullopt, "x"}};
  auto m = pos_override(ivs, {PosTag::kAdj});
  REQUIRE(m.has_value());
  CHECK(m->mode == nn::AttentionOverride::Mode::kKeyMask);
  CHECK(m->weights(0) == 0.0);
  CHECK(m->weights(1) == 1.0);
  CHECK(m->weights(2) == 0.0);
  auto etc = pos_override(ivs, {PosTag::kEtc});
  REQUIRE(etc.has_value());
  CHECK(etc->weights(2) == 1.0);
  CHECK_FALSE(pos_override(ivs, {PosTag::kVerb}).has_value());
}

TEST_CASE("override experiment on an untrained model") {
  testutil::TempDir dir("eval");
  RunConfig cfg = toy_run_config();
  fixtures::ToyData toy = fixtures::toy_data(dir.path().string(), cfg);
  std::vector<PreparedUtterance> data(toy.data.begin(), toy.data.begin() + 3);
  TrainState st = init_train_state(cfg);

  OverrideExperiment all = pos_override_experiment(
      st.params, cfg, data,
      {PosTag::kNoun, PosTag::kVerb, PosTag::kAdj, PosTag::kEtc});
  CHECK(all.fallbacks == 0);
  for (const auto& r : all.rows) {
    CHECK(r.mel_max_abs_diff == 0.0);
    REQUIRE(r.delta_wer.has_value());
    CHECK(*r.delta_wer == 0.0);
  }

  OverrideExperiment adj = pos_override_experiment(st.params, cfg, data, {PosTag::kAdj});
  int expected_fallbacks = 0;
  for (const auto& u : data) {
    bool any = false;
    for (const auto& iv : u.intervals) any |= effective_tag(iv) == PosTag::kAdj;
    expected_fallbacks += any ? 0 : 1;
  }
  CHECK(adj.fallbacks == expected_fallbacks);
  for (const auto& r : adj.rows) {
    if (r.fallback) CHECK(r.mel_max_abs_diff == 0.0);
  }

  HypothesisLookup hyps = [&](const std::string& id, const std::string& cond)
      -> std::optional<std::string> {
    if (id != data[0].id) return std::nullopt;
    return cond == "base" ? data[0].transcript : std::string("x");
  };
  OverrideExperiment with = pos_override_experiment(st.params, cfg, data, {PosTag::kNoun}, hyps);
  REQUIRE(with.rows[0].wer_base.has_value());
  CHECK(*with.rows[0].wer_base == 0.0);
  CHECK(*with.rows[0].delta_wer == *with.rows[0].wer_override);
  CHECK(format_override_experiment(with).find("targets=NOUN") != std::string::npos);
}

}  // TEST_SUITE
