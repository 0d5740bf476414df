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

// Exercises the shared library through its C interface only.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "gradstyle/gradstyle.h"

namespace fs = std::filesystem;

namespace {

std::string take(gsa_string* s) {
  std::string out(gsa_string_data(s), gsa_string_size(s));
  gsa_string_free(s);
  return out;
}

struct Dir {
  fs::path path;
  Dir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("gsa_capi_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~Dir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::vector<std::string> g_logs;
void collect(const char* msg, void*) { g_logs.emplace_back(msg); }

}  // namespace

TEST_CASE("status and version") {
  CHECK(std::string(gsa_version()) == "0.1.0");
  CHECK(std::string(gsa_status_name(GSA_OK)) == "ok");
  CHECK(std::string(gsa_status_name(GSA_ERR_USAGE)) == "usage");
  CHECK(gsa_status_name(static_cast<gsa_status>(999)) != nullptr);
}

TEST_CASE("null handling") {
  CHECK(gsa_config_default(nullptr) == GSA_ERR_INVALID_ARGUMENT);
  CHECK(std::string(gsa_last_error()).find("out") != std::string::npos);
  CHECK(gsa_config_set(nullptr, "train.seed", "1") == GSA_ERR_INVALID_ARGUMENT);
  CHECK(gsa_segment(nullptr, nullptr, nullptr) == GSA_ERR_INVALID_ARGUMENT);
  CHECK(gsa_synthesize(nullptr, nullptr, nullptr) == GSA_ERR_INVALID_ARGUMENT);
  double err = 0;
  CHECK(gsa_grad_check(nullptr, 1, &err) == GSA_ERR_INVALID_ARGUMENT);
  gsa_config_free(nullptr);
  gsa_string_free(nullptr);
  gsa_model_free(nullptr);
  gsa_audio_free(nullptr);
  gsa_mel_free(nullptr);
}

TEST_CASE("config") {
  Dir d;
  gsa_config* c = nullptr;
  REQUIRE(gsa_config_default(&c) == GSA_OK);
  CHECK(gsa_config_set(c, "train.seed", "18446744073709551615") == GSA_OK);
  gsa_string* v = nullptr;
  REQUIRE(gsa_config_get(c, "train.seed", &v) == GSA_OK);
  CHECK(take(v) == "18446744073709551615");
  CHECK(gsa_config_set(c, "train.nope", "1") == GSA_ERR_CONFIGURATION);
  CHECK(std::string(gsa_last_error()).find("train.nope") != std::string::npos);
  CHECK(gsa_config_get(c, "nope", &v) == GSA_ERR_CONFIGURATION);
  CHECK(gsa_config_set(c, "gsa.gse_heads", "5") == GSA_OK);
  CHECK(gsa_config_resolve(c) == GSA_ERR_CONFIGURATION);
  CHECK(gsa_config_set(c, "gsa.gse_heads", "4") == GSA_OK);
  CHECK(gsa_config_resolve(c) == GSA_OK);

  REQUIRE(gsa_config_save(c, (d / "c.ini").c_str()) == GSA_OK);
  gsa_config* c2 = nullptr;
  REQUIRE(gsa_config_load((d / "c.ini").c_str(), &c2) == GSA_OK);
  gsa_string* t1 = nullptr;
  gsa_string* t2 = nullptr;
  gsa_config_to_text(c, &t1);
  gsa_config_to_text(c2, &t2);
  CHECK(take(t1) == take(t2));
  CHECK(gsa_config_load((d / "missing.ini").c_str(), &c2) == GSA_ERR_IO);
  gsa_config_free(c);
  gsa_config_free(c2);
}

TEST_CASE("audio and mel") {
  Dir d;
  gsa_config* c = nullptr;
  REQUIRE(gsa_config_toy(&c) == GSA_OK);
  std::vector<double> x(22050);
  for (size_t i = 0; i < x.size(); ++i) x[i] = 0.3 * std::sin(2 * M_PI * 220.0 * i / 22050.0);
  gsa_audio* a = nullptr;
  REQUIRE(gsa_audio_from_samples(x.data(), x.size(), 22050, &a) == GSA_OK);
  CHECK(gsa_audio_num_samples(a) == x.size());
  CHECK(gsa_audio_sample_rate(a) == 22050);
  CHECK(gsa_audio_from_samples(x.data(), x.size(), 0, &a) != GSA_OK);
  REQUIRE(gsa_audio_save(a, (d / "t.wav").c_str()) == GSA_OK);
  gsa_audio* b = nullptr;
  REQUIRE(gsa_audio_load((d / "t.wav").c_str(), &b) == GSA_OK);
  CHECK(std::abs(gsa_audio_samples(b)[100] - x[100]) < 1e-4);

  gsa_mel* m = nullptr;
  REQUIRE(gsa_mel_compute(a, c, &m) == GSA_OK);
  CHECK(gsa_mel_frames(m) > 0);
  CHECK(gsa_mel_bins(m) == 80);
  REQUIRE(gsa_mel_save(m, (d / "t.mel").c_str()) == GSA_OK);
  gsa_mel* m2 = nullptr;
  REQUIRE(gsa_mel_load((d / "t.mel").c_str(), c, &m2) == GSA_OK);
  CHECK(std::abs(gsa_mel_data(m2)[5] - gsa_mel_data(m)[5]) < 1e-5);
  CHECK(gsa_audio_load((d / "t.mel").c_str(), &b) == GSA_ERR_FORMAT);
  gsa_mel_free(m);
  gsa_mel_free(m2);
  gsa_audio_free(a);
  gsa_audio_free(b);
  gsa_config_free(c);
}

TEST_CASE("commands") {
  Dir d;
  g_logs.clear();
  gsa_set_log_callback(collect, nullptr);
  gsa_string* r = nullptr;
  REQUIRE(gsa_make_toy_corpus(d.path.string().c_str(), 7, &r) == GSA_OK);
  CHECK(take(r).find("utterances=8") != std::string::npos);

  gsa_config* c = nullptr;
  REQUIRE(gsa_config_load((d / "config.ini").c_str(), &c) == GSA_OK);
  gsa_config_set(c, "train.max_steps", "3");
  gsa_config_set(c, "train.log_every", "1");
  REQUIRE(gsa_train(c, (d / "manifest.txt").c_str(), (d / "run").c_str(), &r) == GSA_OK);
  CHECK(take(r).find("steps=3") != std::string::npos);
  CHECK(!g_logs.empty());
  gsa_set_log_callback(nullptr, nullptr);

  gsa_model* m = nullptr;
  CHECK(gsa_model_load((d / "manifest.txt").c_str(), &m) == GSA_ERR_FORMAT);
  REQUIRE(gsa_model_load((d / "run/model.ckpt").c_str(), &m) == GSA_OK);
  CHECK(gsa_model_step(m) == 3);
  CHECK(gsa_model_num_parameters(m) > 0);
  CHECK(gsa_model_set(m, "eval.agg_layer", "0") == GSA_OK);
  CHECK(gsa_model_set(m, "gsa.d_style", "8") == GSA_ERR_USAGE);
  CHECK(gsa_model_set(m, "eval.agg_layer", "9") == GSA_ERR_CONFIGURATION);
  gsa_config* mc = nullptr;
  REQUIRE(gsa_model_config(m, &mc) == GSA_OK);
  gsa_string* v = nullptr;
  gsa_config_get(mc, "eval.agg_layer", &v);
  CHECK(take(v) == "0");
  gsa_config_free(mc);

  const std::string wav = d / "wavs/toy0_spk0.wav";
  const std::string ts = d / "timestamps/toy0_spk0.tsv";
  gsa_synth_options so{};
  so.text = "the cat sat";
  so.reference.audio = wav.c_str();
  so.reference.timestamps = ts.c_str();
  const std::string out = d / "s/x.mel";
  so.out_mel = out.c_str();
  CHECK(gsa_synthesize(m, &so, nullptr) == GSA_OK);
  CHECK(fs::exists(out));
  so.overrides = "zebra=1";
  CHECK(gsa_synthesize(m, &so, &r) == GSA_ERR_USAGE);
  CHECK(std::string(gsa_last_error()).find("cat") != std::string::npos);

  gsa_segment_options seg{};
  seg.mode = "random";
  seg.audio = wav.c_str();
  seg.seed = 3;
  REQUIRE(gsa_segment(c, &seg, &r) == GSA_OK);
  CHECK(take(r).find("index\tword") != std::string::npos);
  seg.mode = "bogus";
  CHECK(gsa_segment(c, &seg, &r) == GSA_ERR_USAGE);

  gsa_eval_options eo{};
  const std::string manifest = d / "manifest.txt";
  const std::string evdir = d / "ev";
  eo.manifest = manifest.c_str();
  eo.outdir = evdir.c_str();
  eo.pos_override = "ADJ,VERB";
  REQUIRE(gsa_evaluate(m, &eo, &r) == GSA_OK);
  CHECK(take(r).find("secs_self=") != std::string::npos);
  eo.pos_override = "XYZ";
  CHECK(gsa_evaluate(m, &eo, &r) != GSA_OK);

  gsa_inspect_options io{};
  io.reference = so.reference;
  const std::string insdir = d / "ins";
  io.outdir = insdir.c_str();
  REQUIRE(gsa_inspect(m, &io, &r) == GSA_OK);
  gsa_string_free(r);
  CHECK(fs::exists(d / "ins/attention.tsv"));

  REQUIRE(gsa_embed(c, wav.c_str(), (d / "x.emb").c_str(), &r) == GSA_OK);
  gsa_string_free(r);
  CHECK(fs::exists(d / "x.emb"));
  gsa_model_free(m);
  gsa_config_free(c);
}

TEST_CASE("grad check") {
  double err = -1;
  REQUIRE(gsa_grad_check("cln", 3, &err) == GSA_OK);
  CHECK(err >= 0);
  CHECK(err <= 1e-4);
  CHECK(gsa_grad_check("nothing", 3, &err) == GSA_ERR_INVALID_ARGUMENT);
}
