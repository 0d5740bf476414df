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

#include "gradstyle/gradstyle.h"

#include <mutex>
#include <sstream>
#include <string>

#include "core/gradcheck.hpp"
#include "core/pipeline.hpp"

struct gsa_string {
  std::string text;
};
struct gsa_config {
  gsa::RunConfig cfg;
};
struct gsa_audio {
  gsa::AudioClip clip;
};
struct gsa_mel {
  gsa::MelSpectrogram mel;
};
struct gsa_model {
  gsa::Checkpoint ckpt;
};

namespace {

thread_local std::string g_last_error;

std::mutex g_log_mutex;
gsa_log_fn g_log_fn = nullptr;
void* g_log_user = nullptr;

void log_line(const std::string& msg) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  if (g_log_fn != nullptr) g_log_fn(msg.c_str(), g_log_user);
}

gsa_status set_error(gsa_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

std::string str(const char* s) { return s == nullptr ? std::string() : s; }

template <typename F>
gsa_status guard(F&& body) {
  try {
    body();
    return GSA_OK;
  } catch (const gsa::Error& e) {
    return set_error(static_cast<gsa_status>(static_cast<int>(e.code())),
                     e.what());
  } catch (const std::bad_alloc&) {
    return set_error(GSA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(GSA_ERR_INTERNAL, e.what());
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) {
    gsa::fail(gsa::ErrorCode::kInvalidArgument,
              std::string(what) + " must not be NULL");
  }
}

void put_report(gsa_string** report, std::string text) {
  if (report != nullptr) *report = new gsa_string{std::move(text)};
}

gsa::StyleReference to_reference(const gsa_reference& r) {
  return gsa::StyleReference{str(r.audio), str(r.timestamps),
                             str(r.attention), r.seed};
}

gsa::LogFn logger() { return [](const std::string& m) { log_line(m); }; }

}  // namespace

extern "C" {

const char* gsa_version(void) { return "0.1.0"; }

const char* gsa_status_name(gsa_status status) {
  if (status == GSA_OK) return "ok";
  if (status == GSA_ERR_INTERNAL) return "internal";
  const int c = static_cast<int>(status);
  if (c >= 1 && c <= static_cast<int>(gsa::ErrorCode::kDegenerateOutput)) {
    return gsa::error_code_name(static_cast<gsa::ErrorCode>(c));
  }
  return "unknown";
}

const char* gsa_last_error(void) { return g_last_error.c_str(); }

void gsa_set_log_callback(gsa_log_fn fn, void* user) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  g_log_fn = fn;
  g_log_user = user;
}

const char* gsa_string_data(const gsa_string* s) {
  return s == nullptr ? "" : s->text.c_str();
}
size_t gsa_string_size(const gsa_string* s) {
  return s == nullptr ? 0 : s->text.size();
}
void gsa_string_free(gsa_string* s) { delete s; }

gsa_status gsa_config_default(gsa_config** out) {
  return guard([&] {
    need(out, "out");
    auto* c = new gsa_config{};
    c->cfg.resolve();
    *out = c;
  });
}

gsa_status gsa_config_toy(gsa_config** out) {
  return guard([&] {
    need(out, "out");
    *out = new gsa_config{gsa::toy_run_config()};
  });
}

gsa_status gsa_config_load(const char* path, gsa_config** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    gsa::RunConfig cfg = gsa::RunConfig::load(path);
    cfg.resolve();
    *out = new gsa_config{std::move(cfg)};
  });
}

gsa_status gsa_config_set(gsa_config* cfg, const char* key, const char* value) {
  return guard([&] {
    need(cfg, "cfg");
    need(key, "key");
    need(value, "value");
    cfg->cfg.set(key, value);
  });
}

gsa_status gsa_config_get(const gsa_config* cfg, const char* key,
                          gsa_string** out) {
  return guard([&] {
    need(cfg, "cfg");
    need(key, "key");
    need(out, "out");
    *out = new gsa_string{cfg->cfg.get(key)};
  });
}

gsa_status gsa_config_resolve(gsa_config* cfg) {
  return guard([&] {
    need(cfg, "cfg");
    cfg->cfg.resolve();
  });
}

gsa_status gsa_config_to_text(const gsa_config* cfg, gsa_string** out) {
  return guard([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = new gsa_string{cfg->cfg.to_text()};
  });
}

gsa_status gsa_config_save(const gsa_config* cfg, const char* path) {
  return guard([&] {
    need(cfg, "cfg");
    need(path, "path");
    cfg->cfg.save(path);
  });
}

void gsa_config_free(gsa_config* cfg) { delete cfg; }

gsa_status gsa_audio_load(const char* path, gsa_audio** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new gsa_audio{gsa::load_wav(path)};
  });
}

gsa_status gsa_audio_from_samples(const double* samples, size_t n,
                                  int sample_rate_hz, gsa_audio** out) {
  return guard([&] {
    need(samples, "samples");
    need(out, "out");
    gsa::require(n >= 1 && sample_rate_hz > 0,
                 gsa::ErrorCode::kInvalidArgument,
                 "audio needs at least one sample and a positive rate");
    gsa::AudioClip c;
    c.samples.assign(samples, samples + n);
    c.sample_rate_hz = sample_rate_hz;
    *out = new gsa_audio{std::move(c)};
  });
}

gsa_status gsa_audio_save(const gsa_audio* audio, const char* path) {
  return guard([&] {
    need(audio, "audio");
    need(path, "path");
    gsa::save_wav(audio->clip, path);
  });
}

size_t gsa_audio_num_samples(const gsa_audio* a) {
  return a == nullptr ? 0 : a->clip.samples.size();
}
int gsa_audio_sample_rate(const gsa_audio* a) {
  return a == nullptr ? 0 : a->clip.sample_rate_hz;
}
const double* gsa_audio_samples(const gsa_audio* a) {
  return a == nullptr ? nullptr : a->clip.samples.data();
}
void gsa_audio_free(gsa_audio* a) { delete a; }

gsa_status gsa_mel_compute(const gsa_audio* audio, const gsa_config* cfg,
                           gsa_mel** out) {
  return guard([&] {
    need(audio, "audio");
    need(cfg, "cfg");
    need(out, "out");
    *out = new gsa_mel{gsa::mel_spectrogram(audio->clip, cfg->cfg.mel)};
  });
}

gsa_status gsa_mel_load(const char* path, const gsa_config* cfg,
                        gsa_mel** out) {
  return guard([&] {
    need(path, "path");
    need(cfg, "cfg");
    need(out, "out");
    *out = new gsa_mel{gsa::load_mel(path, cfg->cfg.mel)};
  });
}

gsa_status gsa_mel_save(const gsa_mel* mel, const char* path) {
  return guard([&] {
    need(mel, "mel");
    need(path, "path");
    gsa::save_mel(mel->mel, path);
  });
}

int gsa_mel_frames(const gsa_mel* m) { return m == nullptr ? 0 : m->mel.num_frames(); }
int gsa_mel_bins(const gsa_mel* m) { return m == nullptr ? 0 : m->mel.n_mels(); }
const double* gsa_mel_data(const gsa_mel* m) {
  return m == nullptr ? nullptr : m->mel.frames.data();
}
void gsa_mel_free(gsa_mel* m) { delete m; }

gsa_status gsa_model_load(const char* path, gsa_model** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new gsa_model{gsa::load_checkpoint(path)};
  });
}

gsa_status gsa_model_config(const gsa_model* model, gsa_config** out) {
  return guard([&] {
    need(model, "model");
    need(out, "out");
    *out = new gsa_config{model->ckpt.config};
  });
}

gsa_status gsa_model_set(gsa_model* model, const char* key, const char* value) {
  return guard([&] {
    need(model, "model");
    need(key, "key");
    need(value, "value");
    const std::string k = key;
    gsa::require(k.rfind("eval.", 0) == 0, gsa::ErrorCode::kUsage,
                 "only eval.* settings can change on a trained model");
    gsa::RunConfig cfg = model->ckpt.config;
    cfg.set(k, value);
    cfg.resolve();
    model->ckpt.config = cfg;
  });
}

int gsa_model_step(const gsa_model* m) {
  return m == nullptr ? 0 : m->ckpt.state.step;
}
size_t gsa_model_num_parameters(const gsa_model* m) {
  return m == nullptr ? 0 : m->ckpt.state.params.total_elements();
}
void gsa_model_free(gsa_model* m) { delete m; }

gsa_status gsa_preprocess(const gsa_config* cfg, const char* manifest,
                          const char* outdir, gsa_string** report) {
  return guard([&] {
    need(cfg, "cfg");
    need(manifest, "manifest");
    need(outdir, "outdir");
    put_report(report, gsa::cmd_preprocess(cfg->cfg, manifest, outdir, logger()));
  });
}

gsa_status gsa_segment(const gsa_config* cfg, const gsa_segment_options* o,
                       gsa_string** report) {
  return guard([&] {
    need(cfg, "cfg");
    need(o, "opts");
    gsa::SegmentOptions s;
    s.mode = str(o->mode);
    s.audio = str(o->audio);
    s.mel = str(o->mel);
    s.timestamps = str(o->timestamps);
    s.attention = str(o->attention);
    s.seed = o->seed;
    s.min_frames = o->min_frames;
    s.plot = str(o->plot);
    put_report(report, gsa::cmd_segment(cfg->cfg, s));
  });
}

gsa_status gsa_train(const gsa_config* cfg, const char* manifest,
                     const char* outdir, gsa_string** report) {
  return guard([&] {
    need(cfg, "cfg");
    need(manifest, "manifest");
    need(outdir, "outdir");
    gsa::RunConfig c = cfg->cfg;
    c.resolve();
    put_report(report, gsa::cmd_train(c, manifest, outdir, logger()));
  });
}

gsa_status gsa_synthesize(const gsa_model* model, const gsa_synth_options* o,
                          gsa_string** report) {
  return guard([&] {
    need(model, "model");
    need(o, "opts");
    gsa::SynthOptions s;
    s.text = str(o->text);
    s.reference = to_reference(o->reference);
    s.out_mel = str(o->out_mel);
    s.out_wav = str(o->out_wav);
    s.overrides = str(o->overrides);
    put_report(report, gsa::cmd_synth(model->ckpt, s));
  });
}

gsa_status gsa_evaluate(const gsa_model* model, const gsa_eval_options* o,
                        gsa_string** report) {
  return guard([&] {
    need(model, "model");
    need(o, "opts");
    gsa::EvalOptions e;
    e.manifest = str(o->manifest);
    e.outdir = str(o->outdir);
    e.hyp_dir = str(o->hyp_dir);
    e.other_reference = str(o->other_reference);
    e.plot = o->plot != 0;
    std::stringstream tags(str(o->pos_override));
    for (std::string t; std::getline(tags, t, ',');) {
      if (!t.empty()) e.pos_override.push_back(gsa::parse_pos_tag(t));
    }
    gsa::require(!e.manifest.empty(), gsa::ErrorCode::kUsage,
                 "evaluation needs a manifest");
    put_report(report, gsa::cmd_eval(model->ckpt, e, logger()));
  });
}

gsa_status gsa_inspect(const gsa_model* model, const gsa_inspect_options* o,
                       gsa_string** report) {
  return guard([&] {
    need(model, "model");
    need(o, "opts");
    gsa::InspectOptions i;
    i.reference = to_reference(o->reference);
    i.outdir = str(o->outdir);
    i.overrides = str(o->overrides);
    i.plot = o->plot != 0;
    put_report(report, gsa::cmd_inspect(model->ckpt, i));
  });
}

gsa_status gsa_embed(const gsa_config* cfg, const char* wav, const char* out,
                     gsa_string** report) {
  return guard([&] {
    need(cfg, "cfg");
    need(wav, "wav");
    need(out, "out");
    put_report(report, gsa::cmd_embed(cfg->cfg, wav, out));
  });
}

gsa_status gsa_make_toy_corpus(const char* outdir, uint64_t seed,
                               gsa_string** report) {
  return guard([&] {
    need(outdir, "outdir");
    put_report(report, gsa::cmd_make_toy(outdir, seed));
  });
}

gsa_status gsa_grad_check(const char* selector, uint64_t seed,
                          double* max_rel_error) {
  return guard([&] {
    need(selector, "selector");
    need(max_rel_error, "max_rel_error");
    gsa::GradCheckOptions opts;
    opts.seed = seed;
    *max_rel_error = gsa::grad_check(selector, opts).max_rel_error;
  });
}

}  // extern "C"
