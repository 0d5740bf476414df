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

// gsa: command-line front end over the gradstyle C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gradstyle/gradstyle.h"

namespace {

struct Globals {
  std::string config;
  std::vector<std::string> sets;
  uint64_t seed = 0;
  bool seed_given = false;
  std::string ablation;
  std::string outdir = ".";
  int agg_layer = -2;  // -2: keep stored value
  std::string agg_heads;
  bool plot = false;
  bool quiet = false;
};

struct Failure {
  gsa_status status;
};

void check(gsa_status s) {
  if (s != GSA_OK) throw Failure{s};
}

void print_report(gsa_string* report) {
  if (report == nullptr) return;
  std::fwrite(gsa_string_data(report), 1, gsa_string_size(report), stdout);
  gsa_string_free(report);
}

struct ConfigHandle {
  gsa_config* p = nullptr;
  ~ConfigHandle() { gsa_config_free(p); }
};

struct ModelHandle {
  gsa_model* p = nullptr;
  ~ModelHandle() { gsa_model_free(p); }
};

void apply_set(gsa_config* cfg, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos) {
    std::fprintf(stderr, "gsa: --set expects key=value, got '%s'\n",
                 kv.c_str());
    throw Failure{GSA_ERR_USAGE};
  }
  check(gsa_config_set(cfg, kv.substr(0, eq).c_str(),
                       kv.substr(eq + 1).c_str()));
}

void load_config(const Globals& g, ConfigHandle& h) {
  if (g.config.empty()) {
    check(gsa_config_default(&h.p));
  } else {
    check(gsa_config_load(g.config.c_str(), &h.p));
  }
  for (const auto& kv : g.sets) apply_set(h.p, kv);
  if (g.seed_given) {
    check(gsa_config_set(h.p, "train.seed", std::to_string(g.seed).c_str()));
  }
  if (!g.ablation.empty()) {
    check(gsa_config_set(h.p, "gsa.ablation", g.ablation.c_str()));
  }
  check(gsa_config_resolve(h.p));
}

void load_model(const Globals& g, const std::string& path, ModelHandle& h) {
  check(gsa_model_load(path.c_str(), &h.p));
  if (g.agg_layer != -2) {
    check(gsa_model_set(h.p, "eval.agg_layer",
                        std::to_string(g.agg_layer).c_str()));
  }
  if (!g.agg_heads.empty()) {
    const std::string v = g.agg_heads == "mean" ? "-1" : g.agg_heads;
    check(gsa_model_set(h.p, "eval.agg_head", v.c_str()));
  }
  for (const auto& kv : g.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Failure{GSA_ERR_USAGE};
    check(gsa_model_set(h.p, kv.substr(0, eq).c_str(),
                        kv.substr(eq + 1).c_str()));
  }
}

const char* opt(const std::string& s) {
  return s.empty() ? nullptr : s.c_str();
}

std::string in_outdir(const Globals& g, const std::string& name) {
  return (std::filesystem::path(g.outdir) / name).string();
}

void log_to_stderr(const char* message, void* user) {
  if (*static_cast<bool*>(user)) return;
  std::fprintf(stderr, "%s\n", message);
}

struct RefArgs {
  std::string audio;
  std::string timestamps;
  std::string attention;
};

void add_ref_options(CLI::App* cmd, RefArgs& r) {
  cmd->add_option("--ref", r.audio, "Reference wav")->required();
  cmd->add_option("--ref-timestamps", r.timestamps, "Reference word timestamps");
  cmd->add_option("--ref-attention", r.attention,
                  "Reference word intervals from a GSAATT1 attention file");
}

gsa_reference to_ref(const RefArgs& r, const Globals& g) {
  return gsa_reference{opt(r.audio), opt(r.timestamps), opt(r.attention),
                       g.seed};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grad-style attention TTS toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(gsa_version()));

  Globals g;
  app.add_option("--config", g.config, "Configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--set", g.sets, "Override a config key: section.key=value");
  app.add_option_function<uint64_t>(
      "--seed",
      [&](const uint64_t& s) {
        g.seed = s;
        g.seed_given = true;
      },
      "Seed for training and random segmentation");
  app.add_option("--ablation", g.ablation, "Style encoder variant")
      ->check(CLI::IsMember({"full", "no_gse", "no_lse", "random_slices"}));
  app.add_option("--outdir", g.outdir, "Output directory");
  app.add_option("--agg-layer", g.agg_layer,
                 "GSE layer used for aggregated attention (-1: last)");
  app.add_option("--agg-heads", g.agg_heads,
                 "Head used for aggregated attention, or 'mean'");
  app.add_flag("--plot", g.plot, "Write PNG plots");
  app.add_flag("-q,--quiet", g.quiet, "Suppress progress lines");
  app.fallthrough();

  // preprocess
  std::string manifest;
  auto* pre = app.add_subcommand("preprocess", "Build the feature cache");
  pre->add_option("manifest", manifest)->required();

  // segment
  std::string seg_mode = "timestamps", seg_audio, seg_mel, seg_ts, seg_att;
  int seg_min = 0;
  auto* seg = app.add_subcommand("segment", "List the word segments of a clip");
  seg->add_option("--mode", seg_mode)
      ->check(CLI::IsMember({"timestamps", "attention", "random"}));
  seg->add_option("--audio", seg_audio, "Reference wav");
  seg->add_option("--mel", seg_mel, "Reference GSAMEL1 file");
  seg->add_option("--timestamps", seg_ts);
  seg->add_option("--attention", seg_att);
  seg->add_option("--min-frames", seg_min);

  // train
  auto* tr = app.add_subcommand("train", "Train a model");
  tr->add_option("manifest", manifest)->required();

  // synth
  std::string ckpt, text, out_mel, wav, overrides;
  RefArgs ref;
  auto* syn = app.add_subcommand("synth", "Synthesize a mel spectrogram");
  syn->add_option("checkpoint", ckpt)->required();
  syn->add_option("--text", text)->required();
  add_ref_options(syn, ref);
  syn->add_option("--out", out_mel, "Output mel (default <outdir>/synth.mel)");
  syn->add_option("--wav", wav, "Also write Griffin-Lim audio");
  syn->add_option("--override", overrides, "word=weight,word#2=weight");

  // eval
  std::string hyp_dir, other_ref, pos_override;
  auto* ev = app.add_subcommand("eval", "Evaluate a model on a manifest");
  ev->add_option("checkpoint", ckpt)->required();
  ev->add_option("manifest", manifest)->required();
  ev->add_option("--hyp-dir", hyp_dir, "Directory of hypothesis transcripts");
  ev->add_option("--other-ref", other_ref, "Wav of a different speaker");
  ev->add_option("--pos-override", pos_override,
                 "Tags whose segments keep attention, e.g. ADJ,NOUN");

  // inspect
  auto* ins = app.add_subcommand("inspect", "Dump style attention");
  ins->add_option("checkpoint", ckpt)->required();
  add_ref_options(ins, ref);
  ins->add_option("--override", overrides, "word=weight,word#2=weight");

  // embed
  std::string embed_wav, embed_out;
  auto* emb = app.add_subcommand("embed", "Write a speaker embedding");
  emb->add_option("wav", embed_wav)->required();
  emb->add_option("--out", embed_out, "Output file (default <outdir>/<stem>.emb)");

  // make-toy
  std::string toy_dir;
  auto* toy = app.add_subcommand("make-toy", "Write the synthetic toy corpus");
  toy->add_option("dir", toy_dir)->required();

  // gradcheck
  std::string selector;
  auto* gc = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  gc->add_option("selector", selector)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return GSA_ERR_USAGE;
  }

  gsa_set_log_callback(log_to_stderr, &g.quiet);
  gsa_string* report = nullptr;
  try {
    if (*pre) {
      ConfigHandle cfg;
      load_config(g, cfg);
      check(gsa_preprocess(cfg.p, manifest.c_str(), g.outdir.c_str(), &report));
    } else if (*seg) {
      ConfigHandle cfg;
      load_config(g, cfg);
      const std::string plot = g.plot ? in_outdir(g, "segments.png") : "";
      gsa_segment_options o{seg_mode.c_str(), opt(seg_audio), opt(seg_mel),
                            opt(seg_ts),      opt(seg_att),   g.seed,
                            seg_min,          opt(plot)};
      check(gsa_segment(cfg.p, &o, &report));
    } else if (*tr) {
      ConfigHandle cfg;
      load_config(g, cfg);
      check(gsa_train(cfg.p, manifest.c_str(), g.outdir.c_str(), &report));
    } else if (*syn) {
      ModelHandle m;
      load_model(g, ckpt, m);
      if (out_mel.empty()) out_mel = in_outdir(g, "synth.mel");
      gsa_synth_options o{text.c_str(), to_ref(ref, g), out_mel.c_str(),
                          opt(wav), opt(overrides)};
      check(gsa_synthesize(m.p, &o, &report));
    } else if (*ev) {
      ModelHandle m;
      load_model(g, ckpt, m);
      gsa_eval_options o{manifest.c_str(), g.outdir.c_str(), opt(hyp_dir),
                         opt(other_ref), opt(pos_override), g.plot ? 1 : 0};
      check(gsa_evaluate(m.p, &o, &report));
    } else if (*ins) {
      ModelHandle m;
      load_model(g, ckpt, m);
      gsa_inspect_options o{to_ref(ref, g), g.outdir.c_str(), opt(overrides),
                            g.plot ? 1 : 0};
      check(gsa_inspect(m.p, &o, &report));
    } else if (*emb) {
      ConfigHandle cfg;
      load_config(g, cfg);
      if (embed_out.empty()) {
        embed_out = in_outdir(
            g, std::filesystem::path(embed_wav).stem().string() + ".emb");
      }
      check(gsa_embed(cfg.p, embed_wav.c_str(), embed_out.c_str(), &report));
    } else if (*toy) {
      check(gsa_make_toy_corpus(toy_dir.c_str(), g.seed_given ? g.seed : 7,
                                &report));
    } else if (*gc) {
      double err = 0.0;
      check(gsa_grad_check(selector.c_str(), g.seed_given ? g.seed : 1, &err));
      std::printf("%s max_rel_error %.3e\n", selector.c_str(), err);
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "gsa: %s error: %s\n", gsa_status_name(f.status),
                 gsa_last_error());
    return static_cast<int>(f.status);
  }
  print_report(report);
  return 0;
}
