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

#include "core/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/plot.hpp"
#include "core/toy_corpus.hpp"

namespace gsa {

namespace fs = std::filesystem;

namespace {

void emit(const LogFn& log, const std::string& msg) {
  if (log) log(msg);
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  require(out.good(), ErrorCode::kIo,
          "cannot open '" + path.string() + "' for writing");
  out << text;
  require(out.good(), ErrorCode::kIo, "write to '" + path.string() + "' failed");
}

std::optional<std::string> read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in.good()) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  std::string s = ss.str();
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

void ensure_dir(const std::string& dir) {
  require(!dir.empty(), ErrorCode::kUsage, "an output directory is required");
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorCode::kIo, "cannot create '" + dir + "': " + ec.message());
}

void ensure_parent(const std::string& file) {
  const fs::path parent = fs::path(file).parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
}

MelSpectrogram floor_clamped(const MelSpectrogram& mel) {
  MelSpectrogram out = mel;
  out.frames = out.frames.cwiseMax(std::log(mel.config.log_floor));
  return out;
}

std::string segment_listing(const std::vector<WordInterval>& intervals) {
  std::ostringstream os;
  os << "index\tword\tstart_frame\tend_frame\tframes\tpos\n";
  for (size_t i = 0; i < intervals.size(); ++i) {
    const WordInterval& iv = intervals[i];
    os << i << '\t' << (iv.word.empty() ? "_" : iv.word) << '\t'
       << iv.start_frame << '\t' << iv.end_frame << '\t' << iv.length() << '\t'
       << (iv.pos_tag ? pos_tag_name(*iv.pos_tag) : "-") << '\n';
  }
  return os.str();
}

std::vector<WordInterval> attention_intervals(const std::string& path,
                                              int* dropped) {
  const CrossAttentionMatrix attn = load_cross_attention(path);
  const IntervalResult r = intervals_from_path(dtw_align(attn), attn);
  if (dropped != nullptr) *dropped = r.dropped_words;
  return r.intervals;
}

std::vector<WordInterval> reference_intervals(const StyleReference& ref,
                                              const RunConfig& cfg,
                                              const MelSpectrogram& mel) {
  if (cfg.gsa.ablation == Ablation::kRandomSlices) {
    std::vector<WordInterval> out;
    for (const auto& s :
         random_slice_segments(mel, cfg.random_slice_frames, ref.seed).segments) {
      out.push_back(s.interval);
    }
    return out;
  }
  std::vector<WordInterval> iv;
  if (!ref.timestamps.empty()) {
    iv = load_timestamps(ref.timestamps, mel).intervals;
  } else if (!ref.attention.empty()) {
    iv = attention_intervals(ref.attention, nullptr);
    for (const auto& w : iv) {
      require(w.end_frame <= mel.num_frames(), ErrorCode::kData,
              "attention matrix covers more frames than the reference mel");
    }
  } else {
    fail(ErrorCode::kUsage,
         "the style reference needs word timestamps or a cross-attention "
         "matrix");
  }
  require(!iv.empty(), ErrorCode::kData, "reference has no word interval");
  return iv;
}

std::string word_list(const std::vector<WordInterval>& intervals) {
  std::string out;
  for (size_t i = 0; i < intervals.size(); ++i) {
    out += (i ? ", " : "") + (intervals[i].word.empty() ? std::string("_")
                                                        : intervals[i].word);
  }
  return out;
}

std::vector<PreparedUtterance> prepare_all(const RunConfig& cfg,
                                           const std::string& manifest,
                                           const LogFn& log, int* failures,
                                           bool strict) {
  std::vector<PreparedUtterance> data;
  for (const ManifestEntry& e : load_manifest(manifest)) {
    try {
      data.push_back(prepare_utterance(e, cfg));
    } catch (const Error& err) {
      if (strict) throw;
      emit(log, std::string("warning: skipping ") + err.what());
      if (failures != nullptr) ++*failures;
    }
  }
  return data;
}

}  // namespace

Reference load_reference(const std::string& wav_path, const RunConfig& cfg) {
  require(!wav_path.empty(), ErrorCode::kUsage, "a reference wav is required");
  AudioClip clip = load_wav(wav_path);
  if (clip.sample_rate_hz != cfg.mel.sample_rate_hz) {
    clip = resample(clip, cfg.mel.sample_rate_hz);
  }
  Reference r;
  r.audio = normalize_loudness(clip, cfg.loudness_dbfs).clip;
  r.mel = mel_spectrogram(r.audio, cfg.mel);
  return r;
}

// ---- preprocess -------------------------------------------------------------

std::string cmd_preprocess(const RunConfig& cfg, const std::string& manifest,
                           const std::string& outdir, const LogFn& log) {
  ensure_dir(outdir);
  const std::vector<ManifestEntry> entries = load_manifest(manifest);
  if (entries.empty()) emit(log, "warning: manifest '" + manifest + "' is empty");
  int ok = 0, failures = 0;
  long frames = 0;
  size_t clipped = 0;
  std::ostringstream table;
  table << "id\tframes\tvoiced_ratio\tgain\tclipped\n";
  for (const ManifestEntry& e : entries) {
    try {
      AudioClip clip = load_wav(e.wav_path);
      if (clip.sample_rate_hz != cfg.mel.sample_rate_hz) {
        clip = resample(clip, cfg.mel.sample_rate_hz);
      }
      const LoudnessResult loud = normalize_loudness(clip, cfg.loudness_dbfs);
      const MelSpectrogram mel = mel_spectrogram(loud.clip, cfg.mel);
      const FrameAnalysis fa =
          analyze_frames(loud.clip, cfg.mel, cfg.voicing.f0_min_hz,
                         cfg.voicing.f0_max_hz, cfg.voicing.threshold);
      save_mel(mel, (fs::path(outdir) / (e.id + ".mel")).string());
      save_frame_analysis(fa, (fs::path(outdir) / (e.id + ".frames.txt")).string());
      ++ok;
      frames += mel.num_frames();
      clipped += loud.clipped_samples;
      table << e.id << '\t' << mel.num_frames() << '\t' << fmt(fa.voiced_ratio())
            << '\t' << fmt(loud.gain) << '\t' << loud.clipped_samples << '\n';
    } catch (const Error& err) {
      ++failures;
      emit(log, "warning: entry '" + e.id + "' failed: " + err.what());
    }
  }
  cfg.save((fs::path(outdir) / "config.ini").string());
  std::ostringstream summary;
  summary << "entries=" << entries.size() << "\nprocessed=" << ok
          << "\nfailures=" << failures << "\ntotal_frames=" << frames
          << "\nclipped_samples=" << clipped << '\n';
  write_text(fs::path(outdir) / "summary.txt", summary.str() + table.str());
  require(entries.empty() || ok > 0, ErrorCode::kData,
          "every manifest entry failed to preprocess");
  return summary.str();
}

// ---- segment ----------------------------------------------------------------

std::string cmd_segment(const RunConfig& cfg, const SegmentOptions& opts) {
  std::optional<MelSpectrogram> mel;
  auto need_mel = [&]() -> const MelSpectrogram& {
    if (!mel) {
      if (!opts.mel.empty()) {
        mel = load_mel(opts.mel, cfg.mel);
      } else if (!opts.audio.empty()) {
        mel = load_reference(opts.audio, cfg).mel;
      } else {
        fail(ErrorCode::kUsage, "segment mode '" + opts.mode +
                                    "' needs --audio or --mel");
      }
    }
    return *mel;
  };

  std::vector<WordInterval> intervals;
  std::ostringstream notes;
  if (opts.mode == "timestamps") {
    require(!opts.timestamps.empty(), ErrorCode::kUsage,
            "timestamps mode needs --timestamps");
    const TimestampResult r = load_timestamps(opts.timestamps, need_mel());
    intervals = r.intervals;
    if (r.dropped_empty > 0) {
      notes << "# dropped " << r.dropped_empty << " zero-length word(s)\n";
    }
  } else if (opts.mode == "attention") {
    require(!opts.attention.empty(), ErrorCode::kUsage,
            "attention mode needs --attention");
    int dropped = 0;
    intervals = attention_intervals(opts.attention, &dropped);
    if (dropped > 0) {
      notes << "# dropped " << dropped << " word(s) without frames\n";
    }
  } else if (opts.mode == "random") {
    const int min_frames =
        opts.min_frames > 0 ? opts.min_frames : cfg.random_slice_frames;
    const RandomSliceResult r =
        random_slice_segments(need_mel(), min_frames, opts.seed);
    for (const auto& s : r.segments) intervals.push_back(s.interval);
    if (r.fallback) {
      notes << "# mel shorter than " << min_frames
            << " frames: single fallback segment\n";
    }
  } else {
    fail(ErrorCode::kUsage, "unknown segment mode '" + opts.mode +
                                "' (expected timestamps, attention or random)");
  }
  if (!opts.plot.empty()) {
    save_png(render_mel(need_mel(), intervals), opts.plot);
  }
  return notes.str() + segment_listing(intervals);
}

// ---- train ------------------------------------------------------------------

std::string cmd_train(const RunConfig& cfg, const std::string& manifest,
                      const std::string& outdir, const LogFn& log) {
  ensure_dir(outdir);
  const fs::path out(outdir);
  cfg.save((out / "config.ini").string());
  std::vector<PreparedUtterance> data =
      prepare_all(cfg, manifest, log, nullptr, true);
  TrainState start = init_train_state(cfg);
  start.pitch = pitch_stats(data);
  apply_pitch_targets(data, start.pitch);
  emit(log, "loaded " + std::to_string(data.size()) + " utterances");

  std::ofstream loss_log(out / "loss.tsv", std::ios::trunc);
  require(loss_log.good(), ErrorCode::kIo, "cannot write loss log");
  loss_log << "step\tmel\tpitch\tdur\ttotal\n";
  loss_log.precision(9);
  TrainCallbacks cb;
  cb.on_step = [&](const LossReport& r) {
    loss_log << r.step << '\t' << r.mel_loss << '\t' << r.pitch_loss << '\t'
             << r.dur_loss << '\t' << r.total << '\n';
    if (cfg.train.log_every > 0 &&
        (r.step % cfg.train.log_every == 0 || r.step == 1)) {
      emit(log, "step " + std::to_string(r.step) + " loss " + fmt(r.total) +
                    " (mel " + fmt(r.mel_loss) + ")");
    }
  };
  cb.on_checkpoint = [&](const TrainState& st) {
    const std::string p =
        (out / ("ckpt_" + std::to_string(st.step) + ".ckpt")).string();
    save_checkpoint(make_checkpoint(st, cfg), p);
    emit(log, "wrote " + p);
  };
  const double l1_before =
      data.empty() ? 0.0 : teacher_forced_l1(start.params, data, cfg);
  TrainResult result = train(data, cfg, cb, &start);
  loss_log.close();
  const std::string model = (out / "model.ckpt").string();
  save_checkpoint(make_checkpoint(result.state, cfg), model);
  const double l1_after =
      data.empty() ? 0.0 : teacher_forced_l1(result.state.params, data, cfg);

  std::ostringstream os;
  os << "utterances=" << data.size() << "\nsteps=" << result.state.step
     << "\nparameters=" << result.state.params.total_elements()
     << "\ncheckpoint=" << model << "\nteacher_forced_l1_initial="
     << fmt(l1_before) << "\nteacher_forced_l1_final=" << fmt(l1_after)
     << '\n';
  if (!result.losses.empty()) {
    os << "final_loss=" << fmt(result.losses.back().total) << '\n';
  }
  return os.str();
}

// ---- overrides --------------------------------------------------------------

std::vector<WordWeight> parse_word_overrides(const std::string& spec) {
  std::vector<WordWeight> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const size_t eq = item.rfind('=');
    require(eq != std::string::npos && eq > 0, ErrorCode::kUsage,
            "override '" + item + "' is not word=weight");
    WordWeight w;
    w.word = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      size_t used = 0;
      w.weight = std::stod(value, &used);
      require(used == value.size(), ErrorCode::kUsage, "");
    } catch (const std::exception&) {
      fail(ErrorCode::kUsage, "override weight '" + value + "' is not a number");
    }
    require(std::isfinite(w.weight) && w.weight >= 0.0, ErrorCode::kUsage,
            "override weights must be finite and >= 0");
    const size_t hash = w.word.rfind('#');
    if (hash != std::string::npos) {
      const std::string k = w.word.substr(hash + 1);
      try {
        w.occurrence = std::stoi(k);
      } catch (const std::exception&) {
        fail(ErrorCode::kUsage, "bad occurrence '#" + k + "' in override");
      }
      require(w.occurrence >= 1, ErrorCode::kUsage,
              "occurrence numbers start at 1");
      w.word.resize(hash);
    }
    out.push_back(w);
  }
  require(!out.empty(), ErrorCode::kUsage, "empty override list");
  return out;
}

nn::AttentionOverride word_override(const std::vector<WordInterval>& intervals,
                                    const RowVector& baseline,
                                    const std::vector<WordWeight>& words) {
  require(baseline.size() == static_cast<Eigen::Index>(intervals.size()),
          ErrorCode::kData, "baseline weights and segments disagree");
  nn::AttentionOverride o;
  o.mode = nn::AttentionOverride::Mode::kReplace;
  o.weights = baseline;
  for (const WordWeight& w : words) {
    int seen = 0;
    int hit = -1;
    for (size_t i = 0; i < intervals.size(); ++i) {
      if (normalize_text(intervals[i].word) == normalize_text(w.word) &&
          ++seen == w.occurrence) {
        hit = static_cast<int>(i);
        break;
      }
    }
    require(hit >= 0, ErrorCode::kUsage,
            "override word '" + w.word +
                (w.occurrence > 1 ? "#" + std::to_string(w.occurrence) : "") +
                "' is not in the reference; available words: " +
                word_list(intervals));
    o.weights(hit) = w.weight;
  }
  require(o.weights.maxCoeff() > 0.0, ErrorCode::kUsage,
          "override needs at least one positive weight");
  return o;
}

// ---- synth ------------------------------------------------------------------

std::string cmd_synth(const Checkpoint& ckpt, const SynthOptions& opts) {
  const RunConfig& cfg = ckpt.config;
  require(!opts.text.empty(), ErrorCode::kUsage, "nothing to synthesise");
  require(!opts.out_mel.empty(), ErrorCode::kUsage, "an output mel path is required");
  const Reference ref = load_reference(opts.reference.audio, cfg);
  const std::vector<WordInterval> intervals =
      reference_intervals(opts.reference, cfg, ref.mel);
  const std::vector<int> symbols = SymbolTable::standard().encode(opts.text);

  StyleResult style = encode_style(ckpt.state.params, ref.mel, intervals, cfg.gsa);
  std::ostringstream os;
  if (!opts.overrides.empty()) {
    const nn::AttentionOverride o = word_override(
        intervals, style.record.aggregate(cfg.eval.agg_layer, cfg.eval.agg_head),
        parse_word_overrides(opts.overrides));
    style = encode_style(ckpt.state.params, ref.mel, intervals, cfg.gsa, &o);
    os << "override=";
    for (Eigen::Index i = 0; i < o.weights.size(); ++i) {
      os << (i ? "," : "") << fmt(o.weights(i));
    }
    os << '\n';
  }
  const SynthesisResult syn = synthesize_mel(
      ckpt.state.params, symbols, style.global.vector, cfg.acoustic, cfg.mel);
  const MelSpectrogram mel = floor_clamped(syn.mel);
  ensure_parent(opts.out_mel);
  save_mel(mel, opts.out_mel);
  os << "frames=" << mel.num_frames() << "\nsegments=" << intervals.size()
     << "\nmel=" << opts.out_mel << '\n';
  if (!opts.out_wav.empty()) {
    const GriffinLimResult gl =
        griffin_lim_invert(mel, cfg.eval.griffin_lim_iters);
    ensure_parent(opts.out_wav);
    save_wav(gl.audio, opts.out_wav);
    os << "wav=" << opts.out_wav << "\nspectral_convergence="
       << fmt(gl.convergence.empty() ? 0.0 : gl.convergence.back()) << '\n';
  }
  return os.str();
}

// ---- eval -------------------------------------------------------------------

std::string cmd_eval(const Checkpoint& ckpt, const EvalOptions& opts,
                     const LogFn& log) {
  const RunConfig& cfg = ckpt.config;
  const ParamTable& params = ckpt.state.params;
  ensure_dir(opts.outdir);
  const fs::path out(opts.outdir);
  int failures = 0;
  std::vector<PreparedUtterance> data =
      prepare_all(cfg, opts.manifest, log, &failures, false);
  require(!data.empty(), ErrorCode::kData, "no usable evaluation entries");
  apply_pitch_targets(data, ckpt.state.pitch);

  std::optional<SpeakerEmbedding> other;
  if (!opts.other_reference.empty()) {
    other = embed_speaker(load_reference(opts.other_reference, cfg).audio,
                          cfg.mel, cfg.voicing);
  }

  std::vector<AttentionRecord> records;
  VoicedFrameRatio voiced;
  std::vector<double> l1s, secs_self, secs_other, wers, cers;
  std::ostringstream table;
  table << "id\tframes\ttf_l1\tsecs_self\tsecs_other\twer\tcer\n";
  for (const auto& u : data) {
    const std::vector<WordInterval> iv = style_intervals(u, cfg, cfg.train.seed);
    const StyleResult style = encode_style(params, u.mel, iv, cfg.gsa);
    records.push_back(style.record);
    voiced.add(u.analysis, u.intervals);

    const Teacher teacher{u.durations, u.pitch};
    const SynthesisResult tf = synthesize_mel(
        params, u.symbols, style.global.vector, cfg.acoustic, cfg.mel, &teacher);
    const double l1 = (tf.mel.frames - u.mel.frames).cwiseAbs().mean();
    l1s.push_back(l1);

    std::string s_self = "n/a", s_other = "n/a", w = "n/a", c = "n/a";
    try {
      const SynthesisResult syn = synthesize_mel(
          params, u.symbols, style.global.vector, cfg.acoustic, cfg.mel);
      const AudioClip audio =
          griffin_lim_invert(floor_clamped(syn.mel), cfg.eval.griffin_lim_iters)
              .audio;
      const SpeakerEmbedding e = embed_speaker(audio, cfg.mel, cfg.voicing);
      const double ss =
          secs(e, embed_speaker(u.audio, cfg.mel, cfg.voicing));
      secs_self.push_back(ss);
      s_self = fmt(ss);
      if (other) {
        const double so = secs(e, *other);
        secs_other.push_back(so);
        s_other = fmt(so);
      }
    } catch (const Error& err) {
      emit(log, "warning: no SECS for '" + u.id + "': " + err.what());
    }
    if (!opts.hyp_dir.empty()) {
      if (auto hyp = read_text(fs::path(opts.hyp_dir) / (u.id + ".txt"))) {
        const double wv = wer(u.transcript, *hyp);
        const double cv = cer(u.transcript, *hyp);
        wers.push_back(wv);
        cers.push_back(cv);
        w = fmt(wv);
        c = fmt(cv);
      }
    }
    table << u.id << '\t' << u.mel.num_frames() << '\t' << fmt(l1) << '\t'
          << s_self << '\t' << s_other << '\t' << w << '\t' << c << '\n';
  }

  auto mean = [](const std::vector<double>& v) {
    if (v.empty()) return std::string("n/a");
    double s = 0.0;
    for (double x : v) s += x;
    return fmt(s / static_cast<double>(v.size()));
  };
  const PosAttentionStats pos =
      pos_attention_stats(records, cfg.eval.agg_layer, cfg.eval.agg_head);
  std::ostringstream m;
  m << "utterances=" << data.size() << "\nfailures=" << failures
    << "\nteacher_forced_l1=" << mean(l1s) << "\nsecs_self=" << mean(secs_self)
    << "\nsecs_other=" << mean(secs_other) << "\nwer=" << mean(wers)
    << "\ncer=" << mean(cers) << '\n'
    << format_voiced_ratio(voiced) << format_pos_stats(pos);
  write_text(out / "metrics.txt", m.str());
  write_text(out / "per_utterance.tsv", table.str());
  if (opts.plot) save_png(render_pos_bars(pos), (out / "pos_stats.png").string());

  if (!opts.pos_override.empty()) {
    HypothesisLookup hyps;
    if (!opts.hyp_dir.empty()) {
      hyps = [&](const std::string& id, const std::string& cond) {
        return read_text(fs::path(opts.hyp_dir) / (id + "." + cond + ".txt"));
      };
    }
    const OverrideExperiment ex =
        pos_override_experiment(params, cfg, data, opts.pos_override, hyps);
    const std::string text = format_override_experiment(ex);
    write_text(out / "pos_override.tsv", text);
    m << text.substr(0, text.find("id\t"));
  }
  return m.str();
}

// ---- inspect ----------------------------------------------------------------

std::string cmd_inspect(const Checkpoint& ckpt, const InspectOptions& opts) {
  const RunConfig& cfg = ckpt.config;
  ensure_dir(opts.outdir);
  const fs::path out(opts.outdir);
  const Reference ref = load_reference(opts.reference.audio, cfg);
  const std::vector<WordInterval> intervals =
      reference_intervals(opts.reference, cfg, ref.mel);
  auto dump = [&](const StyleResult& st, const std::string& tag) {
    write_text(out / (tag + ".tsv"), attention_table(st.record));
    if (!opts.plot) return;
    for (size_t l = 0; l < st.record.layers.size(); ++l) {
      for (size_t h = 0; h < st.record.layers[l].size(); ++h) {
        save_png(render_attention(st.record.layers[l][h]),
                 (out / (tag + "_l" + std::to_string(l) + "_h" +
                         std::to_string(h) + ".png"))
                     .string());
      }
    }
  };
  StyleResult style = encode_style(ckpt.state.params, ref.mel, intervals, cfg.gsa);
  dump(style, "attention");
  if (!opts.overrides.empty()) {
    const nn::AttentionOverride o = word_override(
        intervals, style.record.aggregate(cfg.eval.agg_layer, cfg.eval.agg_head),
        parse_word_overrides(opts.overrides));
    style = encode_style(ckpt.state.params, ref.mel, intervals, cfg.gsa, &o);
    dump(style, "attention_override");
  }
  if (opts.plot) {
    save_png(render_mel(ref.mel, intervals), (out / "reference.png").string());
  }
  const RowVector agg =
      style.record.aggregate(cfg.eval.agg_layer, cfg.eval.agg_head);
  std::ostringstream os;
  os << "index\tword\tpos\tweight\n";
  for (size_t i = 0; i < intervals.size(); ++i) {
    os << i << '\t' << (intervals[i].word.empty() ? "_" : intervals[i].word)
       << '\t'
       << (intervals[i].pos_tag ? pos_tag_name(*intervals[i].pos_tag) : "-")
       << '\t' << fmt(agg(static_cast<Eigen::Index>(i))) << '\n';
  }
  os << "max_segment=" << argmax_lowest(agg) << '\n';
  return os.str();
}

// ---- misc -------------------------------------------------------------------

std::string cmd_embed(const RunConfig& cfg, const std::string& wav,
                      const std::string& out) {
  require(!out.empty(), ErrorCode::kUsage, "an output path is required");
  const SpeakerEmbedding e =
      embed_speaker(load_reference(wav, cfg).audio, cfg.mel, cfg.voicing);
  save_embedding(e, out);
  return "dim=" + std::to_string(e.vector.size()) + "\nembedder=" +
         e.embedder_id + "\nout=" + out + '\n';
}

std::string cmd_make_toy(const std::string& outdir, uint64_t seed) {
  ensure_dir(outdir);
  const RunConfig cfg = toy_run_config();
  const ToyCorpusFiles files = write_toy_corpus(outdir, cfg.mel, seed);
  const std::string config = (fs::path(outdir) / "config.ini").string();
  cfg.save(config);
  return "manifest=" + files.manifest + "\nconfig=" + config +
         "\nother_speaker=" + files.other_speaker_wav +
         "\nutterances=" + std::to_string(files.ids.size()) + '\n';
}

}  // namespace gsa
