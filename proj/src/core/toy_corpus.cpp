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

#include "core/toy_corpus.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace gsa {

namespace {

struct Script {
  const char* text;
  const char* tags;  // one letter per word: N V A E
  int speaker;
};

constexpr Script kScripts[] = {
    {"the cat sat", "ENV", 0},       {"the sun is hot", "ENVA", 1},
    {"a big dog ran", "EANV", 0},    {"blue sky fell", "ANV", 1},
    {"we bring red tea", "EVAN", 0}, {"they eat rice", "EVN", 1},
    {"old men walk", "ANV", 0},      {"a tall tree grew", "EANV", 1},
};

constexpr double kSpeakerF0[] = {110.0, 190.0};
// Spectral tilt per speaker.
constexpr double kSpeakerTilt[] = {0.9, 1.4};

PosTag tag_of(char c) {
  switch (c) {
    case 'N': return PosTag::kNoun;
    case 'V': return PosTag::kVerb;
    case 'A': return PosTag::kAdj;
    default: return PosTag::kEtc;
  }
}

}  // namespace

AudioClip sine_tone(double freq_hz, double seconds, int sample_rate_hz,
                    double amplitude) {
  AudioClip c;
  c.sample_rate_hz = sample_rate_hz;
  const auto n = static_cast<size_t>(std::llround(seconds * sample_rate_hz));
  c.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    c.samples[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq_hz *
                                        static_cast<double>(i) / sample_rate_hz);
  }
  return c;
}

std::vector<ToyUtterance> make_toy_utterances(const MelConfig& cfg,
                                              uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> letter_frames(4, 6);
  const SymbolTable& table = SymbolTable::standard();
  std::vector<ToyUtterance> out;
  int index = 0;
  for (const Script& s : kScripts) {
    ToyUtterance u;
    u.id = "toy" + std::to_string(index++) + "_spk" + std::to_string(s.speaker);
    u.transcript = s.text;
    u.f0_hz = kSpeakerF0[s.speaker];
    const std::vector<int> ids = table.encode(u.transcript);
    for (char ch : u.transcript) {
      u.durations.push_back(ch == ' ' ? 2 : letter_frames(rng));
    }
    int frames = 0;
    for (int d : u.durations) frames += d;

    // Word intervals follow the letters.
    int word = 0;
    int start = -1;
    int t = 0;
    std::istringstream words(u.transcript);
    std::vector<std::string> tokens;
    for (std::string w; words >> w;) tokens.push_back(w);
    for (size_t i = 0; i <= u.transcript.size(); ++i) {
      const bool boundary = i == u.transcript.size() || u.transcript[i] == ' ';
      if (!boundary && start < 0) start = t;
      if (boundary && start >= 0) {
        WordInterval iv;
        iv.word_index = word;
        iv.start_frame = start;
        iv.end_frame = t;
        iv.pos_tag = tag_of(s.tags[word]);
        iv.word = tokens[static_cast<size_t>(word)];
        u.intervals.push_back(iv);
        ++word;
        start = -1;
      }
      if (i < u.transcript.size()) t += u.durations[i];
    }

    // Harmonic tone per letter, silence for spaces; the phase runs on across
    // letters so there are no clicks inside a word.
    const int hop = cfg.hop_length;
    const size_t n = static_cast<size_t>(frames - 1) * hop;
    u.audio.sample_rate_hz = cfg.sample_rate_hz;
    u.audio.samples.assign(n, 0.0);
    double phase = 0.0;
    int frame = 0;
    for (size_t i = 0; i < u.transcript.size(); ++i) {
      const char ch = u.transcript[i];
      const size_t b = static_cast<size_t>(frame) * hop;
      frame += u.durations[i];
      const size_t e = std::min(n, static_cast<size_t>(frame) * hop);
      if (ch == ' ') continue;
      const int c = ids[i];
      const double f0 = u.f0_hz * (1.0 + 0.03 * ((c % 7) - 3) / 3.0);
      double amp[8];
      double norm = 0.0;
      for (int k = 0; k < 8; ++k) {
        const double shape = 1.0 + 0.8 * std::sin((k + 1) * (c + 1) * 0.7);
        amp[k] = shape * shape / std::pow(k + 1.0, kSpeakerTilt[s.speaker]);
        norm += amp[k];
      }
      const double dphi = 2.0 * std::numbers::pi * f0 / cfg.sample_rate_hz;
      for (size_t j = b; j < e; ++j) {
        double v = 0.0;
        for (int k = 0; k < 8; ++k) v += amp[k] * std::sin((k + 1) * phase);
        u.audio.samples[j] = 0.5 * v / norm;
        phase = std::fmod(phase + dphi, 2.0 * std::numbers::pi);
      }
    }
    out.push_back(std::move(u));
  }
  return out;
}

ToyCorpusFiles write_toy_corpus(const std::string& outdir,
                                const MelConfig& cfg, uint64_t seed) {
  namespace fs = std::filesystem;
  const fs::path root(outdir);
  for (const char* sub : {"wavs", "durations", "timestamps"}) {
    fs::create_directories(root / sub);
  }
  ToyCorpusFiles files;
  files.manifest = (root / "manifest.txt").string();
  std::ofstream manifest(files.manifest, std::ios::trunc);
  require(manifest.good(), ErrorCode::kIo,
          "cannot write '" + files.manifest + "'");
  for (const ToyUtterance& u : make_toy_utterances(cfg, seed)) {
    const std::string wav = "wavs/" + u.id + ".wav";
    const std::string dur = "durations/" + u.id + ".txt";
    const std::string ts = "timestamps/" + u.id + ".tsv";
    save_wav(u.audio, (root / wav).string());
    std::ofstream d((root / dur).string(), std::ios::trunc);
    for (size_t i = 0; i < u.durations.size(); ++i) {
      d << (i ? " " : "") << u.durations[i];
    }
    d << '\n';
    require(d.good(), ErrorCode::kIo, "cannot write durations for " + u.id);
    save_timestamps(u.intervals, cfg, (root / ts).string());
    manifest << wav << '|' << u.transcript << '|' << dur << '|' << ts << '\n';
    files.ids.push_back(u.id);
  }
  require(manifest.good(), ErrorCode::kIo, "write to manifest failed");
  files.other_speaker_wav = (root / "other_speaker.wav").string();
  save_wav(sine_tone(330.0, 1.0, cfg.sample_rate_hz, 0.3),
           files.other_speaker_wav);
  return files;
}

}  // namespace gsa
