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

// Synthetic two-speaker corpus of harmonic tones with scripted durations,
// word timestamps and POS tags. Small enough to overfit on a laptop.

#ifndef GSA_CORE_TOY_CORPUS_HPP_
#define GSA_CORE_TOY_CORPUS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "core/config.hpp"

namespace gsa {

struct ToyUtterance {
  std::string id;
  std::string transcript;
  double f0_hz = 0.0;
  std::vector<int> durations;
  std::vector<WordInterval> intervals;
  AudioClip audio;
};

// Deterministic in `seed`; mel frame count equals the duration sum.
std::vector<ToyUtterance> make_toy_utterances(const MelConfig& cfg,
                                              uint64_t seed);

struct ToyCorpusFiles {
  std::string manifest;
  std::string other_speaker_wav;  // plain tone from an unseen "speaker"
  std::vector<std::string> ids;
};

// Writes wavs/, durations/, timestamps/, manifest.txt and other_speaker.wav.
ToyCorpusFiles write_toy_corpus(const std::string& outdir,
                                const MelConfig& cfg, uint64_t seed);

AudioClip sine_tone(double freq_hz, double seconds, int sample_rate_hz,
                    double amplitude);

}  // namespace gsa

#endif  // GSA_CORE_TOY_CORPUS_HPP_
