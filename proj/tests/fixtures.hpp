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

#ifndef GSA_TESTS_FIXTURES_HPP_
#define GSA_TESTS_FIXTURES_HPP_

#include <string>
#include <vector>

#include "core/toy_corpus.hpp"
#include "core/training.hpp"

namespace fixtures {

struct ToyData {
  gsa::ToyCorpusFiles files;
  std::vector<gsa::PreparedUtterance> data;
  gsa::PitchStats pitch;
};

// Writes the toy corpus under `dir` and prepares it for training.
inline ToyData toy_data(const std::string& dir, const gsa::RunConfig& cfg,
                        uint64_t seed = 7) {
  ToyData t;
  t.files = gsa::write_toy_corpus(dir, cfg.mel, seed);
  for (const auto& e : gsa::load_manifest(t.files.manifest)) {
    t.data.push_back(gsa::prepare_utterance(e, cfg));
  }
  t.pitch = gsa::pitch_stats(t.data);
  gsa::apply_pitch_targets(t.data, t.pitch);
  return t;
}

}  // namespace fixtures

#endif  // GSA_TESTS_FIXTURES_HPP_
