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

#ifndef GSA_CORE_CHECKPOINT_HPP_
#define GSA_CORE_CHECKPOINT_HPP_

#include <string>

#include "core/training.hpp"

namespace gsa {

// Parameters, optimiser moments, step counter, effective configuration and
// symbol inventory.
struct Checkpoint {
  TrainState state;
  RunConfig config;
  std::string symbols;
};

Checkpoint make_checkpoint(const TrainState& state, const RunConfig& cfg);

// "GSACKPT1": u32 entry count; per entry u16 name length, name, u8 rank,
// u32 dims, float32 data; then u32 length + "key=value" config lines.
// Optimiser moments are stored as "adam.m/<name>" and "adam.v/<name>".
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);

// Rejects files whose symbol inventory or parameter shapes do not match the
// stored configuration (version error).
Checkpoint load_checkpoint(const std::string& path);

}  // namespace gsa

#endif  // GSA_CORE_CHECKPOINT_HPP_
