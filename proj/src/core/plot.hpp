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

// PNG rendering of mels, attention maps and POS statistics.

#ifndef GSA_CORE_PLOT_HPP_
#define GSA_CORE_PLOT_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "core/eval.hpp"

namespace gsa {

struct Image {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> rgb;

  Image(int w, int h);
  void set(int x, int y, uint8_t r, uint8_t g, uint8_t b);
  const uint8_t* pixel(int x, int y) const { return &rgb[3 * (y * width + x)]; }
};

void save_png(const Image& img, const std::string& path);

// Time runs left to right, low mel bands at the bottom; interval edges are
// drawn as white vertical lines.
Image render_mel(const MelSpectrogram& mel,
                 const std::vector<WordInterval>& intervals);
// Queries top to bottom, keys left to right, 0 -> dark, 1 -> bright.
Image render_attention(const Matrix& weights);
Image render_pos_bars(const PosAttentionStats& stats);

}  // namespace gsa

#endif  // GSA_CORE_PLOT_HPP_
