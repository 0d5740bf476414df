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

#include "core/plot.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace gsa {

namespace {

// Dark blue -> teal -> yellow ramp.
void colormap(double v, uint8_t* out) {
  static const double stops[5][3] = {{0.27, 0.00, 0.33},
                                     {0.23, 0.32, 0.55},
                                     {0.13, 0.57, 0.55},
                                     {0.37, 0.79, 0.38},
                                     {0.99, 0.91, 0.14}};
  v = std::clamp(v, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(v));
  const double f = v - i;
  for (int c = 0; c < 3; ++c) {
    const double x = stops[i][c] * (1.0 - f) + stops[i + 1][c] * f;
    out[c] = static_cast<uint8_t>(std::lround(255.0 * x));
  }
}

struct FileCloser {
  void operator()(FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};

}  // namespace

Image::Image(int w, int h) : width(w), height(h) {
  require(w > 0 && h > 0, ErrorCode::kInvalidArgument, "empty image");
  rgb.assign(static_cast<size_t>(w) * h * 3, 255);
}

void Image::set(int x, int y, uint8_t r, uint8_t g, uint8_t b) {
  if (x < 0 || y < 0 || x >= width || y >= height) return;
  uint8_t* p = &rgb[3 * (static_cast<size_t>(y) * width + x)];
  p[0] = r;
  p[1] = g;
  p[2] = b;
}

void save_png(const Image& img, const std::string& path) {
  std::unique_ptr<FILE, FileCloser> fp(std::fopen(path.c_str(), "wb"));
  require(fp != nullptr, ErrorCode::kIo,
          "cannot open '" + path + "' for writing");
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  require(png != nullptr, ErrorCode::kIo, "libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    fail(ErrorCode::kIo, "libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorCode::kIo, "failed to write PNG '" + path + "'");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
               static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < img.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(img.pixel(0, y)));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Image render_mel(const MelSpectrogram& mel,
                 const std::vector<WordInterval>& intervals) {
  const int t = mel.num_frames(), m = mel.n_mels();
  const int sx = std::max(1, 600 / std::max(t, 1));
  const int sy = std::max(1, 240 / std::max(m, 1));
  Image img(t * sx, m * sy);
  const double lo = mel.frames.minCoeff();
  const double hi = mel.frames.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;
  uint8_t c[3];
  for (int f = 0; f < t; ++f) {
    for (int b = 0; b < m; ++b) {
      colormap((mel.frames(f, b) - lo) / span, c);
      for (int dx = 0; dx < sx; ++dx) {
        for (int dy = 0; dy < sy; ++dy) {
          img.set(f * sx + dx, (m - 1 - b) * sy + dy, c[0], c[1], c[2]);
        }
      }
    }
  }
  for (const auto& iv : intervals) {
    for (int edge : {iv.start_frame * sx, iv.end_frame * sx - 1}) {
      for (int y = 0; y < img.height; ++y) img.set(edge, y, 255, 255, 255);
    }
  }
  return img;
}

Image render_attention(const Matrix& weights) {
  const int n = static_cast<int>(weights.rows());
  const int k = static_cast<int>(weights.cols());
  const int cell = std::max(4, 240 / std::max({n, k, 1}));
  Image img(k * cell, n * cell);
  uint8_t c[3];
  for (int q = 0; q < n; ++q) {
    for (int j = 0; j < k; ++j) {
      colormap(weights(q, j), c);
      for (int dx = 0; dx < cell; ++dx) {
        for (int dy = 0; dy < cell; ++dy) {
          img.set(j * cell + dx, q * cell + dy, c[0], c[1], c[2]);
        }
      }
    }
  }
  return img;
}

Image render_pos_bars(const PosAttentionStats& stats) {
  const int bar = 40, gap = 20, height = 200;
  Image img(static_cast<int>(kNumPosTags) * (bar + gap) + gap, height + 20);
  static const uint8_t colors[4][3] = {
      {66, 133, 244}, {219, 68, 55}, {244, 180, 0}, {120, 120, 120}};
  for (size_t i = 0; i < kNumPosTags; ++i) {
    const double f = stats.fraction(kAllPosTags[i]);
    const int h = static_cast<int>(std::lround(f * height));
    const int x0 = gap + static_cast<int>(i) * (bar + gap);
    for (int x = x0; x < x0 + bar; ++x) {
      for (int y = height + 10 - h; y < height + 10; ++y) {
        img.set(x, y, colors[i][0], colors[i][1], colors[i][2]);
      }
      img.set(x, height + 10, 0, 0, 0);
    }
  }
  return img;
}

}  // namespace gsa
