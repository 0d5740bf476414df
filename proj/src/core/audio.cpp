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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>

#include "core/dsp.hpp"

namespace gsa {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint16_t read_u16(const std::string& b, size_t off) {
  return static_cast<uint16_t>(static_cast<uint8_t>(b[off]) |
                               (static_cast<uint8_t>(b[off + 1]) << 8));
}

uint32_t read_u32(const std::string& b, size_t off) {
  return static_cast<uint32_t>(read_u16(b, off)) |
         (static_cast<uint32_t>(read_u16(b, off + 2)) << 16);
}

void put_u16(std::string& b, uint16_t v) {
  b.push_back(static_cast<char>(v & 0xFF));
  b.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& b, uint32_t v) {
  put_u16(b, static_cast<uint16_t>(v & 0xFFFF));
  put_u16(b, static_cast<uint16_t>(v >> 16));
}

double bessel_i0(double x) { return std::cyl_bessel_i(0.0, x); }

}  // namespace

AudioClip load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::kIo, "cannot open '" + path + "'");
  const std::string buf((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  const std::string where = "'" + path + "': ";
  if (buf.size() < 12 || buf.compare(0, 4, "RIFF") != 0 ||
      buf.compare(8, 4, "WAVE") != 0) {
    fail(ErrorCode::kFormat, where + "not a RIFF/WAVE file");
  }

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  size_t data_off = 0, data_len = 0;
  bool have_data = false;
  size_t off = 12;
  while (off + 8 <= buf.size()) {
    const std::string id = buf.substr(off, 4);
    const uint32_t len = read_u32(buf, off + 4);
    const size_t body = off + 8;
    if (id == "fmt ") {
      if (len < 16 || body + len > buf.size()) {
        fail(ErrorCode::kFormat, where + "truncated fmt chunk");
      }
      format = read_u16(buf, body);
      channels = read_u16(buf, body + 2);
      rate = read_u32(buf, body + 4);
      bits = read_u16(buf, body + 14);
      if (format == kFormatExtensible) {
        if (len < 26) fail(ErrorCode::kFormat, where + "truncated fmt chunk");
        format = read_u16(buf, body + 24);
      }
      have_fmt = true;
    } else if (id == "data") {
      data_off = body;
      // Streams written with an unknown length leave 0 or 0xFFFFFFFF here.
      data_len = std::min<size_t>(len, buf.size() - body);
      have_data = true;
    }
    off = body + len + (len & 1u);
  }
  if (!have_fmt || !have_data) {
    fail(ErrorCode::kFormat, where + "missing fmt or data chunk");
  }
  if (channels == 0 || rate == 0) {
    fail(ErrorCode::kFormat, where + "invalid channel count or sample rate");
  }

  AudioClip clip;
  clip.sample_rate_hz = static_cast<int>(rate);
  if (format == kFormatPcm && bits == 16) {
    const size_t frames = data_len / (2u * channels);
    clip.samples.resize(frames);
    for (size_t i = 0; i < frames; ++i) {
      double acc = 0.0;
      for (uint16_t c = 0; c < channels; ++c) {
        const auto raw = static_cast<int16_t>(
            read_u16(buf, data_off + 2 * (i * channels + c)));
        acc += static_cast<double>(raw) / 32768.0;
      }
      clip.samples[i] = acc / channels;
    }
  } else if (format == kFormatFloat && bits == 32) {
    const size_t frames = data_len / (4u * channels);
    clip.samples.resize(frames);
    for (size_t i = 0; i < frames; ++i) {
      double acc = 0.0;
      for (uint16_t c = 0; c < channels; ++c) {
        const uint32_t raw = read_u32(buf, data_off + 4 * (i * channels + c));
        float f;
        std::memcpy(&f, &raw, sizeof(f));
        acc += static_cast<double>(f);
      }
      clip.samples[i] = acc / channels;
    }
  } else {
    fail(ErrorCode::kUnsupported,
         where + "unsupported encoding (format " + std::to_string(format) +
             ", " + std::to_string(bits) + " bits); need PCM16 or float32");
  }
  require(!clip.samples.empty(), ErrorCode::kFormat, where + "no samples");
  for (double s : clip.samples) {
    require(std::isfinite(s), ErrorCode::kFormat, where + "non-finite sample");
  }
  return clip;
}

void save_wav(const AudioClip& clip, const std::string& path) {
  require(clip.sample_rate_hz > 0, ErrorCode::kInvalidArgument,
          "sample rate must be positive");
  const auto n = static_cast<uint32_t>(clip.samples.size());
  std::string b;
  b.reserve(44 + 2 * static_cast<size_t>(n));
  b += "RIFF";
  put_u32(b, 36 + 2 * n);
  b += "WAVEfmt ";
  put_u32(b, 16);
  put_u16(b, kFormatPcm);
  put_u16(b, 1);
  put_u32(b, static_cast<uint32_t>(clip.sample_rate_hz));
  put_u32(b, static_cast<uint32_t>(clip.sample_rate_hz) * 2);
  put_u16(b, 2);
  put_u16(b, 16);
  b += "data";
  put_u32(b, 2 * n);
  for (double s : clip.samples) {
    const double c = std::clamp(s, -1.0, 1.0);
    const auto q = static_cast<int16_t>(
        std::clamp(std::lround(c * 32768.0), -32768L, 32767L));
    put_u16(b, static_cast<uint16_t>(q));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out.write(b.data(), static_cast<std::streamsize>(b.size()));
  require(out.good(), ErrorCode::kIo, "write to '" + path + "' failed");
}

AudioClip resample(const AudioClip& clip, int target_hz) {
  require(target_hz > 0, ErrorCode::kInvalidArgument,
          "target sample rate must be positive");
  require(clip.sample_rate_hz > 0, ErrorCode::kInvalidArgument,
          "source sample rate must be positive");
  if (target_hz == clip.sample_rate_hz) return clip;

  const int g = std::gcd(clip.sample_rate_hz, target_hz);
  const int64_t up = target_hz / g;          // phases
  const int64_t down = clip.sample_rate_hz / g;
  // Normalised cutoff relative to the input Nyquist.
  const double cutoff =
      0.97 * std::min(1.0, static_cast<double>(target_hz) / clip.sample_rate_hz);
  constexpr double kZeroCrossings = 16.0;
  constexpr double kBeta = 8.6;
  const int half = static_cast<int>(std::ceil(kZeroCrossings / cutoff));
  const int taps = 2 * half;

  // table[p][j] weights input sample base - half + 1 + j for output phase p.
  std::vector<std::vector<double>> table(static_cast<size_t>(up),
                                         std::vector<double>(taps));
  const double i0_beta = bessel_i0(kBeta);
  for (int64_t p = 0; p < up; ++p) {
    const double frac = static_cast<double>(p) / static_cast<double>(up);
    double sum = 0.0;
    for (int j = 0; j < taps; ++j) {
      const double t = frac + static_cast<double>(half - 1 - j);
      const double x = t / (half + 1.0);
      double w = 0.0;
      if (std::abs(x) < 1.0) w = bessel_i0(kBeta * std::sqrt(1.0 - x * x)) / i0_beta;
      const double arg = M_PI * cutoff * t;
      const double sinc = std::abs(arg) < 1e-12 ? 1.0 : std::sin(arg) / arg;
      table[p][j] = cutoff * sinc * w;
      sum += table[p][j];
    }
    for (double& v : table[p]) v /= sum;
  }

  const auto in_len = static_cast<int64_t>(clip.samples.size());
  const int64_t out_len = (in_len * up + down - 1) / down;
  AudioClip out;
  out.sample_rate_hz = target_hz;
  out.samples.resize(static_cast<size_t>(out_len));
  for (int64_t n = 0; n < out_len; ++n) {
    const int64_t pos = n * down;
    const int64_t base = pos / up;
    const auto& h = table[static_cast<size_t>(pos % up)];
    double acc = 0.0;
    for (int j = 0; j < taps; ++j) {
      const int64_t k = base - half + 1 + j;
      if (k < 0 || k >= in_len) continue;
      acc += h[j] * clip.samples[static_cast<size_t>(k)];
    }
    out.samples[static_cast<size_t>(n)] = acc;
  }
  return out;
}

double rms(const std::vector<double>& samples) {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (double s : samples) acc += s * s;
  return std::sqrt(acc / static_cast<double>(samples.size()));
}

double rms_dbfs(const AudioClip& clip) {
  return 20.0 * std::log10(rms(clip.samples));
}

LoudnessResult normalize_loudness(const AudioClip& clip, double target_dbfs) {
  const double level = rms(clip.samples);
  require(level > 0.0, ErrorCode::kDegenerateInput,
          "cannot normalise loudness of digitally silent audio");
  LoudnessResult r;
  r.gain = std::pow(10.0, (target_dbfs - 20.0 * std::log10(level)) / 20.0);
  r.clip.sample_rate_hz = clip.sample_rate_hz;
  r.clip.samples.resize(clip.samples.size());
  for (size_t i = 0; i < clip.samples.size(); ++i) {
    const double v = clip.samples[i] * r.gain;
    if (v > 1.0 || v < -1.0) ++r.clipped_samples;
    r.clip.samples[i] = std::clamp(v, -1.0, 1.0);
  }
  return r;
}

}  // namespace gsa
