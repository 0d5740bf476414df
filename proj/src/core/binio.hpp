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

// Little-endian binary helpers shared by the on-disk formats.

#ifndef GSA_CORE_BINIO_HPP_
#define GSA_CORE_BINIO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <string_view>

#include "core/common.hpp"

namespace gsa::binio {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

class Writer {
 public:
  explicit Writer(const std::string& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    require(out_.good(), ErrorCode::kIo, "cannot open '" + path + "' for writing");
  }

  void bytes(const void* data, size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  }
  void magic(std::string_view m) { bytes(m.data(), m.size()); }
  template <typename T>
  void pod(T value) {
    bytes(&value, sizeof(T));
  }
  void f32(double v) { pod(static_cast<float>(v)); }
  void string_u32(std::string_view s) {
    pod(static_cast<uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void close() {
    out_.flush();
    require(out_.good(), ErrorCode::kIo, "write to '" + path_ + "' failed");
    out_.close();
  }

 private:
  std::string path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path)
      : path_(path), in_(path, std::ios::binary) {
    require(in_.good(), ErrorCode::kIo, "cannot open '" + path + "'");
  }

  void bytes(void* data, size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in_.gcount()) != n) {
      fail(ErrorCode::kFormat, "'" + path_ + "': unexpected end of file");
    }
  }
  void expect_magic(std::string_view m) {
    std::string got(m.size(), '\0');
    in_.read(got.data(), static_cast<std::streamsize>(m.size()));
    if (static_cast<size_t>(in_.gcount()) != m.size() || got != m) {
      fail(ErrorCode::kFormat,
           "'" + path_ + "': bad magic, expected " + std::string(m));
    }
  }
  template <typename T>
  T pod() {
    T v{};
    bytes(&v, sizeof(T));
    return v;
  }
  double f32() { return static_cast<double>(pod<float>()); }
  std::string string_u32(size_t limit = 1u << 24) {
    const auto n = pod<uint32_t>();
    if (n > limit) fail(ErrorCode::kFormat, "'" + path_ + "': string too long");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
};

}  // namespace gsa::binio

#endif  // GSA_CORE_BINIO_HPP_
