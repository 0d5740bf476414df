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

#include "core/checkpoint.hpp"

#include <sstream>

#include "core/binio.hpp"

namespace gsa {

namespace {

constexpr char kMagic[] = "GSACKPT1";
const std::string kMomentM = "adam.m/";
const std::string kMomentV = "adam.v/";

void write_tensor(binio::Writer& w, const std::string& name, const Matrix& m) {
  require(name.size() < 65536, ErrorCode::kInvalidArgument,
          "tensor name too long: " + name);
  w.pod(static_cast<uint16_t>(name.size()));
  w.bytes(name.data(), name.size());
  w.pod(static_cast<uint8_t>(2));
  w.pod(static_cast<uint32_t>(m.rows()));
  w.pod(static_cast<uint32_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.size(); ++i) w.f32(m.data()[i]);
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.compare(0, prefix.size(), prefix) == 0;
}

}  // namespace

Checkpoint make_checkpoint(const TrainState& state, const RunConfig& cfg) {
  return Checkpoint{state, cfg, SymbolTable::standard().inventory()};
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  const TrainState& st = ckpt.state;
  const size_t count =
      st.params.size() + st.moments.m.size() + st.moments.v.size();
  binio::Writer w(path);
  w.magic(std::string_view(kMagic, 8));
  w.pod(static_cast<uint32_t>(count));
  for (const auto& [name, m] : st.params) write_tensor(w, name, m);
  for (const auto& [name, m] : st.moments.m) write_tensor(w, kMomentM + name, m);
  for (const auto& [name, m] : st.moments.v) write_tensor(w, kMomentV + name, m);

  std::ostringstream cfg;
  for (const auto& [key, value] : ckpt.config.entries()) {
    cfg << key << '=' << value << '\n';
  }
  cfg << "train.step=" << st.step << '\n';
  cfg << "pitch.mean=" << format_double(st.pitch.mean) << '\n';
  cfg << "pitch.std=" << format_double(st.pitch.std) << '\n';
  cfg << "symbols=" << ckpt.symbols << '\n';
  w.string_u32(cfg.str());
  w.close();
}

Checkpoint load_checkpoint(const std::string& path) {
  binio::Reader r(path);
  r.expect_magic(std::string_view(kMagic, 8));
  const auto count = r.pod<uint32_t>();
  Checkpoint ck;
  for (uint32_t e = 0; e < count; ++e) {
    const auto len = r.pod<uint16_t>();
    std::string name(len, '\0');
    r.bytes(name.data(), len);
    const auto rank = r.pod<uint8_t>();
    require(rank >= 1 && rank <= 2, ErrorCode::kFormat,
            "'" + path + "': tensor '" + name + "' has unsupported rank " +
                std::to_string(rank));
    uint32_t dims[2] = {1, 1};
    for (int d = 0; d < rank; ++d) dims[d] = r.pod<uint32_t>();
    if (rank == 1) {
      dims[1] = dims[0];
      dims[0] = 1;
    }
    require(static_cast<uint64_t>(dims[0]) * dims[1] < (1ULL << 31),
            ErrorCode::kFormat, "'" + path + "': tensor '" + name + "' too large");
    Matrix m(dims[0], dims[1]);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = r.f32();
    ParamTable* table = &ck.state.params;
    if (starts_with(name, kMomentM)) {
      table = &ck.state.moments.m;
      name = name.substr(kMomentM.size());
    } else if (starts_with(name, kMomentV)) {
      table = &ck.state.moments.v;
      name = name.substr(kMomentV.size());
    }
    require(!table->contains(name), ErrorCode::kFormat,
            "'" + path + "': duplicate tensor '" + name + "'");
    table->set(name, std::move(m));
  }
  const std::string text = r.string_u32();
  require(r.at_end(), ErrorCode::kFormat, "'" + path + "': trailing bytes");

  std::istringstream in(text);
  std::string line;
  bool have_symbols = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    require(eq != std::string::npos, ErrorCode::kFormat,
            "'" + path + "': malformed config line '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    try {
      if (key == "symbols") {
        ck.symbols = value;
        have_symbols = true;
      } else if (key == "train.step") {
        ck.state.step = std::stoi(value);
      } else if (key == "pitch.mean") {
        ck.state.pitch.mean = std::stod(value);
      } else if (key == "pitch.std") {
        ck.state.pitch.std = std::stod(value);
      } else {
        ck.config.set(key, value);
      }
    } catch (const Error& e) {
      fail(ErrorCode::kVersion, "'" + path + "': " + e.what());
    } catch (const std::exception&) {
      fail(ErrorCode::kFormat, "'" + path + "': bad value for '" + key + "'");
    }
  }
  require(have_symbols, ErrorCode::kFormat,
          "'" + path + "': missing symbol inventory");
  require(ck.symbols == SymbolTable::standard().inventory(),
          ErrorCode::kVersion,
          "'" + path + "': checkpoint symbol inventory \"" + ck.symbols +
              "\" does not match this build's \"" +
              SymbolTable::standard().inventory() + "\"");
  try {
    ck.config.resolve();
    validate_params(ck.state.params, model_param_shapes(ck.config));
  } catch (const Error& e) {
    fail(ErrorCode::kVersion,
         "'" + path + "': incompatible checkpoint: " + e.what());
  }
  require(ck.state.params.size() == model_param_shapes(ck.config).size(),
          ErrorCode::kVersion,
          "'" + path + "': checkpoint holds parameters this model does not use");
  return ck;
}

}  // namespace gsa
