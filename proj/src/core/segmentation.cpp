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

#include "core/segmentation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "core/binio.hpp"

namespace gsa {

namespace {
constexpr char kAttentionMagic[] = "GSAATT1";

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}
}  // namespace

const char* pos_tag_name(PosTag tag) {
  switch (tag) {
    case PosTag::kNoun: return "NOUN";
    case PosTag::kVerb: return "VERB";
    case PosTag::kAdj: return "ADJ";
    case PosTag::kEtc: return "ETC";
  }
  return "ETC";
}

PosTag parse_pos_tag(const std::string& text) {
  std::string up;
  for (char c : trim(text)) {
    up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  for (PosTag t : kAllPosTags) {
    if (up == pos_tag_name(t)) return t;
  }
  fail(ErrorCode::kFormat,
       "unknown POS tag '" + text + "' (expected NOUN, VERB, ADJ or ETC)");
}

void CrossAttentionMatrix::validate() const {
  require(weights.rows() >= 1 && weights.cols() >= 1,
          ErrorCode::kDegenerateInput, "cross-attention matrix is empty");
  require(static_cast<Eigen::Index>(token_to_word.size()) == weights.rows(),
          ErrorCode::kFormat, "token_to_word length differs from token count");
  for (Eigen::Index i = 0; i < weights.rows(); ++i) {
    require((weights.row(i).array() >= 0.0).all() &&
                weights.row(i).allFinite(),
            ErrorCode::kFormat, "attention weights must be finite and >= 0");
    require(weights.row(i).maxCoeff() > 0.0, ErrorCode::kFormat,
            "attention row " + std::to_string(i) + " has no positive entry");
    const int w = token_to_word[i];
    require(w >= 0 && w < static_cast<int>(words.size()), ErrorCode::kFormat,
            "token_to_word index out of range");
    require(i == 0 || w >= token_to_word[i - 1], ErrorCode::kFormat,
            "token_to_word must be non-decreasing");
  }
}

void save_cross_attention(const CrossAttentionMatrix& attn,
                          const std::string& path) {
  binio::Writer w(path);
  w.magic(std::string_view(kAttentionMagic, 7));
  w.pod(static_cast<uint32_t>(attn.weights.rows()));
  w.pod(static_cast<uint32_t>(attn.weights.cols()));
  for (Eigen::Index i = 0; i < attn.weights.size(); ++i) {
    w.f32(attn.weights.data()[i]);
  }
  for (int t : attn.token_to_word) w.pod(static_cast<uint32_t>(t));
  w.pod(static_cast<uint32_t>(attn.words.size()));
  for (const std::string& s : attn.words) w.string_u32(s);
  w.close();
}

CrossAttentionMatrix load_cross_attention(const std::string& path) {
  binio::Reader r(path);
  r.expect_magic(std::string_view(kAttentionMagic, 7));
  const auto n = r.pod<uint32_t>();
  const auto t = r.pod<uint32_t>();
  require(n >= 1 && t >= 1 && static_cast<uint64_t>(n) * t < (1ull << 31),
          ErrorCode::kFormat, "'" + path + "': invalid dimensions");
  CrossAttentionMatrix attn;
  attn.weights.resize(n, t);
  for (Eigen::Index i = 0; i < attn.weights.size(); ++i) {
    attn.weights.data()[i] = r.f32();
  }
  attn.token_to_word.resize(n);
  for (auto& v : attn.token_to_word) v = static_cast<int>(r.pod<uint32_t>());
  const auto words = r.pod<uint32_t>();
  require(words <= (1u << 20), ErrorCode::kFormat,
          "'" + path + "': too many words");
  attn.words.resize(words);
  for (auto& s : attn.words) s = r.string_u32(1u << 16);
  attn.validate();
  return attn;
}

AlignmentPath dtw_align(const CrossAttentionMatrix& attn) {
  require(attn.weights.rows() >= 1 && attn.weights.cols() >= 1,
          ErrorCode::kDegenerateInput, "cannot align an empty matrix");
  require(attn.weights.allFinite(), ErrorCode::kInvalidArgument,
          "attention weights must be finite");
  const Eigen::Index n = attn.weights.rows();
  const Eigen::Index t = attn.weights.cols();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // move: 0 diagonal, 1 frame advance (from (i, j-1)), 2 token advance.
  Matrix acc = Matrix::Constant(n, t, kInf);
  Eigen::Matrix<int8_t, Eigen::Dynamic, Eigen::Dynamic> move(n, t);
  move.setConstant(-1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < t; ++j) {
      const double cost = -attn.weights(i, j);
      if (i == 0 && j == 0) {
        acc(i, j) = cost;
        continue;
      }
      double best = kInf;
      int8_t choice = -1;
      const double cand[3] = {
          (i > 0 && j > 0) ? acc(i - 1, j - 1) : kInf,
          j > 0 ? acc(i, j - 1) : kInf,
          i > 0 ? acc(i - 1, j) : kInf,
      };
      for (int8_t m = 0; m < 3; ++m) {
        if (cand[m] < best) {  // strict: earlier moves win ties
          best = cand[m];
          choice = m;
        }
      }
      acc(i, j) = cost + best;
      move(i, j) = choice;
    }
  }
  AlignmentPath path;
  Eigen::Index i = n - 1, j = t - 1;
  path.steps.emplace_back(static_cast<int>(i), static_cast<int>(j));
  while (i > 0 || j > 0) {
    switch (move(i, j)) {
      case 0: --i; --j; break;
      case 1: --j; break;
      default: --i; break;
    }
    path.steps.emplace_back(static_cast<int>(i), static_cast<int>(j));
  }
  std::reverse(path.steps.begin(), path.steps.end());
  return path;
}

double path_cost(const AlignmentPath& path, const Matrix& weights) {
  double c = 0.0;
  for (const auto& [i, j] : path.steps) c -= weights(i, j);
  return c;
}

void validate_path(const AlignmentPath& path, Eigen::Index tokens,
                   Eigen::Index frames) {
  require(!path.steps.empty(), ErrorCode::kInvalidArgument, "empty path");
  require(path.steps.front() == std::make_pair(0, 0),
          ErrorCode::kInvalidArgument, "path must start at (0, 0)");
  require(path.steps.back() == std::make_pair(static_cast<int>(tokens - 1),
                                              static_cast<int>(frames - 1)),
          ErrorCode::kInvalidArgument, "path must end at (N-1, T-1)");
  for (size_t k = 1; k < path.steps.size(); ++k) {
    const int di = path.steps[k].first - path.steps[k - 1].first;
    const int dj = path.steps[k].second - path.steps[k - 1].second;
    require((di == 0 || di == 1) && (dj == 0 || dj == 1) && (di + dj) > 0,
            ErrorCode::kInvalidArgument, "path has an invalid step");
  }
}

IntervalResult intervals_from_path(const AlignmentPath& path,
                                   const CrossAttentionMatrix& attn) {
  attn.validate();
  const Eigen::Index frames = attn.weights.cols();
  validate_path(path, attn.weights.rows(), frames);

  std::vector<int> owner(static_cast<size_t>(frames), -1);
  for (const auto& [tok, frame] : path.steps) {
    if (owner[frame] < 0) owner[frame] = attn.token_to_word[tok];
  }

  IntervalResult result;
  const int n_words = static_cast<int>(attn.words.size());
  std::vector<int> first(n_words, -1), last(n_words, -1);
  for (Eigen::Index j = 0; j < frames; ++j) {
    const int w = owner[j];
    if (w < 0) continue;
    if (first[w] < 0) first[w] = static_cast<int>(j);
    last[w] = static_cast<int>(j);
  }
  std::vector<bool> has_token(n_words, false);
  for (int w : attn.token_to_word) has_token[w] = true;
  for (int w = 0; w < n_words; ++w) {
    if (first[w] < 0) {
      if (has_token[w]) ++result.dropped_words;
      continue;
    }
    WordInterval iv;
    iv.word_index = w;
    iv.start_frame = first[w];
    iv.end_frame = last[w] + 1;
    iv.word = attn.words[w];
    result.intervals.push_back(iv);
  }
  return result;
}

std::vector<StyleSegment> slice_segments(
    const MelSpectrogram& mel, const std::vector<WordInterval>& intervals,
    int min_segment_frames) {
  require(min_segment_frames >= 1, ErrorCode::kInvalidArgument,
          "min_segment_frames must be >= 1");
  std::vector<StyleSegment> out;
  out.reserve(intervals.size());
  for (const WordInterval& iv : intervals) {
    if (iv.start_frame < 0 || iv.end_frame > mel.num_frames() ||
        iv.start_frame >= iv.end_frame) {
      fail(ErrorCode::kBounds,
           "interval [" + std::to_string(iv.start_frame) + ", " +
               std::to_string(iv.end_frame) + ") outside mel of " +
               std::to_string(mel.num_frames()) + " frames");
    }
    StyleSegment seg;
    seg.interval = iv;
    const int len = iv.length();
    const int total = std::max(len, min_segment_frames);
    seg.padded_frames = total - len;
    seg.mel.resize(total, mel.frames.cols());
    seg.mel.topRows(len) = mel.frames.middleRows(iv.start_frame, len);
    for (int r = len; r < total; ++r) {
      seg.mel.row(r) = mel.frames.row(iv.end_frame - 1);
    }
    out.push_back(std::move(seg));
  }
  return out;
}

RandomSliceResult random_slice_segments(const MelSpectrogram& mel,
                                        int min_frames, uint64_t seed) {
  require(min_frames >= 1, ErrorCode::kInvalidArgument,
          "min_frames must be >= 1");
  const int total = mel.num_frames();
  RandomSliceResult result;
  std::vector<WordInterval> cuts;
  if (total < min_frames) {
    result.fallback = true;
    cuts.push_back(WordInterval{0, 0, total, std::nullopt, ""});
  } else {
    std::mt19937_64 rng(seed);
    int pos = 0;
    while (pos < total) {
      int end = total;
      if (total - pos >= 2 * min_frames) {
        // Candidate ends: [pos + min, total - min] plus the final end.
        const int lo = pos + min_frames;
        const int hi = total - min_frames;
        std::uniform_int_distribution<int> pick(lo, hi + 1);
        const int v = pick(rng);
        end = v == hi + 1 ? total : v;
      }
      cuts.push_back(WordInterval{static_cast<int>(cuts.size()), pos, end,
                                  std::nullopt, ""});
      pos = end;
    }
  }
  result.segments = slice_segments(mel, cuts, 1);
  return result;
}

TimestampResult parse_timestamps(const std::string& text, const MelConfig& cfg,
                                 int num_frames, const std::string& source) {
  TimestampResult result;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  double prev_end = -std::numeric_limits<double>::infinity();
  int word_index = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, '\t')) fields.push_back(f);
    if (fields.size() < 3 || fields.size() > 4) {
      fail(ErrorCode::kFormat, where + "expected word<TAB>start<TAB>end[<TAB>pos]");
    }
    double start = 0.0, end = 0.0;
    try {
      size_t used = 0;
      start = std::stod(fields[1], &used);
      if (trim(fields[1].substr(used)).size()) throw std::invalid_argument("");
      end = std::stod(fields[2], &used);
      if (trim(fields[2].substr(used)).size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      fail(ErrorCode::kFormat, where + "malformed time value");
    }
    if (!std::isfinite(start) || !std::isfinite(end) || start < 0.0 ||
        end < start) {
      fail(ErrorCode::kFormat, where + "times must satisfy 0 <= start <= end");
    }
    if (start < prev_end) {
      fail(ErrorCode::kFormat, where + "record overlaps the previous word");
    }
    prev_end = end;

    WordInterval iv;
    iv.word_index = word_index++;
    iv.word = trim(fields[0]);
    if (fields.size() == 4 && !trim(fields[3]).empty()) {
      iv.pos_tag = parse_pos_tag(fields[3]);
    }
    auto to_frame = [&](double sec) {
      const double f = std::floor(sec * cfg.sample_rate_hz / cfg.hop_length);
      return static_cast<int>(std::clamp(f, 0.0, static_cast<double>(num_frames)));
    };
    iv.start_frame = to_frame(start);
    iv.end_frame = to_frame(end);
    if (iv.end_frame <= iv.start_frame) {
      ++result.dropped_empty;
      continue;
    }
    result.intervals.push_back(iv);
  }
  return result;
}

TimestampResult load_timestamps(const std::string& path,
                                const MelSpectrogram& mel) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::kIo, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_timestamps(ss.str(), mel.config, mel.num_frames(), path);
}

void save_timestamps(const std::vector<WordInterval>& intervals,
                     const MelConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  require(out.good(), ErrorCode::kIo, "cannot open '" + path + "' for writing");
  char buf[64];
  // Quarter-hop offset keeps floor(sec * rate / hop) on the intended frame.
  auto sec = [&](int frame) {
    return (frame * static_cast<double>(cfg.hop_length) +
            cfg.hop_length / 4.0) / cfg.sample_rate_hz;
  };
  for (const WordInterval& iv : intervals) {
    out << (iv.word.empty() ? "_" : iv.word) << '\t';
    std::snprintf(buf, sizeof(buf), "%.6f", sec(iv.start_frame));
    out << buf << '\t';
    std::snprintf(buf, sizeof(buf), "%.6f", sec(iv.end_frame));
    out << buf;
    if (iv.pos_tag) out << '\t' << pos_tag_name(*iv.pos_tag);
    out << '\n';
  }
  require(out.good(), ErrorCode::kIo, "write to '" + path + "' failed");
}

}  // namespace gsa
