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

// Slow reference implementations used to cross-check the library.

#ifndef GSA_TESTS_ORACLES_HPP_
#define GSA_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "core/common.hpp"

namespace oracle {

using gsa::Matrix;

// Minimum over every monotone path of the summed -weights, by explicit
// enumeration.
inline double dtw_brute_force(const Matrix& w) {
  const int n = static_cast<int>(w.rows());
  const int t = static_cast<int>(w.cols());
  double best = std::numeric_limits<double>::infinity();
  std::function<void(int, int, double)> walk = [&](int i, int j, double acc) {
    acc -= w(i, j);
    if (i == n - 1 && j == t - 1) {
      best = std::min(best, acc);
      return;
    }
    if (i + 1 < n && j + 1 < t) walk(i + 1, j + 1, acc);
    if (j + 1 < t) walk(i, j + 1, acc);
    if (i + 1 < n) walk(i + 1, j, acc);
  };
  walk(0, 0, 0.0);
  return best;
}

// Minimum-cost monotone path by enumeration (unique for generic weights).
inline std::vector<std::pair<int, int>> dtw_brute_force_path(const Matrix& w) {
  const int n = static_cast<int>(w.rows());
  const int t = static_cast<int>(w.cols());
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::pair<int, int>> cur, best_path;
  std::function<void(int, int, double)> walk = [&](int i, int j, double acc) {
    acc -= w(i, j);
    cur.emplace_back(i, j);
    if (i == n - 1 && j == t - 1) {
      if (acc < best) {
        best = acc;
        best_path = cur;
      }
    } else {
      if (i + 1 < n && j + 1 < t) walk(i + 1, j + 1, acc);
      if (j + 1 < t) walk(i, j + 1, acc);
      if (i + 1 < n) walk(i + 1, j, acc);
    }
    cur.pop_back();
  };
  walk(0, 0, 0.0);
  return best_path;
}

// Word spans from a path: each frame goes to the earliest word on it; a word
// spans its claimed frames. Words claiming nothing are omitted.
struct Span {
  int word, start, end;
};
inline std::vector<Span> word_spans(const std::vector<std::pair<int, int>>& path,
                                    const std::vector<int>& token_to_word,
                                    int frames) {
  std::vector<int> owner(frames, std::numeric_limits<int>::max());
  for (auto [tok, f] : path) owner[f] = std::min(owner[f], token_to_word[tok]);
  std::vector<Span> spans;
  for (int f = 0; f < frames; ++f) {
    if (!spans.empty() && spans.back().word == owner[f]) {
      spans.back().end = f + 1;
    } else {
      spans.push_back({owner[f], f, f + 1});
    }
  }
  return spans;
}

// Top-down memoised Levenshtein distance over suffixes.
template <typename Seq>
int levenshtein(const Seq& a, const Seq& b) {
  std::map<std::pair<size_t, size_t>, int> memo;
  std::function<int(size_t, size_t)> go = [&](size_t i, size_t j) -> int {
    if (i == a.size()) return static_cast<int>(b.size() - j);
    if (j == b.size()) return static_cast<int>(a.size() - i);
    auto key = std::make_pair(i, j);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    int r = go(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
    r = std::min(r, go(i + 1, j) + 1);
    r = std::min(r, go(i, j + 1) + 1);
    memo[key] = r;
    return r;
  };
  return go(0, 0);
}

// Frame t takes the symbol whose cumulative duration range contains it.
inline Matrix length_regulate(const Matrix& h, const std::vector<int>& d) {
  std::vector<int> cum(d.size() + 1, 0);
  for (size_t i = 0; i < d.size(); ++i) cum[i + 1] = cum[i] + d[i];
  Matrix out(cum.back(), h.cols());
  for (int f = 0; f < cum.back(); ++f) {
    const auto it = std::upper_bound(cum.begin(), cum.end(), f);
    out.row(f) = h.row(static_cast<Eigen::Index>(it - cum.begin()) - 1);
  }
  return out;
}

struct ScalarAdam {
  double m = 0.0;
  double v = 0.0;
  double step(double p, double g, int t, double lr, double b1, double b2,
              double eps) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g * g;
    const double mh = m / (1.0 - std::pow(b1, t));
    const double vh = v / (1.0 - std::pow(b2, t));
    return p - lr * mh / (std::sqrt(vh) + eps);
  }
};

inline double noam(int step, int d_model, int warmup, double scale) {
  const double s = std::max(step, 1);
  return scale / std::sqrt(static_cast<double>(d_model)) *
         std::min(1.0 / std::sqrt(s), s / std::pow(warmup, 1.5));
}

inline double mse(const Matrix& a, const Matrix& b) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      acc += (a(i, j) - b(i, j)) * (a(i, j) - b(i, j));
    }
  }
  return acc / static_cast<double>(a.size());
}

// Direct DFT magnitude of one Hann-windowed frame.
inline std::vector<double> dft_magnitude(const std::vector<double>& frame) {
  const size_t n = frame.size();
  std::vector<double> mag(n / 2 + 1);
  const double pi = std::acos(-1.0);
  for (size_t k = 0; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double a = 2.0 * pi * static_cast<double>(k * i) / n;
      re += frame[i] * std::cos(a);
      im -= frame[i] * std::sin(a);
    }
    mag[k] = std::hypot(re, im);
  }
  return mag;
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r,
                            Eigen::Index c, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = u(rng);
  }
  return m;
}

}  // namespace oracle

#endif  // GSA_TESTS_ORACLES_HPP_
