// Copyright     2026  The cough-ep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Independent reference implementations for the tests. They are written for
// clarity, not speed, and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

/// Probability that a random positive outscores a random negative, ties
/// counted as one half, by enumerating every pair.
inline double BruteAuc(const std::vector<double>& s, const std::vector<std::uint8_t>& y) {
  double wins = 0.0;
  std::int64_t pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!y[i]) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j]) continue;
      ++pairs;
      if (s[i] > s[j]) {
        wins += 1.0;
      } else if (s[i] == s[j]) {
        wins += 0.5;
      }
    }
  }
  return wins / static_cast<double>(pairs);
}

/// Sum over every distinct threshold (descending) of
/// (recall gained) * (precision at that threshold).
inline double BruteAp(const std::vector<double>& s, const std::vector<std::uint8_t>& y) {
  std::set<double, std::greater<>> thresholds(s.begin(), s.end());
  double positives = 0.0;
  for (auto v : y) positives += v;
  double ap = 0.0, prev_recall = 0.0;
  for (double t : thresholds) {
    double tp = 0.0, pp = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] >= t) {
        pp += 1.0;
        tp += y[i];
      }
    }
    const double recall = tp / positives;
    ap += (recall - prev_recall) * (tp / pp);
    prev_recall = recall;
  }
  return ap;
}

/// |X_k|^2 for k = 0..n/2 of `frame` zero-padded to n, by direct summation.
inline std::vector<double> NaiveDftPower(const std::vector<double>& frame, int n) {
  std::vector<double> p(static_cast<std::size_t>(n / 2 + 1));
  for (int k = 0; k <= n / 2; ++k) {
    long double re = 0.0L, im = 0.0L;
    for (std::size_t t = 0; t < frame.size(); ++t) {
      const long double a = -2.0L * std::numbers::pi_v<long double> * k * static_cast<long double>(t) / n;
      re += frame[t] * std::cos(a);
      im += frame[t] * std::sin(a);
    }
    p[static_cast<std::size_t>(k)] = static_cast<double>(re * re + im * im);
  }
  return p;
}

/// Majority of the window centered on each position, with out-of-range
/// neighbours taken from the nearest edge.
inline std::vector<std::uint8_t> MedianOracle(const std::vector<std::uint8_t>& b, int width) {
  const int n = static_cast<int>(b.size());
  const int h = width / 2;
  std::vector<std::uint8_t> out(b.size());
  for (int i = 0; i < n; ++i) {
    int ones = 0;
    for (int d = -h; d <= h; ++d) ones += b[static_cast<std::size_t>(std::clamp(i + d, 0, n - 1))];
    out[static_cast<std::size_t>(i)] = ones * 2 > width ? 1 : 0;
  }
  return out;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("coughep_" + tag + "_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace oracle
