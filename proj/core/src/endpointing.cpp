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

#include "coughep/endpointing.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "coughep/error.hpp"

namespace coughep {

BinarySequence ThresholdScores(const ScoreSequence& s, double threshold) {
  BinarySequence out;
  out.geometry = s.geometry;
  out.geometry.n_frames = s.size();
  out.bits.resize(s.scores.size());
  for (std::size_t i = 0; i < s.scores.size(); ++i) {
    out.bits[i] = s.scores[i] >= threshold ? 1 : 0;
  }
  return out;
}

BinarySequence MedianFilter(const BinarySequence& b, int width) {
  if (width < 1 || width % 2 == 0) {
    Fail(ErrorKind::kInvalidConfig,
         "median filter width must be odd and >= 1, got " + std::to_string(width));
  }
  if (width == 1 || b.bits.empty()) return b;
  const auto n = static_cast<std::int64_t>(b.bits.size());
  const int half = width / 2;
  auto at = [&](std::int64_t i) { return b.bits[static_cast<std::size_t>(std::clamp<std::int64_t>(i, 0, n - 1))]; };

  BinarySequence out = b;
  // Running count of ones in the window centered on i.
  int ones = 0;
  for (std::int64_t k = -half; k <= half; ++k) ones += at(k);
  for (std::int64_t i = 0; i < n; ++i) {
    out.bits[static_cast<std::size_t>(i)] = (2 * ones > width) ? 1 : 0;
    ones += at(i + half + 1) - at(i - half);
  }
  return out;
}

std::vector<Segment> ExtractSegments(const BinarySequence& b, const Provenance& provenance) {
  const Millis T = b.geometry.frame_skip_ms;
  if (T <= 0) Fail(ErrorKind::kInvalidConfig, "frame_skip_ms must be > 0");
  std::vector<Segment> segs;
  const auto n = static_cast<std::int64_t>(b.bits.size());
  std::int64_t i = 0;
  while (i < n) {
    if (!b.bits[static_cast<std::size_t>(i)]) {
      ++i;
      continue;
    }
    std::int64_t j = i;
    while (j + 1 < n && b.bits[static_cast<std::size_t>(j + 1)]) ++j;
    segs.push_back({i * T, (j + 1) * T, provenance});
    i = j + 1;
  }
  return segs;
}

std::vector<Segment> DetectSegments(const ScoreSequence& s, double threshold, int filter_width) {
  const BinarySequence bits = MedianFilter(ThresholdScores(s, threshold), filter_width);
  return ExtractSegments(bits, {s.source, threshold, filter_width});
}

DatasetStats ComputeDurationStats(std::span<const Millis> durations_ms) {
  DatasetStats st;
  st.n_segments = static_cast<std::int64_t>(durations_ms.size());
  if (durations_ms.empty()) return st;
  Millis total = 0;
  for (Millis d : durations_ms) total += d;
  const double n = static_cast<double>(st.n_segments);
  st.mean_ms = static_cast<double>(total) / n;
  double ss = 0.0;
  for (Millis d : durations_ms) {
    const double e = static_cast<double>(d) - st.mean_ms;
    ss += e * e;
  }
  st.std_ms = std::sqrt(ss / n);
  st.total_minutes = static_cast<double>(total) / 60000.0;
  return st;
}

DatasetStats ComputeSegmentStats(std::span<const Segment> segs) {
  std::vector<Millis> d;
  d.reserve(segs.size());
  for (const auto& s : segs) d.push_back(s.duration_ms());
  return ComputeDurationStats(d);
}

Histogram DurationHistogram(std::span<const Millis> durations_ms, double bin_width_ms) {
  if (!(bin_width_ms > 0.0)) Fail(ErrorKind::kInvalidConfig, "bin width must be > 0");
  Histogram h;
  h.bin_width_ms = bin_width_ms;
  Millis longest = 0;
  for (Millis d : durations_ms) longest = std::max(longest, d);
  h.counts.assign(static_cast<std::size_t>(std::floor(longest / bin_width_ms)) + 1, 0);
  for (Millis d : durations_ms) {
    ++h.counts[static_cast<std::size_t>(std::floor(d / bin_width_ms))];
  }
  return h;
}

Histogram DurationHistogram(std::span<const Segment> segs, double bin_width_ms) {
  std::vector<Millis> d;
  d.reserve(segs.size());
  for (const auto& s : segs) d.push_back(s.duration_ms());
  return DurationHistogram(d, bin_width_ms);
}

std::string FormatSegmentsTsv(std::span<const Segment> segs) {
  std::ostringstream os;
  os.precision(17);
  os << "start_ms\tend_ms\tlabel\tsource\tthreshold\tfilter_width\n";
  for (const auto& s : segs) {
    os << s.start_ms << '\t' << s.end_ms << "\tcough\t" << s.provenance.source << '\t'
       << s.provenance.threshold << '\t' << s.provenance.filter_width << '\n';
  }
  return os.str();
}

std::vector<Segment> ParseSegmentsTsv(std::string_view text) {
  std::vector<Segment> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line_no == 1) continue;
    std::istringstream fields(line);
    std::string start, end, label, source, threshold, width;
    std::getline(fields, start, '\t');
    std::getline(fields, end, '\t');
    std::getline(fields, label, '\t');
    std::getline(fields, source, '\t');
    std::getline(fields, threshold, '\t');
    std::getline(fields, width, '\t');
    try {
      Segment s;
      s.start_ms = std::stoll(start);
      s.end_ms = std::stoll(end);
      s.provenance.source = source;
      s.provenance.threshold = threshold.empty() ? 0.0 : std::stod(threshold);
      s.provenance.filter_width = width.empty() ? 1 : std::stoi(width);
      if (s.end_ms <= s.start_ms) throw std::invalid_argument("end <= start");
      out.push_back(s);
    } catch (const std::exception& e) {
      Fail(ErrorKind::kValidation,
           "segments line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace coughep
