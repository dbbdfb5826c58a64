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

#include "coughep/annotations.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "coughep/binary_io.hpp"
#include "coughep/error.hpp"

namespace coughep {

namespace {

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t tab = line.find('\t', pos);
    out.push_back(line.substr(pos, tab - pos));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return out;
}

Millis ParseMillis(std::string_view field, int line_no) {
  Millis v = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    Fail(ErrorKind::kValidation, "line " + std::to_string(line_no) +
                                     ": not an integer millisecond value '" +
                                     std::string(field) + "'");
  }
  return v;
}

std::string_view StripCr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

}  // namespace

void FrameGeometry::Validate() const {
  if (frame_skip_ms <= 0) Fail(ErrorKind::kInvalidConfig, "frame_skip_ms must be > 0");
  if (n_frames < 0) Fail(ErrorKind::kInvalidConfig, "n_frames must be >= 0");
  if (frame_length_ms < 0) {
    Fail(ErrorKind::kInvalidConfig, "frame_length_ms must be >= 0");
  }
}

FrameGeometry PatchGeometry(std::int64_t n_frames) { return {160, 100, n_frames}; }
FrameGeometry WaveformCnnGeometry(std::int64_t n_frames) { return {25, 20, n_frames}; }

std::string_view EventLabelName(EventLabel label) {
  switch (label) {
    case EventLabel::kCough: return "cough";
    case EventLabel::kCount: return "count";
    case EventLabel::kOther: return "other";
  }
  return "other";
}

EventLabel ParseEventLabel(std::string_view name) {
  if (name == "cough") return EventLabel::kCough;
  if (name == "count") return EventLabel::kCount;
  if (name == "other") return EventLabel::kOther;
  Fail(ErrorKind::kValidation, "unknown label '" + std::string(name) + "'");
}

AnnotationSet ParseAnnotationText(std::string_view text, std::string recording_id,
                                  std::optional<Millis> recording_duration_ms) {
  AnnotationSet set;
  set.recording_id = std::move(recording_id);

  int line_no = 0;
  bool saw_header = false;
  Millis last_start = 0;
  Millis max_end = 0;
  // Last end time per label, for the same-label overlap check.
  Millis last_end[3] = {0, 0, 0};

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = StripCr(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) {
      if (nl == text.size()) break;
      continue;
    }
    const auto fields = SplitTabs(line);
    if (!saw_header) {
      if (fields.size() < 3 || fields[0] != "start_ms" || fields[1] != "end_ms" ||
          fields[2] != "label") {
        Fail(ErrorKind::kValidation,
             "line " + std::to_string(line_no) +
                 ": expected header 'start_ms<TAB>end_ms<TAB>label'");
      }
      saw_header = true;
      continue;
    }
    if (fields.size() < 3) {
      Fail(ErrorKind::kValidation,
           "line " + std::to_string(line_no) + ": expected at least 3 columns");
    }
    Annotation a;
    a.start_ms = ParseMillis(fields[0], line_no);
    a.end_ms = ParseMillis(fields[1], line_no);
    try {
      a.label = ParseEventLabel(fields[2]);
    } catch (const Error& e) {
      Fail(ErrorKind::kValidation, "line " + std::to_string(line_no) + ": " + e.what());
    }
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (a.start_ms < 0 || a.end_ms <= a.start_ms) {
      Fail(ErrorKind::kValidation, where + "need 0 <= start < end");
    }
    if (a.start_ms % kAnnotationResolutionMs != 0 ||
        a.end_ms % kAnnotationResolutionMs != 0) {
      Fail(ErrorKind::kValidation, where + "times must be multiples of 10ms");
    }
    if (!set.annotations.empty() && a.start_ms < last_start) {
      Fail(ErrorKind::kValidation, where + "rows not ordered by start time");
    }
    const auto li = static_cast<std::size_t>(a.label);
    if (a.start_ms < last_end[li]) {
      Fail(ErrorKind::kValidation, where + "overlaps the previous '" +
                                       std::string(EventLabelName(a.label)) + "' span");
    }
    last_start = a.start_ms;
    last_end[li] = a.end_ms;
    max_end = std::max(max_end, a.end_ms);
    set.annotations.push_back(a);
  }
  if (!saw_header && !set.annotations.empty()) {
    Fail(ErrorKind::kValidation, "missing header");
  }

  set.recording_duration_ms = recording_duration_ms.value_or(max_end);
  if (set.recording_duration_ms < max_end) {
    Fail(ErrorKind::kValidation, "annotation ends after the recording");
  }
  return set;
}

AnnotationSet ParseAnnotations(const std::filesystem::path& path,
                               std::optional<Millis> recording_duration_ms) {
  return ParseAnnotationText(ReadFileText(path), path.stem().string(),
                             recording_duration_ms);
}

std::string FormatAnnotations(const AnnotationSet& set) {
  std::string out = "start_ms\tend_ms\tlabel\n";
  for (const auto& a : set.annotations) {
    out += std::to_string(a.start_ms) + '\t' + std::to_string(a.end_ms) + '\t' +
           std::string(EventLabelName(a.label)) + '\n';
  }
  return out;
}

FrameLabels ComputeFrameLabels(const AnnotationSet& set, const FrameGeometry& g,
                               EventLabel target) {
  g.Validate();
  const Millis T = g.frame_skip_ms;
  std::vector<Millis> covered(static_cast<std::size_t>(g.n_frames), 0);
  for (const auto& a : set.annotations) {
    if (a.label != target) continue;
    const std::int64_t first = a.start_ms / T;
    const std::int64_t last = std::min<std::int64_t>((a.end_ms - 1) / T, g.n_frames - 1);
    for (std::int64_t n = std::max<std::int64_t>(first, 0); n <= last; ++n) {
      const Millis lo = std::max(a.start_ms, n * T);
      const Millis hi = std::min(a.end_ms, (n + 1) * T);
      if (hi > lo) covered[static_cast<std::size_t>(n)] += hi - lo;
    }
  }
  FrameLabels out;
  out.geometry = g;
  out.labels.resize(covered.size());
  for (std::size_t n = 0; n < covered.size(); ++n) {
    out.labels[n] = (2 * covered[n] > T) ? 1 : 0;
  }
  return out;
}

PartitionStats ComputePartitionStats(std::span<const AnnotationSet> sets,
                                     EventLabel label) {
  PartitionStats s;
  s.n_recordings = static_cast<std::int64_t>(sets.size());
  Millis total_recording = 0;
  Millis total_events = 0;
  double sum_sq = 0.0;
  for (const auto& set : sets) {
    total_recording += set.recording_duration_ms;
    for (const auto& a : set.annotations) {
      if (a.label != label) continue;
      ++s.n_coughs;
      total_events += a.duration_ms();
      sum_sq += static_cast<double>(a.duration_ms()) * a.duration_ms();
    }
  }
  s.total_recording_hours = total_recording / 3.6e6;
  s.total_cough_hours = total_events / 3.6e6;
  if (s.n_coughs > 0) {
    const double n = static_cast<double>(s.n_coughs);
    s.mean_cough_ms = total_events / n;
    s.std_cough_ms = std::sqrt(std::max(0.0, sum_sq / n - s.mean_cough_ms * s.mean_cough_ms));
  }
  return s;
}

std::string FormatPartitionTable(std::span<const NamedPartition> rows) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-8s %10s %10s %8s %8s\n", "Part", "Number", "Duration",
                "Number", "Duration");
  os << buf;
  std::snprintf(buf, sizeof buf, "%-8s %10s %10s %8s %8s\n", "", "recordings",
                "recordings", "coughs", "coughs");
  os << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-8s %10lld %10.2f %8lld %8.2f\n", r.name.c_str(),
                  static_cast<long long>(r.stats.n_recordings),
                  r.stats.total_recording_hours, static_cast<long long>(r.stats.n_coughs),
                  r.stats.total_cough_hours);
    os << buf;
  }
  return os.str();
}

std::string PartitionStatsJson(const PartitionStats& s) {
  nlohmann::json j = {{"n_recordings", s.n_recordings},
                      {"total_recording_hours", s.total_recording_hours},
                      {"n_coughs", s.n_coughs},
                      {"total_cough_hours", s.total_cough_hours},
                      {"mean_cough_ms", s.mean_cough_ms},
                      {"std_cough_ms", s.std_cough_ms}};
  return j.dump(2);
}

}  // namespace coughep
