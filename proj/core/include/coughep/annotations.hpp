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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coughep/geometry.hpp"

namespace coughep {

enum class EventLabel { kCough, kCount, kOther };

std::string_view EventLabelName(EventLabel label);
/// kValidation on an unknown name.
EventLabel ParseEventLabel(std::string_view name);

/// A labeled span in integer milliseconds, 10ms aligned.
struct Annotation {
  Millis start_ms = 0;
  Millis end_ms = 0;
  EventLabel label = EventLabel::kCough;

  double start_seconds() const { return start_ms / 1000.0; }
  double end_seconds() const { return end_ms / 1000.0; }
  Millis duration_ms() const { return end_ms - start_ms; }

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct AnnotationSet {
  std::string recording_id;
  std::vector<Annotation> annotations;  // sorted by start
  Millis recording_duration_ms = 0;

  double recording_duration_seconds() const { return recording_duration_ms / 1000.0; }
};

inline constexpr Millis kAnnotationResolutionMs = 10;

/// Parses the TSV annotation format:
///
///   start_ms<TAB>end_ms<TAB>label[<TAB>extra columns ignored]
///
/// The first line must be the header. Blank lines are skipped. Rows must be
/// ordered by start; same-label spans must not overlap; times must be 10ms
/// aligned with start < end. Violations throw kValidation naming the line.
///
/// recording_id defaults to the file stem. When recording_duration_ms is not
/// given it is taken as the largest end time.
AnnotationSet ParseAnnotations(const std::filesystem::path& path,
                               std::optional<Millis> recording_duration_ms = {});
AnnotationSet ParseAnnotationText(std::string_view text, std::string recording_id,
                                  std::optional<Millis> recording_duration_ms = {});

std::string FormatAnnotations(const AnnotationSet& set);

/// Binary per-frame targets aligned to a FrameGeometry.
struct FrameLabels {
  std::vector<std::uint8_t> labels;
  FrameGeometry geometry;

  std::int64_t size() const { return static_cast<std::int64_t>(labels.size()); }
};

/// Frame n is positive iff annotations carrying `target` cover strictly more
/// than half of its owned interval [n*T, (n+1)*T). Exactly half is negative.
FrameLabels ComputeFrameLabels(const AnnotationSet& set, const FrameGeometry& g,
                               EventLabel target = EventLabel::kCough);

struct PartitionStats {
  std::int64_t n_recordings = 0;
  double total_recording_hours = 0.0;
  std::int64_t n_coughs = 0;
  double total_cough_hours = 0.0;
  double mean_cough_ms = 0.0;
  double std_cough_ms = 0.0;  // population
};

PartitionStats ComputePartitionStats(std::span<const AnnotationSet> sets,
                                     EventLabel label = EventLabel::kCough);

struct NamedPartition {
  std::string name;
  PartitionStats stats;
};

/// Aligned text table with columns Part / Number recordings / Duration
/// recordings (h) / Number coughs / Duration coughs (h).
std::string FormatPartitionTable(std::span<const NamedPartition> rows);
std::string PartitionStatsJson(const PartitionStats& s);

}  // namespace coughep
