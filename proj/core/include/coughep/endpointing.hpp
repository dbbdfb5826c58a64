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
#include <span>
#include <string>
#include <vector>

#include "coughep/geometry.hpp"
#include "coughep/scores.hpp"

namespace coughep {

struct BinarySequence {
  std::vector<std::uint8_t> bits;
  FrameGeometry geometry;

  std::int64_t size() const { return static_cast<std::int64_t>(bits.size()); }
};

/// bit n = scores[n] >= threshold.
BinarySequence ThresholdScores(const ScoreSequence& s, double threshold);

/// Sliding-window majority over an odd window, edges replicated.
/// Width 1 is the identity; even or non-positive widths throw kInvalidConfig.
BinarySequence MedianFilter(const BinarySequence& b, int width);

struct Provenance {
  std::string source;
  double threshold = 0.0;
  int filter_width = 1;
};

/// Cough span in milliseconds on the detector's frame grid.
struct Segment {
  Millis start_ms = 0;
  Millis end_ms = 0;
  Provenance provenance;

  double start_seconds() const { return start_ms / 1000.0; }
  double end_seconds() const { return end_ms / 1000.0; }
  Millis duration_ms() const { return end_ms - start_ms; }
};

/// Each maximal run of ones [i..j] becomes [i*T, (j+1)*T). No minimum
/// duration or gap is imposed.
std::vector<Segment> ExtractSegments(const BinarySequence& b, const Provenance& provenance = {});

/// Threshold, optional median filter, then run extraction.
std::vector<Segment> DetectSegments(const ScoreSequence& s, double threshold,
                                    int filter_width = 1);

struct DatasetStats {
  std::int64_t n_segments = 0;
  double mean_ms = 0.0;
  double std_ms = 0.0;  // population; 0 when empty
  double total_minutes = 0.0;
};

DatasetStats ComputeSegmentStats(std::span<const Segment> segs);
DatasetStats ComputeDurationStats(std::span<const Millis> durations_ms);

struct Histogram {
  double bin_width_ms = 0.0;
  /// counts[i] covers [i*w, (i+1)*w).
  std::vector<std::int64_t> counts;
};

/// Bins run from 0 through the longest duration. An empty input yields a
/// single zero bin. kInvalidConfig if bin_width_ms <= 0.
Histogram DurationHistogram(std::span<const Segment> segs, double bin_width_ms);
Histogram DurationHistogram(std::span<const Millis> durations_ms, double bin_width_ms);

/// TSV with header start_ms, end_ms, label, source, threshold, filter_width.
/// The first three columns match the annotation format, so output can be
/// re-read with ParseAnnotations.
std::string FormatSegmentsTsv(std::span<const Segment> segs);
std::vector<Segment> ParseSegmentsTsv(std::string_view text);

}  // namespace coughep
