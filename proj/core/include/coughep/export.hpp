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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "coughep/endpointing.hpp"
#include "coughep/wav.hpp"

namespace coughep {

struct ClipEntry {
  std::string clip_path;  // relative to the export root
  std::string recording_id;
  Millis start_ms = 0;
  Millis end_ms = 0;
  std::string source;
  std::string threshold_name;
  /// Non-empty when the segment had to be clipped to the recording.
  std::string warning;

  Millis duration_ms() const { return end_ms - start_ms; }
};

/// Isolated-cough dataset: one entry per clip, unique by
/// (recording_id, start_ms, end_ms, source), plus summary statistics.
struct ClipManifest {
  std::vector<ClipEntry> entries;
  DatasetStats stats;
  /// Segments dropped entirely because they started past the recording end.
  std::vector<std::string> warnings;

  void RecomputeStats();
};

/// Cuts one WAV per segment at out_dir/<recording_id>/<start_ms>_<end_ms>.wav,
/// sample-exact, in the source encoding with no fades or padding. A segment
/// running past the end is clipped and flagged on its entry.
ClipManifest ExportClips(const std::string& recording_id, const Waveform& w,
                         std::span<const Segment> segs, const std::filesystem::path& out_dir,
                         const std::string& threshold_name = "");

/// Concatenates per-recording manifests. kValidation on duplicate keys.
ClipManifest MergeManifests(std::span<const ClipManifest> parts);

/// Builds a manifest without writing audio, e.g. for ground-truth segments.
ClipManifest ManifestFromSegments(const std::string& recording_id,
                                  std::span<const Segment> segs,
                                  const std::string& threshold_name = "");

std::string ManifestJsonl(const ClipManifest& m);
ClipManifest ParseManifestJsonl(std::string_view text);
std::string DatasetStatsJson(const DatasetStats& s);

/// Writes manifest.jsonl, stats.json and stats.txt under out_dir.
void WriteManifest(const std::filesystem::path& out_dir, const ClipManifest& m,
                   const std::string& label = "");
ClipManifest ReadManifest(const std::filesystem::path& manifest_jsonl);

struct DatasetComparison {
  DatasetStats automatic;
  DatasetStats truth;
  std::int64_t count_delta = 0;
  double count_ratio = 0.0;
  double mean_delta_ms = 0.0;
  double std_delta_ms = 0.0;
  double total_delta_minutes = 0.0;
  /// Fraction of segments lasting exactly one frame skip.
  double fragmentation_automatic = 0.0;
  double fragmentation_truth = 0.0;
};

DatasetComparison CompareDatasets(const ClipManifest& automatic, const ClipManifest& truth,
                                  Millis frame_skip_ms);
std::string ComparisonJson(const DatasetComparison& c);

struct NamedStats {
  std::string operating_point;
  std::string model;
  DatasetStats stats;
};

/// Aligned text table: Operating point / Model / Number coughs /
/// Average cough dur. (ms) / Total dur. (min).
std::string FormatDatasetTable(std::span<const NamedStats> rows);

}  // namespace coughep
