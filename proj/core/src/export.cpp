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

#include "coughep/export.hpp"

#include <cstdio>
#include <set>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "coughep/binary_io.hpp"
#include "coughep/error.hpp"

namespace coughep {

namespace fs = std::filesystem;

void ClipManifest::RecomputeStats() {
  std::vector<Millis> d;
  d.reserve(entries.size());
  for (const auto& e : entries) d.push_back(e.duration_ms());
  stats = ComputeDurationStats(d);
}

ClipManifest ExportClips(const std::string& recording_id, const Waveform& w,
                         std::span<const Segment> segs, const fs::path& out_dir,
                         const std::string& threshold_name) {
  ClipManifest m;
  const std::int64_t n = w.size();
  const auto sr = static_cast<std::int64_t>(w.sample_rate);
  // Samples are integral per millisecond only for rates divisible by 1000.
  const auto to_sample = [&](Millis ms) { return ms * sr / 1000; };
  const Millis duration_ms = n * 1000 / sr;

  for (const auto& s : segs) {
    ClipEntry e;
    e.recording_id = recording_id;
    e.start_ms = s.start_ms;
    e.end_ms = s.end_ms;
    e.source = s.provenance.source;
    e.threshold_name = threshold_name;
    if (s.start_ms >= duration_ms) {
      m.warnings.push_back(recording_id + ": segment " + std::to_string(s.start_ms) + "-" +
                           std::to_string(s.end_ms) + "ms starts after the recording ends");
      continue;
    }
    if (s.end_ms > duration_ms) {
      e.warning = "clipped from " + std::to_string(s.end_ms) + "ms to recording end";
      e.end_ms = duration_ms;
    }
    const std::int64_t a = to_sample(e.start_ms);
    const std::int64_t b = std::min(to_sample(e.end_ms), n);
    const fs::path rel = fs::path(recording_id) /
                         (std::to_string(e.start_ms) + "_" + std::to_string(e.end_ms) + ".wav");
    Waveform clip;
    clip.sample_rate = w.sample_rate;
    clip.source_encoding = w.source_encoding;
    clip.samples.assign(w.samples.begin() + a, w.samples.begin() + b);
    WriteWav(out_dir / rel, clip);
    e.clip_path = rel.generic_string();
    m.entries.push_back(std::move(e));
  }
  m.RecomputeStats();
  return m;
}

ClipManifest MergeManifests(std::span<const ClipManifest> parts) {
  ClipManifest out;
  std::set<std::tuple<std::string, Millis, Millis, std::string>> seen;
  for (const auto& p : parts) {
    for (const auto& e : p.entries) {
      if (!seen.emplace(e.recording_id, e.start_ms, e.end_ms, e.source).second) {
        Fail(ErrorKind::kValidation, "duplicate manifest entry " + e.recording_id + " " +
                                         std::to_string(e.start_ms) + "-" +
                                         std::to_string(e.end_ms) + " " + e.source);
      }
      out.entries.push_back(e);
    }
    out.warnings.insert(out.warnings.end(), p.warnings.begin(), p.warnings.end());
  }
  out.RecomputeStats();
  return out;
}

ClipManifest ManifestFromSegments(const std::string& recording_id,
                                  std::span<const Segment> segs,
                                  const std::string& threshold_name) {
  ClipManifest m;
  for (const auto& s : segs) {
    ClipEntry e;
    e.recording_id = recording_id;
    e.start_ms = s.start_ms;
    e.end_ms = s.end_ms;
    e.source = s.provenance.source;
    e.threshold_name = threshold_name;
    e.clip_path = recording_id + "/" + std::to_string(s.start_ms) + "_" +
                  std::to_string(s.end_ms) + ".wav";
    m.entries.push_back(std::move(e));
  }
  m.RecomputeStats();
  return m;
}

std::string ManifestJsonl(const ClipManifest& m) {
  std::string out;
  for (const auto& e : m.entries) {
    nlohmann::json j = {{"clip_path", e.clip_path},   {"recording_id", e.recording_id},
                        {"start_ms", e.start_ms},     {"end_ms", e.end_ms},
                        {"source", e.source},         {"threshold_name", e.threshold_name}};
    if (!e.warning.empty()) j["warning"] = e.warning;
    out += j.dump() + '\n';
  }
  return out;
}

ClipManifest ParseManifestJsonl(std::string_view text) {
  ClipManifest m;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ClipEntry e;
      e.clip_path = j.at("clip_path").get<std::string>();
      e.recording_id = j.at("recording_id").get<std::string>();
      e.start_ms = j.at("start_ms").get<Millis>();
      e.end_ms = j.at("end_ms").get<Millis>();
      e.source = j.value("source", std::string());
      e.threshold_name = j.value("threshold_name", std::string());
      e.warning = j.value("warning", std::string());
      m.entries.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      Fail(ErrorKind::kFormat, "manifest line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  m.RecomputeStats();
  return m;
}

std::string DatasetStatsJson(const DatasetStats& s) {
  return nlohmann::json{{"n_segments", s.n_segments},
                        {"mean_ms", s.mean_ms},
                        {"std_ms", s.std_ms},
                        {"total_minutes", s.total_minutes}}
      .dump(2);
}

void WriteManifest(const fs::path& out_dir, const ClipManifest& m, const std::string& label) {
  WriteFileAtomic(out_dir / "manifest.jsonl", ManifestJsonl(m));
  auto stats = nlohmann::json::parse(DatasetStatsJson(m.stats));
  stats["warnings"] = m.warnings;
  WriteFileAtomic(out_dir / "stats.json", stats.dump(2));
  const NamedStats row{label, m.entries.empty() ? "" : m.entries.front().source, m.stats};
  WriteFileAtomic(out_dir / "stats.txt", FormatDatasetTable(std::span(&row, 1)));
}

ClipManifest ReadManifest(const fs::path& manifest_jsonl) {
  return ParseManifestJsonl(ReadFileText(manifest_jsonl));
}

namespace {

double FragmentationFraction(const ClipManifest& m, Millis frame_skip_ms) {
  if (m.entries.empty()) return 0.0;
  std::int64_t k = 0;
  for (const auto& e : m.entries) k += e.duration_ms() == frame_skip_ms ? 1 : 0;
  return static_cast<double>(k) / static_cast<double>(m.entries.size());
}

}  // namespace

DatasetComparison CompareDatasets(const ClipManifest& automatic, const ClipManifest& truth,
                                  Millis frame_skip_ms) {
  DatasetComparison c;
  c.automatic = automatic.stats;
  c.truth = truth.stats;
  c.count_delta = c.automatic.n_segments - c.truth.n_segments;
  c.count_ratio = c.truth.n_segments > 0
                      ? static_cast<double>(c.automatic.n_segments) / c.truth.n_segments
                      : 0.0;
  c.mean_delta_ms = c.automatic.mean_ms - c.truth.mean_ms;
  c.std_delta_ms = c.automatic.std_ms - c.truth.std_ms;
  c.total_delta_minutes = c.automatic.total_minutes - c.truth.total_minutes;
  c.fragmentation_automatic = FragmentationFraction(automatic, frame_skip_ms);
  c.fragmentation_truth = FragmentationFraction(truth, frame_skip_ms);
  return c;
}

std::string ComparisonJson(const DatasetComparison& c) {
  return nlohmann::json{
      {"automatic", nlohmann::json::parse(DatasetStatsJson(c.automatic))},
      {"truth", nlohmann::json::parse(DatasetStatsJson(c.truth))},
      {"count_delta", c.count_delta},
      {"count_ratio", c.count_ratio},
      {"mean_delta_ms", c.mean_delta_ms},
      {"std_delta_ms", c.std_delta_ms},
      {"total_delta_minutes", c.total_delta_minutes},
      {"fragmentation_automatic", c.fragmentation_automatic},
      {"fragmentation_truth", c.fragmentation_truth}}
      .dump(2);
}

std::string FormatDatasetTable(std::span<const NamedStats> rows) {
  std::ostringstream os;
  char buf[200];
  std::snprintf(buf, sizeof buf, "%-10s %-14s %8s %16s %10s\n", "Operating", "Model", "Number",
                "Average cough", "Total dur.");
  os << buf;
  std::snprintf(buf, sizeof buf, "%-10s %-14s %8s %16s %10s\n", "point", "", "coughs",
                "dur. (ms)", "(min)");
  os << buf;
  for (const auto& r : rows) {
    char dur[48];
    std::snprintf(dur, sizeof dur, "%.0f +/- %.0f", r.stats.mean_ms, r.stats.std_ms);
    std::snprintf(buf, sizeof buf, "%-10s %-14s %8lld %16s %10.2f\n", r.operating_point.c_str(),
                  r.model.c_str(), static_cast<long long>(r.stats.n_segments), dur,
                  r.stats.total_minutes);
    os << buf;
  }
  return os.str();
}

}  // namespace coughep
