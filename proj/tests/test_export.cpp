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

#include <cmath>

#include "coughep/binary_io.hpp"
#include "coughep/export.hpp"
#include "coughep/wav.hpp"
#include "oracles.hpp"
#include "util.hpp"

using namespace coughep;

namespace {

Waveform Ramp(std::int64_t n) {
  Waveform w;
  w.source_encoding = SampleEncoding::kFloat32;
  for (std::int64_t i = 0; i < n; ++i) w.samples.push_back(static_cast<float>(i % 1000) / 1000.0f);
  return w;
}

Segment Seg(Millis a, Millis b) { return {a, b, {"lr", 0.5, 1}}; }

}  // namespace

TEST_SUITE("export") {

TEST_CASE("clips are sample-exact") {
  oracle::TempDir dir("clips");
  const Waveform w = Ramp(16000);
  const std::vector<Segment> segs = {Seg(100, 300), Seg(510, 520)};
  const ClipManifest m = ExportClips("rec0", w, segs, dir.path(), "C");
  REQUIRE(m.entries.size() == 2);
  CHECK(m.entries[0].clip_path == "rec0/100_300.wav");
  CHECK(m.entries[0].threshold_name == "C");
  const Waveform c = LoadWav(dir / m.entries[0].clip_path);
  REQUIRE(c.size() == 3200);
  for (std::int64_t i = 0; i < c.size(); ++i) {
    REQUIRE(c.samples[static_cast<std::size_t>(i)] == w.samples[static_cast<std::size_t>(1600 + i)]);
  }
  CHECK(LoadWav(dir / m.entries[1].clip_path).size() == 160);
  CHECK(m.stats.n_segments == 2);
  CHECK(m.warnings.empty());
}

TEST_CASE("overrunning segments are clipped, late ones dropped") {
  oracle::TempDir dir("overrun");
  const Waveform w = Ramp(8000);  // 500ms
  const std::vector<Segment> segs = {Seg(400, 700), Seg(500, 600)};
  const ClipManifest m = ExportClips("r", w, segs, dir.path());
  REQUIRE(m.entries.size() == 1);
  CHECK(m.entries[0].end_ms == 500);
  CHECK(!m.entries[0].warning.empty());
  CHECK(LoadWav(dir / m.entries[0].clip_path).size() == 1600);
  REQUIRE(m.warnings.size() == 1);
  CHECK(m.warnings[0].find("500-600") != std::string::npos);
}

TEST_CASE("manifest round trip and merge") {
  oracle::TempDir dir("manifest");
  const std::vector<Segment> a = {Seg(0, 100), Seg(200, 260)};
  const std::vector<Segment> b = {Seg(10, 40)};
  const std::vector<ClipManifest> parts = {ManifestFromSegments("x", a, "EE"),
                                           ManifestFromSegments("y", b, "EE")};
  ClipManifest m = MergeManifests(parts);
  m.entries[1].warning = "clipped";
  CHECK(m.stats.n_segments == 3);
  WriteManifest(dir.path(), m, "EE");
  const ClipManifest r = ReadManifest(dir / "manifest.jsonl");
  REQUIRE(r.entries.size() == 3);
  CHECK(r.entries[2].recording_id == "y");
  CHECK(r.entries[2].clip_path == "y/10_40.wav");
  CHECK(r.entries[1].warning == "clipped");
  CHECK(r.entries[0].source == "lr");
  CHECK(r.stats.mean_ms == doctest::Approx(190.0 / 3.0));
  CHECK(std::filesystem::exists(dir / "stats.json"));
  CHECK(ReadFileText(dir / "stats.txt").find("EE") != std::string::npos);

  const std::vector<ClipManifest> dup = {parts[0], parts[0]};
  CHECK_ERROR_KIND(MergeManifests(dup), ErrorKind::kValidation);
  CHECK_ERROR_KIND(ParseManifestJsonl("{not json}\n"), ErrorKind::kFormat);
}

TEST_CASE("dataset comparison") {
  const std::vector<Segment> autos = {Seg(0, 100), Seg(200, 300), Seg(400, 900)};
  const std::vector<Segment> truth = {Seg(0, 300), Seg(400, 900)};
  const auto c = CompareDatasets(ManifestFromSegments("r", autos),
                                 ManifestFromSegments("r", truth), 100);
  CHECK(c.count_delta == 1);
  CHECK(c.count_ratio == doctest::Approx(1.5));
  CHECK(c.mean_delta_ms == doctest::Approx(700.0 / 3.0 - 400.0));
  CHECK(c.total_delta_minutes == doctest::Approx(-100.0 / 60000.0));
  CHECK(c.fragmentation_automatic == doctest::Approx(2.0 / 3.0));
  CHECK(c.fragmentation_truth == 0.0);
  CHECK(ComparisonJson(c).find("\"count_delta\": 1") != std::string::npos);
}

TEST_CASE("table row: 6886 segments, 413 +/- 148 ms, 47.36 min") {
  // Alternating 265/561ms segments, with 2318 of them shortened by 1ms so the
  // total lands on 2,841,600ms.
  std::vector<Segment> segs;
  Millis t = 0;
  for (int i = 0; i < 6886; ++i) {
    const Millis d = (i % 2 ? 561 : 265) - (i < 2318 ? 1 : 0);
    segs.push_back(Seg(t, t + d));
    t += d + 100;
  }
  const ClipManifest m = ManifestFromSegments("all", segs);
  CHECK(m.stats.n_segments == 6886);
  CHECK(std::round(m.stats.mean_ms) == 413.0);
  CHECK(std::round(m.stats.std_ms) == 148.0);
  CHECK(std::round(m.stats.total_minutes * 100) / 100 == doctest::Approx(47.36));

  const NamedStats row{"C", "AST(Hidden)", m.stats};
  const std::string table = FormatDatasetTable(std::span(&row, 1));
  CHECK(table.find("6886") != std::string::npos);
  CHECK(table.find("413 +/- 148") != std::string::npos);
  CHECK(table.find("47.36") != std::string::npos);
}

TEST_CASE("comparison reports 6682 automatic against 6886 ground-truth coughs") {
  std::vector<Segment> autos, truth;
  for (int i = 0; i < 6886; ++i) {
    const Millis t = 1000 * static_cast<Millis>(i);
    truth.push_back(Seg(t, t + 400));
    if (i < 6682) autos.push_back(Seg(t, t + 500));
  }
  const auto c = CompareDatasets(ManifestFromSegments("a", autos), ManifestFromSegments("a", truth), 20);
  CHECK(c.automatic.n_segments == 6682);
  CHECK(c.truth.n_segments == 6886);
  CHECK(c.count_delta == -204);
  CHECK(c.mean_delta_ms == doctest::Approx(100.0));
}

}  // TEST_SUITE
