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

#include <random>

#include "coughep/binary_io.hpp"
#include "coughep/containers.hpp"
#include "oracles.hpp"
#include "util.hpp"

using namespace coughep;

TEST_SUITE("containers") {

TEST_CASE("CSQ1: probabilities load directly") {
  ScoreSequence s{{0.1, 0.9, 0.2}, {25, 20, 3}, "xlsr"};
  const ScoreFile f = DecodeScores(EncodeScores(s, "dev"));
  CHECK(f.scores.size() == 3);
  CHECK(f.scores.scores[1] == doctest::Approx(0.9));
  CHECK(f.scores.geometry == FrameGeometry{25, 20, 3});
  CHECK(f.scores.source == "xlsr");
  CHECK(f.split == "dev");
  CHECK(f.value_kind == ScoreValueKind::kProbability);
}

TEST_CASE("CSQ1: logits pass through the sigmoid") {
  const std::vector<float> raw = {0.0f, 0.0f, 0.0f};
  const ScoreFile f = DecodeScores(EncodeRawScores(raw, {160, 100, 3}, "ast", ScoreValueKind::kLogit));
  CHECK(f.scores.scores == std::vector<double>{0.5, 0.5, 0.5});
  CHECK(f.value_kind == ScoreValueKind::kLogit);
}

TEST_CASE("CSQ1: round trip is bit-identical") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<float> u(-8.0f, 8.0f);
  std::vector<float> raw(257);
  for (auto& v : raw) v = u(rng);
  oracle::TempDir dir("csq");
  const auto bytes = EncodeRawScores(raw, {25, 20, 257}, "m", ScoreValueKind::kLogit, "test");
  WriteFileAtomic(dir / "a.csq", bytes);
  const ScoreFile f = ImportScores(dir / "a.csq");
  CHECK(f.raw == raw);
  CHECK(EncodeRawScores(f.raw, f.scores.geometry, f.scores.source, f.value_kind, f.split) == bytes);
}

TEST_CASE("CSQ1: format errors") {
  const std::vector<float> three = {0.1f, 0.2f, 0.3f};
  auto header_without = [&](const char* drop) {
    nlohmann::json h = {{"frame_length_ms", 25}, {"frame_skip_ms", 20}, {"n_frames", 3},
                        {"source", "x"}, {"value_kind", "probability"}};
    h.erase(drop);
    return EncodeHeadered({'C', 'S', 'Q', '1'}, h, three);
  };
  CHECK_ERROR_KIND(DecodeScores(header_without("frame_skip_ms")), ErrorKind::kFormat);
  CHECK_ERROR_KIND(DecodeScores(header_without("frame_length_ms")), ErrorKind::kFormat);
  const std::vector<float> bad = {0.1f, 1.5f, 0.3f};
  CHECK_ERROR_KIND(DecodeScores(EncodeRawScores(bad, {25, 20, 3}, "x", ScoreValueKind::kProbability)),
                   ErrorKind::kFormat);
  nlohmann::json long_header = {{"frame_length_ms", 25}, {"frame_skip_ms", 20}, {"n_frames", 4},
                                {"source", "x"}, {"value_kind", "probability"}};
  CHECK_ERROR_KIND(DecodeScores(EncodeHeadered({'C', 'S', 'Q', '1'}, long_header, three)),
                   ErrorKind::kFormat);
  auto wrong_magic = EncodeScores({{0.5}, {25, 20, 1}, "x"});
  wrong_magic[3] = '2';
  CHECK_ERROR_KIND(DecodeScores(wrong_magic), ErrorKind::kFormat);
}

TEST_CASE("HSX1 round trip") {
  HiddenStateExport ex;
  ex.dim = 4;
  ex.style = HeadStyle::kFreqPatches;
  ex.patches_per_frame = 3;
  ex.geometry = {160, 100, 2};
  ex.model_id = "ast-base";
  ex.layer_index = 11;
  for (int i = 0; i < 24; ++i) ex.values.push_back(static_cast<float>(i) / 7.0f);
  oracle::TempDir dir("hsx");
  WriteHiddenStates(dir / "a.hsx", ex);
  const HiddenStateExport r = ReadHiddenStates(dir / "a.hsx");
  CHECK(r.dim == 4);
  CHECK(r.Layout() == "freq_patches:3");
  CHECK(r.geometry == ex.geometry);
  CHECK(r.model_id == "ast-base");
  CHECK(r.layer_index == 11);
  CHECK(r.values == ex.values);
  CHECK(r.frame(1)[0] == ex.values[12]);

  ex.values.pop_back();
  CHECK_ERROR_KIND(ex.Validate(), ErrorKind::kShape);
}

TEST_CASE("CKP1 round trip for both model kinds") {
  LRModel lr = LRModel::Zeros(4, 2, 1);
  for (std::size_t i = 0; i < lr.params.size(); ++i) lr.params[i] = 0.25 * static_cast<double>(i);
  const Checkpoint a = DecodeCheckpoint(EncodeCheckpoint(lr));
  REQUIRE(std::holds_alternative<LRModel>(a));
  CHECK(std::get<LRModel>(a).params == lr.params);
  CHECK(std::get<LRModel>(a).n_mels == 4);

  const MlpHead h = MlpHead::KaimingUniform(HeadStyle::kFreqPatches, 6, 2, 3);
  const Checkpoint b = DecodeCheckpoint(EncodeCheckpoint(h));
  REQUIRE(std::holds_alternative<MlpHead>(b));
  const auto& hb = std::get<MlpHead>(b);
  CHECK(hb.style == HeadStyle::kFreqPatches);
  CHECK(hb.patches == 2);
  REQUIRE(hb.params.size() == h.params.size());
  for (std::size_t i = 0; i < h.params.size(); ++i) {
    CHECK(hb.params[i] == static_cast<double>(static_cast<float>(h.params[i])));
  }
}

TEST_CASE("atomic writes create directories and replace files") {
  oracle::TempDir dir("atomic");
  const auto p = dir / "x/y/z.txt";
  WriteFileAtomic(p, std::string_view("one"));
  WriteFileAtomic(p, std::string_view("two"));
  CHECK(ReadFileText(p) == "two");
  CHECK_ERROR_KIND(ReadFileBytes(dir / "missing"), ErrorKind::kIo);
}

}  // TEST_SUITE
