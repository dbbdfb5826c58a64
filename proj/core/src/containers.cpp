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

#include "coughep/containers.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "coughep/binary_io.hpp"
#include "coughep/error.hpp"

namespace coughep {

namespace {

constexpr Magic kScoreMagic = {'C', 'S', 'Q', '1'};
constexpr Magic kHiddenMagic = {'H', 'S', 'X', '1'};
constexpr Magic kCheckpointMagic = {'C', 'K', 'P', '1'};

template <typename T>
T Require(const nlohmann::json& h, const char* key, const char* what) {
  if (!h.contains(key)) {
    Fail(ErrorKind::kFormat, std::string(what) + ": header lacks '" + key + "'");
  }
  try {
    return h.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    Fail(ErrorKind::kFormat, std::string(what) + ": header field '" + key + "' has wrong type");
  }
}

std::string HeadStyleName(HeadStyle s) {
  return s == HeadStyle::kFlat ? "flat" : "freq_patches";
}

}  // namespace

void ScoreSequence::Validate() const {
  geometry.Validate();
  if (size() != geometry.n_frames) {
    Fail(ErrorKind::kShape, "score count " + std::to_string(size()) + " != n_frames " +
                                std::to_string(geometry.n_frames));
  }
  for (double v : scores) {
    if (!(v >= 0.0 && v <= 1.0)) {
      Fail(ErrorKind::kValidation, "score outside [0, 1]: " + std::to_string(v));
    }
  }
}

std::vector<std::uint8_t> EncodeRawScores(std::span<const float> raw, const FrameGeometry& g,
                                          const std::string& source, ScoreValueKind kind,
                                          const std::string& split) {
  nlohmann::json h = {{"frame_length_ms", g.frame_length_ms},
                      {"frame_skip_ms", g.frame_skip_ms},
                      {"n_frames", static_cast<std::int64_t>(raw.size())},
                      {"source", source},
                      {"value_kind", kind == ScoreValueKind::kLogit ? "logit" : "probability"}};
  if (!split.empty()) h["split"] = split;
  return EncodeHeadered(kScoreMagic, h, raw);
}

std::vector<std::uint8_t> EncodeScores(const ScoreSequence& s, const std::string& split,
                                       ScoreValueKind kind) {
  std::vector<float> raw(s.scores.begin(), s.scores.end());
  return EncodeRawScores(raw, s.geometry, s.source, kind, split);
}

ScoreFile DecodeScores(std::span<const std::uint8_t> bytes) {
  auto [h, payload] = DecodeHeadered(kScoreMagic, bytes, "CSQ1");
  ScoreFile f;
  f.scores.geometry.frame_length_ms = Require<Millis>(h, "frame_length_ms", "CSQ1");
  f.scores.geometry.frame_skip_ms = Require<Millis>(h, "frame_skip_ms", "CSQ1");
  f.scores.geometry.n_frames = h.value("n_frames", static_cast<std::int64_t>(payload.size()));
  f.scores.source = h.value("source", std::string("unknown"));
  f.split = h.value("split", std::string());
  const std::string kind = h.value("value_kind", std::string("probability"));
  if (kind == "logit") {
    f.value_kind = ScoreValueKind::kLogit;
  } else if (kind != "probability") {
    Fail(ErrorKind::kFormat, "CSQ1: unknown value_kind '" + kind + "'");
  }
  if (f.scores.geometry.frame_skip_ms <= 0) {
    Fail(ErrorKind::kFormat, "CSQ1: frame_skip_ms must be positive");
  }
  if (f.scores.geometry.n_frames != static_cast<std::int64_t>(payload.size())) {
    Fail(ErrorKind::kFormat, "CSQ1: n_frames disagrees with payload length");
  }
  f.scores.scores.reserve(payload.size());
  for (float v : payload) {
    if (!std::isfinite(v)) Fail(ErrorKind::kFormat, "CSQ1: non-finite score");
    if (f.value_kind == ScoreValueKind::kLogit) {
      f.scores.scores.push_back(Sigmoid(v));
    } else {
      if (v < 0.0f || v > 1.0f) {
        Fail(ErrorKind::kFormat,
             "CSQ1: probability outside [0, 1]; declare value_kind \"logit\" for raw logits");
      }
      f.scores.scores.push_back(v);
    }
  }
  f.raw = std::move(payload);
  return f;
}

ScoreFile ImportScores(const std::filesystem::path& path) {
  return DecodeScores(ReadFileBytes(path));
}

void WriteScores(const std::filesystem::path& path, const ScoreSequence& s,
                 const std::string& split) {
  WriteFileAtomic(path, EncodeScores(s, split));
}

std::vector<std::uint8_t> EncodeHiddenStates(const HiddenStateExport& ex) {
  ex.Validate();
  nlohmann::json h = {{"dim", ex.dim},
                      {"layout", ex.Layout()},
                      {"frame_length_ms", ex.geometry.frame_length_ms},
                      {"frame_skip_ms", ex.geometry.frame_skip_ms},
                      {"n_frames", ex.geometry.n_frames},
                      {"model_id", ex.model_id},
                      {"layer", ex.layer_index}};
  return EncodeHeadered(kHiddenMagic, h, ex.values);
}

HiddenStateExport DecodeHiddenStates(std::span<const std::uint8_t> bytes) {
  auto [h, payload] = DecodeHeadered(kHiddenMagic, bytes, "HSX1");
  HiddenStateExport ex;
  ex.dim = Require<std::int64_t>(h, "dim", "HSX1");
  ParseLayout(Require<std::string>(h, "layout", "HSX1"), ex.style, ex.patches_per_frame);
  ex.geometry.frame_length_ms = Require<Millis>(h, "frame_length_ms", "HSX1");
  ex.geometry.frame_skip_ms = Require<Millis>(h, "frame_skip_ms", "HSX1");
  ex.geometry.n_frames = Require<std::int64_t>(h, "n_frames", "HSX1");
  ex.model_id = h.value("model_id", std::string());
  ex.layer_index = h.value("layer", 0);
  ex.values = std::move(payload);
  try {
    ex.Validate();
  } catch (const Error& e) {
    Fail(ErrorKind::kFormat, std::string("HSX1: ") + e.what());
  }
  return ex;
}

HiddenStateExport ReadHiddenStates(const std::filesystem::path& path) {
  return DecodeHiddenStates(ReadFileBytes(path));
}

void WriteHiddenStates(const std::filesystem::path& path, const HiddenStateExport& ex) {
  WriteFileAtomic(path, EncodeHiddenStates(ex));
}

std::vector<std::uint8_t> EncodeCheckpoint(const Checkpoint& model) {
  nlohmann::json h;
  std::vector<float> payload;
  if (const auto* lr = std::get_if<LRModel>(&model)) {
    h = {{"kind", "lr"},
         {"n_mels", lr->n_mels},
         {"patch_width", lr->patch_width},
         {"stride", lr->stride},
         {"parameter_count", lr->ParameterCount()}};
    payload.assign(lr->params.begin(), lr->params.end());
  } else {
    const auto& head = std::get<MlpHead>(model);
    h = {{"kind", "mlp_head"},
         {"style", HeadStyleName(head.style)},
         {"dim", head.dim},
         {"patches", head.patches},
         {"hidden", head.hidden},
         {"activation", "gelu_erf"},
         {"parameter_count", head.ParameterCount()}};
    payload.assign(head.params.begin(), head.params.end());
  }
  return EncodeHeadered(kCheckpointMagic, h, payload);
}

Checkpoint DecodeCheckpoint(std::span<const std::uint8_t> bytes) {
  auto [h, payload] = DecodeHeadered(kCheckpointMagic, bytes, "CKP1");
  const auto kind = Require<std::string>(h, "kind", "CKP1");
  if (kind == "lr") {
    LRModel m = LRModel::Zeros(Require<int>(h, "n_mels", "CKP1"),
                               Require<int>(h, "patch_width", "CKP1"),
                               h.value("stride", 10));
    if (payload.size() != m.params.size()) {
      Fail(ErrorKind::kFormat, "CKP1: LR payload size mismatch");
    }
    m.params.assign(payload.begin(), payload.end());
    return m;
  }
  if (kind == "mlp_head") {
    const auto style_name = Require<std::string>(h, "style", "CKP1");
    HeadStyle style = HeadStyle::kFlat;
    if (style_name == "freq_patches") {
      style = HeadStyle::kFreqPatches;
    } else if (style_name != "flat") {
      Fail(ErrorKind::kFormat, "CKP1: unknown head style '" + style_name + "'");
    }
    MlpHead head = MlpHead::Zeros(style, Require<std::int64_t>(h, "dim", "CKP1"),
                                  Require<std::int64_t>(h, "patches", "CKP1"));
    if (payload.size() != head.params.size()) {
      Fail(ErrorKind::kFormat, "CKP1: head payload size mismatch");
    }
    head.params.assign(payload.begin(), payload.end());
    return head;
  }
  Fail(ErrorKind::kFormat, "CKP1: unknown model kind '" + kind + "'");
}

Checkpoint ReadCheckpoint(const std::filesystem::path& path) {
  return DecodeCheckpoint(ReadFileBytes(path));
}

void WriteCheckpoint(const std::filesystem::path& path, const Checkpoint& model) {
  WriteFileAtomic(path, EncodeCheckpoint(model));
}

}  // namespace coughep
