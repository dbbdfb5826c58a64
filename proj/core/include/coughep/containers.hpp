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
#include <variant>
#include <vector>

#include "coughep/classifiers.hpp"
#include "coughep/scores.hpp"

namespace coughep {

// All three containers share the framing
//   magic[4] | u32 header_len | header JSON | float32 payload (little-endian).

/// CSQ1 header keys: frame_length_ms, frame_skip_ms, n_frames, source,
/// value_kind ("probability" | "logit"), optional split.
enum class ScoreValueKind { kProbability, kLogit };

struct ScoreFile {
  ScoreSequence scores;
  /// Raw payload as stored; bit-identical across a write/read round trip.
  std::vector<float> raw;
  ScoreValueKind value_kind = ScoreValueKind::kProbability;
  std::string split;
};

std::vector<std::uint8_t> EncodeScores(const ScoreSequence& s, const std::string& split = "",
                                       ScoreValueKind kind = ScoreValueKind::kProbability);
std::vector<std::uint8_t> EncodeRawScores(std::span<const float> raw, const FrameGeometry& g,
                                          const std::string& source, ScoreValueKind kind,
                                          const std::string& split = "");
/// Logit payloads pass through the sigmoid. kFormat on missing geometry,
/// a length mismatch, or probabilities outside [0, 1].
ScoreFile DecodeScores(std::span<const std::uint8_t> bytes);
ScoreFile ImportScores(const std::filesystem::path& path);
void WriteScores(const std::filesystem::path& path, const ScoreSequence& s,
                 const std::string& split = "");

/// HSX1 header keys: dim, layout, frame_length_ms, frame_skip_ms, n_frames,
/// model_id, layer.
std::vector<std::uint8_t> EncodeHiddenStates(const HiddenStateExport& ex);
HiddenStateExport DecodeHiddenStates(std::span<const std::uint8_t> bytes);
HiddenStateExport ReadHiddenStates(const std::filesystem::path& path);
void WriteHiddenStates(const std::filesystem::path& path, const HiddenStateExport& ex);

/// CKP1 checkpoint: header describes the model kind and shape, payload is
/// the packed parameter vector in float32.
using Checkpoint = std::variant<LRModel, MlpHead>;
std::vector<std::uint8_t> EncodeCheckpoint(const Checkpoint& model);
Checkpoint DecodeCheckpoint(std::span<const std::uint8_t> bytes);
Checkpoint ReadCheckpoint(const std::filesystem::path& path);
void WriteCheckpoint(const std::filesystem::path& path, const Checkpoint& model);

}  // namespace coughep
