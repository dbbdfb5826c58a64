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
#include <string>
#include <vector>

#include "coughep/annotations.hpp"
#include "coughep/wav.hpp"

namespace coughep {

struct SynthConfig {
  int n_recordings = 4;
  double recording_seconds = 30.0;
  int events_per_recording = 8;
  double event_mean_ms = 416.0;
  double event_std_ms = 207.0;
  double snr_db = 10.0;
  std::uint64_t seed = 0;
  /// Silence kept before, between and after events.
  Millis min_gap_ms = 200;
  Millis max_event_ms = 2000;
  /// Background noise RMS (full scale = 1).
  double background_rms = 0.01;
  /// Pass band of the cough-like bursts; all energy sits below 8kHz.
  double band_low_hz = 300.0;
  double band_high_hz = 4000.0;
  std::string id_prefix = "rec";

  void Validate() const;
};

struct SynthRecording {
  std::string id;
  Waveform audio;
  AnnotationSet annotations;
};

/// Background white noise plus band-limited noise bursts at the configured
/// SNR (burst power over background power). Event durations are log-normal
/// with the configured mean/std, quantized to 10ms, and placed without
/// overlap on the 10ms grid. Deterministic in cfg.seed.
/// kInvalidConfig when the events cannot be packed into a recording.
std::vector<SynthRecording> GenerateSynthCorpus(const SynthConfig& cfg);

/// Writes <dir>/audio/<id>.wav (PCM16) and <dir>/annotations/<id>.tsv.
void WriteSynthCorpus(const std::filesystem::path& dir,
                      const std::vector<SynthRecording>& corpus);

}  // namespace coughep
