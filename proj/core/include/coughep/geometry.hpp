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

namespace coughep {

/// Millisecond timestamps are integers throughout: ground truth is specified
/// to 10ms and every model's frame skip is a whole number of milliseconds.
using Millis = std::int64_t;

/// Output framing of a frame-wise scorer. Prediction n owns the half-open
/// interval [n*skip, (n+1)*skip) relative to origin; its nominal center is
/// n*skip + skip/2. frame_length is the analysis span the model looked at,
/// which may exceed the owned interval.
struct FrameGeometry {
  Millis frame_length_ms = 0;
  Millis frame_skip_ms = 0;
  std::int64_t n_frames = 0;

  Millis OwnedStartMs(std::int64_t n) const { return n * frame_skip_ms; }
  Millis OwnedEndMs(std::int64_t n) const { return (n + 1) * frame_skip_ms; }
  double CenterSeconds(std::int64_t n) const {
    return (static_cast<double>(n) + 0.5) * static_cast<double>(frame_skip_ms) /
           1000.0;
  }
  Millis CoveredMs() const { return n_frames * frame_skip_ms; }

  /// Throws kInvalidConfig unless frame_skip_ms > 0 and n_frames >= 0.
  void Validate() const;

  friend bool operator==(const FrameGeometry&, const FrameGeometry&) = default;
};

/// Geometry of the 16x16 mel-patch front end (160ms frames, 100ms skip).
FrameGeometry PatchGeometry(std::int64_t n_frames);
/// Geometry of waveform-CNN front ends (25ms frames, 20ms skip).
FrameGeometry WaveformCnnGeometry(std::int64_t n_frames);

}  // namespace coughep
