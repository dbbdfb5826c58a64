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
#include <span>
#include <vector>

namespace coughep {

inline constexpr int kCanonicalSampleRate = 16000;

enum class SampleEncoding { kPcm16, kFloat32 };

/// Mono PCM signal with amplitudes in [-1, 1].
struct Waveform {
  std::vector<float> samples;
  int sample_rate = kCanonicalSampleRate;
  /// Encoding of the file this came from; clips cut from it are written back
  /// in the same encoding.
  SampleEncoding source_encoding = SampleEncoding::kPcm16;

  double DurationSeconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
  std::int64_t size() const { return static_cast<std::int64_t>(samples.size()); }
};

/// Decodes a RIFF/WAVE byte stream (PCM 8/16/24/32-bit or IEEE float 32/64,
/// including WAVE_FORMAT_EXTENSIBLE) without resampling or downmixing.
/// Returns interleaved channels in [-1, 1].
struct DecodedWav {
  std::vector<float> interleaved;
  int channels = 1;
  int sample_rate = 0;
  SampleEncoding encoding = SampleEncoding::kPcm16;
};
DecodedWav DecodeWav(std::span<const std::uint8_t> bytes);

/// Loads a WAV file as a mono 16kHz waveform: channels are averaged and other
/// rates go through ResampleSinc. kFormat on a malformed header,
/// kUnsupported on any other codec.
Waveform LoadWav(const std::filesystem::path& path);
Waveform DecodeWavToMono16k(std::span<const std::uint8_t> bytes);

/// Encodes mono samples. PCM16 rounds to nearest with clipping, so a
/// waveform decoded from PCM16 re-encodes bit-exactly.
std::vector<std::uint8_t> EncodeWav(std::span<const float> samples,
                                    int sample_rate, SampleEncoding encoding,
                                    int channels = 1);
void WriteWav(const std::filesystem::path& path, const Waveform& w);

/// Band-limited resampling by a Hann-windowed sinc kernel with 64 taps.
/// Output length is round(n * out_rate / in_rate).
std::vector<float> ResampleSinc(std::span<const float> input, int in_rate,
                                int out_rate);

}  // namespace coughep
