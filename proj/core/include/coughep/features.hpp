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
#include <string>
#include <vector>

#include "coughep/geometry.hpp"
#include "coughep/wav.hpp"

namespace coughep {

/// Dense row-major matrix of float32; the unit of the CEP1 container.
struct Matrix {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<float> values;

  Matrix() = default;
  Matrix(std::int64_t r, std::int64_t c, float fill = 0.0f)
      : rows(r), cols(c), values(static_cast<std::size_t>(r * c), fill) {}

  float& at(std::int64_t r, std::int64_t c) {
    return values[static_cast<std::size_t>(r * cols + c)];
  }
  float at(std::int64_t r, std::int64_t c) const {
    return values[static_cast<std::size_t>(r * cols + c)];
  }
  std::span<const float> row(std::int64_t r) const {
    return {values.data() + r * cols, static_cast<std::size_t>(cols)};
  }
  std::span<float> row(std::int64_t r) {
    return {values.data() + r * cols, static_cast<std::size_t>(cols)};
  }
};

struct MelConfig {
  int n_mels = 128;
  double window_ms = 25.0;
  double hop_ms = 10.0;
  double fmin_hz = 0.0;
  double fmax_hz = 8000.0;
  double log_floor = 1e-10;
  /// Zero-padded DFT size. 1024 at 16kHz gives 15.6Hz bins, narrow enough
  /// that every one of 128 filters over 0-8kHz covers at least one bin.
  int fft_size = 1024;

  /// Throws kInvalidConfig on violated invariants.
  void Validate(int sample_rate) const;
  int WindowSamples(int sample_rate) const;
  int HopSamples(int sample_rate) const;
};

/// HTK mel scale.
double HzToMel(double hz);
double MelToHz(double mel);

/// Triangular filters on the mel scale, each row normalized to unit sum.
/// Shape [n_mels x (fft_size/2 + 1)].
struct MelFilterbank {
  Matrix weights;
  std::vector<double> center_hz;
};
MelFilterbank BuildMelFilterbank(const MelConfig& cfg, int sample_rate);

/// Log-power mel spectrogram: values[n][m] = log10(E_nm + log_floor), where
/// frame n is the Hann-windowed span starting at sample n*hop.
struct MelSpectrogram {
  Matrix values;  // [n_frames x n_mels]
  MelConfig config;
  int sample_rate = kCanonicalSampleRate;
  double origin_seconds = 0.0;

  std::int64_t n_frames() const { return values.rows; }
  std::int64_t n_mels() const { return values.cols; }
};

/// kEmptyInput if the waveform is shorter than one analysis window.
MelSpectrogram ComputeMelSpectrogram(const Waveform& w, const MelConfig& cfg);

/// Standardizes each mel bin to zero mean, unit variance over the recording.
/// Bins with (near-)zero variance are only centered.
void NormalizePerBin(MelSpectrogram& m);

/// Number of windows of `width` at `stride` that fit in `extent`, or 0.
std::int64_t PatchCount(std::int64_t extent, std::int64_t width,
                        std::int64_t stride);

/// Time-slab [n_mels x patch_width] of consecutive mel columns.
struct PatchFrame {
  Matrix values;
  double center_time = 0.0;
};

struct PatchSequence {
  std::vector<PatchFrame> frames;
  FrameGeometry geometry;

  std::int64_t size() const { return static_cast<std::int64_t>(frames.size()); }
};

/// Slab k covers mel columns [k*stride, k*stride + width). Its frame length
/// is width*hop and skip is stride*hop (160ms / 100ms with the defaults).
/// kEmptyInput if fewer than `width` mel frames exist.
PatchSequence ExtractPatchFrames(const MelSpectrogram& m, int patch_width = 16,
                                 int stride = 10);

/// Splits a slab along frequency into PatchCount(n_mels, width, stride)
/// sub-patches ordered low to high.
std::vector<Matrix> SplitFrequencyPatches(const PatchFrame& p, int width = 16,
                                          int stride = 10);

/// Flattens a slab mel-major (all columns of bin 0, then bin 1, ...).
std::vector<double> FlattenPatch(const PatchFrame& p);

enum class ClassLabel { kCough, kNonCough };
std::string ClassLabelName(ClassLabel c);

struct PowerProfile {
  std::vector<double> freqs;
  std::vector<double> mean_db;
  std::vector<double> std_db;
  ClassLabel class_label = ClassLabel::kCough;
};

struct WelchConfig {
  int segment_samples = 512;
  int overlap_samples = 256;
  double floor = 1e-20;
};

/// Welch PSD per segment (Hann, 50% overlap), in dB, then mean and
/// population std across segments per frequency bin.
/// kEmptyInput on an empty list or a segment shorter than one window.
PowerProfile ComputePowerProfile(std::span<const Waveform> segments,
                                 ClassLabel label, const WelchConfig& cfg = {});

/// CEP1: "CEP1" | u32 rows | u32 cols | float32 row-major, little-endian.
std::vector<std::uint8_t> EncodeCep1(const Matrix& m);
Matrix DecodeCep1(std::span<const std::uint8_t> bytes);

/// Writes <path> (CEP1) and <path>.json (config sidecar).
void WriteSpectrogram(const std::filesystem::path& path, const MelSpectrogram& m);
MelSpectrogram ReadSpectrogram(const std::filesystem::path& path);
void WriteProfile(const std::filesystem::path& path, const PowerProfile& p);
std::string SpectrogramCsv(const MelSpectrogram& m);
std::string ProfileCsv(const PowerProfile& p);

}  // namespace coughep
