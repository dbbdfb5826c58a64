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
#include <span>
#include <string>
#include <vector>

#include "coughep/adamw.hpp"
#include "coughep/annotations.hpp"
#include "coughep/features.hpp"
#include "coughep/geometry.hpp"
#include "coughep/scores.hpp"

namespace coughep {

enum class Scheduler { kWarmupLinearDecay, kNone };

struct TrainConfig {
  int batch_size = 8;
  double max_learning_rate = 1e-4;
  int epochs = 16;
  double warmup_fraction = 0.10;
  Scheduler scheduler = Scheduler::kWarmupLinearDecay;
  AdamWParams optimizer;
  std::uint64_t seed = 0;

  void Validate() const;
};

/// Piecewise-linear schedule: 0 -> max over the first warmup_fraction of
/// total_steps, then max -> 0 at the last step. kNone returns max always.
/// kInvalidConfig when total_steps <= 0 or step is out of range.
double LearningRateAt(std::int64_t step, std::int64_t total_steps, const TrainConfig& cfg);

double Sigmoid(double z);
/// x * Phi(x), exact erf form.
double Gelu(double x);
double GeluDerivative(double x);
/// Numerically stable binary cross-entropy of sigmoid(z) against y.
double BinaryCrossEntropyWithLogits(double z, double y);

/// Row-major training examples with binary targets.
struct Dataset {
  std::int64_t dim = 0;
  std::vector<double> x;
  std::vector<std::uint8_t> y;

  std::int64_t size() const { return static_cast<std::int64_t>(y.size()); }
  std::span<const double> row(std::int64_t i) const {
    return {x.data() + i * dim, static_cast<std::size_t>(dim)};
  }
  void Append(std::span<const double> features, std::uint8_t label);
};

/// Flattened patches paired with frame labels at the patch geometry.
/// kShape if the lengths differ.
void AppendPatches(Dataset& ds, const PatchSequence& patches, const FrameLabels& labels);

/// Sigmoid(w . x + b) over flattened mel patches.
struct LRModel {
  int n_mels = 128;
  int patch_width = 16;
  int stride = 10;
  /// weights followed by the bias.
  std::vector<double> params;

  static LRModel Zeros(int n_mels = 128, int patch_width = 16, int stride = 10);

  std::int64_t n_features() const { return static_cast<std::int64_t>(n_mels) * patch_width; }
  std::span<const double> weights() const {
    return {params.data(), static_cast<std::size_t>(n_features())};
  }
  double bias() const { return params.back(); }
  double& bias() { return params.back(); }
  std::int64_t ParameterCount() const { return static_cast<std::int64_t>(params.size()); }
  double Logit(std::span<const double> features) const;
};

/// Mean BCE over the rows in `batch`; fills `grad` (same layout as params)
/// when non-null.
double LrLoss(const LRModel& m, const Dataset& ds, std::span<const std::int64_t> batch,
              std::vector<double>* grad);

/// Mini-batch AdamW at a fixed learning rate (the scheduler is not applied),
/// zero-initialized, reshuffled every epoch from cfg.seed.
/// kDegenerateData unless both classes are present.
LRModel TrainLR(const Dataset& ds, const TrainConfig& cfg, int n_mels = 128,
                int patch_width = 16, int stride = 10);
LRModel TrainLR(const PatchSequence& patches, const FrameLabels& labels,
                const TrainConfig& cfg);

/// kShape if the patch size differs from the model.
ScoreSequence ScoreLR(const LRModel& m, const PatchSequence& patches,
                      const std::string& source = "lr");

enum class HeadStyle { kFlat, kFreqPatches };

/// Per-frame hidden states imported from an external model. Row r of
/// `values` is one vector; a frame owns `patches_per_frame` consecutive rows
/// ordered low to high frequency.
struct HiddenStateExport {
  std::int64_t dim = 0;
  HeadStyle style = HeadStyle::kFlat;
  std::int64_t patches_per_frame = 1;
  FrameGeometry geometry;
  std::string model_id;
  int layer_index = 0;
  std::vector<float> values;

  std::int64_t n_frames() const { return geometry.n_frames; }
  std::int64_t frame_width() const { return patches_per_frame * dim; }
  /// "flat" or "freq_patches:k".
  std::string Layout() const;
  std::span<const float> frame(std::int64_t n) const {
    return {values.data() + n * frame_width(), static_cast<std::size_t>(frame_width())};
  }
  /// kShape on inconsistent sizes or layout.
  void Validate() const;
};

/// Parses "flat" / "freq_patches:k". kFormat otherwise.
void ParseLayout(const std::string& layout, HeadStyle& style, std::int64_t& k);

/// kShape if labels and export disagree on frame count or skip.
void AppendExport(Dataset& ds, const HiddenStateExport& ex, const FrameLabels& labels);

/// Two-layer head: a shared dim -> dim/2 projection with GeLU applied to
/// each of the k patch vectors, the k outputs concatenated, then a linear
/// layer to one logit. Flat style is k = 1.
struct MlpHead {
  HeadStyle style = HeadStyle::kFlat;
  std::int64_t dim = 0;
  std::int64_t patches = 1;
  std::int64_t hidden = 0;
  /// Packed as W1 [hidden x dim], b1 [hidden], w2 [patches*hidden], b2.
  std::vector<double> params;

  static MlpHead Zeros(HeadStyle style, std::int64_t dim, std::int64_t patches = 1);
  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for every layer.
  static MlpHead KaimingUniform(HeadStyle style, std::int64_t dim, std::int64_t patches,
                                std::uint64_t seed);

  std::int64_t layer1_in() const { return dim; }
  std::int64_t layer1_out() const { return hidden; }
  std::int64_t layer2_in() const { return patches * hidden; }
  std::int64_t ParameterCount() const { return static_cast<std::int64_t>(params.size()); }

  std::size_t w1_offset() const { return 0; }
  std::size_t b1_offset() const { return static_cast<std::size_t>(hidden * dim); }
  std::size_t w2_offset() const { return b1_offset() + static_cast<std::size_t>(hidden); }
  std::size_t b2_offset() const { return w2_offset() + static_cast<std::size_t>(layer2_in()); }

  /// `frame` holds patches*dim values.
  double Logit(std::span<const double> frame) const;
};

double HeadLoss(const MlpHead& h, const Dataset& ds, std::span<const std::int64_t> batch,
                std::vector<double>* grad);

/// AdamW under cfg.scheduler, Kaiming-uniform init from cfg.seed.
/// kShape on a layout/dimension mismatch; kDegenerateData if one class only.
MlpHead TrainHead(const Dataset& ds, HeadStyle style, std::int64_t dim,
                  std::int64_t patches, const TrainConfig& cfg);
MlpHead TrainHead(const HiddenStateExport& ex, const FrameLabels& labels,
                  const TrainConfig& cfg);

ScoreSequence ScoreHead(const MlpHead& h, const HiddenStateExport& ex);

/// Mean BCE of a model's posteriors on a dataset, for monitoring.
double MeanLoss(const LRModel& m, const Dataset& ds);
double MeanLoss(const MlpHead& h, const Dataset& ds);

}  // namespace coughep
