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

#include "coughep/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "coughep/error.hpp"

namespace coughep {

namespace {

/// Uniform double in [0, 1) from the top 53 bits; identical on every
/// standard library, unlike std::uniform_real_distribution.
double UniformUnit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void ShuffleIndices(std::vector<std::int64_t>& idx, std::mt19937_64& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
}

void RequireBothClasses(const Dataset& ds) {
  if (ds.size() == 0) Fail(ErrorKind::kDegenerateData, "empty training set");
  const auto pos = std::count(ds.y.begin(), ds.y.end(), std::uint8_t{1});
  if (pos == 0 || pos == ds.size()) {
    Fail(ErrorKind::kDegenerateData, "training labels contain a single class");
  }
}

std::int64_t StepsPerEpoch(const Dataset& ds, const TrainConfig& cfg) {
  return (ds.size() + cfg.batch_size - 1) / cfg.batch_size;
}

/// Shared mini-batch loop. `loss_fn(params, batch, grad)` must fill grad.
template <typename LossFn>
void RunAdamW(std::vector<double>& params, const Dataset& ds, const TrainConfig& cfg,
              bool use_schedule, LossFn&& loss_fn) {
  TrainConfig sched = cfg;
  if (!use_schedule) sched.scheduler = Scheduler::kNone;
  AdamW opt(params.size(), cfg.optimizer);
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::int64_t> order(static_cast<std::size_t>(ds.size()));
  std::iota(order.begin(), order.end(), 0);
  const std::int64_t per_epoch = StepsPerEpoch(ds, cfg);
  const std::int64_t total = per_epoch * cfg.epochs;
  std::vector<double> grad(params.size());
  std::int64_t step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    ShuffleIndices(order, rng);
    for (std::int64_t b = 0; b < per_epoch; ++b) {
      const std::int64_t lo = b * cfg.batch_size;
      const std::int64_t hi = std::min<std::int64_t>(lo + cfg.batch_size, ds.size());
      std::span<const std::int64_t> batch(order.data() + lo, static_cast<std::size_t>(hi - lo));
      loss_fn(batch, grad);
      opt.Step(params, grad, LearningRateAt(step, total, sched));
      ++step;
    }
  }
}

}  // namespace

void TrainConfig::Validate() const {
  if (batch_size < 1) Fail(ErrorKind::kInvalidConfig, "batch_size must be >= 1");
  if (epochs < 1) Fail(ErrorKind::kInvalidConfig, "epochs must be >= 1");
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
    Fail(ErrorKind::kInvalidConfig, "warmup_fraction must lie in [0, 1)");
  }
  if (!(max_learning_rate > 0.0)) {
    Fail(ErrorKind::kInvalidConfig, "max_learning_rate must be > 0");
  }
  if (optimizer.weight_decay < 0.0) {
    Fail(ErrorKind::kInvalidConfig, "weight_decay must be >= 0");
  }
  // The decoupled decay multiplies every parameter by (1 - lr*wd) per step.
  if (max_learning_rate * optimizer.weight_decay >= 1.0) {
    Fail(ErrorKind::kInvalidConfig, "max_learning_rate * weight_decay must be < 1");
  }
}

double LearningRateAt(std::int64_t step, std::int64_t total_steps, const TrainConfig& cfg) {
  if (total_steps <= 0) Fail(ErrorKind::kInvalidConfig, "total_steps must be > 0");
  if (step < 0 || step > total_steps) {
    Fail(ErrorKind::kInvalidConfig, "step outside [0, total_steps]");
  }
  const double peak = cfg.max_learning_rate;
  if (cfg.scheduler == Scheduler::kNone) return peak;
  const double s = static_cast<double>(step);
  const double total = static_cast<double>(total_steps);
  const double warmup = cfg.warmup_fraction * total;
  // Ratios first so the peak step returns max_learning_rate exactly.
  if (s < warmup) return peak * (s / warmup);
  return peak * ((total - s) / (total - warmup));
}

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double Gelu(double x) { return 0.5 * x * std::erfc(-x / std::numbers::sqrt2); }

double GeluDerivative(double x) {
  const double cdf = 0.5 * std::erfc(-x / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + x * pdf;
}

double BinaryCrossEntropyWithLogits(double z, double y) {
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

void Dataset::Append(std::span<const double> features, std::uint8_t label) {
  if (dim == 0 && y.empty()) dim = static_cast<std::int64_t>(features.size());
  if (static_cast<std::int64_t>(features.size()) != dim) {
    Fail(ErrorKind::kShape, "example dimension " + std::to_string(features.size()) +
                                " != dataset dimension " + std::to_string(dim));
  }
  x.insert(x.end(), features.begin(), features.end());
  y.push_back(label ? 1 : 0);
}

void AppendPatches(Dataset& ds, const PatchSequence& patches, const FrameLabels& labels) {
  if (patches.size() != labels.size()) {
    Fail(ErrorKind::kShape, "patch count " + std::to_string(patches.size()) +
                                " != label count " + std::to_string(labels.size()));
  }
  for (std::int64_t i = 0; i < patches.size(); ++i) {
    ds.Append(FlattenPatch(patches.frames[static_cast<std::size_t>(i)]),
              labels.labels[static_cast<std::size_t>(i)]);
  }
}

LRModel LRModel::Zeros(int n_mels, int patch_width, int stride) {
  LRModel m;
  m.n_mels = n_mels;
  m.patch_width = patch_width;
  m.stride = stride;
  m.params.assign(static_cast<std::size_t>(m.n_features() + 1), 0.0);
  return m;
}

double LRModel::Logit(std::span<const double> features) const {
  if (static_cast<std::int64_t>(features.size()) != n_features()) {
    Fail(ErrorKind::kShape, "LR input has " + std::to_string(features.size()) +
                                " features, model expects " + std::to_string(n_features()));
  }
  double z = bias();
  for (std::size_t i = 0; i < features.size(); ++i) z += params[i] * features[i];
  return z;
}

double LrLoss(const LRModel& m, const Dataset& ds, std::span<const std::int64_t> batch,
              std::vector<double>* grad) {
  if (ds.dim != m.n_features()) Fail(ErrorKind::kShape, "dataset/model dimension mismatch");
  if (grad) grad->assign(m.params.size(), 0.0);
  const double inv = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  const std::size_t n_w = static_cast<std::size_t>(m.n_features());
  for (std::int64_t i : batch) {
    const auto x = ds.row(i);
    const double y = ds.y[static_cast<std::size_t>(i)];
    const double z = m.Logit(x);
    loss += BinaryCrossEntropyWithLogits(z, y) * inv;
    if (grad) {
      const double dz = (Sigmoid(z) - y) * inv;
      for (std::size_t k = 0; k < n_w; ++k) (*grad)[k] += dz * x[k];
      (*grad)[n_w] += dz;
    }
  }
  return loss;
}

LRModel TrainLR(const Dataset& ds, const TrainConfig& cfg, int n_mels, int patch_width,
                int stride) {
  cfg.Validate();
  RequireBothClasses(ds);
  LRModel m = LRModel::Zeros(n_mels, patch_width, stride);
  if (ds.dim != m.n_features()) {
    Fail(ErrorKind::kShape, "dataset dimension " + std::to_string(ds.dim) +
                                " != n_mels*patch_width " + std::to_string(m.n_features()));
  }
  RunAdamW(m.params, ds, cfg, /*use_schedule=*/false,
           [&](std::span<const std::int64_t> batch, std::vector<double>& grad) {
             LrLoss(m, ds, batch, &grad);
           });
  return m;
}

LRModel TrainLR(const PatchSequence& patches, const FrameLabels& labels,
                const TrainConfig& cfg) {
  if (patches.frames.empty()) Fail(ErrorKind::kEmptyInput, "no patches");
  Dataset ds;
  AppendPatches(ds, patches, labels);
  const auto& first = patches.frames.front().values;
  const int stride = patches.geometry.frame_length_ms > 0 && patches.geometry.frame_skip_ms > 0
                         ? static_cast<int>(patches.geometry.frame_skip_ms *
                                            first.cols / patches.geometry.frame_length_ms)
                         : 10;
  return TrainLR(ds, cfg, static_cast<int>(first.rows), static_cast<int>(first.cols), stride);
}

ScoreSequence ScoreLR(const LRModel& m, const PatchSequence& patches,
                      const std::string& source) {
  ScoreSequence out;
  out.geometry = patches.geometry;
  out.source = source;
  out.scores.reserve(patches.frames.size());
  for (const auto& p : patches.frames) {
    if (p.values.rows != m.n_mels || p.values.cols != m.patch_width) {
      Fail(ErrorKind::kShape, "patch is " + std::to_string(p.values.rows) + "x" +
                                  std::to_string(p.values.cols) + ", model expects " +
                                  std::to_string(m.n_mels) + "x" +
                                  std::to_string(m.patch_width));
    }
    out.scores.push_back(Sigmoid(m.Logit(FlattenPatch(p))));
  }
  return out;
}

std::string HiddenStateExport::Layout() const {
  if (style == HeadStyle::kFlat) return "flat";
  return "freq_patches:" + std::to_string(patches_per_frame);
}

void HiddenStateExport::Validate() const {
  geometry.Validate();
  if (dim <= 0) Fail(ErrorKind::kShape, "hidden-state dim must be > 0");
  if (patches_per_frame < 1) Fail(ErrorKind::kShape, "patches per frame must be >= 1");
  if (style == HeadStyle::kFlat && patches_per_frame != 1) {
    Fail(ErrorKind::kShape, "flat layout must have one vector per frame");
  }
  if (static_cast<std::int64_t>(values.size()) != n_frames() * frame_width()) {
    Fail(ErrorKind::kShape, "hidden-state payload has " + std::to_string(values.size()) +
                                " values, expected " +
                                std::to_string(n_frames() * frame_width()));
  }
}

void ParseLayout(const std::string& layout, HeadStyle& style, std::int64_t& k) {
  if (layout == "flat") {
    style = HeadStyle::kFlat;
    k = 1;
    return;
  }
  const std::string prefix = "freq_patches:";
  if (layout.rfind(prefix, 0) == 0) {
    try {
      std::size_t used = 0;
      const std::string tail = layout.substr(prefix.size());
      k = std::stoll(tail, &used);
      if (used == tail.size() && k >= 1) {
        style = HeadStyle::kFreqPatches;
        return;
      }
    } catch (const std::exception&) {
    }
  }
  Fail(ErrorKind::kFormat, "unknown patch layout '" + layout + "'");
}

void AppendExport(Dataset& ds, const HiddenStateExport& ex, const FrameLabels& labels) {
  ex.Validate();
  if (labels.size() != ex.n_frames() ||
      labels.geometry.frame_skip_ms != ex.geometry.frame_skip_ms) {
    Fail(ErrorKind::kShape, "labels do not match the hidden-state export geometry");
  }
  std::vector<double> row(static_cast<std::size_t>(ex.frame_width()));
  for (std::int64_t n = 0; n < ex.n_frames(); ++n) {
    const auto f = ex.frame(n);
    std::copy(f.begin(), f.end(), row.begin());
    ds.Append(row, labels.labels[static_cast<std::size_t>(n)]);
  }
}

MlpHead MlpHead::Zeros(HeadStyle style, std::int64_t dim, std::int64_t patches) {
  if (dim < 2) Fail(ErrorKind::kShape, "head input dim must be >= 2");
  if (patches < 1) Fail(ErrorKind::kShape, "head needs at least one patch");
  if (style == HeadStyle::kFlat && patches != 1) {
    Fail(ErrorKind::kShape, "flat head takes exactly one vector per frame");
  }
  MlpHead h;
  h.style = style;
  h.dim = dim;
  h.patches = patches;
  h.hidden = dim / 2;
  h.params.assign(h.b2_offset() + 1, 0.0);
  return h;
}

MlpHead MlpHead::KaimingUniform(HeadStyle style, std::int64_t dim, std::int64_t patches,
                                std::uint64_t seed) {
  MlpHead h = Zeros(style, dim, patches);
  std::mt19937_64 rng(seed);
  const double bound1 = 1.0 / std::sqrt(static_cast<double>(h.layer1_in()));
  const double bound2 = 1.0 / std::sqrt(static_cast<double>(h.layer2_in()));
  for (std::size_t i = 0; i < h.w2_offset(); ++i) {
    h.params[i] = (2.0 * UniformUnit(rng) - 1.0) * bound1;
  }
  for (std::size_t i = h.w2_offset(); i < h.params.size(); ++i) {
    h.params[i] = (2.0 * UniformUnit(rng) - 1.0) * bound2;
  }
  return h;
}

namespace {

/// Forward pass keeping pre-activations for backprop.
double HeadForward(const MlpHead& h, std::span<const double> frame,
                   std::vector<double>& pre, std::vector<double>& act) {
  const auto H = static_cast<std::size_t>(h.hidden);
  const auto D = static_cast<std::size_t>(h.dim);
  pre.resize(static_cast<std::size_t>(h.layer2_in()));
  act.resize(pre.size());
  const double* w1 = h.params.data() + h.w1_offset();
  const double* b1 = h.params.data() + h.b1_offset();
  const double* w2 = h.params.data() + h.w2_offset();
  double z = h.params[h.b2_offset()];
  for (std::size_t p = 0; p < static_cast<std::size_t>(h.patches); ++p) {
    const double* x = frame.data() + p * D;
    for (std::size_t j = 0; j < H; ++j) {
      const double* wr = w1 + j * D;
      double a = b1[j];
      for (std::size_t d = 0; d < D; ++d) a += wr[d] * x[d];
      pre[p * H + j] = a;
      act[p * H + j] = Gelu(a);
      z += w2[p * H + j] * act[p * H + j];
    }
  }
  return z;
}

}  // namespace

double MlpHead::Logit(std::span<const double> frame) const {
  if (static_cast<std::int64_t>(frame.size()) != patches * dim) {
    Fail(ErrorKind::kShape, "head input has " + std::to_string(frame.size()) +
                                " values, expected " + std::to_string(patches * dim));
  }
  std::vector<double> pre, act;
  return HeadForward(*this, frame, pre, act);
}

double HeadLoss(const MlpHead& h, const Dataset& ds, std::span<const std::int64_t> batch,
                std::vector<double>* grad) {
  if (ds.dim != h.patches * h.dim) Fail(ErrorKind::kShape, "dataset/head dimension mismatch");
  if (grad) grad->assign(h.params.size(), 0.0);
  const auto H = static_cast<std::size_t>(h.hidden);
  const auto D = static_cast<std::size_t>(h.dim);
  const double inv = 1.0 / static_cast<double>(batch.size());
  const double* w2 = h.params.data() + h.w2_offset();
  std::vector<double> pre, act;
  double loss = 0.0;
  for (std::int64_t i : batch) {
    const auto x = ds.row(i);
    const double y = ds.y[static_cast<std::size_t>(i)];
    const double z = HeadForward(h, x, pre, act);
    loss += BinaryCrossEntropyWithLogits(z, y) * inv;
    if (!grad) continue;
    double* g = grad->data();
    const double dz = (Sigmoid(z) - y) * inv;
    g[h.b2_offset()] += dz;
    for (std::size_t p = 0; p < static_cast<std::size_t>(h.patches); ++p) {
      const double* xp = x.data() + p * D;
      for (std::size_t j = 0; j < H; ++j) {
        const std::size_t u = p * H + j;
        g[h.w2_offset() + u] += dz * act[u];
        const double da = dz * w2[u] * GeluDerivative(pre[u]);
        g[h.b1_offset() + j] += da;
        double* gw = g + h.w1_offset() + j * D;
        for (std::size_t d = 0; d < D; ++d) gw[d] += da * xp[d];
      }
    }
  }
  return loss;
}

MlpHead TrainHead(const Dataset& ds, HeadStyle style, std::int64_t dim, std::int64_t patches,
                  const TrainConfig& cfg) {
  cfg.Validate();
  if (ds.dim != patches * dim) {
    Fail(ErrorKind::kShape, "dataset dimension " + std::to_string(ds.dim) +
                                " != patches*dim " + std::to_string(patches * dim));
  }
  RequireBothClasses(ds);
  MlpHead h = MlpHead::KaimingUniform(style, dim, patches, cfg.seed);
  RunAdamW(h.params, ds, cfg, /*use_schedule=*/true,
           [&](std::span<const std::int64_t> batch, std::vector<double>& grad) {
             HeadLoss(h, ds, batch, &grad);
           });
  return h;
}

MlpHead TrainHead(const HiddenStateExport& ex, const FrameLabels& labels,
                  const TrainConfig& cfg) {
  Dataset ds;
  AppendExport(ds, ex, labels);
  return TrainHead(ds, ex.style, ex.dim, ex.patches_per_frame, cfg);
}

ScoreSequence ScoreHead(const MlpHead& h, const HiddenStateExport& ex) {
  ex.Validate();
  if (ex.style != h.style || ex.dim != h.dim || ex.patches_per_frame != h.patches) {
    Fail(ErrorKind::kShape, "export layout " + ex.Layout() + " dim " + std::to_string(ex.dim) +
                                " does not match the head");
  }
  ScoreSequence out;
  out.geometry = ex.geometry;
  out.source = ex.model_id.empty() ? "mlp_head" : ex.model_id;
  out.scores.reserve(static_cast<std::size_t>(ex.n_frames()));
  std::vector<double> row(static_cast<std::size_t>(ex.frame_width()));
  for (std::int64_t n = 0; n < ex.n_frames(); ++n) {
    const auto f = ex.frame(n);
    std::copy(f.begin(), f.end(), row.begin());
    out.scores.push_back(Sigmoid(h.Logit(row)));
  }
  return out;
}

double MeanLoss(const LRModel& m, const Dataset& ds) {
  std::vector<std::int64_t> all(static_cast<std::size_t>(ds.size()));
  std::iota(all.begin(), all.end(), 0);
  return LrLoss(m, ds, all, nullptr);
}

double MeanLoss(const MlpHead& h, const Dataset& ds) {
  std::vector<std::int64_t> all(static_cast<std::size_t>(ds.size()));
  std::iota(all.begin(), all.end(), 0);
  return HeadLoss(h, ds, all, nullptr);
}

}  // namespace coughep
