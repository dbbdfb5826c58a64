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

#include <functional>
#include <span>
#include <vector>

#include "coughep/classifiers.hpp"
#include "coughep/evaluation.hpp"

namespace coughep {

/// Batch-size x learning-rate grid around a base config.
std::vector<TrainConfig> MakeGrid(const TrainConfig& base, std::span<const int> batch_sizes,
                                  std::span<const double> learning_rates);
/// Batch {4, 8, 16} x lr {1e-2, 1e-3}, no scheduler.
std::vector<TrainConfig> LogisticRegressionGrid(const TrainConfig& base);
/// Batch {8, 16, 32} x lr {1e-4, 1e-5}, warmup/linear-decay schedule.
std::vector<TrainConfig> HeadGrid(const TrainConfig& base);

struct DevPatches {
  PatchSequence patches;
  FrameLabels interval_labels;  // 10ms ground truth
};

struct GridCell {
  TrainConfig config;
  int layer = -1;
  double dev_ap = 0.0;
};

template <typename Model>
struct SearchResult {
  Model best;
  GridCell best_cell;
  std::vector<GridCell> cells;  // in grid order
};

/// Trains one LR per grid cell and keeps the best pooled dev AP. Cells may
/// train on up to `jobs` threads; results do not depend on `jobs`. Ties keep
/// the earlier cell.
SearchResult<LRModel> SearchLogisticRegression(const Dataset& train,
                                               std::span<const DevPatches> dev,
                                               std::span<const TrainConfig> grid,
                                               int n_mels = 128, int patch_width = 16,
                                               int stride = 10, int jobs = 1);

/// Candidate features from one backbone layer.
struct LayerCandidate {
  int layer = 0;
  std::vector<HiddenStateExport> train;
  std::vector<FrameLabels> train_labels;  // at the export geometry
  std::vector<HiddenStateExport> dev;
  std::vector<FrameLabels> dev_interval_labels;  // 10ms ground truth
};

/// Layer x grid search for the MLP head, selecting by dev AP.
SearchResult<MlpHead> SearchHead(std::span<const LayerCandidate> layers,
                                 std::span<const TrainConfig> grid, int jobs = 1);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads.
void ParallelFor(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace coughep
