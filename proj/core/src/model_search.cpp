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

#include "coughep/model_search.hpp"

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "coughep/error.hpp"

namespace coughep {

void ParallelFor(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mu);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<TrainConfig> MakeGrid(const TrainConfig& base, std::span<const int> batch_sizes,
                                  std::span<const double> learning_rates) {
  std::vector<TrainConfig> grid;
  for (int b : batch_sizes) {
    for (double lr : learning_rates) {
      TrainConfig c = base;
      c.batch_size = b;
      c.max_learning_rate = lr;
      grid.push_back(c);
    }
  }
  return grid;
}

std::vector<TrainConfig> LogisticRegressionGrid(const TrainConfig& base) {
  static constexpr int kBatch[] = {4, 8, 16};
  static constexpr double kLr[] = {1e-2, 1e-3};
  TrainConfig b = base;
  b.scheduler = Scheduler::kNone;
  return MakeGrid(b, kBatch, kLr);
}

std::vector<TrainConfig> HeadGrid(const TrainConfig& base) {
  static constexpr int kBatch[] = {8, 16, 32};
  static constexpr double kLr[] = {1e-4, 1e-5};
  TrainConfig b = base;
  b.scheduler = Scheduler::kWarmupLinearDecay;
  return MakeGrid(b, kBatch, kLr);
}

namespace {

template <typename Model>
SearchResult<Model> PickBest(std::vector<GridCell> cells, std::vector<Model> models) {
  if (cells.empty()) Fail(ErrorKind::kInvalidConfig, "empty hyperparameter grid");
  std::size_t best = 0;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    if (cells[i].dev_ap > cells[best].dev_ap) best = i;
  }
  SearchResult<Model> r;
  r.best = std::move(models[best]);
  r.best_cell = cells[best];
  r.cells = std::move(cells);
  return r;
}

}  // namespace

SearchResult<LRModel> SearchLogisticRegression(const Dataset& train,
                                               std::span<const DevPatches> dev,
                                               std::span<const TrainConfig> grid, int n_mels,
                                               int patch_width, int stride, int jobs) {
  std::vector<GridCell> cells(grid.size());
  std::vector<LRModel> models(grid.size());
  ParallelFor(grid.size(), jobs, [&](std::size_t i) {
    models[i] = TrainLR(train, grid[i], n_mels, patch_width, stride);
    IntervalScores pooled;
    for (const auto& d : dev) {
      pooled.Append(TileToIntervals(ScoreLR(models[i], d.patches), d.interval_labels));
    }
    cells[i] = {grid[i], -1, AveragePrecision(PrCurve(pooled))};
  });
  return PickBest(std::move(cells), std::move(models));
}

SearchResult<MlpHead> SearchHead(std::span<const LayerCandidate> layers,
                                 std::span<const TrainConfig> grid, int jobs) {
  std::vector<Dataset> train_sets(layers.size());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& cand = layers[l];
    if (cand.train.size() != cand.train_labels.size() ||
        cand.dev.size() != cand.dev_interval_labels.size()) {
      Fail(ErrorKind::kShape, "layer candidate has mismatched export/label lists");
    }
    for (std::size_t r = 0; r < cand.train.size(); ++r) {
      AppendExport(train_sets[l], cand.train[r], cand.train_labels[r]);
    }
  }
  const std::size_t n = layers.size() * grid.size();
  std::vector<GridCell> cells(n);
  std::vector<MlpHead> models(n);
  ParallelFor(n, jobs, [&](std::size_t i) {
    const std::size_t l = i / grid.size();
    const auto& cand = layers[l];
    if (cand.train.empty()) Fail(ErrorKind::kEmptyInput, "layer candidate has no training data");
    const auto& proto = cand.train.front();
    models[i] = TrainHead(train_sets[l], proto.style, proto.dim, proto.patches_per_frame,
                          grid[i % grid.size()]);
    IntervalScores pooled;
    for (std::size_t r = 0; r < cand.dev.size(); ++r) {
      pooled.Append(
          TileToIntervals(ScoreHead(models[i], cand.dev[r]), cand.dev_interval_labels[r]));
    }
    cells[i] = {grid[i % grid.size()], cand.layer, AveragePrecision(PrCurve(pooled))};
  });
  return PickBest(std::move(cells), std::move(models));
}

}  // namespace coughep
