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

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coughep/annotations.hpp"
#include "coughep/classifiers.hpp"
#include "coughep/containers.hpp"
#include "coughep/endpointing.hpp"
#include "coughep/evaluation.hpp"
#include "coughep/export.hpp"
#include "coughep/features.hpp"
#include "coughep/model_search.hpp"
#include "coughep/synth.hpp"

namespace coughep::cli {

namespace fs = std::filesystem;

struct PipelineConfig {
  fs::path audio_dir;
  fs::path annotation_dir;
  fs::path output_dir;
  MelConfig mel;
  bool normalize = true;
  int patch_width = 16;
  int patch_stride = 10;
  /// The LR baseline trains at a fixed rate; the heads use the schedule.
  /// LR weight decay defaults to 50: at 0.01 the separable training frames
  /// drive the logits to saturation and boundary frames lose their graded
  /// scores, which the 10ms metrics depend on.
  TrainConfig lr_train;
  TrainConfig head_train;
  Tiling tiling = Tiling::kSkip;
  double coverage_target = kDefaultCoverageTarget;
  double purity_target = kDefaultPurityTarget;
  std::uint64_t seed = 0;
  int jobs = 1;
  SynthConfig synth;

  PipelineConfig();
  /// kInvalidConfig on bad targets or nested configs.
  void Validate() const;
  /// Sets the top-level seed and every seed derived from it.
  void SetSeed(std::uint64_t s);
};

/// Reads a JSON config; unknown keys are rejected so typos do not pass
/// silently. Missing keys keep their defaults.
PipelineConfig ParsePipelineConfig(const nlohmann::json& j);
PipelineConfig LoadPipelineConfig(const fs::path& path);
nlohmann::json PipelineConfigJson(const PipelineConfig& cfg);

Tiling ParseTiling(const std::string& name);
std::string TilingName(Tiling t);

/// Files in `dir` with the extension, keyed by stem, in sorted order.
/// kIo if the directory does not exist.
std::map<std::string, fs::path> ListById(const fs::path& dir, const std::string& extension);

/// Log-mel (optionally per-bin normalized) and its patch frames.
PatchSequence AudioPatches(const Waveform& w, const PipelineConfig& cfg);

struct LabeledRecording {
  std::string id;
  PatchSequence patches;
  AnnotationSet annotations;
};

/// Pairs audio/<id>.wav with annotations/<id>.tsv. Recordings without an
/// annotation file are an error.
std::vector<LabeledRecording> LoadLabeledRecordings(const fs::path& audio_dir,
                                                    const fs::path& annotation_dir,
                                                    const PipelineConfig& cfg);

/// 10ms ground truth long enough for every interval a score sequence touches.
FrameLabels IntervalLabelsFor(const AnnotationSet& set, const FrameGeometry& scores,
                              Tiling tiling);

Dataset PatchDataset(std::span<const LabeledRecording> recs, const PipelineConfig& cfg);
std::vector<DevPatches> DevSet(std::span<const LabeledRecording> recs);

struct LrTrainResult {
  LRModel model;
  std::vector<GridCell> cells;  // empty unless a grid search ran
};

/// Trains the LR baseline. With a non-empty dev set and `grid`, searches the
/// LR grid around cfg.lr_train and keeps the best dev AP.
LrTrainResult RunTrainLr(std::span<const LabeledRecording> train,
                         std::span<const LabeledRecording> dev, const PipelineConfig& cfg,
                         bool grid);

struct HiddenStateRecording {
  std::string id;
  HiddenStateExport states;
  AnnotationSet annotations;
};

std::vector<HiddenStateRecording> LoadHiddenStateRecordings(const fs::path& hsx_dir,
                                                            const fs::path& annotation_dir);

MlpHead RunTrainHead(std::span<const HiddenStateRecording> train,
                     std::span<const HiddenStateRecording> dev, const PipelineConfig& cfg,
                     bool grid);

struct ScoredRecording {
  std::string id;
  ScoreSequence scores;
  std::string split;
};

/// Scores every recording under audio_dir (LR) and writes <out>/<id>.csq.
std::vector<ScoredRecording> ScoreAudioDir(const LRModel& m, const fs::path& audio_dir,
                                           const fs::path& out_dir, const std::string& split,
                                           const PipelineConfig& cfg);
std::vector<ScoredRecording> ScoreHiddenStateDir(const MlpHead& h, const fs::path& hsx_dir,
                                                 const fs::path& out_dir,
                                                 const std::string& split,
                                                 const PipelineConfig& cfg);
std::vector<ScoredRecording> LoadScoreDir(const fs::path& dir);

/// Matches score files with annotations/<id>.tsv.
std::vector<RecordingEval> BuildEvals(std::span<const ScoredRecording> scored,
                                      const fs::path& annotation_dir, Tiling tiling);

struct EvalReport {
  double auc = 0.0;
  double ap = 0.0;
  std::optional<double> threshold;
  Confusion confusion;
  std::int64_t intervals = 0;
  int filter_width = 1;
};

/// AUC/AP over the pooled 10ms grid. With a threshold, also the confusion
/// counts after thresholding and median filtering each recording.
EvalReport Evaluate(std::span<const RecordingEval> recs, Tiling tiling,
                    std::optional<double> threshold, int filter_width = 1);
nlohmann::json EvalReportJson(const EvalReport& r);

/// Operating points C, EE and P on dev data. kValidation if `split` or any
/// score file is tagged "test". A target no threshold reaches is left out
/// and described in `unattainable`.
std::vector<OperatingPoint> PickOperatingPoints(std::span<const ScoredRecording> scored,
                                                std::span<const RecordingEval> recs,
                                                const std::string& split,
                                                const PipelineConfig& cfg,
                                                std::vector<std::string>* unattainable = nullptr);
void WriteOperatingPoints(const fs::path& path, std::span<const OperatingPoint> ops);
std::vector<OperatingPoint> ReadOperatingPoints(const fs::path& path);
/// kValidation if `name` is not among `ops`.
double ThresholdByName(std::span<const OperatingPoint> ops, const std::string& name);

/// Detects segments per recording and writes <out>/<id>.tsv.
std::map<std::string, std::vector<Segment>> RunSegment(std::span<const ScoredRecording> scored,
                                                       double threshold, int filter_width,
                                                       const fs::path& out_dir);

/// Fraction of annotated 10ms cough intervals covered by the segments.
double SegmentCoverage(std::span<const Segment> segs, const AnnotationSet& truth);

/// Cuts clips for every segment file whose audio exists and writes the
/// merged manifest with statistics.
ClipManifest RunExport(const fs::path& audio_dir, const fs::path& segment_dir,
                       const fs::path& out_dir, const std::string& threshold_name);

std::vector<SweepRow> RunSweep(std::span<const RecordingEval> recs, std::span<const int> widths,
                               Tiling tiling);

/// Welch profiles of annotated cough spans and of the gaps between them.
std::pair<PowerProfile, PowerProfile> RunProfile(const fs::path& audio_dir,
                                                 const fs::path& annotation_dir);

std::vector<AnnotationSet> LoadAnnotationDir(const fs::path& dir);

}  // namespace coughep::cli
