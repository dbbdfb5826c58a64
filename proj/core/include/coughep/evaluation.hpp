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
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "coughep/annotations.hpp"
#include "coughep/scores.hpp"

namespace coughep {

/// How a prediction's score is spread over the fixed scoring grid.
///  kSkip:        over its owned interval [n*T, (n+1)*T); every interval of
///                the covered timeline is scored exactly once.
///  kFrameLength: over [n*T, n*T + frame_length); intervals may be scored by
///                more than one prediction (16 per 160ms patch frame).
enum class Tiling { kSkip, kFrameLength };

inline constexpr Millis kScoringIntervalMs = 10;

/// Scores and ground truth on a fixed grid of equal-length intervals.
struct IntervalScores {
  Millis interval_ms = kScoringIntervalMs;
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;

  std::int64_t size() const { return static_cast<std::int64_t>(scores.size()); }
  void Append(const IntervalScores& other);
};

/// Intervals contributed per prediction under the given tiling.
/// kInvalidConfig unless the relevant length is a multiple of interval_ms.
std::int64_t IntervalsPerPrediction(const FrameGeometry& g, Millis interval_ms, Tiling tiling);

/// `labels` is either ground truth on the interval grid itself (skip ==
/// interval_ms, the normal case: ComputeFrameLabels at 10ms) or per-frame
/// labels at the score geometry, which are replicated. Interval labels past
/// the end of `labels` count as negative.
IntervalScores TileToIntervals(const ScoreSequence& s, const FrameLabels& labels,
                               Millis interval_ms = kScoringIntervalMs,
                               Tiling tiling = Tiling::kSkip);

/// One operating point of a threshold sweep; positive means score >= threshold.
struct CurvePoint {
  double threshold = 0.0;
  double tpr = 0.0;        // coverage / recall
  double fpr = 0.0;
  double precision = 1.0;  // purity; 1 by convention when nothing is predicted
  std::int64_t tp = 0;
  std::int64_t fp = 0;
};

/// Points ordered by descending threshold: a +inf sentinel (nothing
/// positive), every distinct score, then a -inf sentinel (everything
/// positive).
struct Curve {
  std::vector<CurvePoint> points;
  std::int64_t positives = 0;
  std::int64_t negatives = 0;
};

/// kUndefinedMetric if either class is absent.
Curve RocCurve(const IntervalScores& iv);
/// kUndefinedMetric if there are no positives.
Curve PrCurve(const IntervalScores& iv);

/// Trapezoidal area under (fpr, tpr).
double Auc(const Curve& c);
/// Step integration sum (R_n - R_{n-1}) * P_n in descending-threshold order.
double AveragePrecision(const Curve& c);

enum class Criterion { kCoverage, kEqualError, kPurity };

/// "C", "EE", "P".
std::string CriterionName(Criterion c);
/// kInvalidConfig on an unknown name.
Criterion ParseCriterion(const std::string& name);

struct OperatingPoint {
  std::string name;
  double threshold = 0.0;
  double achieved_coverage = 0.0;
  double achieved_purity = 0.0;
  double achieved_fpr = 0.0;
  double target = 0.0;
};

/// kCoverage: largest threshold with coverage >= target.
/// kPurity:   smallest threshold with purity >= target.
/// kEqualError: threshold minimizing |FPR - (1 - TPR)|, ties to the lower
///             threshold; target is ignored.
/// Sentinel thresholds are never returned. UnattainableTargetError if no
/// point meets the target.
OperatingPoint PickThreshold(const Curve& c, Criterion criterion, double target);
OperatingPoint PickThreshold(const Curve& c, Criterion criterion);

inline constexpr double kDefaultCoverageTarget = 0.97;
inline constexpr double kDefaultPurityTarget = 0.90;

/// Confusion counts at a single threshold on the interval grid.
struct Confusion {
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  double coverage() const;
  double purity() const;
  double fpr() const;
};
Confusion ConfusionAt(const IntervalScores& iv, double threshold);

/// One recording's scores with its 10ms ground truth.
struct RecordingEval {
  ScoreSequence scores;
  FrameLabels interval_labels;
};

struct SweepRow {
  int width = 1;
  double auc = 0.0;
  double ap = 0.0;
  std::vector<CurvePoint> points;
};

/// For each width: at every distinct score threshold, binarize each
/// recording, median-filter the decisions, then count TP/FP on the interval
/// grid. The pooled points are integrated to AUC (sorted by FPR) and AP
/// (sorted by recall, ties to the higher threshold). Width 1 reproduces the
/// unfiltered Auc/AveragePrecision exactly.
std::vector<SweepRow> FilteredMetricSweep(std::span<const RecordingEval> recordings,
                                          std::span<const int> widths,
                                          Tiling tiling = Tiling::kSkip,
                                          Millis interval_ms = kScoringIntervalMs);

/// Pools every recording onto one interval grid.
IntervalScores PoolIntervals(std::span<const RecordingEval> recordings,
                             Millis interval_ms = kScoringIntervalMs,
                             Tiling tiling = Tiling::kSkip);

std::string CurveCsv(const Curve& c);
std::string CurveJson(const Curve& c);
std::string OperatingPointJson(const OperatingPoint& op);
std::string SweepCsv(std::span<const SweepRow> rows);

}  // namespace coughep
