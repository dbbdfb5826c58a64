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

#include "coughep/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "coughep/endpointing.hpp"
#include "coughep/error.hpp"

namespace coughep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CurvePoint MakePoint(double threshold, std::int64_t tp, std::int64_t fp, std::int64_t pos,
                     std::int64_t neg) {
  CurvePoint p;
  p.threshold = threshold;
  p.tp = tp;
  p.fp = fp;
  p.tpr = pos > 0 ? static_cast<double>(tp) / pos : 0.0;
  p.fpr = neg > 0 ? static_cast<double>(fp) / neg : 0.0;
  p.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0;
  return p;
}

Curve BuildCurve(const IntervalScores& iv) {
  if (iv.scores.size() != iv.labels.size()) {
    Fail(ErrorKind::kShape, "interval scores and labels differ in length");
  }
  Curve c;
  for (auto l : iv.labels) (l ? c.positives : c.negatives) += 1;
  std::vector<std::size_t> order(iv.scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return iv.scores[a] > iv.scores[b]; });
  c.points.reserve(order.size() + 2);
  c.points.push_back(MakePoint(kInf, 0, 0, c.positives, c.negatives));
  std::int64_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double s = iv.scores[order[i]];
    while (i < order.size() && iv.scores[order[i]] == s) {
      (iv.labels[order[i]] ? tp : fp) += 1;
      ++i;
    }
    c.points.push_back(MakePoint(s, tp, fp, c.positives, c.negatives));
  }
  c.points.push_back(MakePoint(-kInf, c.positives, c.negatives, c.positives, c.negatives));
  return c;
}

/// Trapezoid in count space, one division at the end.
double IntegrateRoc(std::span<const CurvePoint> pts, std::int64_t pos, std::int64_t neg) {
  double twice_area = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    twice_area += static_cast<double>(pts[k].fp - pts[k - 1].fp) *
                  static_cast<double>(pts[k].tp + pts[k - 1].tp);
  }
  return twice_area / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

double IntegratePr(std::span<const CurvePoint> pts, std::int64_t pos) {
  double ap = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const std::int64_t d = pts[k].tp - pts[k - 1].tp;
    if (d != 0) ap += static_cast<double>(d) / static_cast<double>(pos) * pts[k].precision;
  }
  return ap;
}

}  // namespace

void IntervalScores::Append(const IntervalScores& other) {
  if (!scores.empty() && other.interval_ms != interval_ms) {
    Fail(ErrorKind::kInvalidConfig, "cannot pool intervals of different lengths");
  }
  interval_ms = other.interval_ms;
  scores.insert(scores.end(), other.scores.begin(), other.scores.end());
  labels.insert(labels.end(), other.labels.begin(), other.labels.end());
}

std::int64_t IntervalsPerPrediction(const FrameGeometry& g, Millis interval_ms, Tiling tiling) {
  if (interval_ms <= 0) Fail(ErrorKind::kInvalidConfig, "interval_ms must be > 0");
  g.Validate();
  if (g.frame_skip_ms % interval_ms != 0) {
    Fail(ErrorKind::kInvalidConfig, "frame skip " + std::to_string(g.frame_skip_ms) +
                                        "ms is not a multiple of the " +
                                        std::to_string(interval_ms) + "ms scoring interval");
  }
  if (tiling == Tiling::kSkip) return g.frame_skip_ms / interval_ms;
  if (g.frame_length_ms <= 0 || g.frame_length_ms % interval_ms != 0) {
    Fail(ErrorKind::kInvalidConfig, "frame length " + std::to_string(g.frame_length_ms) +
                                        "ms is not a multiple of the " +
                                        std::to_string(interval_ms) + "ms scoring interval");
  }
  return g.frame_length_ms / interval_ms;
}

IntervalScores TileToIntervals(const ScoreSequence& s, const FrameLabels& labels,
                               Millis interval_ms, Tiling tiling) {
  const std::int64_t per = IntervalsPerPrediction(s.geometry, interval_ms, tiling);
  const std::int64_t stride = s.geometry.frame_skip_ms / interval_ms;
  const Millis label_skip = labels.geometry.frame_skip_ms;
  const bool on_grid = label_skip == interval_ms;
  if (!on_grid && label_skip != s.geometry.frame_skip_ms) {
    Fail(ErrorKind::kInvalidConfig,
         "labels must be on the scoring grid or at the score geometry");
  }
  IntervalScores iv;
  iv.interval_ms = interval_ms;
  iv.scores.reserve(static_cast<std::size_t>(s.size() * per));
  iv.labels.reserve(iv.scores.capacity());
  const auto n_labels = static_cast<std::int64_t>(labels.labels.size());
  for (std::int64_t n = 0; n < s.size(); ++n) {
    for (std::int64_t q = 0; q < per; ++q) {
      std::uint8_t y = 0;
      if (on_grid) {
        const std::int64_t idx = n * stride + q;
        y = idx < n_labels ? labels.labels[static_cast<std::size_t>(idx)] : 0;
      } else {
        y = n < n_labels ? labels.labels[static_cast<std::size_t>(n)] : 0;
      }
      iv.scores.push_back(s.scores[static_cast<std::size_t>(n)]);
      iv.labels.push_back(y);
    }
  }
  return iv;
}

Curve RocCurve(const IntervalScores& iv) {
  Curve c = BuildCurve(iv);
  if (c.positives == 0 || c.negatives == 0) {
    Fail(ErrorKind::kUndefinedMetric, "ROC needs both positive and negative intervals");
  }
  return c;
}

Curve PrCurve(const IntervalScores& iv) {
  Curve c = BuildCurve(iv);
  if (c.positives == 0) Fail(ErrorKind::kUndefinedMetric, "PR curve needs positive intervals");
  return c;
}

double Auc(const Curve& c) {
  if (c.positives == 0 || c.negatives == 0) {
    Fail(ErrorKind::kUndefinedMetric, "AUC needs both classes");
  }
  return IntegrateRoc(c.points, c.positives, c.negatives);
}

double AveragePrecision(const Curve& c) {
  if (c.positives == 0) Fail(ErrorKind::kUndefinedMetric, "AP needs positives");
  return IntegratePr(c.points, c.positives);
}

std::string CriterionName(Criterion c) {
  switch (c) {
    case Criterion::kCoverage: return "C";
    case Criterion::kEqualError: return "EE";
    case Criterion::kPurity: return "P";
  }
  return "?";
}

Criterion ParseCriterion(const std::string& name) {
  if (name == "C") return Criterion::kCoverage;
  if (name == "EE") return Criterion::kEqualError;
  if (name == "P") return Criterion::kPurity;
  Fail(ErrorKind::kInvalidConfig, "unknown operating point '" + name + "' (want C, EE or P)");
}

OperatingPoint PickThreshold(const Curve& c, Criterion criterion) {
  switch (criterion) {
    case Criterion::kCoverage: return PickThreshold(c, criterion, kDefaultCoverageTarget);
    case Criterion::kPurity: return PickThreshold(c, criterion, kDefaultPurityTarget);
    case Criterion::kEqualError: return PickThreshold(c, criterion, 0.0);
  }
  return PickThreshold(c, criterion, 0.0);
}

OperatingPoint PickThreshold(const Curve& c, Criterion criterion, double target) {
  const CurvePoint* chosen = nullptr;
  double best_value = -kInf;
  double best_threshold = 0.0;
  for (const auto& p : c.points) {
    if (!std::isfinite(p.threshold)) continue;
    switch (criterion) {
      case Criterion::kCoverage:
        if (!chosen && p.tpr >= target) chosen = &p;
        if (p.tpr > best_value) {
          best_value = p.tpr;
          best_threshold = p.threshold;
        }
        break;
      case Criterion::kPurity:
        if (p.tp + p.fp > 0 && p.precision >= target) chosen = &p;
        if (p.tp + p.fp > 0 && p.precision > best_value) {
          best_value = p.precision;
          best_threshold = p.threshold;
        }
        break;
      case Criterion::kEqualError: {
        const double gap = std::abs(p.fpr - (1.0 - p.tpr));
        // <= walks ties toward the lower threshold.
        if (!chosen || gap <= std::abs(chosen->fpr - (1.0 - chosen->tpr))) chosen = &p;
        break;
      }
    }
  }
  if (!chosen) {
    if (criterion == Criterion::kEqualError) {
      Fail(ErrorKind::kUndefinedMetric, "curve has no finite thresholds");
    }
    const std::string what = criterion == Criterion::kCoverage ? "coverage" : "purity";
    throw UnattainableTargetError(what + " target " + std::to_string(target) +
                                      " unattainable; best achievable " +
                                      std::to_string(best_value),
                                  target, best_value, best_threshold);
  }
  OperatingPoint op;
  op.name = CriterionName(criterion);
  op.threshold = chosen->threshold;
  op.achieved_coverage = chosen->tpr;
  op.achieved_purity = chosen->precision;
  op.achieved_fpr = chosen->fpr;
  op.target = target;
  return op;
}

double Confusion::coverage() const {
  return (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
}
double Confusion::purity() const {
  return (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0;
}
double Confusion::fpr() const {
  return (fp + tn) > 0 ? static_cast<double>(fp) / static_cast<double>(fp + tn) : 0.0;
}

Confusion ConfusionAt(const IntervalScores& iv, double threshold) {
  Confusion c;
  for (std::size_t i = 0; i < iv.scores.size(); ++i) {
    const bool pred = iv.scores[i] >= threshold;
    if (iv.labels[i]) {
      (pred ? c.tp : c.fn) += 1;
    } else {
      (pred ? c.fp : c.tn) += 1;
    }
  }
  return c;
}

IntervalScores PoolIntervals(std::span<const RecordingEval> recordings, Millis interval_ms,
                             Tiling tiling) {
  IntervalScores all;
  all.interval_ms = interval_ms;
  for (const auto& r : recordings) {
    all.Append(TileToIntervals(r.scores, r.interval_labels, interval_ms, tiling));
  }
  return all;
}

std::vector<SweepRow> FilteredMetricSweep(std::span<const RecordingEval> recordings,
                                          std::span<const int> widths, Tiling tiling,
                                          Millis interval_ms) {
  // Per-frame positive/negative interval counts: a frame's decision applies
  // to all of its intervals at once.
  struct FrameCounts {
    std::vector<std::int64_t> pos, neg;
  };
  std::vector<FrameCounts> counts;
  counts.reserve(recordings.size());
  std::int64_t total_pos = 0, total_neg = 0;
  std::vector<double> thresholds;
  for (const auto& r : recordings) {
    const IntervalScores iv = TileToIntervals(r.scores, r.interval_labels, interval_ms, tiling);
    const std::int64_t per = IntervalsPerPrediction(r.scores.geometry, interval_ms, tiling);
    FrameCounts fc;
    fc.pos.assign(r.scores.scores.size(), 0);
    fc.neg.assign(r.scores.scores.size(), 0);
    for (std::int64_t i = 0; i < iv.size(); ++i) {
      const auto n = static_cast<std::size_t>(i / per);
      (iv.labels[static_cast<std::size_t>(i)] ? fc.pos[n] : fc.neg[n]) += 1;
    }
    total_pos += std::accumulate(fc.pos.begin(), fc.pos.end(), std::int64_t{0});
    total_neg += std::accumulate(fc.neg.begin(), fc.neg.end(), std::int64_t{0});
    counts.push_back(std::move(fc));
    thresholds.insert(thresholds.end(), r.scores.scores.begin(), r.scores.scores.end());
  }
  if (total_pos == 0 || total_neg == 0) {
    Fail(ErrorKind::kUndefinedMetric, "filter sweep needs both positive and negative intervals");
  }
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  thresholds.insert(thresholds.begin(), kInf);

  std::vector<SweepRow> rows;
  for (int width : widths) {
    SweepRow row;
    row.width = width;
    row.points.reserve(thresholds.size());
    for (double th : thresholds) {
      std::int64_t tp = 0, fp = 0;
      for (std::size_t r = 0; r < recordings.size(); ++r) {
        const BinarySequence bits =
            MedianFilter(ThresholdScores(recordings[r].scores, th), width);
        for (std::size_t n = 0; n < bits.bits.size(); ++n) {
          if (bits.bits[n]) {
            tp += counts[r].pos[n];
            fp += counts[r].neg[n];
          }
        }
      }
      row.points.push_back(MakePoint(th, tp, fp, total_pos, total_neg));
    }

    std::vector<CurvePoint> roc = row.points;
    std::stable_sort(roc.begin(), roc.end(), [](const CurvePoint& a, const CurvePoint& b) {
      return a.fp != b.fp ? a.fp < b.fp : a.tp < b.tp;
    });
    row.auc = IntegrateRoc(roc, total_pos, total_neg);
    // Close the curve at (1, 1) in case no threshold turned every frame on.
    if (roc.back().fp != total_neg || roc.back().tp != total_pos) {
      const CurvePoint end = MakePoint(-kInf, total_pos, total_neg, total_pos, total_neg);
      const std::array<CurvePoint, 2> tail = {roc.back(), end};
      row.auc += IntegrateRoc(tail, total_pos, total_neg);
    }

    std::vector<CurvePoint> pr = row.points;
    std::stable_sort(pr.begin(), pr.end(), [](const CurvePoint& a, const CurvePoint& b) {
      return a.tp != b.tp ? a.tp < b.tp : a.threshold > b.threshold;
    });
    row.ap = IntegratePr(pr, total_pos);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string CurveCsv(const Curve& c) {
  std::ostringstream os;
  os.precision(17);
  os << "threshold,tpr,fpr,precision\n";
  for (const auto& p : c.points) {
    os << p.threshold << ',' << p.tpr << ',' << p.fpr << ',' << p.precision << '\n';
  }
  return os.str();
}

std::string CurveJson(const Curve& c) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : c.points) {
    // JSON has no infinities; sentinels are written as strings.
    nlohmann::json th = std::isfinite(p.threshold)
                            ? nlohmann::json(p.threshold)
                            : nlohmann::json(p.threshold > 0 ? "+inf" : "-inf");
    pts.push_back({{"threshold", th},
                   {"tpr", p.tpr},
                   {"fpr", p.fpr},
                   {"precision", p.precision}});
  }
  return nlohmann::json{{"positives", c.positives}, {"negatives", c.negatives}, {"points", pts}}
      .dump(2);
}

std::string OperatingPointJson(const OperatingPoint& op) {
  return nlohmann::json{{"name", op.name},
                        {"threshold", op.threshold},
                        {"coverage", op.achieved_coverage},
                        {"purity", op.achieved_purity},
                        {"fpr", op.achieved_fpr},
                        {"target", op.target}}
      .dump(2);
}

std::string SweepCsv(std::span<const SweepRow> rows) {
  std::ostringstream os;
  os.precision(10);
  os << "width,auc,ap\n";
  for (const auto& r : rows) os << r.width << ',' << r.auc << ',' << r.ap << '\n';
  return os.str();
}

}  // namespace coughep
