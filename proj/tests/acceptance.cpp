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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "coughep/annotations.hpp"
#include "coughep/classifiers.hpp"
#include "coughep/endpointing.hpp"
#include "coughep/evaluation.hpp"
#include "coughep/export.hpp"
#include "coughep/features.hpp"
#include "coughep/synth.hpp"
#include "oracles.hpp"
#include "pipeline.hpp"

using namespace coughep;

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void Run(const std::string& name, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string Fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

/// Gaussian rows with a label-dependent mean shift.
Dataset RandomDataset(std::int64_t n, std::int64_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Dataset ds;
  for (std::int64_t i = 0; i < n; ++i) {
    const std::uint8_t y = rng() % 2;
    std::vector<double> x(static_cast<std::size_t>(dim));
    for (auto& v : x) v = nd(rng) + (y ? 0.5 : -0.5);
    ds.Append(x, y);
  }
  return ds;
}

/// ||analytic - numeric|| / (||analytic|| + ||numeric||) over all parameters.
template <class Model, class Loss>
double GradientRelError(const Model& m, Loss loss) {
  std::vector<double> g;
  loss(m, &g);
  double diff = 0.0, norm = 0.0;
  for (std::size_t k = 0; k < m.params.size(); ++k) {
    Model a = m, b = m;
    a.params[k] += 1e-6;
    b.params[k] -= 1e-6;
    const double fd = (loss(a, nullptr) - loss(b, nullptr)) / 2e-6;
    diff += (g[k] - fd) * (g[k] - fd);
    norm += g[k] * g[k] + fd * fd;
  }
  return std::sqrt(diff) / std::max(std::sqrt(norm), 1e-300);
}

Outcome MetricOracles() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  int instances = 0;
  for (; instances < 1000; ++instances) {
    const std::size_t n = 2 + rng() % 199;
    IntervalScores iv;
    const int levels = 2 + static_cast<int>(rng() % 50);
    for (std::size_t i = 0; i < n; ++i) {
      iv.scores.push_back(static_cast<double>(rng() % levels) / levels);
      iv.labels.push_back(rng() % 4 == 0);
    }
    iv.labels[0] = 1;
    iv.labels[1] = 0;
    const double auc = Auc(RocCurve(iv));
    const double ap = AveragePrecision(PrCurve(iv));
    worst = std::max({worst, std::abs(auc - oracle::BruteAuc(iv.scores, iv.labels)),
                      std::abs(ap - oracle::BruteAp(iv.scores, iv.labels))});
  }
  const double secs = Seconds(t0);
  return {worst <= 1e-12 && secs < 10.0,
          Fmt("%.0f instances, max |diff| %.3g, %.2fs", instances, worst, secs)};
}

Outcome WorkedValues() {
  IntervalScores iv;
  iv.scores = {0.9, 0.8, 0.3};
  iv.labels = {1, 0, 1};
  const double auc = Auc(RocCurve(iv));
  const double ap = AveragePrecision(PrCurve(iv));
  const bool ok = std::abs(auc - 0.5) <= 1e-12 && std::abs(ap - 5.0 / 6.0) <= 1e-12;
  return {ok, Fmt("AUC %.15f, AP %.15f", auc, ap)};
}

Outcome Geometry() {
  const std::int64_t patches = PatchCount(128, 16, 10);
  Waveform w;
  w.samples.assign(16000, 0.0f);
  const std::int64_t frames = ComputeMelSpectrogram(w, MelConfig{}).n_frames();
  const std::int64_t per = IntervalsPerPrediction({25, 20, 10}, kScoringIntervalMs, Tiling::kSkip);
  return {patches == 12 && frames == 98 && per == 2,
          Fmt("%.0f frequency patches, %.0f mel frames in 1s, %.0f intervals per XLS-R prediction",
              static_cast<double>(patches), static_cast<double>(frames), static_cast<double>(per))};
}

Outcome LrParameters() {
  const std::int64_t n = LRModel::Zeros().ParameterCount();
  return {n == 2049, Fmt("%.0f parameters", static_cast<double>(n))};
}

Outcome HeadShapes() {
  const MlpHead flat = MlpHead::Zeros(HeadStyle::kFlat, 1024);
  const MlpHead ast = MlpHead::Zeros(HeadStyle::kFreqPatches, 768, 12);
  // Score a real export of each shape to make sure the forward pass agrees.
  HiddenStateExport ex;
  ex.dim = 768;
  ex.style = HeadStyle::kFreqPatches;
  ex.patches_per_frame = 12;
  ex.geometry = {160, 100, 2};
  ex.values.assign(2 * 12 * 768, 0.1f);
  const bool scored = ScoreHead(ast, ex).size() == 2;
  const bool ok = flat.layer1_in() == 1024 && flat.layer1_out() == 512 &&
                  ast.layer2_in() == 4608 && scored;
  return {ok, Fmt("flat 1024 -> %.0f, 12 x 768 -> %.0f concatenated",
                  static_cast<double>(flat.layer1_out()), static_cast<double>(ast.layer2_in()))};
}

Outcome GradientChecks() {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> nd(0.0, 0.3);
  double worst = 0.0;
  for (int b = 0; b < 20; ++b) {
    std::vector<std::int64_t> batch;
    for (int i = 0; i < 8; ++i) batch.push_back(static_cast<std::int64_t>(rng() % 40));

    const Dataset lr_ds = RandomDataset(40, 12, rng);
    LRModel lr = LRModel::Zeros(3, 4, 1);
    for (auto& p : lr.params) p = nd(rng);
    worst = std::max(worst, GradientRelError(lr, [&](const LRModel& m, std::vector<double>* g) {
                       return LrLoss(m, lr_ds, batch, g);
                     }));

    const Dataset flat_ds = RandomDataset(40, 6, rng);
    const MlpHead flat = MlpHead::KaimingUniform(HeadStyle::kFlat, 6, 1, rng());
    worst = std::max(worst, GradientRelError(flat, [&](const MlpHead& m, std::vector<double>* g) {
                       return HeadLoss(m, flat_ds, batch, g);
                     }));

    const Dataset patch_ds = RandomDataset(40, 5 * 3, rng);
    const MlpHead patch = MlpHead::KaimingUniform(HeadStyle::kFreqPatches, 5, 3, rng());
    worst = std::max(worst, GradientRelError(patch, [&](const MlpHead& m, std::vector<double>* g) {
                       return HeadLoss(m, patch_ds, batch, g);
                     }));
  }
  return {worst < 1e-4, Fmt("20 batches x {LR, flat head, patch head}, max relative error %.3g", worst)};
}

Outcome RoundTrip() {
  std::mt19937_64 rng(7);
  int exact = 0;
  for (int corpus = 0; corpus < 100; ++corpus) {
    AnnotationSet set;
    Millis t = 10 * static_cast<Millis>(rng() % 30);
    const int n = 1 + static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) {
      const Millis len = 10 * static_cast<Millis>(1 + rng() % 100);
      set.annotations.push_back({t, t + len, EventLabel::kCough});
      t += len + 10 * static_cast<Millis>(1 + rng() % 80);
    }
    set.recording_duration_ms = t;
    const FrameLabels fl = ComputeFrameLabels(set, {10, 10, t / 10});
    const auto segs = ExtractSegments({fl.labels, fl.geometry});
    bool same = segs.size() == set.annotations.size();
    for (std::size_t i = 0; same && i < segs.size(); ++i) {
      same = segs[i].start_ms == set.annotations[i].start_ms &&
             segs[i].end_ms == set.annotations[i].end_ms;
    }
    exact += same;
  }
  return {exact == 100, Fmt("%.0f/100 corpora reproduced exactly", exact)};
}

Outcome EndToEnd() {
  const auto t0 = Clock::now();
  oracle::TempDir dir("e2e");
  cli::PipelineConfig cfg;
  cfg.SetSeed(1);

  SynthConfig train_cfg = cfg.synth;
  train_cfg.n_recordings = 20;
  train_cfg.snr_db = 10.0;
  train_cfg.id_prefix = "train";
  SynthConfig dev_cfg = train_cfg;
  dev_cfg.n_recordings = 5;
  dev_cfg.id_prefix = "dev";
  dev_cfg.seed = train_cfg.seed + 1;
  WriteSynthCorpus(dir / "train", GenerateSynthCorpus(train_cfg));
  WriteSynthCorpus(dir / "dev", GenerateSynthCorpus(dev_cfg));

  const auto train = cli::LoadLabeledRecordings(dir / "train/audio", dir / "train/annotations", cfg);
  const auto dev = cli::LoadLabeledRecordings(dir / "dev/audio", dir / "dev/annotations", cfg);
  cfg.lr_train.epochs = 16;
  const auto trained = cli::RunTrainLr(train, dev, cfg, false);

  const auto scored = cli::ScoreAudioDir(trained.model, dir / "dev/audio", dir / "scores", "dev", cfg);
  const auto recs = cli::BuildEvals(scored, dir / "dev/annotations", cfg.tiling);
  const cli::EvalReport report = cli::Evaluate(recs, cfg.tiling, std::nullopt);
  const auto ops = cli::PickOperatingPoints(scored, recs, "dev", cfg);
  const double c = cli::ThresholdByName(ops, "C");
  // Recount coverage at the picked threshold rather than trusting the curve.
  const double coverage = ConfusionAt(PoolIntervals(recs, kScoringIntervalMs, cfg.tiling), c).coverage();
  const double secs = Seconds(t0);
  return {report.ap >= 0.95 && coverage >= 0.97 && secs < 300.0,
          Fmt("dev AP %.4f, coverage at C %.4f, %.1fs", report.ap, coverage, secs)};
}

Outcome MedianTrend() {
  // Two-frame events at 100ms frames, noisy but informative scores.
  std::mt19937_64 rng(55);
  std::normal_distribution<double> nd(0.0, 0.18);
  std::vector<RecordingEval> recs;
  for (int r = 0; r < 6; ++r) {
    const std::int64_t n = 300;
    std::vector<std::uint8_t> frame_y(static_cast<std::size_t>(n), 0);
    for (std::int64_t i = 5; i + 2 < n; i += 8 + static_cast<std::int64_t>(rng() % 10)) {
      frame_y[static_cast<std::size_t>(i)] = frame_y[static_cast<std::size_t>(i + 1)] = 1;
    }
    ScoreSequence s{{}, {160, 100, n}, "fixture"};
    FrameLabels y{{}, {10, 10, n * 10}};
    for (std::int64_t i = 0; i < n; ++i) {
      const std::uint8_t v = frame_y[static_cast<std::size_t>(i)];
      s.scores.push_back(std::clamp((v ? 0.65 : 0.35) + nd(rng), 0.0, 1.0));
      for (int q = 0; q < 10; ++q) y.labels.push_back(v);
    }
    recs.push_back({s, y});
  }
  const std::vector<int> widths = {1, 3, 5, 7, 9};
  const auto rows = FilteredMetricSweep(recs, widths);
  std::ostringstream os;
  os.precision(4);
  os << "AP by width:";
  for (const auto& r : rows) os << ' ' << r.width << '=' << r.ap;
  // Events last 2 frames; widths from 5 up exceed them.
  bool ok = rows[4].ap < rows[0].ap;
  for (std::size_t i = 3; i < rows.size(); ++i) ok = ok && rows[i].ap <= rows[i - 1].ap + 1e-12;
  ok = ok && rows[2].ap <= rows[1].ap + 1e-12;
  return {ok, os.str()};
}

Outcome Schedule() {
  TrainConfig cfg;
  cfg.max_learning_rate = 1e-4;
  const std::int64_t total = 1000;
  std::vector<double> lr;
  for (std::int64_t s = 0; s <= total; ++s) lr.push_back(LearningRateAt(s, total, cfg));
  const auto peak = std::max_element(lr.begin(), lr.end()) - lr.begin();
  double worst_kink = 0.0;
  for (std::int64_t s = 1; s < total; ++s) {
    if (s == 100) continue;
    worst_kink = std::max(worst_kink, std::abs(lr[s + 1] - 2 * lr[s] + lr[s - 1]));
  }
  const bool ok = peak == 100 && lr[100] == cfg.max_learning_rate && lr[total] == 0.0 &&
                  lr[0] == 0.0 && worst_kink < 1e-17;
  return {ok, Fmt("peak at step %.0f of 1000, final %.3g, max second difference %.3g",
                  static_cast<double>(peak), lr[total], worst_kink)};
}

Outcome Stats() {
  const std::vector<Millis> d = {120, 340, 90, 450};
  const DatasetStats st = ComputeDurationStats(d);
  const double mean = 1000.0 / 4.0;
  const double var = ((120 - mean) * (120 - mean) + (340 - mean) * (340 - mean) +
                      (90 - mean) * (90 - mean) + (450 - mean) * (450 - mean)) / 4.0;
  const bool hand = std::abs(st.mean_ms - mean) < 1e-9 && std::abs(st.std_ms - std::sqrt(var)) < 1e-9 &&
                    std::abs(st.total_minutes - 1000.0 / 60000.0) < 1e-9;

  // Ground-truth row: 6886 segments totalling 2,841,600ms.
  std::vector<Segment> segs;
  Millis t = 0;
  for (int i = 0; i < 6886; ++i) {
    const Millis len = (i % 2 ? 561 : 265) - (i < 2318 ? 1 : 0);
    segs.push_back({t, t + len, {"truth", 0.0, 1}});
    t += len + 100;
  }
  const DatasetStats row = ManifestFromSegments("truth", segs).stats;
  const bool table = row.n_segments == 6886 && std::round(row.mean_ms) == 413 &&
                     std::round(row.std_ms) == 148 &&
                     std::abs(std::round(row.total_minutes * 100) / 100 - 47.36) < 1e-9;
  return {hand && table, std::string("hand fixture ") + (hand ? "ok" : "mismatch") +
                             Fmt("; table row %.0f segments, %.0f +/- %.0f ms",
                                 static_cast<double>(row.n_segments), row.mean_ms, row.std_ms) +
                             Fmt(", %.2f min", row.total_minutes)};
}

}  // namespace

int main() {
  Run("metric-oracles", MetricOracles);
  Run("worked-metric-values", WorkedValues);
  Run("geometry", Geometry);
  Run("lr-parameter-count", LrParameters);
  Run("head-shapes", HeadShapes);
  Run("gradient-checks", GradientChecks);
  Run("round-trip", RoundTrip);
  Run("end-to-end", EndToEnd);
  Run("median-filter-trend", MedianTrend);
  Run("schedule", Schedule);
  Run("stats", Stats);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
