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

// cough-ep: command-line front end of the cough detection pipeline.
//
// Every subcommand reads and writes the library's file formats. Module
// errors end the process with exit status 1 and one JSON object on stderr:
//   {"error": "<kind>", "message": "..."}

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "coughep/binary_io.hpp"
#include "coughep/error.hpp"
#include "pipeline.hpp"

namespace {

using namespace coughep;
using namespace coughep::cli;
using nlohmann::json;

struct GlobalFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> tiling;
  std::string threshold_name = "C";
  int filter_width = 1;
  std::string split;
};

PipelineConfig ResolveConfig(const GlobalFlags& g) {
  PipelineConfig cfg = g.config.empty() ? PipelineConfig{} : LoadPipelineConfig(g.config);
  if (g.seed) cfg.SetSeed(*g.seed);
  if (g.jobs) cfg.jobs = *g.jobs;
  if (g.tiling) cfg.tiling = ParseTiling(*g.tiling);
  cfg.Validate();
  return cfg;
}

fs::path Or(const std::string& flag, const fs::path& fallback, const char* what) {
  if (!flag.empty()) return flag;
  if (!fallback.empty()) return fallback;
  Fail(ErrorKind::kInvalidConfig, std::string("no ") + what + " given (flag or config)");
}

void ConfigureLogging() {
  auto logger = spdlog::stderr_color_mt("cough-ep");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  const char* env = std::getenv("COUGH_EP_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::info);
}

double ResolveThreshold(const std::optional<double>& explicit_threshold,
                        const std::string& thresholds_file, const std::string& name) {
  if (explicit_threshold) return *explicit_threshold;
  if (thresholds_file.empty()) {
    Fail(ErrorKind::kInvalidConfig, "give --threshold or --thresholds with --threshold-name");
  }
  return ThresholdByName(ReadOperatingPoints(thresholds_file), name);
}

std::vector<int> ParseWidths(const std::string& text) {
  std::vector<int> widths;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      widths.push_back(std::stoi(item));
    } catch (const std::exception&) {
      Fail(ErrorKind::kInvalidConfig, "bad filter width '" + item + "'");
    }
  }
  if (widths.empty()) Fail(ErrorKind::kInvalidConfig, "no filter widths given");
  return widths;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cough activity detection and end-pointing"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--config", g.config, "JSON pipeline config")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Top-level random seed");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--tiling", g.tiling, "Interval tiling")
      ->check(CLI::IsMember({"skip", "frame_length"}));
  app.add_option("--threshold-name", g.threshold_name, "Operating point")
      ->check(CLI::IsMember({"C", "EE", "P"}));
  app.add_option("--filter-width", g.filter_width, "Median filter width (odd)");
  app.add_option("--split", g.split, "Split tag of the data (train, dev, test)");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled corpus");
  std::string synth_out;
  std::optional<int> synth_n, synth_events;
  std::optional<double> synth_seconds, synth_snr;
  std::optional<std::string> synth_prefix;
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--n-recordings", synth_n);
  synth->add_option("--seconds", synth_seconds, "Recording length");
  synth->add_option("--events", synth_events, "Events per recording");
  synth->add_option("--snr-db", synth_snr);
  synth->add_option("--prefix", synth_prefix, "Recording id prefix");

  // features
  auto* features = app.add_subcommand("features", "Compute log-mel spectrograms (CEP1)");
  std::string feat_audio, feat_out;
  bool feat_csv = false;
  features->add_option("--audio", feat_audio, "Directory of .wav files");
  features->add_option("--out", feat_out, "Output directory")->required();
  features->add_flag("--csv", feat_csv, "Also write CSV");

  // train-lr
  auto* train_lr = app.add_subcommand("train-lr", "Train the logistic-regression baseline");
  std::string tl_audio, tl_ann, tl_dev_audio, tl_dev_ann, tl_out;
  bool tl_grid = false;
  train_lr->add_option("--audio", tl_audio, "Training audio directory");
  train_lr->add_option("--annotations", tl_ann, "Training annotation directory");
  train_lr->add_option("--dev-audio", tl_dev_audio);
  train_lr->add_option("--dev-annotations", tl_dev_ann);
  train_lr->add_flag("--grid", tl_grid, "Grid-search batch size and learning rate on dev AP");
  train_lr->add_option("--out", tl_out, "Checkpoint path (.ckp)")->required();

  // train-head
  auto* train_head = app.add_subcommand("train-head", "Train an MLP head on hidden states");
  std::string th_hsx, th_ann, th_dev_hsx, th_dev_ann, th_out;
  bool th_grid = false;
  train_head->add_option("--hsx", th_hsx, "Directory of .hsx exports")->required();
  train_head->add_option("--annotations", th_ann);
  train_head->add_option("--dev-hsx", th_dev_hsx);
  train_head->add_option("--dev-annotations", th_dev_ann);
  train_head->add_flag("--grid", th_grid);
  train_head->add_option("--out", th_out, "Checkpoint path (.ckp)")->required();

  // score
  auto* score = app.add_subcommand("score", "Write per-frame scores (CSQ1)");
  std::string sc_model, sc_audio, sc_hsx, sc_out;
  score->add_option("--model", sc_model, "Checkpoint")->required()->check(CLI::ExistingFile);
  score->add_option("--audio", sc_audio, "Audio directory (LR models)");
  score->add_option("--hsx", sc_hsx, "Hidden-state directory (heads)");
  score->add_option("--out", sc_out, "Output directory")->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "AUC, AP, coverage and purity at 10ms");
  std::string ev_scores, ev_ann, ev_thresholds, ev_curve;
  std::optional<double> ev_threshold;
  evaluate->add_option("--scores", ev_scores, "Score directory")->required();
  evaluate->add_option("--annotations", ev_ann);
  evaluate->add_option("--threshold", ev_threshold);
  evaluate->add_option("--thresholds", ev_thresholds, "Operating point file");
  evaluate->add_option("--curve-out", ev_curve, "Write the ROC/PR points (.csv or .json)");

  // pick-thresholds
  auto* pick = app.add_subcommand("pick-thresholds", "Fix C/EE/P operating points on dev data");
  std::string pk_scores, pk_ann, pk_out;
  pick->add_option("--scores", pk_scores)->required();
  pick->add_option("--annotations", pk_ann);
  pick->add_option("--out", pk_out, "Operating point file (.json)")->required();

  // segment
  auto* segment = app.add_subcommand("segment", "Threshold, filter and end-point scores");
  std::string sg_scores, sg_thresholds, sg_out;
  std::optional<double> sg_threshold;
  segment->add_option("--scores", sg_scores)->required();
  segment->add_option("--thresholds", sg_thresholds);
  segment->add_option("--threshold", sg_threshold);
  segment->add_option("--out", sg_out, "Segment TSV directory")->required();

  // export
  auto* exp = app.add_subcommand("export", "Cut isolated-cough clips and a manifest");
  std::string ex_audio, ex_segments, ex_out;
  exp->add_option("--audio", ex_audio);
  exp->add_option("--segments", ex_segments)->required();
  exp->add_option("--out", ex_out)->required();

  // stats
  auto* stats = app.add_subcommand("stats", "Dataset and partition statistics");
  std::string st_manifest, st_ann, st_truth, st_hist_out, st_model;
  double st_bin = 0.0;
  Millis st_skip = 100;
  stats->add_option("--manifest", st_manifest, "manifest.jsonl of an export");
  stats->add_option("--annotations", st_ann, "Annotation directory");
  stats->add_option("--truth", st_truth, "Ground-truth annotation directory to compare with");
  stats->add_option("--frame-skip", st_skip, "Frame skip for the fragmentation count (ms)");
  stats->add_option("--model", st_model, "Model name for the table");
  stats->add_option("--histogram-bin", st_bin, "Histogram bin width (ms)");
  stats->add_option("--histogram-out", st_hist_out, "Histogram CSV path");

  // sweep-filter
  auto* sweep = app.add_subcommand("sweep-filter", "AUC/AP against median filter width");
  std::string sw_scores, sw_ann, sw_widths = "1,3,5,7,9", sw_out;
  sweep->add_option("--scores", sw_scores)->required();
  sweep->add_option("--annotations", sw_ann);
  sweep->add_option("--widths", sw_widths, "Comma-separated odd widths");
  sweep->add_option("--out", sw_out, "CSV path");

  // profile
  auto* profile = app.add_subcommand("profile", "Power-vs-frequency profiles");
  std::string pf_audio, pf_ann, pf_out;
  profile->add_option("--audio", pf_audio);
  profile->add_option("--annotations", pf_ann);
  profile->add_option("--out", pf_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);
  ConfigureLogging();

  try {
    const PipelineConfig cfg = ResolveConfig(g);

    if (*synth) {
      SynthConfig sc = cfg.synth;
      if (synth_n) sc.n_recordings = *synth_n;
      if (synth_seconds) sc.recording_seconds = *synth_seconds;
      if (synth_events) sc.events_per_recording = *synth_events;
      if (synth_snr) sc.snr_db = *synth_snr;
      if (synth_prefix) sc.id_prefix = *synth_prefix;
      const auto corpus = GenerateSynthCorpus(sc);
      WriteSynthCorpus(synth_out, corpus);
      spdlog::info("wrote {} recordings to {}", corpus.size(), synth_out);
    } else if (*features) {
      const fs::path audio = Or(feat_audio, cfg.audio_dir, "audio directory");
      const auto files = ListById(audio, ".wav");
      std::vector<std::pair<std::string, fs::path>> items(files.begin(), files.end());
      ParallelFor(items.size(), cfg.jobs, [&](std::size_t i) {
        MelSpectrogram m = ComputeMelSpectrogram(LoadWav(items[i].second), cfg.mel);
        if (cfg.normalize) NormalizePerBin(m);
        WriteSpectrogram(fs::path(feat_out) / (items[i].first + ".cep"), m);
        if (feat_csv) {
          WriteFileAtomic(fs::path(feat_out) / (items[i].first + ".csv"), SpectrogramCsv(m));
        }
      });
      spdlog::info("wrote {} spectrograms to {}", items.size(), feat_out);
    } else if (*train_lr) {
      const auto train = LoadLabeledRecordings(Or(tl_audio, cfg.audio_dir, "audio directory"),
                                               Or(tl_ann, cfg.annotation_dir, "annotations"), cfg);
      std::vector<LabeledRecording> dev;
      if (!tl_dev_audio.empty()) {
        dev = LoadLabeledRecordings(tl_dev_audio, Or(tl_dev_ann, {}, "dev annotations"), cfg);
      }
      const auto r = RunTrainLr(train, dev, cfg, tl_grid);
      for (const auto& c : r.cells) {
        spdlog::info("grid batch={} lr={} dev AP={:.4f}", c.config.batch_size,
                     c.config.max_learning_rate, c.dev_ap);
      }
      WriteCheckpoint(tl_out, r.model);
      spdlog::info("LR model with {} parameters written to {}", r.model.ParameterCount(), tl_out);
    } else if (*train_head) {
      const auto train = LoadHiddenStateRecordings(th_hsx, Or(th_ann, cfg.annotation_dir, "annotations"));
      std::vector<HiddenStateRecording> dev;
      if (!th_dev_hsx.empty()) {
        dev = LoadHiddenStateRecordings(th_dev_hsx, Or(th_dev_ann, {}, "dev annotations"));
      }
      const MlpHead h = RunTrainHead(train, dev, cfg, th_grid);
      WriteCheckpoint(th_out, h);
      spdlog::info("head with {} parameters written to {}", h.ParameterCount(), th_out);
    } else if (*score) {
      const Checkpoint ckp = ReadCheckpoint(sc_model);
      std::vector<ScoredRecording> out;
      if (const auto* lr = std::get_if<LRModel>(&ckp)) {
        out = ScoreAudioDir(*lr, Or(sc_audio, cfg.audio_dir, "audio directory"), sc_out, g.split, cfg);
      } else {
        if (sc_hsx.empty()) Fail(ErrorKind::kInvalidConfig, "head checkpoints score --hsx exports");
        out = ScoreHiddenStateDir(std::get<MlpHead>(ckp), sc_hsx, sc_out, g.split, cfg);
      }
      spdlog::info("scored {} recordings into {}", out.size(), sc_out);
    } else if (*evaluate) {
      const auto scored = LoadScoreDir(ev_scores);
      const auto recs = BuildEvals(scored, Or(ev_ann, cfg.annotation_dir, "annotations"), cfg.tiling);
      std::optional<double> thr = ev_threshold;
      if (!thr && !ev_thresholds.empty()) {
        thr = ThresholdByName(ReadOperatingPoints(ev_thresholds), g.threshold_name);
      }
      const EvalReport r = Evaluate(recs, cfg.tiling, thr, g.filter_width);
      json j = EvalReportJson(r);
      j["tiling"] = TilingName(cfg.tiling);
      if (thr && !ev_thresholds.empty() && !ev_threshold) j["threshold_name"] = g.threshold_name;
      std::cout << j.dump(2) << "\n";
      if (!ev_curve.empty()) {
        const Curve c = RocCurve(PoolIntervals(recs, kScoringIntervalMs, cfg.tiling));
        const bool as_json = fs::path(ev_curve).extension() == ".json";
        WriteFileAtomic(ev_curve, as_json ? CurveJson(c) : CurveCsv(c));
      }
    } else if (*pick) {
      const auto scored = LoadScoreDir(pk_scores);
      const auto recs = BuildEvals(scored, Or(pk_ann, cfg.annotation_dir, "annotations"), cfg.tiling);
      std::vector<std::string> missing;
      const auto ops = PickOperatingPoints(scored, recs, g.split, cfg, &missing);
      for (const auto& m : missing) spdlog::warn("unattainable operating point {}", m);
      if (ops.empty()) Fail(ErrorKind::kUnattainableTarget, "no operating point could be fixed");
      WriteOperatingPoints(pk_out, ops);
      for (const auto& op : ops) {
        spdlog::info("{}: threshold={:.6g} coverage={:.4f} purity={:.4f} fpr={:.4f}", op.name,
                     op.threshold, op.achieved_coverage, op.achieved_purity, op.achieved_fpr);
      }
    } else if (*segment) {
      const double thr = ResolveThreshold(sg_threshold, sg_thresholds, g.threshold_name);
      const auto scored = LoadScoreDir(sg_scores);
      const auto segs = RunSegment(scored, thr, g.filter_width, sg_out);
      std::size_t n = 0;
      for (const auto& [id, s] : segs) n += s.size();
      spdlog::info("{} segments over {} recordings at threshold {:.6g}", n, segs.size(), thr);
    } else if (*exp) {
      const ClipManifest m = RunExport(Or(ex_audio, cfg.audio_dir, "audio directory"), ex_segments,
                                       ex_out, g.threshold_name);
      for (const auto& w : m.warnings) spdlog::warn("{}", w);
      for (const auto& e : m.entries) {
        if (!e.warning.empty()) spdlog::warn("{} {}: {}", e.recording_id, e.clip_path, e.warning);
      }
      std::cout << DatasetStatsJson(m.stats) << "\n";
    } else if (*stats) {
      std::vector<Millis> durations;
      if (!st_manifest.empty()) {
        const ClipManifest m = ReadManifest(st_manifest);
        for (const auto& e : m.entries) durations.push_back(e.duration_ms());
        const std::string model =
            st_model.empty() && !m.entries.empty() ? m.entries.front().source : st_model;
        const NamedStats row{g.threshold_name, model, m.stats};
        std::cout << FormatDatasetTable(std::span(&row, 1));
        if (!st_truth.empty()) {
          ClipManifest truth;
          std::vector<ClipManifest> parts;
          for (const auto& set : LoadAnnotationDir(st_truth)) {
            std::vector<Segment> segs;
            for (const auto& a : set.annotations) {
              if (a.label == EventLabel::kCough) segs.push_back({a.start_ms, a.end_ms, {"truth"}});
            }
            parts.push_back(ManifestFromSegments(set.recording_id, segs));
          }
          truth = MergeManifests(parts);
          std::cout << ComparisonJson(CompareDatasets(m, truth, st_skip)) << "\n";
        }
      } else {
        const auto sets = LoadAnnotationDir(Or(st_ann, cfg.annotation_dir, "annotations"));
        for (const auto& s : sets) {
          for (const auto& a : s.annotations) {
            if (a.label == EventLabel::kCough) durations.push_back(a.duration_ms());
          }
        }
        const NamedPartition row{g.split.empty() ? "All" : g.split, ComputePartitionStats(sets)};
        std::cout << FormatPartitionTable(std::span(&row, 1));
        std::cout << PartitionStatsJson(row.stats) << "\n";
      }
      if (st_bin > 0.0) {
        const Histogram h = DurationHistogram(std::span<const Millis>(durations), st_bin);
        std::ostringstream os;
        os << "bin_start_ms,bin_end_ms,count\n";
        for (std::size_t i = 0; i < h.counts.size(); ++i) {
          os << i * h.bin_width_ms << ',' << (i + 1) * h.bin_width_ms << ',' << h.counts[i] << '\n';
        }
        if (st_hist_out.empty()) {
          std::cout << os.str();
        } else {
          WriteFileAtomic(st_hist_out, os.str());
        }
      }
    } else if (*sweep) {
      const auto scored = LoadScoreDir(sw_scores);
      const auto recs = BuildEvals(scored, Or(sw_ann, cfg.annotation_dir, "annotations"), cfg.tiling);
      const auto widths = ParseWidths(sw_widths);
      const auto rows = RunSweep(recs, widths, cfg.tiling);
      const std::string csv = SweepCsv(rows);
      if (sw_out.empty()) {
        std::cout << csv;
      } else {
        WriteFileAtomic(sw_out, csv);
      }
    } else if (*profile) {
      const auto [cough, other] = RunProfile(Or(pf_audio, cfg.audio_dir, "audio directory"),
                                             Or(pf_ann, cfg.annotation_dir, "annotations"));
      WriteFileAtomic(fs::path(pf_out) / "cough_profile.csv", ProfileCsv(cough));
      WriteFileAtomic(fs::path(pf_out) / "non_cough_profile.csv", ProfileCsv(other));
    }
  } catch (const coughep::Error& e) {
    json j = {{"error", std::string(ErrorKindName(e.kind()))}, {"message", e.what()}};
    if (const auto* u = dynamic_cast<const UnattainableTargetError*>(&e)) {
      j["target"] = u->target();
      j["best_achievable"] = u->best_achievable();
      j["best_threshold"] = u->best_threshold();
    }
    std::cerr << j.dump() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << std::endl;
    return 1;
  }
  return 0;
}
