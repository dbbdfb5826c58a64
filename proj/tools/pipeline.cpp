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

#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>

#include "coughep/binary_io.hpp"
#include "coughep/error.hpp"

namespace coughep::cli {

using nlohmann::json;

namespace {

void CheckKeys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) Fail(ErrorKind::kInvalidConfig, where + " must be a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) Fail(ErrorKind::kInvalidConfig, "unknown key '" + k + "' in " + where);
  }
}

template <typename T>
void Get(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void ParseTrain(const json& j, TrainConfig& t, const std::string& where) {
  CheckKeys(j,
            {"batch_size", "max_learning_rate", "epochs", "warmup_fraction", "scheduler",
             "weight_decay", "beta1", "beta2", "eps"},
            where);
  Get(j, "batch_size", t.batch_size);
  Get(j, "max_learning_rate", t.max_learning_rate);
  Get(j, "epochs", t.epochs);
  Get(j, "warmup_fraction", t.warmup_fraction);
  Get(j, "weight_decay", t.optimizer.weight_decay);
  Get(j, "beta1", t.optimizer.beta1);
  Get(j, "beta2", t.optimizer.beta2);
  Get(j, "eps", t.optimizer.eps);
  if (j.contains("scheduler")) {
    const auto s = j.at("scheduler").get<std::string>();
    if (s == "warmup_linear_decay") {
      t.scheduler = Scheduler::kWarmupLinearDecay;
    } else if (s == "none") {
      t.scheduler = Scheduler::kNone;
    } else {
      Fail(ErrorKind::kInvalidConfig, "unknown scheduler '" + s + "'");
    }
  }
}

json TrainJson(const TrainConfig& t) {
  return {{"batch_size", t.batch_size},
          {"max_learning_rate", t.max_learning_rate},
          {"epochs", t.epochs},
          {"warmup_fraction", t.warmup_fraction},
          {"scheduler", t.scheduler == Scheduler::kNone ? "none" : "warmup_linear_decay"},
          {"weight_decay", t.optimizer.weight_decay},
          {"beta1", t.optimizer.beta1},
          {"beta2", t.optimizer.beta2},
          {"eps", t.optimizer.eps}};
}

Millis DurationMs(const Waveform& w) {
  return w.size() * 1000 / w.sample_rate;
}

fs::path Require(const fs::path& dir, const std::string& id, const std::string& ext) {
  fs::path p = dir / (id + ext);
  if (!fs::exists(p)) Fail(ErrorKind::kValidation, "no " + ext + " file for recording " + id + " in " + dir.string());
  return p;
}

}  // namespace

PipelineConfig::PipelineConfig() {
  lr_train.batch_size = 8;
  lr_train.max_learning_rate = 1e-3;
  lr_train.scheduler = Scheduler::kNone;
  lr_train.optimizer.weight_decay = 50.0;
  head_train.batch_size = 16;
  head_train.max_learning_rate = 1e-4;
}

void PipelineConfig::Validate() const {
  if (!(coverage_target > 0.0 && coverage_target < 1.0)) {
    Fail(ErrorKind::kInvalidConfig, "coverage_target must lie in (0, 1)");
  }
  if (!(purity_target > 0.0 && purity_target < 1.0)) {
    Fail(ErrorKind::kInvalidConfig, "purity_target must lie in (0, 1)");
  }
  if (jobs < 1) Fail(ErrorKind::kInvalidConfig, "jobs must be >= 1");
  if (patch_width < 1 || patch_stride < 1) Fail(ErrorKind::kInvalidConfig, "bad patch geometry");
  mel.Validate(kCanonicalSampleRate);
  lr_train.Validate();
  head_train.Validate();
  synth.Validate();
}

void PipelineConfig::SetSeed(std::uint64_t s) {
  seed = s;
  lr_train.seed = s;
  head_train.seed = s;
  synth.seed = s;
}

PipelineConfig ParsePipelineConfig(const json& j) {
  PipelineConfig c;
  try {
    CheckKeys(j,
              {"audio_dir", "annotation_dir", "output_dir", "mel", "normalize", "patch_width",
               "patch_stride", "lr", "head", "tiling", "coverage_target", "purity_target", "seed",
               "jobs", "synth"},
              "config");
    if (j.contains("audio_dir")) c.audio_dir = j.at("audio_dir").get<std::string>();
    if (j.contains("annotation_dir")) c.annotation_dir = j.at("annotation_dir").get<std::string>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("mel")) {
      const auto& m = j.at("mel");
      CheckKeys(m, {"n_mels", "window_ms", "hop_ms", "fmin_hz", "fmax_hz", "log_floor", "fft_size"},
                "mel");
      Get(m, "n_mels", c.mel.n_mels);
      Get(m, "window_ms", c.mel.window_ms);
      Get(m, "hop_ms", c.mel.hop_ms);
      Get(m, "fmin_hz", c.mel.fmin_hz);
      Get(m, "fmax_hz", c.mel.fmax_hz);
      Get(m, "log_floor", c.mel.log_floor);
      Get(m, "fft_size", c.mel.fft_size);
    }
    Get(j, "normalize", c.normalize);
    Get(j, "patch_width", c.patch_width);
    Get(j, "patch_stride", c.patch_stride);
    if (j.contains("lr")) ParseTrain(j.at("lr"), c.lr_train, "lr");
    if (j.contains("head")) ParseTrain(j.at("head"), c.head_train, "head");
    if (j.contains("tiling")) c.tiling = ParseTiling(j.at("tiling").get<std::string>());
    Get(j, "coverage_target", c.coverage_target);
    Get(j, "purity_target", c.purity_target);
    Get(j, "jobs", c.jobs);
    if (j.contains("synth")) {
      const auto& s = j.at("synth");
      CheckKeys(s,
                {"n_recordings", "recording_seconds", "events_per_recording", "event_mean_ms",
                 "event_std_ms", "snr_db", "min_gap_ms", "max_event_ms", "background_rms",
                 "band_low_hz", "band_high_hz", "id_prefix"},
                "synth");
      Get(s, "n_recordings", c.synth.n_recordings);
      Get(s, "recording_seconds", c.synth.recording_seconds);
      Get(s, "events_per_recording", c.synth.events_per_recording);
      Get(s, "event_mean_ms", c.synth.event_mean_ms);
      Get(s, "event_std_ms", c.synth.event_std_ms);
      Get(s, "snr_db", c.synth.snr_db);
      Get(s, "min_gap_ms", c.synth.min_gap_ms);
      Get(s, "max_event_ms", c.synth.max_event_ms);
      Get(s, "background_rms", c.synth.background_rms);
      Get(s, "band_low_hz", c.synth.band_low_hz);
      Get(s, "band_high_hz", c.synth.band_high_hz);
      Get(s, "id_prefix", c.synth.id_prefix);
    }
    c.SetSeed(j.value("seed", std::uint64_t{0}));
  } catch (const json::exception& e) {
    Fail(ErrorKind::kInvalidConfig, std::string("config: ") + e.what());
  }
  c.Validate();
  return c;
}

PipelineConfig LoadPipelineConfig(const fs::path& path) {
  json j;
  try {
    j = json::parse(ReadFileText(path));
  } catch (const json::exception& e) {
    Fail(ErrorKind::kInvalidConfig, path.string() + ": " + e.what());
  }
  return ParsePipelineConfig(j);
}

json PipelineConfigJson(const PipelineConfig& c) {
  return {{"audio_dir", c.audio_dir.string()},
          {"annotation_dir", c.annotation_dir.string()},
          {"output_dir", c.output_dir.string()},
          {"mel",
           {{"n_mels", c.mel.n_mels},
            {"window_ms", c.mel.window_ms},
            {"hop_ms", c.mel.hop_ms},
            {"fmin_hz", c.mel.fmin_hz},
            {"fmax_hz", c.mel.fmax_hz},
            {"log_floor", c.mel.log_floor},
            {"fft_size", c.mel.fft_size}}},
          {"normalize", c.normalize},
          {"patch_width", c.patch_width},
          {"patch_stride", c.patch_stride},
          {"lr", TrainJson(c.lr_train)},
          {"head", TrainJson(c.head_train)},
          {"tiling", TilingName(c.tiling)},
          {"coverage_target", c.coverage_target},
          {"purity_target", c.purity_target},
          {"seed", c.seed},
          {"jobs", c.jobs},
          {"synth",
           {{"n_recordings", c.synth.n_recordings},
            {"recording_seconds", c.synth.recording_seconds},
            {"events_per_recording", c.synth.events_per_recording},
            {"event_mean_ms", c.synth.event_mean_ms},
            {"event_std_ms", c.synth.event_std_ms},
            {"snr_db", c.synth.snr_db},
            {"min_gap_ms", c.synth.min_gap_ms},
            {"max_event_ms", c.synth.max_event_ms},
            {"background_rms", c.synth.background_rms},
            {"band_low_hz", c.synth.band_low_hz},
            {"band_high_hz", c.synth.band_high_hz},
            {"id_prefix", c.synth.id_prefix}}}};
}

Tiling ParseTiling(const std::string& name) {
  if (name == "skip") return Tiling::kSkip;
  if (name == "frame_length") return Tiling::kFrameLength;
  Fail(ErrorKind::kInvalidConfig, "tiling must be skip or frame_length, got '" + name + "'");
}

std::string TilingName(Tiling t) { return t == Tiling::kSkip ? "skip" : "frame_length"; }

std::map<std::string, fs::path> ListById(const fs::path& dir, const std::string& extension) {
  if (!fs::is_directory(dir)) Fail(ErrorKind::kIo, "not a directory: " + dir.string());
  std::map<std::string, fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == extension) {
      out.emplace(e.path().stem().string(), e.path());
    }
  }
  return out;
}

PatchSequence AudioPatches(const Waveform& w, const PipelineConfig& cfg) {
  MelSpectrogram m = ComputeMelSpectrogram(w, cfg.mel);
  if (cfg.normalize) NormalizePerBin(m);
  return ExtractPatchFrames(m, cfg.patch_width, cfg.patch_stride);
}

std::vector<LabeledRecording> LoadLabeledRecordings(const fs::path& audio_dir,
                                                    const fs::path& annotation_dir,
                                                    const PipelineConfig& cfg) {
  const auto audio = ListById(audio_dir, ".wav");
  if (audio.empty()) Fail(ErrorKind::kEmptyInput, "no .wav files in " + audio_dir.string());
  std::vector<std::pair<std::string, fs::path>> items(audio.begin(), audio.end());
  std::vector<LabeledRecording> out(items.size());
  ParallelFor(items.size(), cfg.jobs, [&](std::size_t i) {
    const auto& [id, path] = items[i];
    const Waveform w = LoadWav(path);
    out[i].id = id;
    out[i].annotations = ParseAnnotations(Require(annotation_dir, id, ".tsv"), DurationMs(w));
    out[i].annotations.recording_id = id;
    out[i].patches = AudioPatches(w, cfg);
  });
  return out;
}

FrameLabels IntervalLabelsFor(const AnnotationSet& set, const FrameGeometry& g, Tiling tiling) {
  Millis extent = g.CoveredMs();
  if (tiling == Tiling::kFrameLength && g.n_frames > 0) {
    extent += std::max<Millis>(0, g.frame_length_ms - g.frame_skip_ms);
  }
  const std::int64_t n = (extent + kScoringIntervalMs - 1) / kScoringIntervalMs;
  return ComputeFrameLabels(set, {kScoringIntervalMs, kScoringIntervalMs, n});
}

Dataset PatchDataset(std::span<const LabeledRecording> recs, const PipelineConfig& cfg) {
  Dataset ds;
  ds.dim = static_cast<std::int64_t>(cfg.mel.n_mels) * cfg.patch_width;
  for (const auto& r : recs) {
    AppendPatches(ds, r.patches, ComputeFrameLabels(r.annotations, r.patches.geometry));
  }
  return ds;
}

std::vector<DevPatches> DevSet(std::span<const LabeledRecording> recs) {
  std::vector<DevPatches> out;
  out.reserve(recs.size());
  for (const auto& r : recs) {
    out.push_back({r.patches, IntervalLabelsFor(r.annotations, r.patches.geometry, Tiling::kSkip)});
  }
  return out;
}

LrTrainResult RunTrainLr(std::span<const LabeledRecording> train,
                         std::span<const LabeledRecording> dev, const PipelineConfig& cfg,
                         bool grid) {
  const Dataset ds = PatchDataset(train, cfg);
  LrTrainResult r;
  if (grid && !dev.empty()) {
    const auto cells = LogisticRegressionGrid(cfg.lr_train);
    const auto devset = DevSet(dev);
    auto s = SearchLogisticRegression(ds, devset, cells, cfg.mel.n_mels, cfg.patch_width,
                                      cfg.patch_stride, cfg.jobs);
    r.model = std::move(s.best);
    r.cells = std::move(s.cells);
  } else {
    r.model = TrainLR(ds, cfg.lr_train, cfg.mel.n_mels, cfg.patch_width, cfg.patch_stride);
  }
  return r;
}

std::vector<HiddenStateRecording> LoadHiddenStateRecordings(const fs::path& hsx_dir,
                                                            const fs::path& annotation_dir) {
  const auto files = ListById(hsx_dir, ".hsx");
  if (files.empty()) Fail(ErrorKind::kEmptyInput, "no .hsx files in " + hsx_dir.string());
  std::vector<HiddenStateRecording> out;
  for (const auto& [id, path] : files) {
    HiddenStateRecording r;
    r.id = id;
    r.states = ReadHiddenStates(path);
    r.annotations = ParseAnnotations(Require(annotation_dir, id, ".tsv"));
    r.annotations.recording_id = id;
    r.annotations.recording_duration_ms =
        std::max(r.annotations.recording_duration_ms, r.states.geometry.CoveredMs());
    out.push_back(std::move(r));
  }
  return out;
}

MlpHead RunTrainHead(std::span<const HiddenStateRecording> train,
                     std::span<const HiddenStateRecording> dev, const PipelineConfig& cfg,
                     bool grid) {
  if (train.empty()) Fail(ErrorKind::kEmptyInput, "no training exports");
  if (grid && !dev.empty()) {
    LayerCandidate cand;
    cand.layer = train.front().states.layer_index;
    for (const auto& r : train) {
      cand.train.push_back(r.states);
      cand.train_labels.push_back(ComputeFrameLabels(r.annotations, r.states.geometry));
    }
    for (const auto& r : dev) {
      cand.dev.push_back(r.states);
      cand.dev_interval_labels.push_back(
          IntervalLabelsFor(r.annotations, r.states.geometry, Tiling::kSkip));
    }
    const auto cells = HeadGrid(cfg.head_train);
    return SearchHead(std::span(&cand, 1), cells, cfg.jobs).best;
  }
  Dataset ds;
  for (const auto& r : train) {
    AppendExport(ds, r.states, ComputeFrameLabels(r.annotations, r.states.geometry));
  }
  const auto& proto = train.front().states;
  return TrainHead(ds, proto.style, proto.dim, proto.patches_per_frame, cfg.head_train);
}

std::vector<ScoredRecording> ScoreAudioDir(const LRModel& m, const fs::path& audio_dir,
                                           const fs::path& out_dir, const std::string& split,
                                           const PipelineConfig& cfg) {
  const auto audio = ListById(audio_dir, ".wav");
  if (audio.empty()) Fail(ErrorKind::kEmptyInput, "no .wav files in " + audio_dir.string());
  std::vector<std::pair<std::string, fs::path>> items(audio.begin(), audio.end());
  std::vector<ScoredRecording> out(items.size());
  ParallelFor(items.size(), cfg.jobs, [&](std::size_t i) {
    const auto& [id, path] = items[i];
    out[i] = {id, ScoreLR(m, AudioPatches(LoadWav(path), cfg)), split};
    if (!out_dir.empty()) WriteScores(out_dir / (id + ".csq"), out[i].scores, split);
  });
  return out;
}

std::vector<ScoredRecording> ScoreHiddenStateDir(const MlpHead& h, const fs::path& hsx_dir,
                                                 const fs::path& out_dir,
                                                 const std::string& split,
                                                 const PipelineConfig& cfg) {
  const auto files = ListById(hsx_dir, ".hsx");
  if (files.empty()) Fail(ErrorKind::kEmptyInput, "no .hsx files in " + hsx_dir.string());
  std::vector<std::pair<std::string, fs::path>> items(files.begin(), files.end());
  std::vector<ScoredRecording> out(items.size());
  ParallelFor(items.size(), cfg.jobs, [&](std::size_t i) {
    const auto& [id, path] = items[i];
    out[i] = {id, ScoreHead(h, ReadHiddenStates(path)), split};
    if (!out_dir.empty()) WriteScores(out_dir / (id + ".csq"), out[i].scores, split);
  });
  return out;
}

std::vector<ScoredRecording> LoadScoreDir(const fs::path& dir) {
  std::vector<ScoredRecording> out;
  for (const auto& [id, path] : ListById(dir, ".csq")) {
    ScoreFile f = ImportScores(path);
    out.push_back({id, std::move(f.scores), f.split});
  }
  if (out.empty()) Fail(ErrorKind::kEmptyInput, "no .csq files in " + dir.string());
  return out;
}

std::vector<RecordingEval> BuildEvals(std::span<const ScoredRecording> scored,
                                      const fs::path& annotation_dir, Tiling tiling) {
  std::vector<RecordingEval> out;
  out.reserve(scored.size());
  for (const auto& s : scored) {
    const AnnotationSet set = ParseAnnotations(Require(annotation_dir, s.id, ".tsv"));
    out.push_back({s.scores, IntervalLabelsFor(set, s.scores.geometry, tiling)});
  }
  return out;
}

EvalReport Evaluate(std::span<const RecordingEval> recs, Tiling tiling,
                    std::optional<double> threshold, int filter_width) {
  const IntervalScores pooled = PoolIntervals(recs, kScoringIntervalMs, tiling);
  EvalReport r;
  r.intervals = pooled.size();
  r.auc = Auc(RocCurve(pooled));
  r.ap = AveragePrecision(PrCurve(pooled));
  r.filter_width = filter_width;
  if (threshold) {
    r.threshold = threshold;
    IntervalScores decided;
    for (const auto& rec : recs) {
      const BinarySequence bits = MedianFilter(ThresholdScores(rec.scores, *threshold), filter_width);
      ScoreSequence d{std::vector<double>(bits.bits.begin(), bits.bits.end()), rec.scores.geometry,
                      rec.scores.source};
      decided.Append(TileToIntervals(d, rec.interval_labels, kScoringIntervalMs, tiling));
    }
    r.confusion = ConfusionAt(decided, 0.5);
  }
  return r;
}

json EvalReportJson(const EvalReport& r) {
  json j = {{"auc", r.auc}, {"ap", r.ap}, {"intervals", r.intervals}};
  if (r.threshold) {
    j["threshold"] = *r.threshold;
    j["filter_width"] = r.filter_width;
    j["coverage"] = r.confusion.coverage();
    j["purity"] = r.confusion.purity();
    j["fpr"] = r.confusion.fpr();
    j["tp"] = r.confusion.tp;
    j["fp"] = r.confusion.fp;
    j["tn"] = r.confusion.tn;
    j["fn"] = r.confusion.fn;
  }
  return j;
}

std::vector<OperatingPoint> PickOperatingPoints(std::span<const ScoredRecording> scored,
                                                std::span<const RecordingEval> recs,
                                                const std::string& split,
                                                const PipelineConfig& cfg,
                                                std::vector<std::string>* unattainable) {
  if (split == "test") {
    Fail(ErrorKind::kValidation, "operating points must be picked on dev data, not test");
  }
  for (const auto& s : scored) {
    if (s.split == "test") {
      Fail(ErrorKind::kValidation,
           "score file " + s.id + " is tagged test; operating points must come from dev data");
    }
  }
  const Curve c = RocCurve(PoolIntervals(recs, kScoringIntervalMs, cfg.tiling));
  std::vector<OperatingPoint> ops;
  const std::pair<Criterion, double> wanted[] = {{Criterion::kCoverage, cfg.coverage_target},
                                                 {Criterion::kEqualError, 0.0},
                                                 {Criterion::kPurity, cfg.purity_target}};
  for (const auto& [crit, target] : wanted) {
    try {
      ops.push_back(PickThreshold(c, crit, target));
    } catch (const UnattainableTargetError& e) {
      if (unattainable) unattainable->push_back(CriterionName(crit) + ": " + e.what());
    }
  }
  return ops;
}

void WriteOperatingPoints(const fs::path& path, std::span<const OperatingPoint> ops) {
  json arr = json::array();
  for (const auto& op : ops) arr.push_back(json::parse(OperatingPointJson(op)));
  WriteFileAtomic(path, json{{"operating_points", arr}}.dump(2) + "\n");
}

std::vector<OperatingPoint> ReadOperatingPoints(const fs::path& path) {
  std::vector<OperatingPoint> ops;
  try {
    const json j = json::parse(ReadFileText(path));
    for (const auto& o : j.at("operating_points")) {
      OperatingPoint op;
      op.name = o.at("name").get<std::string>();
      op.threshold = o.at("threshold").get<double>();
      op.achieved_coverage = o.value("coverage", 0.0);
      op.achieved_purity = o.value("purity", 0.0);
      op.achieved_fpr = o.value("fpr", 0.0);
      op.target = o.value("target", 0.0);
      ops.push_back(op);
    }
  } catch (const json::exception& e) {
    Fail(ErrorKind::kFormat, path.string() + ": " + e.what());
  }
  return ops;
}

double ThresholdByName(std::span<const OperatingPoint> ops, const std::string& name) {
  for (const auto& op : ops) {
    if (op.name == name) return op.threshold;
  }
  Fail(ErrorKind::kValidation, "no operating point named '" + name + "'");
}

std::map<std::string, std::vector<Segment>> RunSegment(std::span<const ScoredRecording> scored,
                                                       double threshold, int filter_width,
                                                       const fs::path& out_dir) {
  std::map<std::string, std::vector<Segment>> out;
  for (const auto& s : scored) {
    auto segs = DetectSegments(s.scores, threshold, filter_width);
    if (!out_dir.empty()) WriteFileAtomic(out_dir / (s.id + ".tsv"), FormatSegmentsTsv(segs));
    out.emplace(s.id, std::move(segs));
  }
  return out;
}

double SegmentCoverage(std::span<const Segment> segs, const AnnotationSet& truth) {
  std::int64_t positives = 0, covered = 0;
  for (const auto& a : truth.annotations) {
    if (a.label != EventLabel::kCough) continue;
    for (Millis t = a.start_ms; t < a.end_ms; t += kScoringIntervalMs) {
      ++positives;
      for (const auto& s : segs) {
        if (s.start_ms <= t && t + kScoringIntervalMs <= s.end_ms) {
          ++covered;
          break;
        }
      }
    }
  }
  if (positives == 0) Fail(ErrorKind::kUndefinedMetric, "no annotated coughs to cover");
  return static_cast<double>(covered) / static_cast<double>(positives);
}

ClipManifest RunExport(const fs::path& audio_dir, const fs::path& segment_dir,
                       const fs::path& out_dir, const std::string& threshold_name) {
  std::vector<ClipManifest> parts;
  for (const auto& [id, path] : ListById(segment_dir, ".tsv")) {
    const auto segs = ParseSegmentsTsv(ReadFileText(path));
    const Waveform w = LoadWav(Require(audio_dir, id, ".wav"));
    parts.push_back(ExportClips(id, w, segs, out_dir, threshold_name));
  }
  ClipManifest merged = MergeManifests(parts);
  WriteManifest(out_dir, merged, threshold_name);
  return merged;
}

std::vector<SweepRow> RunSweep(std::span<const RecordingEval> recs, std::span<const int> widths,
                               Tiling tiling) {
  return FilteredMetricSweep(recs, widths, tiling, kScoringIntervalMs);
}

std::pair<PowerProfile, PowerProfile> RunProfile(const fs::path& audio_dir,
                                                 const fs::path& annotation_dir) {
  const WelchConfig welch;
  std::vector<Waveform> cough, other;
  const auto cut = [](const Waveform& w, Millis a, Millis b) {
    Waveform c;
    c.sample_rate = w.sample_rate;
    const auto sr = static_cast<std::int64_t>(w.sample_rate);
    const std::int64_t i = std::min(a * sr / 1000, w.size());
    const std::int64_t j = std::min(b * sr / 1000, w.size());
    c.samples.assign(w.samples.begin() + i, w.samples.begin() + j);
    return c;
  };
  for (const auto& [id, path] : ListById(audio_dir, ".wav")) {
    const Waveform w = LoadWav(path);
    const AnnotationSet set = ParseAnnotations(Require(annotation_dir, id, ".tsv"), DurationMs(w));
    Millis prev_end = 0;
    for (const auto& a : set.annotations) {
      if (a.start_ms > prev_end) other.push_back(cut(w, prev_end, a.start_ms));
      if (a.label == EventLabel::kCough) cough.push_back(cut(w, a.start_ms, a.end_ms));
      prev_end = std::max(prev_end, a.end_ms);
    }
    if (DurationMs(w) > prev_end) other.push_back(cut(w, prev_end, DurationMs(w)));
  }
  const auto too_short = [&](const Waveform& w) { return w.size() < welch.segment_samples; };
  std::erase_if(cough, too_short);
  std::erase_if(other, too_short);
  return {ComputePowerProfile(cough, ClassLabel::kCough, welch),
          ComputePowerProfile(other, ClassLabel::kNonCough, welch)};
}

std::vector<AnnotationSet> LoadAnnotationDir(const fs::path& dir) {
  std::vector<AnnotationSet> out;
  for (const auto& [id, path] : ListById(dir, ".tsv")) out.push_back(ParseAnnotations(path));
  if (out.empty()) Fail(ErrorKind::kEmptyInput, "no .tsv files in " + dir.string());
  return out;
}

}  // namespace coughep::cli
