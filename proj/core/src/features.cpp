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

#include "coughep/features.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "coughep/binary_io.hpp"
#include "coughep/error.hpp"

namespace coughep {

namespace {

// FFTW planning is not thread-safe; execution with the new-array API is.
std::mutex& FftwPlannerMutex() {
  static std::mutex m;
  return m;
}

/// Power spectrum |X_k|^2, k = 0..n/2, of a real frame of length n.
class PowerSpectrum {
 public:
  explicit PowerSpectrum(int n) : n_(n) {
    in_ = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    out_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    std::lock_guard<std::mutex> lock(FftwPlannerMutex());
    plan_ = fftw_plan_dft_r2c_1d(n, in_, out_, FFTW_ESTIMATE);
  }
  ~PowerSpectrum() {
    {
      std::lock_guard<std::mutex> lock(FftwPlannerMutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  PowerSpectrum(const PowerSpectrum&) = delete;
  PowerSpectrum& operator=(const PowerSpectrum&) = delete;

  int bins() const { return n_ / 2 + 1; }

  /// `frame` is zero-padded (or must not exceed) the transform length.
  void Compute(std::span<const double> frame, std::span<double> power) {
    std::fill(in_, in_ + n_, 0.0);
    std::copy(frame.begin(), frame.end(), in_);
    fftw_execute(plan_);
    for (int k = 0; k < bins(); ++k) {
      power[k] = out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1];
    }
  }

 private:
  int n_;
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

std::vector<double> HannWindow(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  }
  return w;
}

nlohmann::json MelConfigJson(const MelConfig& c) {
  return {{"n_mels", c.n_mels},     {"window_ms", c.window_ms},
          {"hop_ms", c.hop_ms},     {"fmin_hz", c.fmin_hz},
          {"fmax_hz", c.fmax_hz},   {"log_floor", c.log_floor},
          {"fft_size", c.fft_size}, {"window", "hann"},
          {"mel_scale", "htk"},     {"filter_norm", "unit_sum"}};
}

MelConfig MelConfigFromJson(const nlohmann::json& j) {
  MelConfig c;
  c.n_mels = j.value("n_mels", c.n_mels);
  c.window_ms = j.value("window_ms", c.window_ms);
  c.hop_ms = j.value("hop_ms", c.hop_ms);
  c.fmin_hz = j.value("fmin_hz", c.fmin_hz);
  c.fmax_hz = j.value("fmax_hz", c.fmax_hz);
  c.log_floor = j.value("log_floor", c.log_floor);
  c.fft_size = j.value("fft_size", c.fft_size);
  return c;
}

}  // namespace

void MelConfig::Validate(int sample_rate) const {
  if (sample_rate <= 0) Fail(ErrorKind::kInvalidConfig, "sample rate must be > 0");
  if (n_mels < 1) Fail(ErrorKind::kInvalidConfig, "n_mels must be >= 1");
  if (!(window_ms > 0.0) || !(hop_ms > 0.0)) {
    Fail(ErrorKind::kInvalidConfig, "window_ms and hop_ms must be positive");
  }
  if (hop_ms > window_ms) Fail(ErrorKind::kInvalidConfig, "hop_ms exceeds window_ms");
  if (fmin_hz < 0.0 || !(fmin_hz < fmax_hz)) {
    Fail(ErrorKind::kInvalidConfig, "need 0 <= fmin_hz < fmax_hz");
  }
  if (fmax_hz > sample_rate / 2.0) {
    Fail(ErrorKind::kInvalidConfig, "fmax_hz exceeds Nyquist");
  }
  if (!(log_floor > 0.0)) Fail(ErrorKind::kInvalidConfig, "log_floor must be > 0");
  if (fft_size < WindowSamples(sample_rate)) {
    Fail(ErrorKind::kInvalidConfig, "fft_size shorter than the analysis window");
  }
}

int MelConfig::WindowSamples(int sample_rate) const {
  return static_cast<int>(std::lround(window_ms * sample_rate / 1000.0));
}

int MelConfig::HopSamples(int sample_rate) const {
  return static_cast<int>(std::lround(hop_ms * sample_rate / 1000.0));
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank BuildMelFilterbank(const MelConfig& cfg, int sample_rate) {
  cfg.Validate(sample_rate);
  const int n_bins = cfg.fft_size / 2 + 1;
  const double mel_lo = HzToMel(cfg.fmin_hz);
  const double mel_hi = HzToMel(cfg.fmax_hz);
  std::vector<double> edges(cfg.n_mels + 2);
  for (int i = 0; i < cfg.n_mels + 2; ++i) {
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (cfg.n_mels + 1));
  }

  MelFilterbank fb;
  fb.weights = Matrix(cfg.n_mels, n_bins);
  fb.center_hz.resize(cfg.n_mels);
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    fb.center_hz[m] = mid;
    double sum = 0.0;
    for (int k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / cfg.fft_size;
      const double w = std::max(0.0, std::min((f - lo) / (mid - lo), (hi - f) / (hi - mid)));
      fb.weights.at(m, k) = static_cast<float>(w);
      sum += w;
    }
    if (!(sum > 0.0)) {
      Fail(ErrorKind::kInvalidConfig,
           "mel filter " + std::to_string(m) + " covers no DFT bin; raise fft_size");
    }
    for (int k = 0; k < n_bins; ++k) {
      fb.weights.at(m, k) = static_cast<float>(fb.weights.at(m, k) / sum);
    }
  }
  return fb;
}

MelSpectrogram ComputeMelSpectrogram(const Waveform& w, const MelConfig& cfg) {
  cfg.Validate(w.sample_rate);
  const int win = cfg.WindowSamples(w.sample_rate);
  const int hop = cfg.HopSamples(w.sample_rate);
  if (w.size() < win) {
    Fail(ErrorKind::kEmptyInput, "waveform shorter than one analysis window");
  }
  const std::int64_t n_frames = (w.size() - win) / hop + 1;
  const MelFilterbank fb = BuildMelFilterbank(cfg, w.sample_rate);
  const std::vector<double> window = HannWindow(win);

  MelSpectrogram out;
  out.config = cfg;
  out.sample_rate = w.sample_rate;
  out.values = Matrix(n_frames, cfg.n_mels);

  PowerSpectrum fft(cfg.fft_size);
  std::vector<double> frame(win), power(fft.bins());
  for (std::int64_t n = 0; n < n_frames; ++n) {
    const float* src = w.samples.data() + n * hop;
    for (int i = 0; i < win; ++i) frame[i] = src[i] * window[i];
    fft.Compute(frame, power);
    for (int m = 0; m < cfg.n_mels; ++m) {
      const auto weights = fb.weights.row(m);
      double e = 0.0;
      for (int k = 0; k < fft.bins(); ++k) e += weights[k] * power[k];
      out.values.at(n, m) = static_cast<float>(std::log10(e + cfg.log_floor));
    }
  }
  return out;
}

void NormalizePerBin(MelSpectrogram& m) {
  const std::int64_t n = m.n_frames();
  if (n == 0) return;
  for (std::int64_t b = 0; b < m.n_mels(); ++b) {
    double mean = 0.0;
    for (std::int64_t t = 0; t < n; ++t) mean += m.values.at(t, b);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::int64_t t = 0; t < n; ++t) {
      const double d = m.values.at(t, b) - mean;
      var += d * d;
    }
    var /= static_cast<double>(n);
    const double scale = var > 1e-12 ? 1.0 / std::sqrt(var) : 1.0;
    for (std::int64_t t = 0; t < n; ++t) {
      m.values.at(t, b) = static_cast<float>((m.values.at(t, b) - mean) * scale);
    }
  }
}

std::int64_t PatchCount(std::int64_t extent, std::int64_t width,
                        std::int64_t stride) {
  if (width <= 0 || stride <= 0) {
    Fail(ErrorKind::kInvalidConfig, "patch width and stride must be positive");
  }
  if (extent < width) return 0;
  return (extent - width) / stride + 1;
}

PatchSequence ExtractPatchFrames(const MelSpectrogram& m, int patch_width,
                                 int stride) {
  const std::int64_t count = PatchCount(m.n_frames(), patch_width, stride);
  if (count == 0) {
    Fail(ErrorKind::kEmptyInput, "fewer mel frames than one patch width");
  }
  const double hop_s = m.config.hop_ms / 1000.0;
  PatchSequence seq;
  seq.geometry.frame_length_ms = std::llround(patch_width * m.config.hop_ms);
  seq.geometry.frame_skip_ms = std::llround(stride * m.config.hop_ms);
  seq.geometry.n_frames = count;
  seq.frames.reserve(static_cast<std::size_t>(count));
  for (std::int64_t k = 0; k < count; ++k) {
    PatchFrame p;
    p.values = Matrix(m.n_mels(), patch_width);
    for (std::int64_t b = 0; b < m.n_mels(); ++b) {
      for (int c = 0; c < patch_width; ++c) {
        p.values.at(b, c) = m.values.at(k * stride + c, b);
      }
    }
    p.center_time =
        m.origin_seconds + (static_cast<double>(k * stride) + patch_width / 2.0) * hop_s;
    seq.frames.push_back(std::move(p));
  }
  return seq;
}

std::vector<Matrix> SplitFrequencyPatches(const PatchFrame& p, int width,
                                          int stride) {
  const std::int64_t count = PatchCount(p.values.rows, width, stride);
  if (count == 0) Fail(ErrorKind::kEmptyInput, "fewer mel bins than one patch");
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t k = 0; k < count; ++k) {
    Matrix sub(width, p.values.cols);
    for (int b = 0; b < width; ++b) {
      const auto src = p.values.row(k * stride + b);
      std::copy(src.begin(), src.end(), sub.row(b).begin());
    }
    out.push_back(std::move(sub));
  }
  return out;
}

std::vector<double> FlattenPatch(const PatchFrame& p) {
  return {p.values.values.begin(), p.values.values.end()};
}

std::string ClassLabelName(ClassLabel c) {
  return c == ClassLabel::kCough ? "cough" : "non-cough";
}

PowerProfile ComputePowerProfile(std::span<const Waveform> segments,
                                 ClassLabel label, const WelchConfig& cfg) {
  if (segments.empty()) Fail(ErrorKind::kEmptyInput, "no segments to profile");
  const int n = cfg.segment_samples;
  const int step = n - cfg.overlap_samples;
  if (n <= 0 || step <= 0) {
    Fail(ErrorKind::kInvalidConfig, "Welch segment/overlap out of range");
  }
  const int sr = segments.front().sample_rate;
  const std::vector<double> window = HannWindow(n);
  double window_power = 0.0;
  for (double v : window) window_power += v * v;
  const double scale = 1.0 / (sr * window_power);

  PowerSpectrum fft(n);
  const int bins = fft.bins();
  std::vector<double> frame(n), power(bins);
  std::vector<std::vector<double>> per_segment;
  per_segment.reserve(segments.size());

  for (const Waveform& seg : segments) {
    if (seg.sample_rate != sr) {
      Fail(ErrorKind::kInvalidConfig, "segments have mixed sample rates");
    }
    if (seg.size() < n) {
      Fail(ErrorKind::kEmptyInput, "segment shorter than one Welch window");
    }
    std::vector<double> psd(bins, 0.0);
    std::int64_t n_windows = 0;
    for (std::int64_t start = 0; start + n <= seg.size(); start += step) {
      for (int i = 0; i < n; ++i) frame[i] = seg.samples[start + i] * window[i];
      fft.Compute(frame, power);
      for (int k = 0; k < bins; ++k) psd[k] += power[k];
      ++n_windows;
    }
    for (int k = 0; k < bins; ++k) {
      const bool one_sided = k != 0 && !(n % 2 == 0 && k == bins - 1);
      const double p = psd[k] / n_windows * scale * (one_sided ? 2.0 : 1.0);
      psd[k] = 10.0 * std::log10(p + cfg.floor);
    }
    per_segment.push_back(std::move(psd));
  }

  PowerProfile prof;
  prof.class_label = label;
  const double count = static_cast<double>(segments.size());
  prof.freqs.resize(bins);
  prof.mean_db.resize(bins);
  prof.std_db.resize(bins);
  for (int k = 0; k < bins; ++k) {
    prof.freqs[k] = static_cast<double>(k) * sr / n;
    double mean = 0.0;
    for (const auto& db : per_segment) mean += db[k];
    mean /= count;
    double var = 0.0;
    for (const auto& db : per_segment) var += (db[k] - mean) * (db[k] - mean);
    prof.mean_db[k] = mean;
    prof.std_db[k] = std::sqrt(var / count);
  }
  return prof;
}

std::vector<std::uint8_t> EncodeCep1(const Matrix& m) {
  ByteWriter w;
  w.PutString("CEP1");
  w.PutU32(static_cast<std::uint32_t>(m.rows));
  w.PutU32(static_cast<std::uint32_t>(m.cols));
  w.PutF32s(m.values);
  return w.Take();
}

Matrix DecodeCep1(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (bytes.size() < 12 || r.GetString(4) != "CEP1") {
    Fail(ErrorKind::kFormat, "CEP1: bad magic");
  }
  Matrix m;
  m.rows = r.GetU32();
  m.cols = r.GetU32();
  const auto n = static_cast<std::size_t>(m.rows * m.cols);
  if (r.remaining() != 4 * n) {
    Fail(ErrorKind::kFormat, "CEP1: payload size disagrees with rows*cols");
  }
  m.values = r.GetF32s(n);
  return m;
}

void WriteSpectrogram(const std::filesystem::path& path, const MelSpectrogram& m) {
  WriteFileAtomic(path, EncodeCep1(m.values));
  nlohmann::json side = {{"kind", "log_mel"},
                         {"rows", m.values.rows},
                         {"cols", m.values.cols},
                         {"sample_rate", m.sample_rate},
                         {"origin_seconds", m.origin_seconds},
                         {"mel", MelConfigJson(m.config)}};
  WriteFileAtomic(std::filesystem::path(path.string() + ".json"), side.dump(2));
}

MelSpectrogram ReadSpectrogram(const std::filesystem::path& path) {
  MelSpectrogram m;
  m.values = DecodeCep1(ReadFileBytes(path));
  const auto side =
      nlohmann::json::parse(ReadFileText(std::filesystem::path(path.string() + ".json")));
  m.config = MelConfigFromJson(side.at("mel"));
  m.sample_rate = side.value("sample_rate", kCanonicalSampleRate);
  m.origin_seconds = side.value("origin_seconds", 0.0);
  return m;
}

void WriteProfile(const std::filesystem::path& path, const PowerProfile& p) {
  Matrix m(static_cast<std::int64_t>(p.freqs.size()), 3);
  for (std::size_t i = 0; i < p.freqs.size(); ++i) {
    const auto r = static_cast<std::int64_t>(i);
    m.at(r, 0) = static_cast<float>(p.freqs[i]);
    m.at(r, 1) = static_cast<float>(p.mean_db[i]);
    m.at(r, 2) = static_cast<float>(p.std_db[i]);
  }
  WriteFileAtomic(path, EncodeCep1(m));
  nlohmann::json side = {{"kind", "power_profile"},
                         {"columns", {"freq_hz", "mean_db", "std_db"}},
                         {"class_label", ClassLabelName(p.class_label)}};
  WriteFileAtomic(std::filesystem::path(path.string() + ".json"), side.dump(2));
}

std::string SpectrogramCsv(const MelSpectrogram& m) {
  std::ostringstream os;
  os << "frame,time_s";
  for (std::int64_t b = 0; b < m.n_mels(); ++b) os << ",mel" << b;
  os << '\n';
  const double hop_s = m.config.hop_ms / 1000.0;
  for (std::int64_t t = 0; t < m.n_frames(); ++t) {
    os << t << ',' << m.origin_seconds + t * hop_s;
    for (std::int64_t b = 0; b < m.n_mels(); ++b) os << ',' << m.values.at(t, b);
    os << '\n';
  }
  return os.str();
}

std::string ProfileCsv(const PowerProfile& p) {
  std::ostringstream os;
  os << "freq_hz,mean_db,std_db,class\n";
  for (std::size_t i = 0; i < p.freqs.size(); ++i) {
    os << p.freqs[i] << ',' << p.mean_db[i] << ',' << p.std_db[i] << ','
       << ClassLabelName(p.class_label) << '\n';
  }
  return os.str();
}

}  // namespace coughep
