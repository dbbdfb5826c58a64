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

#include "coughep/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "coughep/binary_io.hpp"
#include "coughep/error.hpp"

namespace coughep {

namespace {

/// Portable draws: the std distributions are implementation-defined, and the
/// corpus must be byte-identical for a given seed.
class Draws {
 public:
  explicit Draws(std::uint64_t seed) : rng_(seed) {}

  double Uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  double Normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = Uniform();
    while (u1 <= 0.0) u1 = Uniform();
    const double u2 = Uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// RBJ band-pass biquad (constant 0dB peak gain).
class BandPass {
 public:
  BandPass(double center_hz, double q, double fs) {
    const double w0 = 2.0 * std::numbers::pi * center_hz / fs;
    const double alpha = std::sin(w0) / (2.0 * q);
    const double a0 = 1.0 + alpha;
    b0_ = alpha / a0;
    b2_ = -alpha / a0;
    a1_ = -2.0 * std::cos(w0) / a0;
    a2_ = (1.0 - alpha) / a0;
  }

  double Process(double x) {
    const double y = b0_ * x + s1_;
    s1_ = -a1_ * y + s2_;
    s2_ = b2_ * x - a2_ * y;
    return y;
  }

 private:
  double b0_, b2_, a1_, a2_;
  double s1_ = 0.0, s2_ = 0.0;
};

Millis SampleDuration(Draws& d, const SynthConfig& cfg) {
  const double ratio = cfg.event_std_ms / cfg.event_mean_ms;
  const double sigma2 = std::log1p(ratio * ratio);
  const double mu = std::log(cfg.event_mean_ms) - 0.5 * sigma2;
  const double ms = std::exp(mu + std::sqrt(sigma2) * d.Normal());
  const Millis q = std::llround(ms / kAnnotationResolutionMs) * kAnnotationResolutionMs;
  return std::clamp<Millis>(q, kAnnotationResolutionMs, cfg.max_event_ms);
}

}  // namespace

void SynthConfig::Validate() const {
  if (n_recordings < 0) Fail(ErrorKind::kInvalidConfig, "n_recordings must be >= 0");
  if (!(recording_seconds > 0.0)) Fail(ErrorKind::kInvalidConfig, "recording_seconds must be > 0");
  if (events_per_recording < 0) Fail(ErrorKind::kInvalidConfig, "events_per_recording must be >= 0");
  if (!(event_mean_ms > 0.0) || event_std_ms < 0.0) {
    Fail(ErrorKind::kInvalidConfig, "event durations must be positive");
  }
  if (!(background_rms > 0.0)) Fail(ErrorKind::kInvalidConfig, "background_rms must be > 0");
  if (!(band_low_hz > 0.0 && band_low_hz < band_high_hz && band_high_hz < 8000.0)) {
    Fail(ErrorKind::kInvalidConfig, "burst band must lie inside (0, 8000) Hz");
  }
  if (min_gap_ms < 0 || max_event_ms < kAnnotationResolutionMs) {
    Fail(ErrorKind::kInvalidConfig, "bad gap or maximum event length");
  }
}

std::vector<SynthRecording> GenerateSynthCorpus(const SynthConfig& cfg) {
  cfg.Validate();
  const int sr = kCanonicalSampleRate;
  // Whole 10ms units so annotation times and sample indices line up.
  const Millis rec_ms =
      std::llround(cfg.recording_seconds * 1000.0 / kAnnotationResolutionMs) *
      kAnnotationResolutionMs;
  const double center = std::sqrt(cfg.band_low_hz * cfg.band_high_hz);
  const double q = center / (cfg.band_high_hz - cfg.band_low_hz);
  const double event_rms = cfg.background_rms * std::pow(10.0, cfg.snr_db / 20.0);

  Draws d(cfg.seed);
  std::vector<SynthRecording> corpus;
  corpus.reserve(static_cast<std::size_t>(cfg.n_recordings));
  for (int r = 0; r < cfg.n_recordings; ++r) {
    SynthRecording rec;
    char id[64];
    std::snprintf(id, sizeof id, "%s%04d", cfg.id_prefix.c_str(), r);
    rec.id = id;

    std::vector<Millis> durations(static_cast<std::size_t>(cfg.events_per_recording));
    Millis busy = cfg.min_gap_ms * (cfg.events_per_recording + 1);
    for (auto& dur : durations) {
      dur = SampleDuration(d, cfg);
      busy += dur;
    }
    if (busy > rec_ms) {
      Fail(ErrorKind::kInvalidConfig,
           "cannot pack " + std::to_string(cfg.events_per_recording) + " events (" +
               std::to_string(busy) + "ms with gaps) into a " + std::to_string(rec_ms) +
               "ms recording");
    }
    // Spread the slack over the k+1 gaps with random weights, in 10ms units.
    const Millis slack_units = (rec_ms - busy) / kAnnotationResolutionMs;
    std::vector<double> weights(durations.size() + 1);
    double wsum = 0.0;
    for (auto& w : weights) {
      w = -std::log(std::max(d.Uniform(), 1e-300));
      wsum += w;
    }
    std::vector<Millis> gaps(weights.size());
    Millis used = 0;
    for (std::size_t g = 0; g < weights.size(); ++g) {
      const auto units = static_cast<Millis>(std::floor(weights[g] / wsum * slack_units));
      gaps[g] = cfg.min_gap_ms + units * kAnnotationResolutionMs;
      used += units;
    }
    (void)used;

    rec.audio.sample_rate = sr;
    rec.audio.source_encoding = SampleEncoding::kPcm16;
    rec.audio.samples.resize(static_cast<std::size_t>(rec_ms * sr / 1000));
    for (auto& s : rec.audio.samples) s = static_cast<float>(cfg.background_rms * d.Normal());

    rec.annotations.recording_id = rec.id;
    rec.annotations.recording_duration_ms = rec_ms;
    Millis t = 0;
    for (std::size_t e = 0; e < durations.size(); ++e) {
      t += gaps[e];
      const Millis start = t, end = t + durations[e];
      rec.annotations.annotations.push_back({start, end, EventLabel::kCough});
      t = end;

      const std::int64_t a = start * sr / 1000, b = end * sr / 1000;
      std::vector<double> burst(static_cast<std::size_t>(b - a));
      BandPass f1(center, q, sr), f2(center, q, sr);
      double power = 0.0;
      for (auto& x : burst) {
        x = f2.Process(f1.Process(d.Normal()));
        power += x * x;
      }
      const double gain = event_rms / std::sqrt(power / static_cast<double>(burst.size()));
      // 5ms raised-cosine edges keep the bursts click-free.
      const auto taper = static_cast<std::int64_t>(sr / 200);
      const auto len = static_cast<std::int64_t>(burst.size());
      for (std::int64_t i = 0; i < len; ++i) {
        double env = 1.0;
        const std::int64_t edge = std::min(i, len - 1 - i);
        if (edge < taper) env = 0.5 - 0.5 * std::cos(std::numbers::pi * edge / taper);
        auto& s = rec.audio.samples[static_cast<std::size_t>(a + i)];
        s = static_cast<float>(std::clamp(s + gain * env * burst[static_cast<std::size_t>(i)],
                                          -1.0, 1.0));
      }
    }
    corpus.push_back(std::move(rec));
  }
  return corpus;
}

void WriteSynthCorpus(const std::filesystem::path& dir,
                      const std::vector<SynthRecording>& corpus) {
  for (const auto& rec : corpus) {
    WriteWav(dir / "audio" / (rec.id + ".wav"), rec.audio);
    WriteFileAtomic(dir / "annotations" / (rec.id + ".tsv"), FormatAnnotations(rec.annotations));
  }
}

}  // namespace coughep
