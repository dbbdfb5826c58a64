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

#include <cmath>
#include <numbers>
#include <random>

#include "coughep/binary_io.hpp"
#include "coughep/features.hpp"
#include "coughep/wav.hpp"
#include "oracles.hpp"
#include "util.hpp"

using namespace coughep;

namespace {

Waveform Sine(double hz, double seconds, double amp = 0.5, int rate = 16000) {
  Waveform w;
  w.sample_rate = rate;
  w.samples.resize(static_cast<std::size_t>(std::llround(seconds * rate)));
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    w.samples[i] = static_cast<float>(amp * std::sin(2.0 * std::numbers::pi * hz * i / rate));
  }
  return w;
}

/// Dominant frequency of a signal by naive DFT over [0, rate/2].
double PeakHz(const std::vector<float>& x, int rate, int n = 4096) {
  std::vector<double> frame(x.begin(), x.begin() + std::min<std::size_t>(x.size(), n));
  const auto p = oracle::NaiveDftPower(frame, n);
  const auto k = std::max_element(p.begin() + 1, p.end()) - p.begin();
  return static_cast<double>(k) * rate / n;
}

}  // namespace

TEST_SUITE("features") {

TEST_CASE("wav: PCM16 encode/decode is bit-exact") {
  std::mt19937_64 rng(7);
  std::vector<float> s(1000);
  for (auto& v : s) v = static_cast<float>(static_cast<std::int16_t>(rng() & 0xFFFF)) / 32768.0f;
  const auto bytes = EncodeWav(s, 16000, SampleEncoding::kPcm16);
  const Waveform w = DecodeWavToMono16k(bytes);
  CHECK(w.source_encoding == SampleEncoding::kPcm16);
  REQUIRE(w.samples.size() == s.size());
  CHECK(EncodeWav(w.samples, 16000, SampleEncoding::kPcm16) == bytes);
}

TEST_CASE("wav: float32 round trip") {
  const std::vector<float> s = {0.0f, 0.25f, -0.5f, 0.999f};
  const Waveform w = DecodeWavToMono16k(EncodeWav(s, 16000, SampleEncoding::kFloat32));
  CHECK(w.source_encoding == SampleEncoding::kFloat32);
  CHECK(w.samples == s);
}

TEST_CASE("wav: 8-bit, 24-bit, 32-bit PCM and float64 decode") {
  {
    const std::vector<std::uint8_t> d = {128, 255, 0};
    const auto w = DecodeWav(testutil::RawWav(1, 1, 16000, 8, d));
    CHECK(w.interleaved[0] == doctest::Approx(0.0));
    CHECK(w.interleaved[1] == doctest::Approx(127.0 / 128.0));
    CHECK(w.interleaved[2] == doctest::Approx(-1.0));
  }
  {
    // 0x400000 = 0.5, 0xC00000 = -0.5
    const std::vector<std::uint8_t> d = {0x00, 0x00, 0x40, 0x00, 0x00, 0xC0};
    const auto w = DecodeWav(testutil::RawWav(1, 1, 16000, 24, d));
    CHECK(w.interleaved[0] == doctest::Approx(0.5));
    CHECK(w.interleaved[1] == doctest::Approx(-0.5));
  }
  {
    const std::int32_t v = 1 << 29;  // 0.25
    std::vector<std::uint8_t> d(4);
    std::memcpy(d.data(), &v, 4);
    const auto w = DecodeWav(testutil::RawWav(1, 1, 16000, 32, d));
    CHECK(w.interleaved[0] == doctest::Approx(0.25));
  }
  {
    const double v = -0.125;
    std::vector<std::uint8_t> d(8);
    std::memcpy(d.data(), &v, 8);
    const auto w = DecodeWav(testutil::RawWav(3, 1, 16000, 64, d));
    CHECK(w.interleaved[0] == doctest::Approx(-0.125));
  }
}

TEST_CASE("wav: extensible format is accepted") {
  const std::vector<std::uint8_t> d = {0x00, 0x40, 0x00, 0xC0};
  const auto w = DecodeWav(testutil::RawWav(1, 1, 16000, 16, d, /*extensible=*/true));
  REQUIRE(w.interleaved.size() == 2);
  CHECK(w.interleaved[0] == doctest::Approx(0.5));
  CHECK(w.interleaved[1] == doctest::Approx(-0.5));
}

TEST_CASE("wav: stereo is averaged to mono") {
  // L = 0.5, R = -0.25 -> 0.125
  const std::vector<std::uint8_t> d = {0x00, 0x40, 0x00, 0xE0};
  const Waveform w = DecodeWavToMono16k(testutil::RawWav(1, 2, 16000, 16, d));
  REQUIRE(w.samples.size() == 1);
  CHECK(w.samples[0] == doctest::Approx(0.125));
}

TEST_CASE("wav: malformed and unsupported inputs") {
  const std::vector<std::uint8_t> d = {0, 0, 0, 0};
  CHECK_ERROR_KIND(DecodeWav(testutil::RawWav(2, 1, 16000, 4, d)), ErrorKind::kUnsupported);
  auto good = testutil::RawWav(1, 1, 16000, 16, d);
  auto bad = good;
  bad[0] = 'X';
  CHECK_ERROR_KIND(DecodeWav(bad), ErrorKind::kFormat);
  good.resize(20);
  CHECK_ERROR_KIND(DecodeWav(good), ErrorKind::kFormat);
}

TEST_CASE("wav: resampling keeps length and frequency") {
  const Waveform w8 = Sine(440.0, 1.0, 0.5, 8000);
  const auto bytes = EncodeWav(w8.samples, 8000, SampleEncoding::kFloat32);
  const Waveform w = DecodeWavToMono16k(bytes);
  CHECK(w.sample_rate == 16000);
  CHECK(w.samples.size() == 16000);
  CHECK(std::abs(PeakHz(w.samples, 16000) - 440.0) <= 4.0);

  const auto down = ResampleSinc(Sine(440.0, 1.0, 0.5, 44100).samples, 44100, 16000);
  CHECK(down.size() == 16000);
  CHECK(std::abs(PeakHz(down, 16000) - 440.0) <= 4.0);
}

TEST_CASE("mel scale is HTK and invertible") {
  CHECK(HzToMel(0.0) == 0.0);
  CHECK(HzToMel(1000.0) == doctest::Approx(2595.0 * std::log10(1.0 + 1000.0 / 700.0)));
  for (double hz : {10.0, 440.0, 3999.0, 8000.0}) CHECK(MelToHz(HzToMel(hz)) == doctest::Approx(hz));
}

TEST_CASE("filterbank: rows sum to one and centers are mel-spaced") {
  const MelConfig cfg;
  const MelFilterbank fb = BuildMelFilterbank(cfg, 16000);
  CHECK(fb.weights.rows == 128);
  CHECK(fb.weights.cols == 513);
  const double top = 2595.0 * std::log10(1.0 + 8000.0 / 700.0);
  for (int m = 0; m < 128; ++m) {
    double sum = 0.0;
    for (float v : fb.weights.row(m)) {
      CHECK(v >= 0.0f);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-5));
    const double mel = top * (m + 1) / 129.0;
    CHECK(fb.center_hz[m] == doctest::Approx(700.0 * (std::pow(10.0, mel / 2595.0) - 1.0)));
  }
}

TEST_CASE("filterbank: too small an FFT leaves filters empty") {
  MelConfig cfg;
  cfg.fft_size = 512;
  CHECK_ERROR_KIND(BuildMelFilterbank(cfg, 16000), ErrorKind::kInvalidConfig);
}

TEST_CASE("spectrogram: frame count and first frame against a naive DFT") {
  const Waveform w = Sine(1000.0, 1.0);
  const MelConfig cfg;
  const MelSpectrogram m = ComputeMelSpectrogram(w, cfg);
  CHECK(m.n_frames() == 98);
  CHECK(m.n_mels() == 128);

  std::vector<double> frame(400);
  for (int i = 0; i < 400; ++i) {
    frame[i] = w.samples[i] * (0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / 400.0));
  }
  const auto power = oracle::NaiveDftPower(frame, 1024);
  const MelFilterbank fb = BuildMelFilterbank(cfg, 16000);
  int peak = 0;
  for (int b = 0; b < 128; ++b) {
    double e = 0.0;
    for (int k = 0; k < 513; ++k) e += fb.weights.at(b, k) * power[k];
    CHECK(m.values.at(0, b) == doctest::Approx(std::log10(e + 1e-10)).epsilon(1e-4));
    if (m.values.at(0, b) > m.values.at(0, peak)) peak = b;
  }
  // The loudest band is the one centred nearest the tone.
  int nearest = 0;
  for (int b = 0; b < 128; ++b) {
    if (std::abs(fb.center_hz[b] - 1000.0) < std::abs(fb.center_hz[nearest] - 1000.0)) nearest = b;
  }
  CHECK(std::abs(peak - nearest) <= 1);
}

TEST_CASE("spectrogram: input shorter than a window") {
  Waveform w;
  w.samples.assign(399, 0.1f);
  CHECK_ERROR_KIND(ComputeMelSpectrogram(w, MelConfig{}), ErrorKind::kEmptyInput);
  w.samples.assign(400, 0.1f);
  CHECK(ComputeMelSpectrogram(w, MelConfig{}).n_frames() == 1);
}

TEST_CASE("silence hits the log floor") {
  Waveform w;
  w.samples.assign(1600, 0.0f);
  const auto m = ComputeMelSpectrogram(w, MelConfig{});
  CHECK(m.values.at(0, 0) == doctest::Approx(-10.0));
}

TEST_CASE("per-bin normalization") {
  std::mt19937_64 rng(3);
  std::normal_distribution<float> nd(0.0f, 0.1f);
  Waveform w;
  w.samples.resize(16000);
  for (auto& s : w.samples) s = nd(rng);
  auto m = ComputeMelSpectrogram(w, MelConfig{});
  NormalizePerBin(m);
  for (int b = 0; b < 128; b += 17) {
    double mean = 0.0, sq = 0.0;
    for (int t = 0; t < m.n_frames(); ++t) mean += m.values.at(t, b);
    mean /= m.n_frames();
    for (int t = 0; t < m.n_frames(); ++t) sq += std::pow(m.values.at(t, b) - mean, 2);
    CHECK(mean == doctest::Approx(0.0).epsilon(1e-5).scale(1.0));
    CHECK(sq / m.n_frames() == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("patch geometry: 12 frequency patches, 160ms/100ms frames") {
  CHECK(PatchCount(128, 16, 10) == 12);
  CHECK(PatchCount(15, 16, 10) == 0);
  const auto m = ComputeMelSpectrogram(Sine(300.0, 1.0), MelConfig{});
  const PatchSequence seq = ExtractPatchFrames(m);
  CHECK(seq.size() == 9);  // (98 - 16) / 10 + 1
  CHECK(seq.geometry == FrameGeometry{160, 100, 9});
  CHECK(seq.frames[1].values.rows == 128);
  CHECK(seq.frames[1].values.cols == 16);
  CHECK(seq.frames[1].values.at(5, 3) == m.values.at(13, 5));
  CHECK(seq.frames[2].center_time == doctest::Approx(0.28));
  const auto sub = SplitFrequencyPatches(seq.frames[0]);
  REQUIRE(sub.size() == 12);
  CHECK(sub[11].at(0, 0) == seq.frames[0].values.at(110, 0));
  const auto flat = FlattenPatch(seq.frames[0]);
  CHECK(flat.size() == 2048);
  CHECK(flat[16 * 7 + 2] == seq.frames[0].values.at(7, 2));
}

TEST_CASE("patches need at least one full width") {
  Waveform w;
  w.samples.assign(400 + 14 * 160, 0.1f);  // 15 mel frames
  const auto m = ComputeMelSpectrogram(w, MelConfig{});
  CHECK(m.n_frames() == 15);
  CHECK_ERROR_KIND(ExtractPatchFrames(m), ErrorKind::kEmptyInput);
}

TEST_CASE("CEP1 round trip and rejection") {
  Matrix a(3, 4);
  for (std::size_t i = 0; i < a.values.size(); ++i) a.values[i] = static_cast<float>(i) * 0.5f;
  const auto bytes = EncodeCep1(a);
  CHECK(bytes.size() == 12 + 48);
  const Matrix b = DecodeCep1(bytes);
  CHECK(b.rows == 3);
  CHECK(b.cols == 4);
  CHECK(b.values == a.values);
  auto bad = bytes;
  bad[0] = 'X';
  CHECK_ERROR_KIND(DecodeCep1(bad), ErrorKind::kFormat);
  bad = bytes;
  bad.pop_back();
  CHECK_ERROR_KIND(DecodeCep1(bad), ErrorKind::kFormat);
}

TEST_CASE("spectrogram files carry their config") {
  oracle::TempDir dir("cep");
  auto m = ComputeMelSpectrogram(Sine(500.0, 0.5), MelConfig{});
  WriteSpectrogram(dir / "a.cep", m);
  const auto r = ReadSpectrogram(dir / "a.cep");
  CHECK(r.values.values == m.values.values);
  CHECK(r.config.n_mels == 128);
  CHECK(r.config.fft_size == 1024);
  CHECK(SpectrogramCsv(m).find('\n') != std::string::npos);
}

TEST_CASE("power profile peaks at the tone and has zero spread on copies") {
  const Waveform w = Sine(1000.0, 0.5);
  const std::vector<Waveform> segs = {w, w, w};
  const PowerProfile p = ComputePowerProfile(segs, ClassLabel::kCough);
  CHECK(p.freqs.size() == 257);
  CHECK(p.freqs[1] == doctest::Approx(31.25));
  const auto k = std::max_element(p.mean_db.begin(), p.mean_db.end()) - p.mean_db.begin();
  CHECK(p.freqs[k] == doctest::Approx(1000.0));
  for (double s : p.std_db) CHECK(s == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
  CHECK(ProfileCsv(p).rfind("freq_hz", 0) == 0);
}

TEST_CASE("power profile: Parseval scale of white noise") {
  // One-sided PSD of unit-variance white noise at 16kHz is 2/16000 per Hz.
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd(0.0, 1.0);
  Waveform w;
  w.samples.resize(160000);
  for (auto& s : w.samples) s = static_cast<float>(nd(rng));
  const std::vector<Waveform> segs = {w};
  const PowerProfile p = ComputePowerProfile(segs, ClassLabel::kNonCough);
  double mean = 0.0;
  for (std::size_t k = 10; k < 240; ++k) mean += p.mean_db[k];
  mean /= 230.0;
  CHECK(mean == doctest::Approx(10.0 * std::log10(2.0 / 16000.0)).epsilon(0.01));
}

TEST_CASE("power profile errors") {
  CHECK_ERROR_KIND(ComputePowerProfile({}, ClassLabel::kCough), ErrorKind::kEmptyInput);
  Waveform s;
  s.samples.assign(100, 0.0f);
  const std::vector<Waveform> segs = {s};
  CHECK_ERROR_KIND(ComputePowerProfile(segs, ClassLabel::kCough), ErrorKind::kEmptyInput);
}

}  // TEST_SUITE
