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

#include "coughep/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>
#include <optional>
#include <string>

#include "coughep/binary_io.hpp"
#include "coughep/error.hpp"

namespace coughep {

namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;
constexpr int kSincTaps = 64;

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

FmtChunk ParseFmt(std::span<const std::uint8_t> body) {
  if (body.size() < 16) Fail(ErrorKind::kFormat, "wav: fmt chunk too short");
  ByteReader r(body);
  FmtChunk f;
  f.format = r.GetU16();
  f.channels = r.GetU16();
  f.sample_rate = r.GetU32();
  r.GetU32();  // byte rate
  f.block_align = r.GetU16();
  f.bits = r.GetU16();
  if (f.format == kFormatExtensible) {
    if (body.size() < 40) {
      Fail(ErrorKind::kFormat, "wav: extensible fmt chunk too short");
    }
    r.Seek(24);
    // The sub-format GUID starts with the plain format tag.
    f.format = r.GetU16();
  }
  return f;
}

float DecodeSample(const std::uint8_t* p, const FmtChunk& f) {
  switch (f.format) {
    case kFormatPcm:
      switch (f.bits) {
        case 8:
          return (static_cast<float>(p[0]) - 128.0f) / 128.0f;
        case 16: {
          auto v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
          return static_cast<float>(v) / 32768.0f;
        }
        case 24: {
          std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
          if (v & 0x800000) v -= 0x1000000;
          return static_cast<float>(v / 8388608.0);
        }
        case 32: {
          auto v = static_cast<std::int32_t>(
              static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
              (static_cast<std::uint32_t>(p[2]) << 16) |
              (static_cast<std::uint32_t>(p[3]) << 24));
          return static_cast<float>(v / 2147483648.0);
        }
      }
      break;
    case kFormatFloat:
      if (f.bits == 32) {
        std::uint32_t u = static_cast<std::uint32_t>(p[0]) |
                          (static_cast<std::uint32_t>(p[1]) << 8) |
                          (static_cast<std::uint32_t>(p[2]) << 16) |
                          (static_cast<std::uint32_t>(p[3]) << 24);
        return std::bit_cast<float>(u);
      }
      if (f.bits == 64) {
        std::uint64_t u = 0;
        for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(p[i]) << (8 * i);
        return static_cast<float>(std::bit_cast<double>(u));
      }
      break;
  }
  Fail(ErrorKind::kUnsupported, "wav: unsupported bit depth " + std::to_string(f.bits));
}

}  // namespace

DecodedWav DecodeWav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12) Fail(ErrorKind::kFormat, "wav: file too short");
  ByteReader r(bytes);
  if (r.GetString(4) != "RIFF") Fail(ErrorKind::kFormat, "wav: missing RIFF tag");
  r.GetU32();
  if (r.GetString(4) != "WAVE") Fail(ErrorKind::kFormat, "wav: missing WAVE tag");

  std::optional<FmtChunk> fmt;
  std::span<const std::uint8_t> data;
  bool have_data = false;
  while (r.remaining() >= 8) {
    const std::string id = r.GetString(4);
    const std::uint32_t size = r.GetU32();
    // Writers sometimes leave the data size at 0 or 0xFFFFFFFF when streaming.
    const std::size_t take = std::min<std::size_t>(size, r.remaining());
    auto body = r.GetBytes(take);
    if (id == "fmt ") {
      fmt = ParseFmt(body);
    } else if (id == "data") {
      data = body;
      have_data = true;
    }
    if ((size & 1u) && r.remaining() > 0) r.GetBytes(1);
  }
  if (!fmt) Fail(ErrorKind::kFormat, "wav: no fmt chunk");
  if (!have_data) Fail(ErrorKind::kFormat, "wav: no data chunk");
  if (fmt->format != kFormatPcm && fmt->format != kFormatFloat) {
    Fail(ErrorKind::kUnsupported,
         "wav: unsupported codec tag " + std::to_string(fmt->format));
  }
  if (fmt->channels == 0 || fmt->sample_rate == 0 || fmt->bits == 0) {
    Fail(ErrorKind::kFormat, "wav: zero channels, rate or bit depth");
  }
  const std::size_t bytes_per_sample = (fmt->bits + 7) / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt->channels;
  if (fmt->block_align != 0 && fmt->block_align != frame_bytes) {
    Fail(ErrorKind::kFormat, "wav: block_align disagrees with channels*bits");
  }

  DecodedWav out;
  out.channels = fmt->channels;
  out.sample_rate = static_cast<int>(fmt->sample_rate);
  out.encoding = (fmt->format == kFormatFloat) ? SampleEncoding::kFloat32
                                               : SampleEncoding::kPcm16;
  const std::size_t n_frames = data.size() / frame_bytes;
  out.interleaved.resize(n_frames * fmt->channels);
  for (std::size_t i = 0; i < out.interleaved.size(); ++i) {
    out.interleaved[i] = DecodeSample(data.data() + i * bytes_per_sample, *fmt);
  }
  return out;
}

Waveform DecodeWavToMono16k(std::span<const std::uint8_t> bytes) {
  DecodedWav d = DecodeWav(bytes);
  const std::size_t n = d.interleaved.size() / d.channels;
  std::vector<float> mono(n);
  if (d.channels == 1) {
    mono = std::move(d.interleaved);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int c = 0; c < d.channels; ++c) acc += d.interleaved[i * d.channels + c];
      mono[i] = static_cast<float>(acc / d.channels);
    }
  }
  for (float v : mono) {
    if (!std::isfinite(v)) Fail(ErrorKind::kFormat, "wav: non-finite sample");
  }
  Waveform w;
  w.source_encoding = d.encoding;
  w.sample_rate = kCanonicalSampleRate;
  if (d.sample_rate == kCanonicalSampleRate) {
    w.samples = std::move(mono);
  } else {
    w.samples = ResampleSinc(mono, d.sample_rate, kCanonicalSampleRate);
  }
  for (float& v : w.samples) v = std::clamp(v, -1.0f, 1.0f);
  return w;
}

Waveform LoadWav(const std::filesystem::path& path) {
  return DecodeWavToMono16k(ReadFileBytes(path));
}

std::vector<std::uint8_t> EncodeWav(std::span<const float> samples,
                                    int sample_rate, SampleEncoding encoding,
                                    int channels) {
  if (sample_rate <= 0 || channels <= 0) {
    Fail(ErrorKind::kInvalidConfig, "wav: bad sample rate or channel count");
  }
  const bool is_float = encoding == SampleEncoding::kFloat32;
  const std::uint16_t bits = is_float ? 32 : 16;
  const std::uint16_t block = static_cast<std::uint16_t>(channels * bits / 8);
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * bits / 8);

  ByteWriter w;
  w.PutString("RIFF");
  w.PutU32(36 + data_bytes);
  w.PutString("WAVE");
  w.PutString("fmt ");
  w.PutU32(16);
  w.PutU16(is_float ? kFormatFloat : kFormatPcm);
  w.PutU16(static_cast<std::uint16_t>(channels));
  w.PutU32(static_cast<std::uint32_t>(sample_rate));
  w.PutU32(static_cast<std::uint32_t>(sample_rate) * block);
  w.PutU16(block);
  w.PutU16(bits);
  w.PutString("data");
  w.PutU32(data_bytes);
  for (float v : samples) {
    if (is_float) {
      w.PutF32(v);
    } else {
      const double scaled = std::nearbyint(static_cast<double>(v) * 32768.0);
      const auto q = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
      w.PutU16(static_cast<std::uint16_t>(q));
    }
  }
  return w.Take();
}

void WriteWav(const std::filesystem::path& path, const Waveform& w) {
  WriteFileAtomic(path, EncodeWav(w.samples, w.sample_rate, w.source_encoding));
}

std::vector<float> ResampleSinc(std::span<const float> input, int in_rate,
                                int out_rate) {
  if (in_rate <= 0 || out_rate <= 0) {
    Fail(ErrorKind::kInvalidConfig, "resample: rates must be positive");
  }
  if (in_rate == out_rate) return {input.begin(), input.end()};

  const double ratio = static_cast<double>(out_rate) / in_rate;
  const auto n_out = static_cast<std::size_t>(
      std::llround(static_cast<double>(input.size()) * ratio));
  // Cutoff at the lower Nyquist, in units of the input sample rate.
  const double cutoff = std::min(1.0, ratio);
  constexpr int half = kSincTaps / 2;
  const auto n_in = static_cast<std::int64_t>(input.size());

  std::vector<float> out(n_out);
  for (std::size_t m = 0; m < n_out; ++m) {
    const double x = static_cast<double>(m) / ratio;
    const auto base = static_cast<std::int64_t>(std::floor(x));
    double acc = 0.0;
    for (std::int64_t k = base - half + 1; k <= base + half; ++k) {
      if (k < 0 || k >= n_in) continue;
      const double d = x - static_cast<double>(k);
      const double arg = cutoff * d;
      const double sinc =
          (arg == 0.0) ? 1.0 : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
      const double window =
          0.5 + 0.5 * std::cos(std::numbers::pi * d / static_cast<double>(half));
      acc += input[static_cast<std::size_t>(k)] * cutoff * sinc * window;
    }
    out[m] = static_cast<float>(acc);
  }
  return out;
}

}  // namespace coughep
