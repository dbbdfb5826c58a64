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
#include <cstring>
#include <string>
#include <vector>

#include <doctest.h>

#include "coughep/error.hpp"

/// Asserts that `expr` throws coughep::Error of the given kind.
#define CHECK_ERROR_KIND(expr, expected_kind)                                   \
  do {                                                                         \
    bool thrown_ = false;                                                      \
    try {                                                                      \
      (void)(expr);                                                            \
    } catch (const coughep::Error& e_) {                                       \
      thrown_ = true;                                                          \
      CHECK_MESSAGE(e_.kind() == (expected_kind), "message: " << e_.what());   \
    }                                                                          \
    CHECK_MESSAGE(thrown_, "expected coughep::Error from " #expr);             \
  } while (0)

namespace testutil {

/// Hand-rolled RIFF/WAVE writer for decoder tests. `data` is the raw sample
/// block; `extensible` wraps the format in WAVE_FORMAT_EXTENSIBLE.
inline std::vector<std::uint8_t> RawWav(std::uint16_t format, std::uint16_t channels,
                                        std::uint32_t rate, std::uint16_t bits,
                                        const std::vector<std::uint8_t>& data,
                                        bool extensible = false) {
  std::vector<std::uint8_t> b;
  auto put = [&](const void* p, std::size_t n) {
    const auto* c = static_cast<const std::uint8_t*>(p);
    b.insert(b.end(), c, c + n);
  };
  auto u16 = [&](std::uint16_t v) { put(&v, 2); };
  auto u32 = [&](std::uint32_t v) { put(&v, 4); };
  const std::uint32_t fmt_len = extensible ? 40 : 16;
  put("RIFF", 4);
  u32(static_cast<std::uint32_t>(4 + 8 + fmt_len + 8 + data.size()));
  put("WAVE", 4);
  put("fmt ", 4);
  u32(fmt_len);
  u16(extensible ? 0xFFFE : format);
  u16(channels);
  u32(rate);
  u32(rate * channels * bits / 8);
  u16(static_cast<std::uint16_t>(channels * bits / 8));
  u16(bits);
  if (extensible) {
    u16(22);
    u16(bits);
    u32(0);
    // SubFormat GUID: format code then the fixed KSDATAFORMAT suffix.
    u16(format);
    const std::uint8_t tail[14] = {0x00, 0x00, 0x00, 0x00, 0x10, 0x00, 0x80,
                                   0x00, 0x00, 0xAA, 0x00, 0x38, 0x9B, 0x71};
    put(tail, 14);
  }
  put("data", 4);
  u32(static_cast<std::uint32_t>(data.size()));
  put(data.data(), data.size());
  return b;
}

}  // namespace testutil
