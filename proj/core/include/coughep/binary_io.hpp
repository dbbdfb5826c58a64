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

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace coughep {

using Magic = std::array<char, 4>;

/// Reads a whole file; throws kIo if it cannot be opened.
std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path);
std::string ReadFileText(const std::filesystem::path& path);

/// Writes to a sibling temp file then renames over the target, so readers
/// never observe a partial file. Creates parent directories.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::span<const std::uint8_t> bytes);
void WriteFileAtomic(const std::filesystem::path& path, std::string_view text);

/// Little-endian append/extract helpers. The reader throws kFormat on
/// truncation.
class ByteWriter {
 public:
  void PutBytes(std::span<const std::uint8_t> bytes);
  void PutString(std::string_view s);
  void PutU16(std::uint16_t v);
  void PutU32(std::uint32_t v);
  void PutF32(float v);
  void PutF32s(std::span<const float> values);

  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  std::vector<std::uint8_t> Take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::span<const std::uint8_t> GetBytes(std::size_t n);
  std::string GetString(std::size_t n);
  std::uint16_t GetU16();
  std::uint32_t GetU32();
  float GetF32();
  std::vector<float> GetF32s(std::size_t n);

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }
  void Seek(std::size_t pos);

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

/// Framing shared by the HSX1 / CSQ1 / CKP1 containers:
///   magic[4] | u32 header_len | header JSON (UTF-8) | float32 payload
/// The payload length is implied by the remaining bytes and must be a
/// multiple of four.
struct HeaderedPayload {
  nlohmann::json header;
  std::vector<float> payload;
};

std::vector<std::uint8_t> EncodeHeadered(const Magic& magic,
                                         const nlohmann::json& header,
                                         std::span<const float> payload);
HeaderedPayload DecodeHeadered(const Magic& magic,
                               std::span<const std::uint8_t> bytes,
                               std::string_view what);

}  // namespace coughep
