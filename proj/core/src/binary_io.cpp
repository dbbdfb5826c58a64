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

#include "coughep/binary_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <random>
#include <system_error>

#include "coughep/error.hpp"

namespace coughep {

namespace fs = std::filesystem;

std::vector<std::uint8_t> ReadFileBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string ReadFileText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteFileAtomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) Fail(ErrorKind::kIo, "cannot create " + path.parent_path().string());
  }
  // Per-call suffix keeps concurrent writers of sibling files apart.
  thread_local std::mt19937_64 suffix_rng{std::random_device{}()};
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(suffix_rng() & 0xffffffu);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) Fail(ErrorKind::kIo, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) Fail(ErrorKind::kIo, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    Fail(ErrorKind::kIo, "cannot rename onto " + path.string());
  }
}

void WriteFileAtomic(const fs::path& path, std::string_view text) {
  WriteFileAtomic(path, std::span<const std::uint8_t>(
                            reinterpret_cast<const std::uint8_t*>(text.data()),
                            text.size()));
}

void ByteWriter::PutBytes(std::span<const std::uint8_t> bytes) {
  bytes_.insert(bytes_.end(), bytes.begin(), bytes.end());
}

void ByteWriter::PutString(std::string_view s) {
  bytes_.insert(bytes_.end(), s.begin(), s.end());
}

void ByteWriter::PutU16(std::uint16_t v) {
  bytes_.push_back(static_cast<std::uint8_t>(v & 0xff));
  bytes_.push_back(static_cast<std::uint8_t>(v >> 8));
}

void ByteWriter::PutU32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    bytes_.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
  }
}

void ByteWriter::PutF32(float v) { PutU32(std::bit_cast<std::uint32_t>(v)); }

void ByteWriter::PutF32s(std::span<const float> values) {
  bytes_.reserve(bytes_.size() + 4 * values.size());
  for (float v : values) PutF32(v);
}

std::span<const std::uint8_t> ByteReader::GetBytes(std::size_t n) {
  if (n > remaining()) {
    Fail(ErrorKind::kFormat, "truncated data: wanted " + std::to_string(n) +
                                 " bytes at offset " + std::to_string(pos_));
  }
  auto out = bytes_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::string ByteReader::GetString(std::size_t n) {
  auto b = GetBytes(n);
  return {b.begin(), b.end()};
}

std::uint16_t ByteReader::GetU16() {
  auto b = GetBytes(2);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t ByteReader::GetU32() {
  auto b = GetBytes(4);
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

float ByteReader::GetF32() { return std::bit_cast<float>(GetU32()); }

std::vector<float> ByteReader::GetF32s(std::size_t n) {
  if (n > remaining() / 4) {
    Fail(ErrorKind::kFormat, "truncated float payload");
  }
  std::vector<float> out(n);
  for (auto& v : out) v = GetF32();
  return out;
}

void ByteReader::Seek(std::size_t pos) {
  if (pos > bytes_.size()) Fail(ErrorKind::kFormat, "seek past end");
  pos_ = pos;
}

std::vector<std::uint8_t> EncodeHeadered(const Magic& magic,
                                         const nlohmann::json& header,
                                         std::span<const float> payload) {
  ByteWriter w;
  w.PutString(std::string_view(magic.data(), magic.size()));
  const std::string text = header.dump();
  w.PutU32(static_cast<std::uint32_t>(text.size()));
  w.PutString(text);
  w.PutF32s(payload);
  return w.Take();
}

HeaderedPayload DecodeHeadered(const Magic& magic,
                               std::span<const std::uint8_t> bytes,
                               std::string_view what) {
  ByteReader r(bytes);
  if (bytes.size() < 8) {
    Fail(ErrorKind::kFormat, std::string(what) + ": file too short");
  }
  const std::string got = r.GetString(4);
  if (std::memcmp(got.data(), magic.data(), 4) != 0) {
    Fail(ErrorKind::kFormat, std::string(what) + ": bad magic '" + got + "'");
  }
  const std::uint32_t header_len = r.GetU32();
  HeaderedPayload out;
  try {
    out.header = nlohmann::json::parse(r.GetString(header_len));
  } catch (const nlohmann::json::parse_error& e) {
    Fail(ErrorKind::kFormat, std::string(what) + ": bad header JSON: " + e.what());
  }
  if (!out.header.is_object()) {
    Fail(ErrorKind::kFormat, std::string(what) + ": header is not an object");
  }
  if (r.remaining() % 4 != 0) {
    Fail(ErrorKind::kFormat,
         std::string(what) + ": payload is not a whole number of float32");
  }
  out.payload = r.GetF32s(r.remaining() / 4);
  return out;
}

}  // namespace coughep
