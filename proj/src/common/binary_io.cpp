// Copyright 2026 The DBRec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dbrec/common/binary_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dbrec/common/errors.hpp"

namespace dbrec {

static_assert(std::endian::native == std::endian::little,
              "container IO assumes a little-endian host");

namespace {

template <typename T>
void append_raw(std::string& buffer, T v) {
  char raw[sizeof(T)];
  std::memcpy(raw, &v, sizeof(T));
  buffer.append(raw, sizeof(T));
}

}  // namespace

void BinaryWriter::u8(std::uint8_t v) { append_raw(buffer_, v); }
void BinaryWriter::u32(std::uint32_t v) { append_raw(buffer_, v); }
void BinaryWriter::u64(std::uint64_t v) { append_raw(buffer_, v); }
void BinaryWriter::f64(double v) { append_raw(buffer_, v); }

void BinaryWriter::str(std::string_view s) {
  u64(s.size());
  buffer_.append(s);
}

void BinaryWriter::f64s(std::span<const double> values) {
  u64(values.size());
  buffer_.append(reinterpret_cast<const char*>(values.data()),
                 values.size() * sizeof(double));
}

void BinaryWriter::u32s(std::span<const std::uint32_t> values) {
  u64(values.size());
  buffer_.append(reinterpret_cast<const char*>(values.data()),
                 values.size() * sizeof(std::uint32_t));
}

std::string_view BinaryReader::take(std::size_t n) {
  if (n > bytes_.size() - pos_) {
    throw IntegrityError("container payload truncated");
  }
  std::string_view out = bytes_.substr(pos_, n);
  pos_ += n;
  return out;
}

namespace {

template <typename T>
T read_raw(std::string_view raw) {
  T v;
  std::memcpy(&v, raw.data(), sizeof(T));
  return v;
}

}  // namespace

std::uint8_t BinaryReader::u8() { return read_raw<std::uint8_t>(take(1)); }
std::uint32_t BinaryReader::u32() { return read_raw<std::uint32_t>(take(4)); }
std::uint64_t BinaryReader::u64() { return read_raw<std::uint64_t>(take(8)); }
double BinaryReader::f64() { return read_raw<double>(take(8)); }

std::string BinaryReader::str() {
  std::uint64_t n = u64();
  return std::string(take(n));
}

std::vector<double> BinaryReader::f64s() {
  std::uint64_t n = u64();
  if (n > (bytes_.size() - pos_) / sizeof(double)) {
    throw IntegrityError("container payload truncated");
  }
  std::vector<double> out(n);
  std::string_view raw = take(n * sizeof(double));
  std::memcpy(out.data(), raw.data(), raw.size());
  return out;
}

std::vector<std::uint32_t> BinaryReader::u32s() {
  std::uint64_t n = u64();
  if (n > (bytes_.size() - pos_) / sizeof(std::uint32_t)) {
    throw IntegrityError("container payload truncated");
  }
  std::vector<std::uint32_t> out(n);
  std::string_view raw = take(n * sizeof(std::uint32_t));
  std::memcpy(out.data(), raw.data(), raw.size());
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_container(const std::filesystem::path& path, std::string_view magic,
                     std::uint32_t version, const std::string& payload) {
  if (magic.size() != 8) throw InternalError("container magic must be 8 bytes");
  BinaryWriter header;
  header.u32(version);
  header.u64(payload.size());
  BinaryWriter trailer;
  trailer.u64(fnv1a64(payload));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  out.write(magic.data(), magic.size());
  out.write(header.bytes().data(), header.bytes().size());
  out.write(payload.data(), payload.size());
  out.write(trailer.bytes().data(), trailer.bytes().size());
  if (!out) throw ConfigError("failed writing " + path.string());
}

std::string read_container(const std::filesystem::path& path,
                           std::string_view magic, std::uint32_t version) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string all = ss.str();

  constexpr std::size_t kHeader = 8 + 4 + 8;
  if (all.size() < kHeader + 8) {
    throw IntegrityError(path.string() + ": file truncated");
  }
  if (std::string_view(all).substr(0, 8) != magic) {
    throw IntegrityError(path.string() + ": bad magic");
  }
  BinaryReader header(std::string_view(all).substr(8, 12));
  const std::uint32_t found_version = header.u32();
  const std::uint64_t length = header.u64();
  if (found_version != version) {
    throw IntegrityError(path.string() + ": format version " +
                         std::to_string(found_version) + ", expected " +
                         std::to_string(version));
  }
  if (length != all.size() - kHeader - 8) {
    throw IntegrityError(path.string() + ": payload length mismatch (truncated?)");
  }
  std::string payload = all.substr(kHeader, length);
  BinaryReader trailer(std::string_view(all).substr(kHeader + length, 8));
  if (trailer.u64() != fnv1a64(payload)) {
    throw IntegrityError(path.string() + ": checksum mismatch");
  }
  return payload;
}

}  // namespace dbrec
