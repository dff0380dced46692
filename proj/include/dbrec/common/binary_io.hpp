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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dbrec {

// Little-endian append-only byte buffer used for checkpoint and dataset
// containers.
class BinaryWriter {
 public:
  void u8(std::uint8_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void str(std::string_view s);
  void f64s(std::span<const double> values);
  void u32s(std::span<const std::uint32_t> values);

  const std::string& bytes() const { return buffer_; }

 private:
  std::string buffer_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::string_view bytes) : bytes_(bytes) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::string str();
  std::vector<double> f64s();
  std::vector<std::uint32_t> u32s();

  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  std::string_view take(std::size_t n);

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::uint64_t fnv1a64(std::string_view bytes);

// Container layout: 8-byte magic, u32 version, u64 payload length, payload,
// u64 FNV-1a checksum of the payload.
void write_container(const std::filesystem::path& path, std::string_view magic,
                     std::uint32_t version, const std::string& payload);

// Returns the payload; throws IntegrityError on any mismatch, including a
// version different from `version`.
std::string read_container(const std::filesystem::path& path,
                           std::string_view magic, std::uint32_t version);

}  // namespace dbrec
