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

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dbrec::data {

// movielens: user::item::rating::timestamp
// amazon:    user,item,rating,timestamp
// gowalla:   user<TAB>time<TAB>lat<TAB>lon<TAB>location_id
enum class RawFormat { kMovieLens, kAmazon, kGowalla };

RawFormat parse_format(std::string_view name);
std::string format_name(RawFormat format);

struct RawRecord {
  std::string user;
  std::string item;
  double rating = 0.0;  // 1.0 for check-ins
  std::optional<std::string> timestamp;
};

struct RawData {
  std::vector<RawRecord> records;
  std::size_t num_users = 0;
  std::size_t num_items = 0;
};

RawData parse_raw(std::istream& in, RawFormat format);
RawData load_raw(const std::filesystem::path& path, RawFormat format);

struct RawPair {
  std::string user;
  std::string item;
  friend auto operator<=>(const RawPair&, const RawPair&) = default;
};

// Explicit ratings above 3 become positives; every distinct check-in is a
// positive. Output is sorted and duplicate-free.
std::vector<RawPair> to_implicit(const RawData& raw, RawFormat format);

struct FilterOptions {
  std::size_t min_user_positives = 5;
  std::size_t min_item_users = 2;
  // Repeat item-then-user passes until nothing changes.
  bool fixpoint = false;
};

// Item filter first, then user filter (one pass each unless `fixpoint`).
// Throws ConfigError if nothing survives.
std::vector<RawPair> core_filter(std::vector<RawPair> pairs, const FilterOptions& options);

}  // namespace dbrec::data
