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

#include "dbrec/data/raw.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "dbrec/common/errors.hpp"

namespace dbrec::data {

RawFormat parse_format(std::string_view name) {
  if (name == "movielens") return RawFormat::kMovieLens;
  if (name == "amazon") return RawFormat::kAmazon;
  if (name == "gowalla") return RawFormat::kGowalla;
  throw ConfigError("unknown dataset format '" + std::string(name) +
                    "' (expected movielens, amazon or gowalla)");
}

std::string format_name(RawFormat format) {
  switch (format) {
    case RawFormat::kMovieLens: return "movielens";
    case RawFormat::kAmazon: return "amazon";
    case RawFormat::kGowalla: return "gowalla";
  }
  return "unknown";
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line, std::string_view sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + sep.size();
  }
}

double parse_rating(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("invalid rating '" + std::string(field) + "'", line_no);
  }
  return value;
}

}  // namespace

RawData parse_raw(std::istream& in, RawFormat format) {
  RawData data;
  std::unordered_set<std::string> users;
  std::unordered_set<std::string> items;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    RawRecord rec;
    switch (format) {
      case RawFormat::kMovieLens:
      case RawFormat::kAmazon: {
        const auto fields =
            split_fields(line, format == RawFormat::kMovieLens ? "::" : ",");
        if (fields.size() != 3 && fields.size() != 4) {
          throw ParseError("expected user, item, rating[, timestamp]; got " +
                               std::to_string(fields.size()) + " fields",
                           line_no);
        }
        rec.user = std::string(fields[0]);
        rec.item = std::string(fields[1]);
        rec.rating = parse_rating(fields[2], line_no);
        if (fields.size() == 4) rec.timestamp = std::string(fields[3]);
        break;
      }
      case RawFormat::kGowalla: {
        const auto fields = split_fields(line, "\t");
        if (fields.size() != 5) {
          throw ParseError("expected user, time, lat, lon, location; got " +
                               std::to_string(fields.size()) + " fields",
                           line_no);
        }
        rec.user = std::string(fields[0]);
        rec.item = std::string(fields[4]);
        rec.rating = 1.0;
        rec.timestamp = std::string(fields[1]);
        break;
      }
    }
    if (rec.user.empty() || rec.item.empty()) {
      throw ParseError("empty user or item id", line_no);
    }
    users.insert(rec.user);
    items.insert(rec.item);
    data.records.push_back(std::move(rec));
  }
  if (data.records.empty()) throw ParseError("input contains no records");
  data.num_users = users.size();
  data.num_items = items.size();
  return data;
}

RawData load_raw(const std::filesystem::path& path, RawFormat format) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open raw data file " + path.string());
  try {
    return parse_raw(in, format);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::vector<RawPair> to_implicit(const RawData& raw, RawFormat format) {
  std::vector<RawPair> pairs;
  for (const RawRecord& r : raw.records) {
    if (format != RawFormat::kGowalla && !(r.rating > 3.0)) continue;
    pairs.push_back({r.user, r.item});
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

namespace {

// Returns true if anything was removed.
bool filter_items(std::vector<RawPair>& pairs, std::size_t min_users) {
  std::unordered_map<std::string, std::size_t> degree;
  for (const RawPair& p : pairs) ++degree[p.item];
  const std::size_t before = pairs.size();
  std::erase_if(pairs, [&](const RawPair& p) { return degree[p.item] < min_users; });
  return pairs.size() != before;
}

bool filter_users(std::vector<RawPair>& pairs, std::size_t min_positives) {
  std::unordered_map<std::string, std::size_t> degree;
  for (const RawPair& p : pairs) ++degree[p.user];
  const std::size_t before = pairs.size();
  std::erase_if(pairs, [&](const RawPair& p) { return degree[p.user] < min_positives; });
  return pairs.size() != before;
}

}  // namespace

std::vector<RawPair> core_filter(std::vector<RawPair> pairs, const FilterOptions& options) {
  bool changed = true;
  while (changed) {
    changed = filter_items(pairs, options.min_item_users);
    changed = filter_users(pairs, options.min_user_positives) || changed;
    if (!options.fixpoint) break;
  }
  if (pairs.empty()) {
    throw ConfigError("no interactions survive filtering (min_user_positives=" +
                      std::to_string(options.min_user_positives) + ", min_item_users=" +
                      std::to_string(options.min_item_users) +
                      "); lower the thresholds");
  }
  return pairs;
}

}  // namespace dbrec::data
