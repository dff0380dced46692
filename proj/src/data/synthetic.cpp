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

#include "dbrec/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "dbrec/common/errors.hpp"
#include "dbrec/common/rng.hpp"

namespace dbrec::data {

namespace {

std::string padded(char prefix, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%06zu", prefix, index);
  return buf;
}

}  // namespace

PlantedBlocks generate_planted_blocks(const PlantedBlocksConfig& config) {
  if (config.blocks == 0 || config.num_users < config.blocks ||
      config.num_items < config.blocks) {
    throw ConfigError("planted blocks: need at least one user and item per block");
  }
  PlantedBlocks out;
  out.user_block.resize(config.num_users);
  out.item_block.resize(config.num_items);
  for (std::size_t u = 0; u < config.num_users; ++u) {
    out.user_block[u] = u * config.blocks / config.num_users;
  }
  for (std::size_t i = 0; i < config.num_items; ++i) {
    out.item_block[i] = i * config.blocks / config.num_items;
  }
  Rng rng = make_rng({config.seed, 0xb10c});
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::size_t u = 0; u < config.num_users; ++u) {
    for (std::size_t i = 0; i < config.num_items; ++i) {
      const double p =
          out.user_block[u] == out.item_block[i] ? config.within : config.across;
      if (coin(rng) < p) out.pairs.push_back({padded('u', u), padded('i', i)});
    }
  }
  return out;
}

std::vector<RawRecord> generate_synthetic_ratings(const SyntheticRatingsConfig& config) {
  const std::size_t m = config.num_users;
  const std::size_t n = config.num_items;
  if (m == 0 || n == 0 || config.min_ratings_per_user >= n) {
    throw ConfigError("synthetic ratings: invalid sizes");
  }
  Rng rng = make_rng({config.seed, 0x4a71});
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::size_t> user_group(m);
  std::vector<std::size_t> item_group(n);
  std::uniform_int_distribution<std::size_t> pick_ug(0, config.user_groups - 1);
  std::uniform_int_distribution<std::size_t> pick_ig(0, config.item_groups - 1);
  for (auto& g : user_group) g = pick_ug(rng);
  for (auto& g : item_group) g = pick_ig(rng);

  // Group-level affinity: each user group loves a couple of item groups and
  // dislikes a few others.
  std::vector<double> affinity(config.user_groups * config.item_groups);
  for (double& a : affinity) a = gauss(rng);

  const std::size_t k = config.taste_dim;
  std::vector<double> user_taste(m * k);
  std::vector<double> item_taste(n * k);
  for (double& x : user_taste) x = gauss(rng) / std::sqrt(static_cast<double>(k));
  for (double& x : item_taste) x = gauss(rng);
  std::vector<double> item_quality(n);
  for (double& q : item_quality) q = 0.4 * gauss(rng);

  // Zipf-like popularity and log-normal user activity.
  std::vector<std::size_t> item_rank(n);
  std::iota(item_rank.begin(), item_rank.end(), std::size_t{0});
  std::shuffle(item_rank.begin(), item_rank.end(), rng);
  std::vector<double> popularity(n);
  for (std::size_t i = 0; i < n; ++i) {
    popularity[i] = 1.0 / std::pow(static_cast<double>(item_rank[i]) + 10.0, 0.9);
  }
  std::vector<double> activity(m);
  double activity_sum = 0.0;
  for (double& a : activity) {
    a = std::exp(1.0 * gauss(rng));
    activity_sum += a;
  }
  const double spare = static_cast<double>(config.target_ratings) -
                       static_cast<double>(m * config.min_ratings_per_user);

  std::vector<RawRecord> records;
  std::vector<double> pref(n);
  std::vector<double> weight(n);
  for (std::size_t u = 0; u < m; ++u) {
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0.0;
      for (std::size_t f = 0; f < k; ++f) dot += user_taste[u * k + f] * item_taste[i * k + f];
      pref[i] = config.group_strength *
                    affinity[user_group[u] * config.item_groups + item_group[i]] +
                config.taste_strength * dot + item_quality[i];
      weight[i] = popularity[i] * std::exp(1.2 * pref[i]);
    }
    std::size_t budget = config.min_ratings_per_user +
                         static_cast<std::size_t>(std::max(0.0, spare * activity[u] / activity_sum));
    budget = std::min(budget, n / 2);

    // Weighted sampling without replacement (exponential-key trick).
    std::vector<std::pair<double, std::size_t>> keys(n);
    for (std::size_t i = 0; i < n; ++i) {
      keys[i] = {std::log(unit(rng) + 1e-300) / weight[i], i};
    }
    std::partial_sort(keys.begin(), keys.begin() + budget, keys.end(), std::greater<>());
    for (std::size_t r = 0; r < budget; ++r) {
      const std::size_t i = keys[r].second;
      const double score = 3.3 + pref[i] + config.noise * gauss(rng);
      const int stars = static_cast<int>(std::clamp(std::lround(score), 1L, 5L));
      RawRecord rec;
      rec.user = std::to_string(u + 1);
      rec.item = std::to_string(i + 1);
      rec.rating = stars;
      rec.timestamp = std::to_string(874965758 + u * 1000 + r);
      records.push_back(std::move(rec));
    }
  }
  return records;
}

void write_movielens(const std::vector<RawRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  for (const RawRecord& r : records) {
    out << r.user << "::" << r.item << "::" << static_cast<int>(r.rating);
    if (r.timestamp) out << "::" << *r.timestamp;
    out << "\n";
  }
  if (!out) throw ConfigError("failed writing " + path.string());
}

}  // namespace dbrec::data
