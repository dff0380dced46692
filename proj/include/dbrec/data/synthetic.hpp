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
#include <vector>

#include "dbrec/data/raw.hpp"

namespace dbrec::data {

// Block-structured implicit feedback: user block b interacts with item block b
// with probability `within`, with every other item block with `across`.
// Raw ids are zero-padded ("u00042") so lexicographic order equals numeric
// order and dense indices coincide with the generator's indices.
struct PlantedBlocksConfig {
  std::size_t num_users = 200;
  std::size_t num_items = 300;
  std::size_t blocks = 2;
  double within = 0.3;
  double across = 0.02;
  std::uint64_t seed = 7;
};

struct PlantedBlocks {
  std::vector<RawPair> pairs;
  std::vector<std::size_t> user_block;
  std::vector<std::size_t> item_block;
};

PlantedBlocks generate_planted_blocks(const PlantedBlocksConfig& config);

// Explicit 1-5 star ratings shaped like MovieLens-100k: skewed user activity
// (at least `min_ratings_per_user`), popularity-skewed items, and preferences
// driven by latent user/item groups plus individual taste factors. Users
// preferentially rate items they like, as in real rating logs.
struct SyntheticRatingsConfig {
  std::size_t num_users = 943;
  std::size_t num_items = 1682;
  std::size_t target_ratings = 100000;
  std::size_t min_ratings_per_user = 20;
  std::size_t user_groups = 6;
  std::size_t item_groups = 8;
  std::size_t taste_dim = 8;
  double group_strength = 1.2;
  double taste_strength = 0.5;
  double noise = 0.6;
  std::uint64_t seed = 2019;
};

std::vector<RawRecord> generate_synthetic_ratings(const SyntheticRatingsConfig& config);

// Writes records as user::item::rating::timestamp lines.
void write_movielens(const std::vector<RawRecord>& records, const std::filesystem::path& path);

}  // namespace dbrec::data
