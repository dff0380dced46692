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

// Fixtures shared by the unit and acceptance tests.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "dbrec/data/dataset.hpp"
#include "dbrec/data/sampling.hpp"
#include "dbrec/model/params.hpp"

namespace dbrec::testing {

inline std::string padded(char prefix, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%04zu", prefix, i);
  return buf;
}

// User u likes the `span` consecutive items starting at u * stride (mod n),
// stride = ceil(n / m); the first two go to validation and test, the rest to
// training. With span - 2 >= stride every item has a training interaction. Ids
// are zero padded so dense indices equal the generator's indices.
inline data::InteractionDataset ring_dataset(std::size_t num_users, std::size_t num_items,
                                             std::size_t span) {
  std::vector<std::string> users;
  std::vector<std::string> items;
  for (std::size_t u = 0; u < num_users; ++u) users.push_back(padded('u', u));
  for (std::size_t i = 0; i < num_items; ++i) items.push_back(padded('i', i));
  const std::size_t stride = (num_items + num_users - 1) / num_users;
  std::vector<data::Interaction> inter;
  for (std::size_t u = 0; u < num_users; ++u) {
    for (std::size_t j = 0; j < span; ++j) {
      const auto split = j == 0   ? data::Split::kValid
                         : j == 1 ? data::Split::kTest
                                  : data::Split::kTrain;
      inter.push_back({static_cast<std::uint32_t>(u),
                       static_cast<std::uint32_t>((u * stride + j) % num_items), split});
    }
  }
  return data::InteractionDataset(users, items, inter);
}

// Hyperparameters of the small instance used for gradient checks.
inline model::HyperParams toy_hyper() {
  model::HyperParams h;
  h.embedding_dim = 8;
  h.group_dim = 4;
  h.num_groups = 3;
  h.hidden_uv = {6, 4};
  h.hidden_ug = {5, 3};
  h.hidden_vg = {5, 3};
  h.hidden_hierarchy = {6, 5};
  h.batch_size = 4;
  h.cf_negatives = 2;
  h.group_negatives = 2;
  h.alpha = 0.5;
  h.seed = 11;
  return h;
}

// A hand-made batch over 7 users and 11 items.
inline data::TrainBatch toy_batch() {
  data::TrainBatch b;
  b.users = {0, 3, 5, 6};
  b.items = {1, 4, 9, 10};
  b.cf_negatives = {{2, 7}, {0, 8}, {3, 6}, {5, 1}};
  b.group_negative_users = {2, 4};
  b.group_negative_items = {0, 6};
  return b;
}

// Scales every weight so activations stay away from ReLU kinks and the margin
// hinge stays active; keeps the finite-difference oracle well conditioned.
inline void spread_values(model::ModelParams& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (auto* t : p.all()) {
    for (double& v : t->values) v = u(rng);
  }
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name)
      : path(std::filesystem::temp_directory_path() / ("dbrec_test_" + name)) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::filesystem::path operator/(const std::string& leaf) const { return path / leaf; }
};

}  // namespace dbrec::testing
