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
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "dbrec/data/raw.hpp"

namespace dbrec::data {

enum class Split : std::uint8_t { kTrain = 0, kValid = 1, kTest = 2 };

std::string split_name(Split split);

struct Interaction {
  std::uint32_t user = 0;
  std::uint32_t item = 0;
  Split split = Split::kTrain;
  friend bool operator==(const Interaction&, const Interaction&) = default;
};

// Immutable, deduplicated implicit-feedback interactions with split labels.
//
// Invariants checked on construction: indices are dense, no (user, item) pair
// repeats, and every user and every item has at least one training
// interaction.
class InteractionDataset {
 public:
  InteractionDataset(std::vector<std::string> user_ids, std::vector<std::string> item_ids,
                     std::vector<Interaction> interactions);

  std::size_t num_users() const { return user_ids_.size(); }
  std::size_t num_items() const { return item_ids_.size(); }

  const std::vector<std::string>& user_ids() const { return user_ids_; }
  const std::vector<std::string>& item_ids() const { return item_ids_; }
  const std::vector<Interaction>& interactions() const { return interactions_; }

  std::vector<Interaction> in_split(Split split) const;
  std::size_t count(Split split) const;

  bool is_train_positive(std::uint32_t user, std::uint32_t item) const;
  bool is_positive(std::uint32_t user, std::uint32_t item) const;  // any split

  std::span<const std::uint32_t> train_items(std::uint32_t user) const;
  std::span<const std::uint32_t> positive_items(std::uint32_t user) const;

  std::optional<std::uint32_t> user_index(const std::string& raw_id) const;
  std::optional<std::uint32_t> item_index(const std::string& raw_id) const;

  friend bool operator==(const InteractionDataset& a, const InteractionDataset& b) {
    return a.user_ids_ == b.user_ids_ && a.item_ids_ == b.item_ids_ &&
           a.interactions_ == b.interactions_;
  }

 private:
  static std::uint64_t key(std::uint32_t u, std::uint32_t i) {
    return (static_cast<std::uint64_t>(u) << 32) | i;
  }

  std::vector<std::string> user_ids_;
  std::vector<std::string> item_ids_;
  std::vector<Interaction> interactions_;
  std::vector<std::vector<std::uint32_t>> train_items_;
  std::vector<std::vector<std::uint32_t>> positive_items_;
  std::unordered_set<std::uint64_t> train_set_;
  std::unordered_set<std::uint64_t> positive_set_;
};

struct SplitRatios {
  double train = 0.7;
  double valid = 0.1;
  double test = 0.2;
};

// Seeded global random split by interaction, followed by a repair pass that
// moves one valid/test interaction into train for every user or item left
// without training data. Raw ids are densely indexed in lexicographic order.
InteractionDataset split(const std::vector<RawPair>& pairs, const SplitRatios& ratios,
                         std::uint64_t seed);

// Versioned, checksummed binary container.
void save_dataset(const InteractionDataset& dataset, const std::filesystem::path& path);
InteractionDataset load_dataset(const std::filesystem::path& path);

}  // namespace dbrec::data
