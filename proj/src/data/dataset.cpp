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

#include "dbrec/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "dbrec/common/binary_io.hpp"
#include "dbrec/common/errors.hpp"
#include "dbrec/common/rng.hpp"

namespace dbrec::data {

std::string split_name(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kTest: return "test";
  }
  return "unknown";
}

InteractionDataset::InteractionDataset(std::vector<std::string> user_ids,
                                       std::vector<std::string> item_ids,
                                       std::vector<Interaction> interactions)
    : user_ids_(std::move(user_ids)),
      item_ids_(std::move(item_ids)),
      interactions_(std::move(interactions)),
      train_items_(user_ids_.size()),
      positive_items_(user_ids_.size()) {
  if (user_ids_.empty() || item_ids_.empty()) {
    throw ConfigError("dataset needs at least one user and one item");
  }
  std::vector<bool> item_in_train(item_ids_.size(), false);
  for (const Interaction& x : interactions_) {
    if (x.user >= user_ids_.size() || x.item >= item_ids_.size()) {
      throw ConfigError("interaction index out of range");
    }
    if (!positive_set_.insert(key(x.user, x.item)).second) {
      throw ConfigError("duplicate interaction (" + user_ids_[x.user] + ", " +
                        item_ids_[x.item] + ")");
    }
    positive_items_[x.user].push_back(x.item);
    if (x.split == Split::kTrain) {
      train_set_.insert(key(x.user, x.item));
      train_items_[x.user].push_back(x.item);
      item_in_train[x.item] = true;
    }
  }
  for (std::size_t u = 0; u < user_ids_.size(); ++u) {
    if (train_items_[u].empty()) {
      throw ConfigError("user '" + user_ids_[u] + "' has no training interaction");
    }
    std::sort(train_items_[u].begin(), train_items_[u].end());
    std::sort(positive_items_[u].begin(), positive_items_[u].end());
  }
  for (std::size_t i = 0; i < item_ids_.size(); ++i) {
    if (!item_in_train[i]) {
      throw ConfigError("item '" + item_ids_[i] + "' has no training interaction");
    }
  }
}

std::vector<Interaction> InteractionDataset::in_split(Split s) const {
  std::vector<Interaction> out;
  for (const Interaction& x : interactions_) {
    if (x.split == s) out.push_back(x);
  }
  return out;
}

std::size_t InteractionDataset::count(Split s) const {
  return static_cast<std::size_t>(std::count_if(
      interactions_.begin(), interactions_.end(),
      [s](const Interaction& x) { return x.split == s; }));
}

bool InteractionDataset::is_train_positive(std::uint32_t user, std::uint32_t item) const {
  return train_set_.contains(key(user, item));
}

bool InteractionDataset::is_positive(std::uint32_t user, std::uint32_t item) const {
  return positive_set_.contains(key(user, item));
}

std::span<const std::uint32_t> InteractionDataset::train_items(std::uint32_t user) const {
  return train_items_.at(user);
}

std::span<const std::uint32_t> InteractionDataset::positive_items(std::uint32_t user) const {
  return positive_items_.at(user);
}

namespace {

std::optional<std::uint32_t> find_sorted(const std::vector<std::string>& ids,
                                         const std::string& raw) {
  auto it = std::lower_bound(ids.begin(), ids.end(), raw);
  if (it == ids.end() || *it != raw) return std::nullopt;
  return static_cast<std::uint32_t>(it - ids.begin());
}

}  // namespace

std::optional<std::uint32_t> InteractionDataset::user_index(const std::string& raw) const {
  return find_sorted(user_ids_, raw);
}

std::optional<std::uint32_t> InteractionDataset::item_index(const std::string& raw) const {
  return find_sorted(item_ids_, raw);
}

InteractionDataset split(const std::vector<RawPair>& pairs, const SplitRatios& ratios,
                         std::uint64_t seed) {
  if (ratios.train < 0 || ratios.valid < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.valid + ratios.test - 1.0) > 1e-9) {
    throw ConfigError("split ratios must be nonnegative and sum to 1");
  }
  if (pairs.empty()) throw ConfigError("cannot split an empty interaction list");

  std::vector<std::string> users;
  std::vector<std::string> items;
  for (const RawPair& p : pairs) {
    users.push_back(p.user);
    items.push_back(p.item);
  }
  std::sort(users.begin(), users.end());
  users.erase(std::unique(users.begin(), users.end()), users.end());
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());

  std::vector<Interaction> xs;
  xs.reserve(pairs.size());
  for (const RawPair& p : pairs) {
    const auto u = std::lower_bound(users.begin(), users.end(), p.user) - users.begin();
    const auto i = std::lower_bound(items.begin(), items.end(), p.item) - items.begin();
    xs.push_back({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(i), Split::kTrain});
  }
  std::sort(xs.begin(), xs.end(), [](const Interaction& a, const Interaction& b) {
    return std::pair(a.user, a.item) < std::pair(b.user, b.item);
  });
  if (std::adjacent_find(xs.begin(), xs.end(), [](const Interaction& a, const Interaction& b) {
        return a.user == b.user && a.item == b.item;
      }) != xs.end()) {
    throw ConfigError("duplicate (user, item) pairs passed to split");
  }

  const std::size_t n = xs.size();
  const auto n_train = static_cast<std::size_t>(std::llround(ratios.train * n));
  const auto n_valid = std::min(n - n_train, static_cast<std::size_t>(std::llround(ratios.valid * n)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = make_rng({seed, 0x5b117});
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t r = 0; r < n; ++r) {
    xs[order[r]].split = r < n_train ? Split::kTrain
                         : r < n_train + n_valid ? Split::kValid
                                                 : Split::kTest;
  }

  // Repair: the first (lowest item index) held-out interaction of a user with
  // no training data moves to train; then the same for items.
  std::vector<std::size_t> user_train(users.size(), 0);
  std::vector<std::size_t> item_train(items.size(), 0);
  for (const Interaction& x : xs) {
    if (x.split == Split::kTrain) {
      ++user_train[x.user];
      ++item_train[x.item];
    }
  }
  for (Interaction& x : xs) {
    if (user_train[x.user] == 0 && x.split != Split::kTrain) {
      x.split = Split::kTrain;
      ++user_train[x.user];
      ++item_train[x.item];
    }
  }
  for (Interaction& x : xs) {
    if (item_train[x.item] == 0 && x.split != Split::kTrain) {
      x.split = Split::kTrain;
      ++user_train[x.user];
      ++item_train[x.item];
    }
  }
  return InteractionDataset(std::move(users), std::move(items), std::move(xs));
}

namespace {

constexpr std::string_view kDatasetMagic = "DBRECDAT";
constexpr std::uint32_t kDatasetVersion = 1;

}  // namespace

void save_dataset(const InteractionDataset& dataset, const std::filesystem::path& path) {
  BinaryWriter w;
  w.u64(dataset.num_users());
  for (const std::string& id : dataset.user_ids()) w.str(id);
  w.u64(dataset.num_items());
  for (const std::string& id : dataset.item_ids()) w.str(id);
  w.u64(dataset.interactions().size());
  for (const Interaction& x : dataset.interactions()) {
    w.u32(x.user);
    w.u32(x.item);
    w.u8(static_cast<std::uint8_t>(x.split));
  }
  write_container(path, kDatasetMagic, kDatasetVersion, w.bytes());
}

InteractionDataset load_dataset(const std::filesystem::path& path) {
  const std::string payload = read_container(path, kDatasetMagic, kDatasetVersion);
  BinaryReader r(payload);
  std::vector<std::string> users(r.u64());
  for (std::string& id : users) id = r.str();
  std::vector<std::string> items(r.u64());
  for (std::string& id : items) id = r.str();
  std::vector<Interaction> xs(r.u64());
  for (Interaction& x : xs) {
    x.user = r.u32();
    x.item = r.u32();
    const std::uint8_t s = r.u8();
    if (s > 2) throw IntegrityError(path.string() + ": invalid split label");
    x.split = static_cast<Split>(s);
  }
  if (!r.at_end()) throw IntegrityError(path.string() + ": trailing bytes in payload");
  return InteractionDataset(std::move(users), std::move(items), std::move(xs));
}

}  // namespace dbrec::data
