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

#include "dbrec/data/sampling.hpp"

#include <algorithm>
#include <unordered_set>

#include "dbrec/common/errors.hpp"

namespace dbrec::data {

namespace {

// Rejection sampling without replacement from [0, n) minus `excluded`.
template <typename IsExcluded>
std::vector<std::uint32_t> sample_distinct(std::size_t n, std::size_t count,
                                           std::size_t num_excluded,
                                           IsExcluded&& is_excluded, Rng& rng) {
  if (num_excluded > n || count > n - num_excluded) {
    throw SamplingError("requested " + std::to_string(count) + " samples but only " +
                        std::to_string(n - std::min(n, num_excluded)) +
                        " items are eligible");
  }
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
  std::vector<std::uint32_t> out;
  out.reserve(count);
  // Dense fallback once rejection would be slow.
  if (n - num_excluded < 4 * count + 16) {
    std::vector<std::uint32_t> eligible;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (!is_excluded(i)) eligible.push_back(i);
    }
    for (std::size_t k = 0; k < count; ++k) {
      std::uniform_int_distribution<std::size_t> at(k, eligible.size() - 1);
      std::swap(eligible[k], eligible[at(rng)]);
      out.push_back(eligible[k]);
    }
    return out;
  }
  while (out.size() < count) {
    const std::uint32_t c = pick(rng);
    if (is_excluded(c)) continue;
    if (std::find(out.begin(), out.end(), c) != out.end()) continue;
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::vector<std::uint32_t> sample_cf_negatives(const InteractionDataset& dataset,
                                               std::uint32_t user, std::size_t count,
                                               Rng& rng) {
  if (user >= dataset.num_users()) throw ConfigError("user index out of range");
  const std::size_t excluded = dataset.train_items(user).size();
  return sample_distinct(
      dataset.num_items(), count, excluded,
      [&](std::uint32_t i) { return dataset.is_train_positive(user, i); }, rng);
}

std::vector<std::uint32_t> build_eval_candidates(const InteractionDataset& dataset,
                                                 const Interaction& held_out,
                                                 std::size_t count, std::uint64_t seed) {
  if (!dataset.is_positive(held_out.user, held_out.item)) {
    throw ProtocolError("held-out pair is not an interaction of the dataset");
  }
  Rng rng = make_rng({seed, 0xe7a1, held_out.user, held_out.item});
  const std::size_t excluded = dataset.positive_items(held_out.user).size();
  std::vector<std::uint32_t> out;
  try {
    out = sample_distinct(
        dataset.num_items(), count, excluded,
        [&](std::uint32_t i) { return dataset.is_positive(held_out.user, i); }, rng);
  } catch (const SamplingError& e) {
    throw SamplingError("cannot build " + std::to_string(count) +
                        " evaluation negatives for user " +
                        dataset.user_ids()[held_out.user] + ": " + e.what());
  }
  out.push_back(held_out.item);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

}  // namespace dbrec::data
