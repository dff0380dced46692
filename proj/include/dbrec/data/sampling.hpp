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
#include <vector>

#include "dbrec/common/rng.hpp"
#include "dbrec/data/dataset.hpp"

namespace dbrec::data {

// Training positives, their sampled CF negatives, and the shared negatives for
// the group reconstruction objectives.
struct TrainBatch {
  std::vector<std::uint32_t> users;  // positive pairs (users[i], items[i])
  std::vector<std::uint32_t> items;
  std::vector<std::vector<std::uint32_t>> cf_negatives;  // one list per positive
  std::vector<std::uint32_t> group_negative_users;
  std::vector<std::uint32_t> group_negative_items;

  std::size_t size() const { return users.size(); }
};

// `count` distinct items drawn uniformly from the items that are not among
// the user's TRAIN positives. Throws SamplingError when fewer than `count`
// items are eligible.
std::vector<std::uint32_t> sample_cf_negatives(const InteractionDataset& dataset,
                                               std::uint32_t user, std::size_t count,
                                               Rng& rng);

// 99 (by default) distinct items the user never interacted with in any split,
// plus the held-out item, in random order. Determined by (seed, user, item).
std::vector<std::uint32_t> build_eval_candidates(const InteractionDataset& dataset,
                                                 const Interaction& held_out,
                                                 std::size_t count, std::uint64_t seed);

}  // namespace dbrec::data
