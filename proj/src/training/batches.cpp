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

#include "dbrec/training/batches.hpp"

#include <algorithm>

#include "dbrec/common/errors.hpp"
#include "dbrec/common/rng.hpp"

namespace dbrec::training {

std::vector<data::Interaction> epoch_order(const data::InteractionDataset& dataset,
                                           std::uint64_t seed, std::uint64_t epoch) {
  std::vector<data::Interaction> order = dataset.in_split(data::Split::kTrain);
  Rng rng = make_rng({seed, 0x5f1e, epoch});
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

std::size_t num_batches(std::size_t num_positives, std::size_t batch_size) {
  return (num_positives + batch_size - 1) / batch_size;
}

data::TrainBatch make_batch(const data::InteractionDataset& dataset,
                            std::span<const data::Interaction> order,
                            const model::HyperParams& hyper, std::uint64_t seed,
                            std::uint64_t epoch, std::size_t index) {
  const std::size_t begin = index * hyper.batch_size;
  if (begin >= order.size()) throw ConfigError("batch index past the end of the epoch");
  const std::size_t end = std::min(order.size(), begin + hyper.batch_size);

  Rng rng = make_rng({seed, 0xba7c, epoch, index});
  data::TrainBatch batch;
  for (std::size_t r = begin; r < end; ++r) {
    batch.users.push_back(order[r].user);
    batch.items.push_back(order[r].item);
    batch.cf_negatives.push_back(
        data::sample_cf_negatives(dataset, order[r].user, hyper.cf_negatives, rng));
  }
  std::uniform_int_distribution<std::uint32_t> any_user(
      0, static_cast<std::uint32_t>(dataset.num_users() - 1));
  std::uniform_int_distribution<std::uint32_t> any_item(
      0, static_cast<std::uint32_t>(dataset.num_items() - 1));
  for (std::size_t s = 0; s < hyper.group_negatives; ++s) {
    batch.group_negative_users.push_back(any_user(rng));
  }
  for (std::size_t s = 0; s < hyper.group_negatives; ++s) {
    batch.group_negative_items.push_back(any_item(rng));
  }
  return batch;
}

}  // namespace dbrec::training
