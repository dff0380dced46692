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
#include <span>
#include <vector>

#include "dbrec/data/dataset.hpp"
#include "dbrec/data/sampling.hpp"
#include "dbrec/model/hyperparams.hpp"

namespace dbrec::training {

// Seeded shuffle of the training positives for one epoch, derived from
// (seed, epoch) only.
std::vector<data::Interaction> epoch_order(const data::InteractionDataset& dataset,
                                           std::uint64_t seed, std::uint64_t epoch);

// Number of batches an epoch is cut into.
std::size_t num_batches(std::size_t num_positives, std::size_t batch_size);

// Batch `index` of an epoch: positives from `order`, CF negatives per positive
// and p group negatives per side, all drawn from a stream derived from
// (seed, epoch, index). Independent of any other batch, so batches can be
// assembled in any order or in parallel.
data::TrainBatch make_batch(const data::InteractionDataset& dataset,
                            std::span<const data::Interaction> order,
                            const model::HyperParams& hyper, std::uint64_t seed,
                            std::uint64_t epoch, std::size_t index);

}  // namespace dbrec::training
