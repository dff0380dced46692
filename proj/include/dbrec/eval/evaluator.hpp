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
#include <string>
#include <vector>

#include "dbrec/data/dataset.hpp"
#include "dbrec/eval/metrics.hpp"
#include "dbrec/model/params.hpp"

namespace dbrec::eval {

struct EvalOptions {
  std::size_t num_negatives = 99;
  std::uint64_t seed = 7;      // candidate sampling seed
  std::size_t threads = 1;     // results do not depend on this
  std::size_t max_pairs = 0;   // 0 = every held-out pair of the split
  std::size_t pairs_per_batch = 16;
};

// Pessimistic rank of `held_out_item` given one score per candidate. Throws
// ProtocolError if the candidates contain duplicates or miss the held-out item.
std::size_t rank_candidates(std::span<const double> scores,
                            std::span<const std::uint32_t> candidates,
                            std::uint32_t held_out_item);

// Held-out pairs of `split` ranked against sampled negatives under the model.
// When max_pairs > 0 an evenly spaced, deterministic subset is used.
std::vector<RankedPair> rank_split(const model::ModelParams& params,
                                   const model::ComponentMask& mask,
                                   const data::InteractionDataset& dataset, data::Split split,
                                   const EvalOptions& options);

MetricReport evaluate(const model::ModelParams& params, const model::ComponentMask& mask,
                      const data::InteractionDataset& dataset, data::Split split,
                      const EvalOptions& options, std::string label);

// Same protocol with uniformly random scores (seeded); a sanity baseline
// whose expected HR@k is k / (num_negatives + 1).
MetricReport evaluate_random(const data::InteractionDataset& dataset, data::Split split,
                             const EvalOptions& options, std::uint64_t score_seed);

}  // namespace dbrec::eval
