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

#include "dbrec/eval/evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "dbrec/common/errors.hpp"
#include "dbrec/common/rng.hpp"
#include "dbrec/data/sampling.hpp"
#include "dbrec/model/dbrec_model.hpp"

namespace dbrec::eval {

namespace {

std::vector<data::Interaction> held_out_pairs(const data::InteractionDataset& dataset,
                                              data::Split split, std::size_t max_pairs) {
  if (split == data::Split::kTrain) throw ProtocolError("cannot evaluate on the train split");
  std::vector<data::Interaction> pairs = dataset.in_split(split);
  if (pairs.empty()) throw ProtocolError("split " + data::split_name(split) + " is empty");
  if (max_pairs > 0 && pairs.size() > max_pairs) {
    std::vector<data::Interaction> subset;
    subset.reserve(max_pairs);
    for (std::size_t i = 0; i < max_pairs; ++i) subset.push_back(pairs[i * pairs.size() / max_pairs]);
    pairs = std::move(subset);
  }
  return pairs;
}

// Runs `work(begin, end)` over [0, count) in chunks on up to `threads`
// workers. Each chunk writes disjoint output slots, so results are independent
// of scheduling.
void parallel_chunks(std::size_t count, std::size_t chunk, std::size_t threads,
                     const std::function<void(std::size_t, std::size_t)>& work) {
  const std::size_t num_chunks = (count + chunk - 1) / chunk;
  threads = std::max<std::size_t>(1, std::min(threads, num_chunks));
  if (threads == 1) {
    for (std::size_t c = 0; c < num_chunks; ++c) work(c * chunk, std::min(count, (c + 1) * chunk));
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t c = next.fetch_add(1);
        if (c >= num_chunks) return;
        try {
          work(c * chunk, std::min(count, (c + 1) * chunk));
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = num_chunks;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::size_t rank_candidates(std::span<const double> scores,
                            std::span<const std::uint32_t> candidates,
                            std::uint32_t held_out_item) {
  if (scores.size() != candidates.size()) {
    throw ProtocolError("score count does not match candidate count");
  }
  std::vector<std::uint32_t> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ProtocolError("candidate list contains a duplicate item");
  }
  const auto it = std::find(candidates.begin(), candidates.end(), held_out_item);
  if (it == candidates.end()) throw ProtocolError("held-out item missing from candidates");
  return pessimistic_rank(scores, static_cast<std::size_t>(it - candidates.begin()));
}

std::vector<RankedPair> rank_split(const model::ModelParams& params,
                                   const model::ComponentMask& mask,
                                   const data::InteractionDataset& dataset, data::Split split,
                                   const EvalOptions& options) {
  const auto pairs = held_out_pairs(dataset, split, options.max_pairs);
  const model::Indices user_labels =
      mask.vg_branch ? model::all_group_labels(params, model::Side::kUser) : model::Indices{};
  const model::Indices item_labels =
      mask.ug_branch ? model::all_group_labels(params, model::Side::kItem) : model::Indices{};

  std::vector<RankedPair> out(pairs.size());
  parallel_chunks(pairs.size(), std::max<std::size_t>(1, options.pairs_per_batch), options.threads,
                  [&](std::size_t begin, std::size_t end) {
                    std::vector<std::vector<std::uint32_t>> cands;
                    model::Indices users;
                    model::Indices items;
                    for (std::size_t i = begin; i < end; ++i) {
                      cands.push_back(data::build_eval_candidates(
                          dataset, pairs[i], options.num_negatives, options.seed));
                      for (std::uint32_t c : cands.back()) {
                        users.push_back(pairs[i].user);
                        items.push_back(c);
                      }
                    }
                    const std::vector<double> scores =
                        model::score_pairs(params, mask, users, items, user_labels, item_labels);
                    std::size_t offset = 0;
                    for (std::size_t i = begin; i < end; ++i) {
                      const auto& c = cands[i - begin];
                      std::span<const double> s(scores.data() + offset, c.size());
                      out[i] = {pairs[i].user, pairs[i].item,
                                rank_candidates(s, c, pairs[i].item)};
                      offset += c.size();
                    }
                  });
  return out;
}

MetricReport evaluate(const model::ModelParams& params, const model::ComponentMask& mask,
                      const data::InteractionDataset& dataset, data::Split split,
                      const EvalOptions& options, std::string label) {
  const auto ranks = rank_split(params, mask, dataset, split, options);
  return compute_metrics(std::span<const RankedPair>(ranks), std::move(label));
}

MetricReport evaluate_random(const data::InteractionDataset& dataset, data::Split split,
                             const EvalOptions& options, std::uint64_t score_seed) {
  const auto pairs = held_out_pairs(dataset, split, options.max_pairs);
  std::vector<RankedPair> ranks;
  ranks.reserve(pairs.size());
  for (const auto& pair : pairs) {
    const auto cands =
        data::build_eval_candidates(dataset, pair, options.num_negatives, options.seed);
    Rng rng = make_rng({score_seed, 0x5c0e, pair.user, pair.item});
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<double> scores(cands.size());
    for (double& s : scores) s = uniform(rng);
    ranks.push_back({pair.user, pair.item, rank_candidates(scores, cands, pair.item)});
  }
  return compute_metrics(std::span<const RankedPair>(ranks), "random");
}

}  // namespace dbrec::eval
