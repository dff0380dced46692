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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

namespace dbrec::eval {

inline constexpr std::size_t kMaxCutoff = 10;

// 1-based rank of the held-out item among its candidates. Ties are broken
// pessimistically: every other candidate scoring >= the held-out item counts
// as ranked above it.
std::size_t pessimistic_rank(std::span<const double> scores, std::size_t held_out_position);

// 1 if rank <= k, else 0.
double hit_at(std::size_t rank, std::size_t k);
// 1 / log2(rank + 1) if rank <= k, else 0.
double ndcg_at(std::size_t rank, std::size_t k);

struct RankedPair {
  std::uint32_t user = 0;
  std::uint32_t item = 0;
  std::size_t rank = 0;
};

// HR@k and NDCG@k for k = 1..10 averaged over the held-out pairs.
struct MetricReport {
  std::string label;
  std::size_t num_pairs = 0;
  std::array<double, kMaxCutoff> hr{};    // hr[k - 1]
  std::array<double, kMaxCutoff> ndcg{};  // ndcg[k - 1]

  double hr_at(std::size_t k) const { return hr.at(k - 1); }
  double ndcg_at(std::size_t k) const { return ndcg.at(k - 1); }
};

MetricReport compute_metrics(std::span<const RankedPair> ranks, std::string label);
MetricReport compute_metrics(std::span<const std::size_t> ranks, std::string label);

}  // namespace dbrec::eval
