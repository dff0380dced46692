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

#include "dbrec/eval/metrics.hpp"

#include <cmath>
#include <vector>

#include "dbrec/common/errors.hpp"

namespace dbrec::eval {

std::size_t pessimistic_rank(std::span<const double> scores, std::size_t held_out_position) {
  if (held_out_position >= scores.size()) {
    throw ProtocolError("held-out position outside the candidate list");
  }
  const double target = scores[held_out_position];
  if (!std::isfinite(target)) throw NumericError("held-out item has a non-finite score");
  std::size_t rank = 1;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i == held_out_position) continue;
    if (!std::isfinite(scores[i])) throw NumericError("candidate has a non-finite score");
    if (scores[i] >= target) ++rank;
  }
  return rank;
}

double hit_at(std::size_t rank, std::size_t k) {
  if (rank == 0) throw ProtocolError("ranks are 1-based");
  return rank <= k ? 1.0 : 0.0;
}

double ndcg_at(std::size_t rank, std::size_t k) {
  if (rank == 0) throw ProtocolError("ranks are 1-based");
  return rank <= k ? 1.0 / std::log2(static_cast<double>(rank) + 1.0) : 0.0;
}

MetricReport compute_metrics(std::span<const std::size_t> ranks, std::string label) {
  if (ranks.empty()) throw ProtocolError("no held-out pairs to evaluate");
  MetricReport report;
  report.label = std::move(label);
  report.num_pairs = ranks.size();
  for (std::size_t k = 1; k <= kMaxCutoff; ++k) {
    double hr = 0.0;
    double ndcg = 0.0;
    for (std::size_t r : ranks) {
      hr += hit_at(r, k);
      ndcg += ndcg_at(r, k);
    }
    report.hr[k - 1] = hr / static_cast<double>(ranks.size());
    report.ndcg[k - 1] = ndcg / static_cast<double>(ranks.size());
  }
  return report;
}

MetricReport compute_metrics(std::span<const RankedPair> ranks, std::string label) {
  std::vector<std::size_t> plain;
  plain.reserve(ranks.size());
  for (const auto& r : ranks) plain.push_back(r.rank);
  return compute_metrics(std::span<const std::size_t>(plain), std::move(label));
}

}  // namespace dbrec::eval
