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

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "dbrec/eval/metrics.hpp"
#include "dbrec/model/params.hpp"

namespace dbrec::eval {

// One row per report: label, pair count, HR@1..10, NDCG@1..10.
void write_metrics_csv(std::span<const MetricReport> reports, std::ostream& out);
void write_metrics_csv(std::span<const MetricReport> reports, const std::filesystem::path& path);

// Side-by-side HR@5, HR@10, NDCG@5, NDCG@10 with one column per report.
std::string format_comparison_table(std::span<const MetricReport> reports);

// HR@k and NDCG@k for every k of a single report.
std::string format_report(const MetricReport& report);

// CSV with a header and one row per user, item, user group and item group:
//   entity,index,group,components...
// Users and items carry their hard group label; group rows carry their own
// index. Users and items have d components, groups d_g.
void export_embeddings(const model::ModelParams& params, std::ostream& out);
void export_embeddings(const model::ModelParams& params, const std::filesystem::path& path);

// Shortest round-trip decimal representation.
std::string format_double(double value);

}  // namespace dbrec::eval
