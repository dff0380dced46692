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

#include "dbrec/eval/export.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dbrec/common/errors.hpp"
#include "dbrec/model/dbrec_model.hpp"

namespace dbrec::eval {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw InternalError("cannot format a double");
  return std::string(buf, end);
}

void write_metrics_csv(std::span<const MetricReport> reports, std::ostream& out) {
  out << "variant,num_pairs";
  for (std::size_t k = 1; k <= kMaxCutoff; ++k) out << ",HR@" << k;
  for (std::size_t k = 1; k <= kMaxCutoff; ++k) out << ",NDCG@" << k;
  out << '\n';
  for (const auto& r : reports) {
    out << r.label << ',' << r.num_pairs;
    for (double v : r.hr) out << ',' << format_double(v);
    for (double v : r.ndcg) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_metrics_csv(std::span<const MetricReport> reports, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  write_metrics_csv(reports, out);
}

std::string format_comparison_table(std::span<const MetricReport> reports) {
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-10s", "metric");
  out << buf;
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, " %10s", r.label.c_str());
    out << buf;
  }
  out << '\n';
  auto row = [&](const char* name, auto getter) {
    std::snprintf(buf, sizeof buf, "%-10s", name);
    out << buf;
    for (const auto& r : reports) {
      std::snprintf(buf, sizeof buf, " %10s", fixed4(getter(r)).c_str());
      out << buf;
    }
    out << '\n';
  };
  row("HR@5", [](const MetricReport& r) { return r.hr_at(5); });
  row("HR@10", [](const MetricReport& r) { return r.hr_at(10); });
  row("NDCG@5", [](const MetricReport& r) { return r.ndcg_at(5); });
  row("NDCG@10", [](const MetricReport& r) { return r.ndcg_at(10); });
  return out.str();
}

std::string format_report(const MetricReport& report) {
  std::ostringstream out;
  out << report.label << " (" << report.num_pairs << " held-out pairs)\n";
  out << " k      HR    NDCG\n";
  char buf[64];
  for (std::size_t k = 1; k <= kMaxCutoff; ++k) {
    std::snprintf(buf, sizeof buf, "%2zu  %.4f  %.4f\n", k, report.hr_at(k), report.ndcg_at(k));
    out << buf;
  }
  return out.str();
}

void export_embeddings(const model::ModelParams& params, std::ostream& out) {
  out << "entity,index,group,components\n";
  auto rows = [&](const char* entity, const engine::ParameterTensor& table,
                  const model::Indices* labels) {
    for (std::size_t r = 0; r < table.rows(); ++r) {
      out << entity << ',' << r << ',' << (labels ? (*labels)[r] : r);
      for (double v : table.row(r)) out << ',' << format_double(v);
      out << '\n';
    }
  };
  const auto user_labels = model::all_group_labels(params, model::Side::kUser);
  const auto item_labels = model::all_group_labels(params, model::Side::kItem);
  rows("user", params.user_emb, &user_labels);
  rows("item", params.item_emb, &item_labels);
  rows("user_group", params.user_group_emb, nullptr);
  rows("item_group", params.item_group_emb, nullptr);
}

void export_embeddings(const model::ModelParams& params, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  export_embeddings(params, out);
}

}  // namespace dbrec::eval
