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
#include <string>
#include <vector>

#include "dbrec/cli/config.hpp"
#include "dbrec/eval/metrics.hpp"

namespace dbrec::cli {

// Artifact locations below the output directory.
struct Artifacts {
  std::filesystem::path root;

  std::filesystem::path dataset() const { return root / "dataset.bin"; }
  std::filesystem::path synthetic_ratings() const { return root / "synthetic_ratings.dat"; }
  std::filesystem::path pretrain_checkpoint() const { return root / "pretrain.ckpt"; }
  std::filesystem::path pretrain_log() const { return root / "pretrain_log.csv"; }
  std::filesystem::path variant_dir(model::Variant v) const {
    return root / model::variant_name(v);
  }
  std::filesystem::path best_checkpoint(model::Variant v) const {
    return variant_dir(v) / "best.ckpt";
  }
  std::filesystem::path last_checkpoint(model::Variant v) const {
    return variant_dir(v) / "last.ckpt";
  }
  std::filesystem::path train_log(model::Variant v) const { return variant_dir(v) / "train_log.csv"; }
  std::filesystem::path test_metrics(model::Variant v) const {
    return variant_dir(v) / "test_metrics.csv";
  }
  std::filesystem::path embeddings(model::Variant v) const {
    return variant_dir(v) / "embeddings.csv";
  }
  std::filesystem::path ablation_csv() const { return root / "ablation.csv"; }
  std::filesystem::path ablation_table() const { return root / "ablation.txt"; }
  std::filesystem::path config_echo(const std::string& command) const {
    return root / (command + ".config");
  }
};

// Each command writes its resolved config to <output_dir>/<command>.config
// and prints progress to `out`. Errors are thrown (see common/errors.hpp).
void run_prepare(const RunConfig& config, std::ostream& out);
void run_pretrain(const RunConfig& config, std::ostream& out);
void run_train(const RunConfig& config, std::ostream& out);
eval::MetricReport run_eval(const RunConfig& config, std::ostream& out);
void run_export(const RunConfig& config, std::ostream& out);
std::vector<eval::MetricReport> run_ablate(const RunConfig& config, std::ostream& out);

const std::vector<std::string>& command_names();
// Dispatches by name; throws UsageError for an unknown command.
void run_command(const std::string& command, const RunConfig& config, std::ostream& out);

}  // namespace dbrec::cli
