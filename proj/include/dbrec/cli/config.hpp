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
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "dbrec/data/dataset.hpp"
#include "dbrec/data/raw.hpp"
#include "dbrec/training/trainer.hpp"

namespace dbrec::cli {

// Everything a command needs. Defaults: d=128, k=5, alpha=0.01, batch 256,
// learning rate 1e-4.
struct RunConfig {
  std::filesystem::path dataset_path;
  data::RawFormat dataset_format = data::RawFormat::kMovieLens;
  std::filesystem::path output_dir = "dbrec_out";
  bool synthetic = false;  // generate an ML-100k-like rating log when no dataset is given
  std::uint64_t synthetic_seed = 2019;

  data::FilterOptions filter;
  data::SplitRatios ratios;

  training::TrainConfig train;  // includes HyperParams, variant and validation options
  std::size_t test_max_pairs = 0;
  bool resume = false;
  bool record_wall_time = true;

  std::uint64_t seed() const { return train.hyper.seed; }
  void validate() const;
};

// Flat "key = value" text; '#' starts a comment, blank lines are ignored.
// Unknown keys and malformed values throw ConfigError naming the line.
void apply_config_text(RunConfig& config, std::istream& in, std::string_view origin);
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

// Sets a single key from its textual value.
void set_value(RunConfig& config, std::string_view key, std::string_view value);
// Parses "key=value".
void apply_assignment(RunConfig& config, std::string_view assignment);

// Every key with its resolved value, in documentation order, one per line.
std::string render_config(const RunConfig& config);

struct KeyDoc {
  std::string key;
  std::string description;
};
std::vector<KeyDoc> documented_keys();

inline constexpr const char* kOutputDirEnv = "DBREC_OUTPUT_DIR";

}  // namespace dbrec::cli
