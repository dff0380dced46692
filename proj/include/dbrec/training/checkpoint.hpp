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
#include <string>

#include "dbrec/model/hyperparams.hpp"
#include "dbrec/model/params.hpp"

namespace dbrec::training {

// Progress counters that a resumed run needs to continue exactly.
struct TrainingState {
  std::uint64_t epoch = 0;         // completed joint-training epochs
  std::uint64_t global_epoch = 0;  // all completed epochs incl. pretraining; keys the rng
  double best_valid_hr = -1.0;     // best validation HR@10 so far (-1: none yet)
  double best_valid_ndcg = -1.0;   // NDCG@10 at that evaluation
  std::uint64_t best_epoch = 0;
  std::uint64_t evals_since_best = 0;
  bool stopped_early = false;

  friend bool operator==(const TrainingState&, const TrainingState&) = default;
};

// Everything needed to resume: tensors with their Adam state, hyperparameters,
// variant, and progress counters. Random streams are pure functions of
// (seed, global_epoch, batch index), so no generator state is stored.
struct Checkpoint {
  std::string phase;  // "pretrain", "init" or "train"
  model::Variant variant = model::Variant::kFull;
  TrainingState state;
  model::ModelParams params;
};

inline constexpr std::string_view kCheckpointMagic = "DBRECCKP";
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint deserialize_checkpoint(const std::string& payload);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace dbrec::training
