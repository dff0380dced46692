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
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "dbrec/data/dataset.hpp"
#include "dbrec/engine/adam.hpp"
#include "dbrec/eval/evaluator.hpp"
#include "dbrec/model/dbrec_model.hpp"
#include "dbrec/training/checkpoint.hpp"

namespace dbrec::training {

struct TrainConfig {
  model::HyperParams hyper;
  model::Variant variant = model::Variant::kFull;
  std::size_t pretrain_epochs = 10;
  bool transfer_mlp = true;     // false: only embeddings survive pretraining
  std::size_t eval_every = 1;   // validation cadence in epochs; 0 disables
  std::size_t patience = 10;    // evaluations without improvement; 0 never stops
  std::size_t kmeans_iters = 100;
  double kmeans_tol = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  eval::EvalOptions validation;
  std::vector<std::string> frozen;      // tensor names excluded from updates
  std::filesystem::path checkpoint_dir;  // empty: nothing is written
  std::size_t max_epochs_this_run = 0;   // 0: run until hyper.epochs

  void validate() const;
  engine::AdamOptions adam() const;
};

struct EpochRecord {
  std::string phase;  // "pretrain" or "train"
  std::uint64_t epoch = 0;
  model::LossValues losses;  // sums over the epoch's batches
  std::optional<double> valid_hr10;
  std::optional<double> valid_ndcg10;
  double wall_seconds = 0.0;
};

using EpochObserver = std::function<void(const EpochRecord&)>;

// One pass over the shuffled training positives of `global_epoch`: build the
// loss of every batch, backpropagate, and update `trainable` with Adam.
// Gradients of every tensor are cleared after each step.
model::LossValues run_epoch(model::ModelParams& params, const data::InteractionDataset& dataset,
                            const model::ComponentMask& mask, double alpha,
                            std::uint64_t global_epoch,
                            std::span<engine::ParameterTensor* const> trainable,
                            const engine::AdamOptions& adam);

// Seeded random initialization followed by `pretrain_epochs` of the basic
// network alone (CF loss with negative sampling).
Checkpoint pretrain(const data::InteractionDataset& dataset, const TrainConfig& config,
                    const EpochObserver& observer = {});

// Applies the transfer policy and initializes both group embedding tables
// from k-means centroids of the embeddings.
void initialize_groups(Checkpoint& checkpoint, const TrainConfig& config);

// pretrain + initialize_groups.
Checkpoint initialize(const data::InteractionDataset& dataset, const TrainConfig& config,
                      const EpochObserver& observer = {});

struct TrainResult {
  Checkpoint last;
  Checkpoint best;  // highest validation HR@10; equals `last` without validation
  std::vector<EpochRecord> log;
};

// Joint training from `start` (an initialized or partially trained
// checkpoint) until hyper.epochs, early stop, or max_epochs_this_run.
TrainResult train(const data::InteractionDataset& dataset, const TrainConfig& config,
                  Checkpoint start, const EpochObserver& observer = {});

// Log columns: epoch,L_uv,L_uu,L_vv,L_u,L_v,val_HR@10,val_NDCG@10,wall_seconds
std::string log_header();
std::string format_log_row(const EpochRecord& record);
void write_log(std::span<const EpochRecord> records, std::ostream& out);

}  // namespace dbrec::training
