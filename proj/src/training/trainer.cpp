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

#include "dbrec/training/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "dbrec/common/errors.hpp"
#include "dbrec/eval/export.hpp"
#include "dbrec/training/batches.hpp"
#include "dbrec/training/kmeans.hpp"

namespace dbrec::training {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void add_losses(model::LossValues& acc, const model::LossValues& x) {
  acc.total += x.total;
  acc.cf += x.cf;
  acc.hier_user += x.hier_user;
  acc.hier_item += x.hier_item;
  acc.recon_user += x.recon_user;
  acc.recon_item += x.recon_item;
}

std::vector<engine::ParameterTensor*> without_frozen(std::vector<engine::ParameterTensor*> tensors,
                                                     const std::vector<std::string>& frozen) {
  std::erase_if(tensors, [&](const engine::ParameterTensor* t) {
    return std::find(frozen.begin(), frozen.end(), t->name) != frozen.end();
  });
  return tensors;
}

void save_if(const TrainConfig& config, const Checkpoint& ckpt, const char* file) {
  if (config.checkpoint_dir.empty()) return;
  save_checkpoint(ckpt, config.checkpoint_dir / file);
}

// Runs one epoch; on divergence stores `snapshot` (the state before the
// epoch) as the last finite checkpoint and rethrows with context.
model::LossValues guarded_epoch(Checkpoint& ckpt, const Checkpoint& snapshot,
                                const data::InteractionDataset& dataset,
                                const TrainConfig& config, const model::ComponentMask& mask,
                                double alpha, std::span<engine::ParameterTensor* const> trainable) {
  try {
    return run_epoch(ckpt.params, dataset, mask, alpha, ckpt.state.global_epoch, trainable,
                     config.adam());
  } catch (const NumericError& e) {
    std::string msg = std::string(e.what()) + " during " + ckpt.phase + " epoch " +
                      std::to_string(ckpt.state.global_epoch + 1);
    if (!config.checkpoint_dir.empty()) {
      const auto path = config.checkpoint_dir / "last_finite.ckpt";
      save_checkpoint(snapshot, path);
      msg += "; last finite state saved to " + path.string();
    }
    throw NumericError(msg);
  }
}

}  // namespace

void TrainConfig::validate() const {
  hyper.validate();
  if (hyper.epochs < 1) throw ConfigError("epochs must be >= 1");
  adam().validate();
  if (!(kmeans_tol >= 0.0)) throw ConfigError("kmeans_tol must be >= 0");
  if (kmeans_iters < 1) throw ConfigError("kmeans_iters must be >= 1");
  if (validation.num_negatives < 1) throw ConfigError("validation needs at least one negative");
}

engine::AdamOptions TrainConfig::adam() const {
  return {hyper.learning_rate, adam_beta1, adam_beta2, adam_epsilon};
}

model::LossValues run_epoch(model::ModelParams& params, const data::InteractionDataset& dataset,
                            const model::ComponentMask& mask, double alpha,
                            std::uint64_t global_epoch,
                            std::span<engine::ParameterTensor* const> trainable,
                            const engine::AdamOptions& adam) {
  const auto order = epoch_order(dataset, params.hyper.seed, global_epoch);
  const std::size_t batches = num_batches(order.size(), params.hyper.batch_size);
  const auto everything = params.all();
  model::LossValues sums;
  for (std::size_t b = 0; b < batches; ++b) {
    const data::TrainBatch batch =
        make_batch(dataset, order, params.hyper, params.hyper.seed, global_epoch, b);
    engine::Graph g;
    const model::LossNodes nodes = model::build_total_loss(g, params, batch, mask, alpha);
    g.forward();
    g.backward(nodes.total);
    add_losses(sums, model::read_losses(g, nodes));
    engine::adam_step(trainable, adam);
    engine::zero_grads(everything);
  }
  return sums;
}

Checkpoint pretrain(const data::InteractionDataset& dataset, const TrainConfig& config,
                    const EpochObserver& observer) {
  config.validate();
  Checkpoint ckpt;
  ckpt.phase = "pretrain";
  ckpt.variant = config.variant;
  ckpt.params = model::ModelParams::create(dataset.num_users(), dataset.num_items(),
                                           config.hyper, config.hyper.seed);
  const auto trainable = without_frozen(model::basic_params(ckpt.params), config.frozen);
  const auto mask = model::ComponentMask::for_variant(model::Variant::kBasic);
  for (std::size_t e = 0; e < config.pretrain_epochs; ++e) {
    const auto start = Clock::now();
    const Checkpoint snapshot = ckpt;
    EpochRecord record;
    record.phase = "pretrain";
    record.losses = guarded_epoch(ckpt, snapshot, dataset, config, mask, 0.0, trainable);
    ++ckpt.state.global_epoch;
    record.epoch = ckpt.state.global_epoch;
    record.wall_seconds = seconds_since(start);
    if (observer) observer(record);
  }
  return ckpt;
}

void initialize_groups(Checkpoint& ckpt, const TrainConfig& config) {
  if (!config.transfer_mlp) {
    // Fresh uv network; only the embeddings carry over from pretraining.
    const model::ModelParams fresh = model::ModelParams::create(
        ckpt.params.num_users, ckpt.params.num_items, ckpt.params.hyper, ckpt.params.hyper.seed);
    model::ModelParams& p = ckpt.params;
    for (std::size_t l = 0; l < p.mlp_uv.layers.size(); ++l) {
      p.mlp_uv.layers[l] = fresh.mlp_uv.layers[l];
    }
    p.fusion_uv = fresh.fusion_uv;
  }
  init_group_embeddings(ckpt.params,
                        {config.kmeans_iters, config.kmeans_tol, ckpt.params.hyper.seed});
  ckpt.phase = "init";
}

Checkpoint initialize(const data::InteractionDataset& dataset, const TrainConfig& config,
                      const EpochObserver& observer) {
  Checkpoint ckpt = pretrain(dataset, config, observer);
  initialize_groups(ckpt, config);
  save_if(config, ckpt, "init.ckpt");
  return ckpt;
}

TrainResult train(const data::InteractionDataset& dataset, const TrainConfig& config,
                  Checkpoint start, const EpochObserver& observer) {
  config.validate();
  if (start.params.num_users != dataset.num_users() ||
      start.params.num_items != dataset.num_items()) {
    throw ConfigError("checkpoint was built for a dataset of a different size");
  }
  if (!config.checkpoint_dir.empty()) std::filesystem::create_directories(config.checkpoint_dir);

  TrainResult result;
  result.last = std::move(start);
  Checkpoint& ckpt = result.last;
  ckpt.phase = "train";
  ckpt.variant = config.variant;
  // Run-length settings may change between sessions; the model shape may not.
  ckpt.params.hyper.epochs = config.hyper.epochs;
  ckpt.params.hyper.learning_rate = config.hyper.learning_rate;
  ckpt.params.hyper.alpha = config.hyper.alpha;
  result.best = ckpt;
  // A resumed run whose best epoch predates the interruption picks the best
  // snapshot back up from disk.
  if (ckpt.state.best_epoch > 0 && ckpt.state.best_epoch < ckpt.state.epoch &&
      !config.checkpoint_dir.empty() &&
      std::filesystem::exists(config.checkpoint_dir / "best.ckpt")) {
    Checkpoint stored = load_checkpoint(config.checkpoint_dir / "best.ckpt");
    if (stored.state.epoch == ckpt.state.best_epoch) result.best = std::move(stored);
  }

  const auto mask = model::ComponentMask::for_variant(config.variant);
  const auto trainable =
      without_frozen(model::trainable_params(ckpt.params, mask), config.frozen);
  const double alpha = ckpt.params.hyper.alpha;

  std::size_t ran = 0;
  while (ckpt.state.epoch < ckpt.params.hyper.epochs && !ckpt.state.stopped_early) {
    if (config.max_epochs_this_run > 0 && ran >= config.max_epochs_this_run) break;
    const auto clock_start = Clock::now();
    const Checkpoint snapshot = ckpt;
    EpochRecord record;
    record.phase = "train";
    record.losses = guarded_epoch(ckpt, snapshot, dataset, config, mask, alpha, trainable);
    ++ckpt.state.epoch;
    ++ckpt.state.global_epoch;
    ++ran;
    record.epoch = ckpt.state.epoch;

    bool improved = false;
    if (config.eval_every > 0 && ckpt.state.epoch % config.eval_every == 0) {
      const eval::MetricReport report =
          eval::evaluate(ckpt.params, mask, dataset, data::Split::kValid, config.validation,
                         model::variant_name(config.variant));
      record.valid_hr10 = report.hr_at(10);
      record.valid_ndcg10 = report.ndcg_at(10);
      if (report.hr_at(10) > ckpt.state.best_valid_hr) {
        ckpt.state.best_valid_hr = report.hr_at(10);
        ckpt.state.best_valid_ndcg = report.ndcg_at(10);
        ckpt.state.best_epoch = ckpt.state.epoch;
        ckpt.state.evals_since_best = 0;
        improved = true;
      } else {
        ++ckpt.state.evals_since_best;
        if (config.patience > 0 && ckpt.state.evals_since_best >= config.patience) {
          ckpt.state.stopped_early = true;
        }
      }
    }
    if (improved) {
      result.best = ckpt;
      save_if(config, ckpt, "best.ckpt");
    }
    record.wall_seconds = seconds_since(clock_start);
    save_if(config, ckpt, "last.ckpt");
    result.log.push_back(record);
    if (observer) observer(record);
  }
  if (config.eval_every == 0 || ckpt.state.best_valid_hr < 0.0) {
    result.best = ckpt;
  } else {
    // Counters of the best snapshot reflect the whole run.
    result.best.state.stopped_early = ckpt.state.stopped_early;
  }
  return result;
}

std::string log_header() {
  return "epoch,L_uv,L_uu,L_vv,L_u,L_v,val_HR@10,val_NDCG@10,wall_seconds";
}

std::string format_log_row(const EpochRecord& r) {
  using eval::format_double;
  std::string row = std::to_string(r.epoch);
  for (double v : {r.losses.cf, r.losses.hier_user, r.losses.hier_item, r.losses.recon_user,
                   r.losses.recon_item}) {
    row += ',' + format_double(v);
  }
  row += ',' + (r.valid_hr10 ? format_double(*r.valid_hr10) : std::string());
  row += ',' + (r.valid_ndcg10 ? format_double(*r.valid_ndcg10) : std::string());
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", r.wall_seconds);
  row += ',';
  row += buf;
  return row;
}

void write_log(std::span<const EpochRecord> records, std::ostream& out) {
  out << log_header() << '\n';
  for (const auto& r : records) out << format_log_row(r) << '\n';
}

}  // namespace dbrec::training
