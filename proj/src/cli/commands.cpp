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

#include "dbrec/cli/commands.hpp"

#include <fstream>
#include <sstream>

#include "dbrec/common/errors.hpp"
#include "dbrec/data/synthetic.hpp"
#include "dbrec/eval/evaluator.hpp"
#include "dbrec/eval/export.hpp"
#include "dbrec/training/kmeans.hpp"
#include "dbrec/training/trainer.hpp"

namespace dbrec::cli {

namespace {

namespace fs = std::filesystem;

void require(const fs::path& path, const std::string& producer) {
  if (!fs::exists(path)) {
    throw MissingArtifactError("missing " + path.string() + "; run `dbrec " + producer +
                               "` with the same output_dir first");
  }
}

void echo_config(const RunConfig& config, const std::string& command, std::ostream& out) {
  config.validate();
  const Artifacts art{config.output_dir};
  fs::create_directories(art.root);
  const std::string text = render_config(config);
  std::ofstream file(art.config_echo(command));
  if (!file) throw Error("cannot write " + art.config_echo(command).string());
  file << text;
  out << "# " << command << " with resolved config:\n" << text;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

training::EpochObserver progress(std::ostream& out) {
  return [&out](const training::EpochRecord& r) {
    out << r.phase << " epoch " << r.epoch << ": L_uv=" << eval::format_double(r.losses.cf);
    if (r.phase == "train") {
      out << " L_uu=" << eval::format_double(r.losses.hier_user)
          << " L_vv=" << eval::format_double(r.losses.hier_item)
          << " L_u=" << eval::format_double(r.losses.recon_user)
          << " L_v=" << eval::format_double(r.losses.recon_item);
    }
    if (r.valid_hr10) {
      out << " val_HR@10=" << eval::format_double(*r.valid_hr10)
          << " val_NDCG@10=" << eval::format_double(*r.valid_ndcg10);
    }
    out << '\n';
    out.flush();
  };
}

std::string render_log(const RunConfig& config, std::vector<training::EpochRecord> records) {
  if (!config.record_wall_time) {
    for (auto& r : records) r.wall_seconds = 0.0;
  }
  std::ostringstream text;
  training::write_log(records, text);
  return text.str();
}

data::InteractionDataset load_prepared(const RunConfig& config) {
  const Artifacts art{config.output_dir};
  require(art.dataset(), "prepare");
  return data::load_dataset(art.dataset());
}

// Pretrained checkpoint from disk when it matches the config, otherwise a
// fresh pretraining run (which is then stored).
training::Checkpoint pretrained(const RunConfig& config, const data::InteractionDataset& dataset,
                                std::ostream& out) {
  const Artifacts art{config.output_dir};
  if (fs::exists(art.pretrain_checkpoint())) {
    training::Checkpoint ckpt = training::load_checkpoint(art.pretrain_checkpoint());
    model::HyperParams stored = ckpt.params.hyper;
    model::HyperParams wanted = config.train.hyper;
    stored.epochs = wanted.epochs;
    stored.alpha = wanted.alpha;
    if (!(stored == wanted) || ckpt.state.global_epoch != config.train.pretrain_epochs ||
        ckpt.params.num_users != dataset.num_users() ||
        ckpt.params.num_items != dataset.num_items()) {
      throw ConfigError(art.pretrain_checkpoint().string() +
                        " was produced with a different config; rerun `dbrec pretrain` or "
                        "remove the file");
    }
    out << "using " << art.pretrain_checkpoint().string() << '\n';
    return ckpt;
  }
  std::vector<training::EpochRecord> log;
  auto observer = progress(out);
  training::Checkpoint ckpt = training::pretrain(
      dataset, config.train, [&](const training::EpochRecord& r) {
        log.push_back(r);
        observer(r);
      });
  training::save_checkpoint(ckpt, art.pretrain_checkpoint());
  write_text(art.pretrain_log(), render_log(config, log));
  return ckpt;
}

training::TrainResult train_variant(const RunConfig& config, model::Variant variant,
                                    const data::InteractionDataset& dataset,
                                    training::Checkpoint start, bool resume, std::ostream& out) {
  const Artifacts art{config.output_dir};
  training::TrainConfig tc = config.train;
  tc.variant = variant;
  tc.checkpoint_dir = art.variant_dir(variant);
  std::vector<training::EpochRecord> previous;
  if (resume) {
    require(art.last_checkpoint(variant), "train --variant " + model::variant_name(variant));
    start = training::load_checkpoint(art.last_checkpoint(variant));
  }
  fs::create_directories(tc.checkpoint_dir);
  training::TrainResult result = training::train(dataset, tc, std::move(start), progress(out));

  std::string log_text = render_log(config, result.log);
  if (resume && fs::exists(art.train_log(variant))) {
    // Append the new rows below the existing ones.
    std::ifstream old(art.train_log(variant), std::ios::binary);
    std::ostringstream prior;
    prior << old.rdbuf();
    log_text = prior.str() + log_text.substr(log_text.find('\n') + 1);
  }
  write_text(art.train_log(variant), log_text);
  // best.ckpt is only written on improvement; make sure it always exists.
  training::save_checkpoint(result.best, art.best_checkpoint(variant));
  training::save_checkpoint(result.last, art.last_checkpoint(variant));
  out << model::variant_name(variant) << ": " << result.last.state.epoch << " epochs";
  if (result.best.state.best_valid_hr >= 0.0) {
    out << ", best val HR@10 " << eval::format_double(result.best.state.best_valid_hr)
        << " at epoch " << result.best.state.best_epoch;
  }
  out << '\n';
  return result;
}

eval::MetricReport test_report(const RunConfig& config, const training::Checkpoint& ckpt,
                               const data::InteractionDataset& dataset) {
  eval::EvalOptions options = config.train.validation;
  options.max_pairs = config.test_max_pairs;
  return eval::evaluate(ckpt.params, model::ComponentMask::for_variant(ckpt.variant), dataset,
                        data::Split::kTest, options, model::variant_name(ckpt.variant));
}

}  // namespace

void run_prepare(const RunConfig& config, std::ostream& out) {
  echo_config(config, "prepare", out);
  const Artifacts art{config.output_dir};
  data::RawData raw;
  data::RawFormat format = config.dataset_format;
  if (config.dataset_path.empty()) {
    if (!config.synthetic) {
      throw ConfigError("dataset_path is not set (or set synthetic=true to generate data)");
    }
    data::SyntheticRatingsConfig synth;
    synth.seed = config.synthetic_seed;
    raw.records = data::generate_synthetic_ratings(synth);
    data::write_movielens(raw.records, art.synthetic_ratings());
    format = data::RawFormat::kMovieLens;
    raw = data::load_raw(art.synthetic_ratings(), format);
    out << "generated " << raw.records.size() << " synthetic ratings into "
        << art.synthetic_ratings().string() << '\n';
  } else {
    raw = data::load_raw(config.dataset_path, config.dataset_format);
  }
  auto pairs = data::to_implicit(raw, format);
  pairs = data::core_filter(pairs, config.filter);
  const data::InteractionDataset ds = data::split(pairs, config.ratios, config.seed());
  data::save_dataset(ds, art.dataset());
  out << "prepared " << ds.num_users() << " users, " << ds.num_items() << " items: "
      << ds.count(data::Split::kTrain) << " train / " << ds.count(data::Split::kValid)
      << " valid / " << ds.count(data::Split::kTest) << " test -> " << art.dataset().string()
      << '\n';
}

void run_pretrain(const RunConfig& config, std::ostream& out) {
  echo_config(config, "pretrain", out);
  const Artifacts art{config.output_dir};
  const auto dataset = load_prepared(config);
  fs::remove(art.pretrain_checkpoint());
  pretrained(config, dataset, out);
  out << "wrote " << art.pretrain_checkpoint().string() << '\n';
}

void run_train(const RunConfig& config, std::ostream& out) {
  echo_config(config, "train", out);
  const auto dataset = load_prepared(config);
  training::Checkpoint start;
  if (!config.resume) {
    start = pretrained(config, dataset, out);
    training::initialize_groups(start, config.train);
  }
  train_variant(config, config.train.variant, dataset, std::move(start), config.resume, out);
}

eval::MetricReport run_eval(const RunConfig& config, std::ostream& out) {
  echo_config(config, "eval", out);
  const Artifacts art{config.output_dir};
  const auto variant = config.train.variant;
  require(art.best_checkpoint(variant), "train --variant " + model::variant_name(variant));
  const auto dataset = load_prepared(config);
  const auto ckpt = training::load_checkpoint(art.best_checkpoint(variant));
  const eval::MetricReport report = test_report(config, ckpt, dataset);
  eval::write_metrics_csv(std::span<const eval::MetricReport>(&report, 1),
                          art.test_metrics(variant));
  out << eval::format_report(report);
  return report;
}

void run_export(const RunConfig& config, std::ostream& out) {
  echo_config(config, "export", out);
  const Artifacts art{config.output_dir};
  const auto variant = config.train.variant;
  require(art.best_checkpoint(variant), "train --variant " + model::variant_name(variant));
  const auto ckpt = training::load_checkpoint(art.best_checkpoint(variant));
  eval::export_embeddings(ckpt.params, art.embeddings(variant));
  out << "wrote " << art.embeddings(variant).string() << '\n';
}

std::vector<eval::MetricReport> run_ablate(const RunConfig& config, std::ostream& out) {
  echo_config(config, "ablate", out);
  const Artifacts art{config.output_dir};
  const auto dataset = load_prepared(config);
  training::Checkpoint init = pretrained(config, dataset, out);
  training::initialize_groups(init, config.train);

  std::vector<eval::MetricReport> reports;
  for (model::Variant v : {model::Variant::kFull, model::Variant::kUserGroups,
                           model::Variant::kItemGroups, model::Variant::kBasic}) {
    const auto result = train_variant(config, v, dataset, init, false, out);
    reports.push_back(test_report(config, result.best, dataset));
    eval::write_metrics_csv(std::span<const eval::MetricReport>(&reports.back(), 1),
                            art.test_metrics(v));
  }
  eval::write_metrics_csv(reports, art.ablation_csv());
  const std::string table = eval::format_comparison_table(reports);
  write_text(art.ablation_table(), table);
  out << table;
  return reports;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"prepare", "pretrain", "train",
                                                 "eval",    "export",   "ablate"};
  return names;
}

void run_command(const std::string& command, const RunConfig& config, std::ostream& out) {
  if (command == "prepare") return run_prepare(config, out);
  if (command == "pretrain") return run_pretrain(config, out);
  if (command == "train") return run_train(config, out);
  if (command == "eval") {
    run_eval(config, out);
    return;
  }
  if (command == "export") return run_export(config, out);
  if (command == "ablate") {
    run_ablate(config, out);
    return;
  }
  throw UsageError("unknown command '" + command + "'");
}

}  // namespace dbrec::cli
