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

#include "dbrec/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "dbrec/common/errors.hpp"
#include "dbrec/eval/export.hpp"

namespace dbrec::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::uint64_t to_u64(std::string_view key, std::string_view text) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("'" + std::string(key) + "' expects a non-negative integer, got '" +
                      std::string(text) + "'");
  }
  return v;
}

double to_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("'" + std::string(key) + "' expects a number, got '" + std::string(text) +
                      "'");
  }
  return v;
}

bool to_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("'" + std::string(key) + "' expects true or false, got '" +
                    std::string(text) + "'");
}

std::vector<std::string> to_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto part = trim(text.substr(start, comma == std::string_view::npos
                                                  ? std::string_view::npos
                                                  : comma - start));
    if (!part.empty()) out.emplace_back(part);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::size_t> to_sizes(std::string_view key, std::string_view text) {
  std::vector<std::size_t> out;
  for (const auto& part : to_list(text)) out.push_back(to_u64(key, part));
  return out;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::ostringstream out;
  for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << values[i];
  return out.str();
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

struct Key {
  const char* name;
  const char* description;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define DBREC_U64(NAME, FIELD, DOC)                                                         \
  Key {                                                                                     \
    NAME, DOC, [](RunConfig& c, std::string_view v) { c.FIELD = to_u64(NAME, v); },         \
        [](const RunConfig& c) { return std::to_string(c.FIELD); }                          \
  }
#define DBREC_F64(NAME, FIELD, DOC)                                                         \
  Key {                                                                                     \
    NAME, DOC, [](RunConfig& c, std::string_view v) { c.FIELD = to_double(NAME, v); },      \
        [](const RunConfig& c) { return eval::format_double(c.FIELD); }                     \
  }
#define DBREC_BOOL(NAME, FIELD, DOC)                                                        \
  Key {                                                                                     \
    NAME, DOC, [](RunConfig& c, std::string_view v) { c.FIELD = to_bool(NAME, v); },        \
        [](const RunConfig& c) { return from_bool(c.FIELD); }                               \
  }
#define DBREC_SIZES(NAME, FIELD, DOC)                                                       \
  Key {                                                                                     \
    NAME, DOC, [](RunConfig& c, std::string_view v) { c.FIELD = to_sizes(NAME, v); },       \
        [](const RunConfig& c) { return join(c.FIELD); }                                    \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"dataset_path", "raw interaction file",
       [](RunConfig& c, std::string_view v) { c.dataset_path = std::string(v); },
       [](const RunConfig& c) { return c.dataset_path.string(); }},
      {"dataset_format", "movielens | amazon | gowalla",
       [](RunConfig& c, std::string_view v) { c.dataset_format = data::parse_format(v); },
       [](const RunConfig& c) { return data::format_name(c.dataset_format); }},
      {"output_dir", "artifact directory (overridden by DBREC_OUTPUT_DIR)",
       [](RunConfig& c, std::string_view v) { c.output_dir = std::string(v); },
       [](const RunConfig& c) { return c.output_dir.string(); }},
      DBREC_BOOL("synthetic", synthetic,
                 "generate an ML-100k-like rating log when dataset_path is empty"),
      DBREC_U64("synthetic_seed", synthetic_seed, "seed of the synthetic rating generator"),
      {"variant", "dbrec | dbrec-u | dbrec-i | dbrec-o",
       [](RunConfig& c, std::string_view v) { c.train.variant = model::parse_variant(v); },
       [](const RunConfig& c) { return model::variant_name(c.train.variant); }},
      DBREC_U64("seed", train.hyper.seed, "master seed (init, split, batches, k-means)"),
      DBREC_U64("min_user_positives", filter.min_user_positives,
                "drop users with fewer positives"),
      DBREC_U64("min_item_users", filter.min_item_users, "drop items with fewer users"),
      DBREC_BOOL("filter_fixpoint", filter.fixpoint, "repeat filtering until stable"),
      DBREC_F64("train_ratio", ratios.train, "share of interactions used for training"),
      DBREC_F64("valid_ratio", ratios.valid, "share used for validation"),
      DBREC_F64("test_ratio", ratios.test, "share used for testing"),
      DBREC_U64("embedding_dim", train.hyper.embedding_dim, "d"),
      DBREC_U64("group_dim", train.hyper.group_dim, "d_g, at most d"),
      DBREC_U64("num_groups", train.hyper.num_groups, "k"),
      DBREC_F64("alpha", train.hyper.alpha, "weight of the group-learning losses"),
      DBREC_F64("learning_rate", train.hyper.learning_rate, "Adam step size"),
      DBREC_U64("batch_size", train.hyper.batch_size, "positives per batch"),
      DBREC_U64("cf_negatives", train.hyper.cf_negatives, "sampled negatives per positive"),
      DBREC_U64("group_negatives", train.hyper.group_negatives,
                "negatives per batch for group reconstruction"),
      DBREC_SIZES("hidden_uv", train.hyper.hidden_uv, "user-item MLP widths"),
      DBREC_SIZES("hidden_ug", train.hyper.hidden_ug, "user x item-group MLP widths"),
      DBREC_SIZES("hidden_vg", train.hyper.hidden_vg, "user-group x item MLP widths"),
      DBREC_SIZES("hidden_hierarchy", train.hyper.hidden_hierarchy,
                  "hierarchy MLP widths (a linear layer to d_g follows)"),
      DBREC_U64("epochs", train.hyper.epochs, "maximum joint-training epochs"),
      DBREC_U64("pretrain_epochs", train.pretrain_epochs, "basic-model pretraining epochs"),
      DBREC_BOOL("transfer_mlp", train.transfer_mlp,
                 "keep the pretrained uv network (false: embeddings only)"),
      DBREC_U64("eval_every", train.eval_every, "validation cadence in epochs (0: never)"),
      DBREC_U64("patience", train.patience,
                "stop after this many evaluations without improvement (0: never)"),
      DBREC_U64("kmeans_iters", train.kmeans_iters, "k-means iteration cap"),
      DBREC_F64("kmeans_tol", train.kmeans_tol, "k-means centroid-shift tolerance"),
      DBREC_F64("adam_beta1", train.adam_beta1, "Adam first-moment decay"),
      DBREC_F64("adam_beta2", train.adam_beta2, "Adam second-moment decay"),
      DBREC_F64("adam_epsilon", train.adam_epsilon, "Adam epsilon"),
      {"frozen", "comma-separated tensor names excluded from updates",
       [](RunConfig& c, std::string_view v) { c.train.frozen = to_list(v); },
       [](const RunConfig& c) { return join(c.train.frozen); }},
      DBREC_U64("eval_negatives", train.validation.num_negatives,
                "sampled negatives per held-out pair"),
      DBREC_U64("eval_seed", train.validation.seed, "seed of the candidate sampler"),
      DBREC_U64("eval_threads", train.validation.threads, "scoring threads"),
      DBREC_U64("valid_max_pairs", train.validation.max_pairs,
                "cap on validation pairs per evaluation (0: all)"),
      DBREC_U64("test_max_pairs", test_max_pairs, "cap on test pairs (0: all)"),
      DBREC_BOOL("resume", resume, "train: continue from the variant's last checkpoint"),
      DBREC_BOOL("record_wall_time", record_wall_time,
                 "write wall-clock seconds into training logs"),
  };
  return table;
}

#undef DBREC_U64
#undef DBREC_F64
#undef DBREC_BOOL
#undef DBREC_SIZES

}  // namespace

void RunConfig::validate() const {
  train.validate();
  const double sum = ratios.train + ratios.valid + ratios.test;
  if (ratios.train <= 0.0 || ratios.valid < 0.0 || ratios.test < 0.0 || std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("split ratios must be non-negative and sum to 1");
  }
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

void set_value(RunConfig& config, std::string_view key, std::string_view value) {
  for (const Key& k : keys()) {
    if (key == k.name) {
      k.set(config, trim(value));
      return;
    }
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void apply_assignment(RunConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
  }
  set_value(config, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void apply_config_text(RunConfig& config, std::istream& in, std::string_view origin) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    try {
      apply_assignment(config, view);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("config file " + path.string() + " not found");
  apply_config_text(config, in, path.string());
}

std::string render_config(const RunConfig& config) {
  std::string out;
  for (const Key& k : keys()) {
    out += k.name;
    out += " = ";
    out += k.get(config);
    out += '\n';
  }
  return out;
}

std::vector<KeyDoc> documented_keys() {
  std::vector<KeyDoc> out;
  for (const Key& k : keys()) out.push_back({k.name, k.description});
  return out;
}

}  // namespace dbrec::cli
