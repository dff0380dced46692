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

// Command-line driver: prepare -> pretrain -> train -> eval -> export, plus
// the four-variant ablation.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dbrec/cli/commands.hpp"
#include "dbrec/cli/config.hpp"
#include "dbrec/common/errors.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string variant;
  std::string output_dir;
  std::vector<std::string> overrides;
};

void add_common_flags(CLI::App* sub, CommonFlags& flags) {
  sub->add_option("--config", flags.config_path, "key = value config file");
  sub->add_option("--seed", flags.seed, "master seed");
  sub->add_option("--variant", flags.variant, "dbrec | dbrec-u | dbrec-i | dbrec-o");
  sub->add_option("--output-dir", flags.output_dir, "artifact directory");
  sub->add_option("--set", flags.overrides, "override a config key (key=value), repeatable");
}

// Defaults, then the config file, then DBREC_OUTPUT_DIR, then flags.
dbrec::cli::RunConfig resolve(const CommonFlags& flags) {
  dbrec::cli::RunConfig config;
  if (!flags.config_path.empty()) dbrec::cli::apply_config_file(config, flags.config_path);
  if (const char* env = std::getenv(dbrec::cli::kOutputDirEnv); env && *env) {
    config.output_dir = env;
  }
  if (flags.seed) dbrec::cli::set_value(config, "seed", std::to_string(*flags.seed));
  if (!flags.variant.empty()) dbrec::cli::set_value(config, "variant", flags.variant);
  if (!flags.output_dir.empty()) config.output_dir = flags.output_dir;
  for (const auto& assignment : flags.overrides) dbrec::cli::apply_assignment(config, assignment);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual-bridging group recommender"};
  app.require_subcommand(1);

  CommonFlags flags;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"prepare", "parse, filter and split a raw interaction file"},
      {"pretrain", "pretrain the basic interaction network"},
      {"train", "train one variant (see --variant)"},
      {"eval", "evaluate a trained variant on the test split"},
      {"export", "write embeddings and group labels of a trained variant"},
      {"ablate", "train and evaluate all four variants from a shared initialization"},
  };
  for (const auto& [name, help] : commands) add_common_flags(app.add_subcommand(name, help), flags);
  app.add_subcommand("keys", "list every config key");

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    if (command == "keys") {
      for (const auto& doc : dbrec::cli::documented_keys()) {
        std::cout << doc.key << "\n    " << doc.description << '\n';
      }
      std::cout << "\ndefaults:\n" << dbrec::cli::render_config(dbrec::cli::RunConfig{});
      return 0;
    }
    dbrec::cli::run_command(command, resolve(flags), std::cout);
  } catch (const dbrec::Error& e) {
    std::cerr << "dbrec " << command << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "dbrec " << command << ": unexpected error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
