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

#include "dbrec/model/hyperparams.hpp"

#include "dbrec/common/errors.hpp"

namespace dbrec::model {

namespace {

void require_positive(std::size_t v, const char* name) {
  if (v == 0) throw ConfigError(std::string(name) + " must be positive");
}

void require_layers(const std::vector<std::size_t>& layers, const char* name) {
  if (layers.empty()) throw ConfigError(std::string(name) + " needs at least one layer");
  for (std::size_t w : layers) require_positive(w, name);
}

}  // namespace

void HyperParams::validate() const {
  require_positive(embedding_dim, "embedding_dim");
  require_positive(group_dim, "group_dim");
  require_positive(num_groups, "num_groups");
  require_positive(batch_size, "batch_size");
  require_positive(cf_negatives, "cf_negatives");
  require_positive(group_negatives, "group_negatives");
  require_positive(epochs, "epochs");
  require_layers(hidden_uv, "hidden_uv");
  require_layers(hidden_ug, "hidden_ug");
  require_layers(hidden_vg, "hidden_vg");
  require_layers(hidden_hierarchy, "hidden_hierarchy");
  if (group_dim > embedding_dim) {
    throw ConfigError("group_dim (" + std::to_string(group_dim) +
                      ") must not exceed embedding_dim (" + std::to_string(embedding_dim) + ")");
  }
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
}

void HyperParams::validate_for(std::size_t num_users, std::size_t num_items) const {
  validate();
  if (num_groups >= num_users || num_groups >= num_items) {
    throw ConfigError("num_groups (" + std::to_string(num_groups) +
                      ") must be smaller than the number of users (" +
                      std::to_string(num_users) + ") and items (" +
                      std::to_string(num_items) + ")");
  }
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::kFull: return "dbrec";
    case Variant::kUserGroups: return "dbrec-u";
    case Variant::kItemGroups: return "dbrec-i";
    case Variant::kBasic: return "dbrec-o";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  if (name == "dbrec") return Variant::kFull;
  if (name == "dbrec-u") return Variant::kUserGroups;
  if (name == "dbrec-i") return Variant::kItemGroups;
  if (name == "dbrec-o") return Variant::kBasic;
  throw ConfigError("unknown variant '" + std::string(name) +
                    "' (expected dbrec, dbrec-o, dbrec-u or dbrec-i)");
}

ComponentMask ComponentMask::for_variant(Variant v) {
  switch (v) {
    case Variant::kFull: return {true, true, true, true};
    // User groups bridge to items through the user-group x item network.
    case Variant::kUserGroups: return {false, true, true, false};
    // Item groups bridge to users through the user x item-group network.
    case Variant::kItemGroups: return {true, false, false, true};
    case Variant::kBasic: return {false, false, false, false};
  }
  throw ConfigError("unknown variant");
}

}  // namespace dbrec::model
