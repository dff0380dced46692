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

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dbrec::model {

struct HyperParams {
  std::size_t embedding_dim = 128;  // d
  std::size_t group_dim = 64;       // d_g, must not exceed d
  std::size_t num_groups = 5;       // k
  double alpha = 0.01;
  double learning_rate = 1e-4;
  std::size_t batch_size = 256;
  std::size_t cf_negatives = 5;
  std::size_t group_negatives = 5;  // p
  std::vector<std::size_t> hidden_uv{64, 16};
  std::vector<std::size_t> hidden_ug{64, 16};
  std::vector<std::size_t> hidden_vg{64, 16};
  // Hidden layers of the hierarchy networks; a linear layer to d_g follows.
  std::vector<std::size_t> hidden_hierarchy{64, 128};
  std::size_t epochs = 100;
  std::uint64_t seed = 42;

  void validate() const;
  // Additionally enforces k < m and k < n.
  void validate_for(std::size_t num_users, std::size_t num_items) const;

  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

// Ablation variants. The names match the CLI and report keys.
enum class Variant { kFull, kUserGroups, kItemGroups, kBasic };

std::string variant_name(Variant v);
Variant parse_variant(std::string_view name);

// Which parts of the model are active. Variants are expressed purely as masks
// over one code path.
struct ComponentMask {
  bool ug_branch = true;    // user x item-group interaction network
  bool vg_branch = true;    // user-group x item interaction network
  bool user_groups = true;  // user hierarchy + user group reconstruction losses
  bool item_groups = true;  // item hierarchy + item group reconstruction losses

  static ComponentMask for_variant(Variant v);
  bool needs_user_labels() const { return vg_branch || user_groups; }
  bool needs_item_labels() const { return ug_branch || item_groups; }

  friend bool operator==(const ComponentMask&, const ComponentMask&) = default;
};

}  // namespace dbrec::model
