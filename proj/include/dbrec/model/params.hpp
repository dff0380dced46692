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
#include <string>
#include <string_view>
#include <vector>

#include "dbrec/engine/parameter.hpp"
#include "dbrec/model/hyperparams.hpp"

namespace dbrec::model {

using engine::ParameterTensor;

// Fully connected layer; weight is out x in, bias has `out` entries.
struct Dense {
  ParameterTensor weight;
  ParameterTensor bias;
};

struct Mlp {
  std::vector<Dense> layers;
  std::size_t output_dim() const { return layers.back().weight.rows(); }
};

enum class Side { kUser, kItem };

// Every learnable tensor of the model.
struct ModelParams {
  HyperParams hyper;
  std::size_t num_users = 0;
  std::size_t num_items = 0;

  ParameterTensor user_emb;        // m x d
  ParameterTensor item_emb;        // n x d
  ParameterTensor user_group_emb;  // k x d_g
  ParameterTensor item_group_emb;  // k x d_g
  ParameterTensor user_offset;     // m x d, hierarchy shift
  ParameterTensor item_offset;     // n x d

  Dense user_group_proj;  // k x d: embedding -> group logits
  Dense item_group_proj;
  Dense user_recon;       // d x d_g: soft group representation -> embedding
  Dense item_recon;

  Mlp mlp_uv;
  Mlp mlp_ug;
  Mlp mlp_vg;
  Mlp hier_user;  // hidden layers, then a linear layer to d_g
  Mlp hier_item;

  ParameterTensor bilinear_user;  // d x d_g, user vs item-group similarity
  ParameterTensor bilinear_item;  // d x d_g, item vs user-group similarity
  ParameterTensor fusion_uv;
  ParameterTensor fusion_ug;
  ParameterTensor fusion_vg;

  // Seeded initialization: embeddings and group embeddings uniform in
  // (-0.05, 0.05), weights Glorot-uniform, biases and offsets zero. Each
  // tensor draws from its own stream derived from (seed, tensor name).
  static ModelParams create(std::size_t num_users, std::size_t num_items,
                            const HyperParams& hyper, std::uint64_t seed);

  // Stable order; used for checkpoints and gradient checks.
  std::vector<ParameterTensor*> all();
  std::vector<const ParameterTensor*> all() const;

  ParameterTensor& find(std::string_view name);
  const ParameterTensor& find(std::string_view name) const;

  const ParameterTensor& embeddings(Side side) const {
    return side == Side::kUser ? user_emb : item_emb;
  }
  const ParameterTensor& group_embeddings(Side side) const {
    return side == Side::kUser ? user_group_emb : item_group_emb;
  }
};

// Tensors that receive optimizer updates under a mask.
std::vector<ParameterTensor*> trainable_params(ModelParams& params, const ComponentMask& mask);

// Tensors that the pretrained basic model owns (embeddings, uv network,
// uv fusion vector).
std::vector<ParameterTensor*> basic_params(ModelParams& params);

// Order-sensitive hash of all tensor values (not grads or moments).
std::uint64_t values_hash(const ModelParams& params);

}  // namespace dbrec::model
