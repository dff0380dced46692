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
#include <span>
#include <vector>

#include "dbrec/data/sampling.hpp"
#include "dbrec/engine/graph.hpp"
#include "dbrec/model/params.hpp"

// Graph builders for the dual-bridging recommender.
//
// Builders are templates over `Params` = ModelParams (tensors become gradient
// sinks) or const ModelParams (read-only evaluation); both are explicitly
// instantiated in dbrec_model.cpp.
namespace dbrec::model {

using engine::Graph;
using engine::Var;
using Indices = std::vector<std::size_t>;

// Runs x through an MLP; every layer is ReLU-activated unless `linear_last`.
template <typename Params>
Var mlp_forward(Graph& g, Params& mlp, Var x, bool linear_last);

// Logit of the basic interaction network: MLP([u; v; u o v]) . w_uv.
template <typename Params>
Var basic_logit(Graph& g, Params& p, const Indices& users, const Indices& items);

// softmax(W x + b) over the k groups of `side`.
template <typename Params>
Var group_activation(Graph& g, Params& p, Side side, Var x);

// beta * G: convex combination of group embedding rows.
template <typename Params>
Var soft_group_repr(Graph& g, Params& p, Side side, Var beta);

// sigmoid(W' mu + b'), back in embedding space.
template <typename Params>
Var reconstruct(Graph& g, Params& p, Side side, Var mu);

// Sum over rows r and negatives s of
//   max(0, 1 - cos(recon_r, x_r) + cos(recon_r, neg_s)).
// `negatives` (p x d) are shared by every row.
Var group_margin_loss(Graph& g, Var recon, Var x, Var negatives);

// Index of the largest activation; ties go to the lowest index.
std::size_t hard_assignment(std::span<const double> beta);

// Hard group labels for the given entities under current parameters.
Indices group_labels(const ModelParams& p, Side side, const Indices& entities);

// Labels of every user (or item), in index order.
Indices all_group_labels(const ModelParams& p, Side side);

// Inner products between the hierarchy representation of (x + offset) and
// every group embedding; B x k.
template <typename Params>
Var hierarchy_logits(Graph& g, Params& p, Side side, const Indices& entities);

template <typename Params>
Var hierarchy_posterior(Graph& g, Params& p, Side side, const Indices& entities);

// Sum over entities of -log posterior at the entity's hard label.
template <typename Params>
Var hierarchy_loss(Graph& g, Params& p, Side side, const Indices& entities,
                   const Indices& labels);

// Fused logit of the uv, ug and vg networks for each (user, item) row.
// `user_labels` / `item_labels` hold a_i / b_j per row and are only read by
// the branches the mask enables.
template <typename Params>
Var dual_bridge_logit(Graph& g, Params& p, const ComponentMask& mask, const Indices& users,
                      const Indices& items, const Indices& user_labels,
                      const Indices& item_labels);

// Summed binary cross-entropy of probabilities against 0/1 labels.
Var cf_loss(Graph& g, Var probs, std::vector<double> labels);

struct LossNodes {
  Var total;
  Var cf;
  Var hier_user;
  Var hier_item;
  Var recon_user;
  Var recon_item;
  Var weighted_aux;  // alpha * (sum of active auxiliary terms); invalid if none
};

// L_uv + alpha (L_uu + L_vv + L_u + L_v) on one batch. Auxiliary terms cover
// the distinct users of the batch positives and the distinct items among
// positives and CF negatives; masked terms are left out of the graph.
LossNodes build_total_loss(Graph& g, ModelParams& p, const data::TrainBatch& batch,
                           const ComponentMask& mask, double alpha);

struct LossValues {
  double total = 0.0;
  double cf = 0.0;
  double hier_user = 0.0;
  double hier_item = 0.0;
  double recon_user = 0.0;
  double recon_item = 0.0;
};

LossValues read_losses(const Graph& g, const LossNodes& nodes);

// Scalar conveniences (build, forward, read).
double basic_score(const ModelParams& p, std::size_t user, std::size_t item);
double dual_bridge_score(const ModelParams& p, const ComponentMask& mask, std::size_t user,
                         std::size_t item);

// Probabilities for many pairs, given precomputed label tables for all users
// and items (see all_group_labels).
std::vector<double> score_pairs(const ModelParams& p, const ComponentMask& mask,
                                const Indices& users, const Indices& items,
                                const Indices& user_label_table,
                                const Indices& item_label_table);

}  // namespace dbrec::model
