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

#include "dbrec/model/dbrec_model.hpp"

#include <algorithm>

#include "dbrec/common/errors.hpp"

namespace dbrec::model {

namespace {

template <typename Params>
auto& embeddings_of(Params& p, Side side) {
  return side == Side::kUser ? p.user_emb : p.item_emb;
}

template <typename Params>
auto& offsets_of(Params& p, Side side) {
  return side == Side::kUser ? p.user_offset : p.item_offset;
}

template <typename Params>
auto& groups_of(Params& p, Side side) {
  return side == Side::kUser ? p.user_group_emb : p.item_group_emb;
}

template <typename Params>
auto& proj_of(Params& p, Side side) {
  return side == Side::kUser ? p.user_group_proj : p.item_group_proj;
}

template <typename Params>
auto& recon_of(Params& p, Side side) {
  return side == Side::kUser ? p.user_recon : p.item_recon;
}

template <typename Params>
auto& hier_of(Params& p, Side side) {
  return side == Side::kUser ? p.hier_user : p.hier_item;
}

template <typename DenseT>
Var dense(Graph& g, DenseT& layer, Var x) {
  return g.affine(x, g.parameter(layer.weight), g.parameter(layer.bias));
}

template <typename MlpT, typename Tensor>
Var branch_logit(Graph& g, MlpT& mlp, Tensor& fusion, Var input) {
  Var z = mlp_forward<MlpT>(g, mlp, input, false);
  return g.affine(z, g.parameter(fusion));
}

Indices sorted_unique(Indices v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

template <typename MlpT>
Var mlp_forward(Graph& g, MlpT& mlp, Var x, bool linear_last) {
  for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
    x = dense(g, mlp.layers[l], x);
    const bool last = l + 1 == mlp.layers.size();
    if (!(last && linear_last)) x = g.relu(x);
  }
  return x;
}

template <typename Params>
Var basic_logit(Graph& g, Params& p, const Indices& users, const Indices& items) {
  Var u = g.gather(p.user_emb, users);
  Var v = g.gather(p.item_emb, items);
  Var z0 = g.concat({u, v, g.hadamard(u, v)});
  return branch_logit(g, p.mlp_uv, p.fusion_uv, z0);
}

template <typename Params>
Var group_activation(Graph& g, Params& p, Side side, Var x) {
  return g.softmax(dense(g, proj_of(p, side), x));
}

template <typename Params>
Var soft_group_repr(Graph& g, Params& p, Side side, Var beta) {
  return g.matmul(beta, g.parameter(groups_of(p, side)));
}

template <typename Params>
Var reconstruct(Graph& g, Params& p, Side side, Var mu) {
  return g.sigmoid(dense(g, recon_of(p, side), mu));
}

Var group_margin_loss(Graph& g, Var recon, Var x, Var negatives) {
  Var rn = g.normalize(recon);
  Var xn = g.normalize(x);
  Var nn = g.normalize(negatives);
  Var pos = g.dot(rn, xn);
  Var neg = g.matmul_nt(rn, nn);
  Var margin = g.add(neg, g.scale(g.broadcast_cols(pos, g.rows(negatives)), -1.0));
  return g.sum(g.max0(g.shift(margin, 1.0)));
}

std::size_t hard_assignment(std::span<const double> beta) {
  if (beta.empty()) throw ConfigError("hard_assignment of an empty vector");
  return static_cast<std::size_t>(std::max_element(beta.begin(), beta.end()) - beta.begin());
}

Indices group_labels(const ModelParams& p, Side side, const Indices& entities) {
  Graph g;
  Var x = g.gather(embeddings_of(p, side), entities);
  Var beta = group_activation(g, p, side, x);
  g.forward();
  const auto& b = g.value(beta);
  Indices labels(entities.size());
  for (std::size_t r = 0; r < entities.size(); ++r) labels[r] = hard_assignment(b.row(r));
  return labels;
}

Indices all_group_labels(const ModelParams& p, Side side) {
  const std::size_t count = side == Side::kUser ? p.num_users : p.num_items;
  Indices labels;
  labels.reserve(count);
  constexpr std::size_t kChunk = 4096;
  for (std::size_t start = 0; start < count; start += kChunk) {
    Indices chunk;
    for (std::size_t i = start; i < std::min(count, start + kChunk); ++i) chunk.push_back(i);
    Indices part = group_labels(p, side, chunk);
    labels.insert(labels.end(), part.begin(), part.end());
  }
  return labels;
}

template <typename Params>
Var hierarchy_logits(Graph& g, Params& p, Side side, const Indices& entities) {
  Var x = g.add(g.gather(embeddings_of(p, side), entities),
                g.gather(offsets_of(p, side), entities));
  Var z = mlp_forward(g, hier_of(p, side), x, true);
  return g.matmul_nt(z, g.parameter(groups_of(p, side)));
}

template <typename Params>
Var hierarchy_posterior(Graph& g, Params& p, Side side, const Indices& entities) {
  return g.softmax(hierarchy_logits(g, p, side, entities));
}

template <typename Params>
Var hierarchy_loss(Graph& g, Params& p, Side side, const Indices& entities,
                   const Indices& labels) {
  return g.sum(g.softmax_xent(hierarchy_logits(g, p, side, entities), labels));
}

template <typename Params>
Var dual_bridge_logit(Graph& g, Params& p, const ComponentMask& mask, const Indices& users,
                      const Indices& items, const Indices& user_labels,
                      const Indices& item_labels) {
  Var logit = basic_logit(g, p, users, items);
  if (mask.ug_branch) {
    Var u = g.gather(p.user_emb, users);
    Var gv = g.gather(p.item_group_emb, item_labels);
    Var sim = g.bilinear(u, g.parameter(p.bilinear_user), gv);
    logit = g.add(logit, branch_logit(g, p.mlp_ug, p.fusion_ug, g.concat({u, gv, sim})));
  }
  if (mask.vg_branch) {
    Var v = g.gather(p.item_emb, items);
    Var gu = g.gather(p.user_group_emb, user_labels);
    Var sim = g.bilinear(v, g.parameter(p.bilinear_item), gu);
    logit = g.add(logit, branch_logit(g, p.mlp_vg, p.fusion_vg, g.concat({gu, v, sim})));
  }
  return logit;
}

Var cf_loss(Graph& g, Var probs, std::vector<double> labels) {
  return g.sum(g.bce(probs, std::move(labels)));
}

LossNodes build_total_loss(Graph& g, ModelParams& p, const data::TrainBatch& batch,
                           const ComponentMask& mask, double alpha) {
  if (batch.size() == 0) throw ConfigError("empty training batch");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");

  Indices users;
  Indices items;
  std::vector<double> labels;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    users.push_back(batch.users[i]);
    items.push_back(batch.items[i]);
    labels.push_back(1.0);
    for (std::uint32_t neg : batch.cf_negatives[i]) {
      users.push_back(batch.users[i]);
      items.push_back(neg);
      labels.push_back(0.0);
    }
  }

  Indices user_labels;
  Indices item_labels;
  if (mask.vg_branch) user_labels = group_labels(p, Side::kUser, users);
  if (mask.ug_branch) item_labels = group_labels(p, Side::kItem, items);

  LossNodes nodes;
  Var logit = dual_bridge_logit(g, p, mask, users, items, user_labels, item_labels);
  nodes.cf = cf_loss(g, g.sigmoid(logit), std::move(labels));

  std::vector<Var> aux;
  auto add_side = [&](Side side, const Indices& entities,
                      const std::vector<std::uint32_t>& negatives, Var& hier, Var& recon) {
    if (negatives.empty()) throw ConfigError("batch carries no group negatives");
    const Indices ent_labels = group_labels(p, side, entities);
    hier = hierarchy_loss(g, p, side, entities, ent_labels);

    auto& table = embeddings_of(p, side);
    Var x = g.gather(table, entities);
    Var beta = group_activation(g, p, side, x);
    Var rec = reconstruct(g, p, side, soft_group_repr(g, p, side, beta));
    Var neg = g.gather(table, Indices(negatives.begin(), negatives.end()));
    recon = group_margin_loss(g, rec, x, neg);
    aux.push_back(hier);
    aux.push_back(recon);
  };
  if (mask.user_groups) {
    add_side(Side::kUser, sorted_unique(Indices(batch.users.begin(), batch.users.end())),
             batch.group_negative_users, nodes.hier_user, nodes.recon_user);
  }
  if (mask.item_groups) {
    add_side(Side::kItem, sorted_unique(items), batch.group_negative_items, nodes.hier_item,
             nodes.recon_item);
  }

  nodes.total = nodes.cf;
  if (!aux.empty()) {
    Var acc = aux.front();
    for (std::size_t i = 1; i < aux.size(); ++i) acc = g.add(acc, aux[i]);
    nodes.weighted_aux = g.scale(acc, alpha);
    nodes.total = g.add(nodes.cf, nodes.weighted_aux);
  }
  return nodes;
}

LossValues read_losses(const Graph& g, const LossNodes& nodes) {
  auto read = [&](Var v) { return v.valid() ? g.scalar(v) : 0.0; };
  return {read(nodes.total),     read(nodes.cf),         read(nodes.hier_user),
          read(nodes.hier_item), read(nodes.recon_user), read(nodes.recon_item)};
}

double basic_score(const ModelParams& p, std::size_t user, std::size_t item) {
  Graph g;
  Var prob = g.sigmoid(basic_logit(g, p, {user}, {item}));
  g.forward();
  return g.scalar(prob);
}

double dual_bridge_score(const ModelParams& p, const ComponentMask& mask, std::size_t user,
                         std::size_t item) {
  const Indices users{user};
  const Indices items{item};
  const Indices a = mask.vg_branch ? group_labels(p, Side::kUser, users) : Indices{};
  const Indices b = mask.ug_branch ? group_labels(p, Side::kItem, items) : Indices{};
  Graph g;
  Var prob = g.sigmoid(dual_bridge_logit(g, p, mask, users, items, a, b));
  g.forward();
  return g.scalar(prob);
}

std::vector<double> score_pairs(const ModelParams& p, const ComponentMask& mask,
                                const Indices& users, const Indices& items,
                                const Indices& user_label_table,
                                const Indices& item_label_table) {
  Indices a;
  Indices b;
  if (mask.vg_branch) {
    for (std::size_t u : users) a.push_back(user_label_table.at(u));
  }
  if (mask.ug_branch) {
    for (std::size_t i : items) b.push_back(item_label_table.at(i));
  }
  Graph g;
  Var prob = g.sigmoid(dual_bridge_logit(g, p, mask, users, items, a, b));
  g.forward();
  const auto& values = g.value(prob).values();
  return {values.begin(), values.end()};
}

#define DBREC_INSTANTIATE(P)                                                              \
  template Var basic_logit<P>(Graph&, P&, const Indices&, const Indices&);                \
  template Var group_activation<P>(Graph&, P&, Side, Var);                                \
  template Var soft_group_repr<P>(Graph&, P&, Side, Var);                                 \
  template Var reconstruct<P>(Graph&, P&, Side, Var);                                     \
  template Var hierarchy_logits<P>(Graph&, P&, Side, const Indices&);                     \
  template Var hierarchy_posterior<P>(Graph&, P&, Side, const Indices&);                  \
  template Var hierarchy_loss<P>(Graph&, P&, Side, const Indices&, const Indices&);       \
  template Var dual_bridge_logit<P>(Graph&, P&, const ComponentMask&, const Indices&,     \
                                    const Indices&, const Indices&, const Indices&);

DBREC_INSTANTIATE(ModelParams)
DBREC_INSTANTIATE(const ModelParams)
#undef DBREC_INSTANTIATE

template Var mlp_forward<Mlp>(Graph&, Mlp&, Var, bool);
template Var mlp_forward<const Mlp>(Graph&, const Mlp&, Var, bool);

}  // namespace dbrec::model
