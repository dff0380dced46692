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

// Loop-based reference evaluation of the model, written independently of the
// graph engine. Used as the oracle for forward values of every loss term.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "dbrec/data/sampling.hpp"
#include "dbrec/model/params.hpp"

namespace dbrec::oracle {

using Vec = std::vector<double>;

inline Vec row(const engine::ParameterTensor& t, std::size_t r) {
  return Vec(t.values.begin() + static_cast<long>(r * t.cols()),
             t.values.begin() + static_cast<long>((r + 1) * t.cols()));
}

inline Vec concat(std::initializer_list<Vec> parts) {
  Vec out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline Vec dense(const model::Dense& layer, const Vec& x) {
  const auto& w = layer.weight;
  Vec y(w.rows());
  for (std::size_t o = 0; o < w.rows(); ++o) {
    double s = layer.bias.values[o];
    for (std::size_t i = 0; i < w.cols(); ++i) s += w.at(o, i) * x[i];
    y[o] = s;
  }
  return y;
}

inline Vec mlp(const model::Mlp& net, Vec x, bool linear_last) {
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    x = dense(net.layers[l], x);
    if (!(linear_last && l + 1 == net.layers.size())) {
      for (double& v : x) v = std::max(0.0, v);
    }
  }
  return x;
}

inline Vec softmax(const Vec& logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  Vec out(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) z += (out[i] = std::exp(logits[i] - mx));
  for (double& v : out) v /= z;
  return out;
}

inline std::size_t argmax(const Vec& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

inline const engine::ParameterTensor& emb(const model::ModelParams& p, model::Side s) {
  return s == model::Side::kUser ? p.user_emb : p.item_emb;
}

inline Vec beta(const model::ModelParams& p, model::Side s, std::size_t e) {
  const auto& proj = s == model::Side::kUser ? p.user_group_proj : p.item_group_proj;
  return softmax(dense(proj, row(emb(p, s), e)));
}

inline std::size_t label(const model::ModelParams& p, model::Side s, std::size_t e) {
  return argmax(beta(p, s, e));
}

inline double basic_logit(const model::ModelParams& p, std::size_t u, std::size_t i) {
  const Vec uv = row(p.user_emb, u);
  const Vec iv = row(p.item_emb, i);
  Vec prod(uv.size());
  for (std::size_t c = 0; c < uv.size(); ++c) prod[c] = uv[c] * iv[c];
  return dot(mlp(p.mlp_uv, concat({uv, iv, prod}), false), p.fusion_uv.values);
}

// x^T M y with M stored d x d_g.
inline double bilinear(const Vec& x, const engine::ParameterTensor& m, const Vec& y) {
  double s = 0.0;
  for (std::size_t a = 0; a < m.rows(); ++a) {
    for (std::size_t b = 0; b < m.cols(); ++b) s += x[a] * m.at(a, b) * y[b];
  }
  return s;
}

inline double full_logit(const model::ModelParams& p, const model::ComponentMask& mask,
                         std::size_t u, std::size_t i) {
  double logit = basic_logit(p, u, i);
  const Vec uv = row(p.user_emb, u);
  const Vec iv = row(p.item_emb, i);
  if (mask.ug_branch) {
    const Vec g = row(p.item_group_emb, label(p, model::Side::kItem, i));
    const Vec in = concat({uv, g, {bilinear(uv, p.bilinear_user, g)}});
    logit += dot(mlp(p.mlp_ug, in, false), p.fusion_ug.values);
  }
  if (mask.vg_branch) {
    const Vec g = row(p.user_group_emb, label(p, model::Side::kUser, u));
    const Vec in = concat({g, iv, {bilinear(iv, p.bilinear_item, g)}});
    logit += dot(mlp(p.mlp_vg, in, false), p.fusion_vg.values);
  }
  return logit;
}

inline Vec hierarchy_posterior(const model::ModelParams& p, model::Side s, std::size_t e) {
  const auto& off = s == model::Side::kUser ? p.user_offset : p.item_offset;
  const auto& net = s == model::Side::kUser ? p.hier_user : p.hier_item;
  const auto& groups = s == model::Side::kUser ? p.user_group_emb : p.item_group_emb;
  Vec x = row(emb(p, s), e);
  const Vec o = row(off, e);
  for (std::size_t c = 0; c < x.size(); ++c) x[c] += o[c];
  const Vec z = mlp(net, x, true);
  Vec logits(groups.rows());
  for (std::size_t g = 0; g < groups.rows(); ++g) logits[g] = dot(z, row(groups, g));
  return softmax(logits);
}

inline double hierarchy_loss(const model::ModelParams& p, model::Side s,
                             const std::vector<std::size_t>& entities) {
  double total = 0.0;
  for (std::size_t e : entities) total -= std::log(hierarchy_posterior(p, s, e)[label(p, s, e)]);
  return total;
}

inline Vec unit(const Vec& x) {
  const double n = std::sqrt(dot(x, x));
  Vec out(x);
  for (double& v : out) v /= (n + 1e-12);
  return out;
}

inline double cosine(const Vec& a, const Vec& b) { return dot(unit(a), unit(b)); }

inline Vec reconstruction(const model::ModelParams& p, model::Side s, std::size_t e) {
  const auto& groups = s == model::Side::kUser ? p.user_group_emb : p.item_group_emb;
  const auto& rec = s == model::Side::kUser ? p.user_recon : p.item_recon;
  const Vec b = beta(p, s, e);
  Vec mu(groups.cols(), 0.0);
  for (std::size_t g = 0; g < groups.rows(); ++g) {
    for (std::size_t c = 0; c < groups.cols(); ++c) mu[c] += b[g] * groups.at(g, c);
  }
  Vec out = dense(rec, mu);
  for (double& v : out) v = sigmoid(v);
  return out;
}

inline double margin_loss(const Vec& rec, const Vec& x, const std::vector<Vec>& negatives) {
  double total = 0.0;
  for (const Vec& n : negatives) total += std::max(0.0, 1.0 - cosine(rec, x) + cosine(rec, n));
  return total;
}

inline double recon_loss(const model::ModelParams& p, model::Side s,
                         const std::vector<std::size_t>& entities,
                         const std::vector<std::uint32_t>& negatives) {
  std::vector<Vec> neg;
  for (auto n : negatives) neg.push_back(row(emb(p, s), n));
  double total = 0.0;
  for (std::size_t e : entities) {
    total += margin_loss(reconstruction(p, s, e), row(emb(p, s), e), neg);
  }
  return total;
}

inline double bce(double prob, double label) {
  const double q = std::clamp(prob, 1e-12, 1.0 - 1e-12);
  return -(label * std::log(q) + (1.0 - label) * std::log(1.0 - q));
}

struct Terms {
  double cf = 0.0;
  double hier_user = 0.0;
  double hier_item = 0.0;
  double recon_user = 0.0;
  double recon_item = 0.0;
  double total = 0.0;
};

inline Terms total_loss(const model::ModelParams& p, const data::TrainBatch& batch,
                        const model::ComponentMask& mask, double alpha) {
  Terms t;
  std::vector<std::size_t> users;
  std::vector<std::size_t> items;
  for (std::size_t r = 0; r < batch.size(); ++r) {
    users.push_back(batch.users[r]);
    items.push_back(batch.items[r]);
    t.cf += bce(sigmoid(full_logit(p, mask, batch.users[r], batch.items[r])), 1.0);
    for (auto n : batch.cf_negatives[r]) {
      items.push_back(n);
      t.cf += bce(sigmoid(full_logit(p, mask, batch.users[r], n)), 0.0);
    }
  }
  auto uniq = [](std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  users = uniq(users);
  items = uniq(items);
  if (mask.user_groups) {
    t.hier_user = hierarchy_loss(p, model::Side::kUser, users);
    t.recon_user = recon_loss(p, model::Side::kUser, users, batch.group_negative_users);
  }
  if (mask.item_groups) {
    t.hier_item = hierarchy_loss(p, model::Side::kItem, items);
    t.recon_item = recon_loss(p, model::Side::kItem, items, batch.group_negative_items);
  }
  t.total = t.cf + alpha * (t.hier_user + t.hier_item + t.recon_user + t.recon_item);
  return t;
}

}  // namespace dbrec::oracle
