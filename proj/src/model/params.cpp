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

#include "dbrec/model/params.hpp"

#include <cmath>
#include <random>

#include "dbrec/common/binary_io.hpp"
#include "dbrec/common/errors.hpp"
#include "dbrec/common/rng.hpp"

namespace dbrec::model {

namespace {

constexpr double kEmbeddingInit = 0.05;

void fill_uniform(ParameterTensor& t, double limit, std::uint64_t seed) {
  Rng rng = make_rng({seed, fnv1a64(t.name)});
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& x : t.values) x = dist(rng);
}

void glorot(ParameterTensor& t, std::size_t fan_in, std::size_t fan_out, std::uint64_t seed) {
  fill_uniform(t, std::sqrt(6.0 / static_cast<double>(fan_in + fan_out)), seed);
}

Dense make_dense(const std::string& name, std::size_t in, std::size_t out, std::uint64_t seed) {
  Dense d{ParameterTensor(name + ".weight", {out, in}), ParameterTensor(name + ".bias", {out})};
  glorot(d.weight, in, out, seed);
  return d;
}

Mlp make_mlp(const std::string& name, std::size_t in, const std::vector<std::size_t>& widths,
             std::uint64_t seed) {
  Mlp mlp;
  std::size_t prev = in;
  for (std::size_t l = 0; l < widths.size(); ++l) {
    mlp.layers.push_back(make_dense(name + "." + std::to_string(l), prev, widths[l], seed));
    prev = widths[l];
  }
  return mlp;
}

ParameterTensor make_vector(const std::string& name, std::size_t n, std::uint64_t seed) {
  ParameterTensor t(name, {n});
  glorot(t, n, 1, seed);
  return t;
}

template <typename Self, typename Ptr>
std::vector<Ptr> collect(Self& p) {
  std::vector<Ptr> out{&p.user_emb,       &p.item_emb,       &p.user_group_emb,
                       &p.item_group_emb, &p.user_offset,    &p.item_offset};
  auto dense = [&](auto& d) {
    out.push_back(&d.weight);
    out.push_back(&d.bias);
  };
  auto mlp = [&](auto& m) {
    for (auto& layer : m.layers) dense(layer);
  };
  dense(p.user_group_proj);
  dense(p.item_group_proj);
  dense(p.user_recon);
  dense(p.item_recon);
  mlp(p.mlp_uv);
  mlp(p.mlp_ug);
  mlp(p.mlp_vg);
  mlp(p.hier_user);
  mlp(p.hier_item);
  out.push_back(&p.bilinear_user);
  out.push_back(&p.bilinear_item);
  out.push_back(&p.fusion_uv);
  out.push_back(&p.fusion_ug);
  out.push_back(&p.fusion_vg);
  return out;
}

void add_dense(std::vector<ParameterTensor*>& out, Dense& d) {
  out.push_back(&d.weight);
  out.push_back(&d.bias);
}

void add_mlp(std::vector<ParameterTensor*>& out, Mlp& m) {
  for (Dense& d : m.layers) add_dense(out, d);
}

void add_unique(std::vector<ParameterTensor*>& out, ParameterTensor* t) {
  for (ParameterTensor* p : out) {
    if (p == t) return;
  }
  out.push_back(t);
}

}  // namespace

ModelParams ModelParams::create(std::size_t num_users, std::size_t num_items,
                                const HyperParams& hyper, std::uint64_t seed) {
  hyper.validate_for(num_users, num_items);
  const std::size_t d = hyper.embedding_dim;
  const std::size_t dg = hyper.group_dim;
  const std::size_t k = hyper.num_groups;

  ModelParams p;
  p.hyper = hyper;
  p.num_users = num_users;
  p.num_items = num_items;

  p.user_emb = ParameterTensor("user_emb", {num_users, d});
  p.item_emb = ParameterTensor("item_emb", {num_items, d});
  p.user_group_emb = ParameterTensor("user_group_emb", {k, dg});
  p.item_group_emb = ParameterTensor("item_group_emb", {k, dg});
  fill_uniform(p.user_emb, kEmbeddingInit, seed);
  fill_uniform(p.item_emb, kEmbeddingInit, seed);
  fill_uniform(p.user_group_emb, kEmbeddingInit, seed);
  fill_uniform(p.item_group_emb, kEmbeddingInit, seed);
  p.user_offset = ParameterTensor("user_offset", {num_users, d});
  p.item_offset = ParameterTensor("item_offset", {num_items, d});

  p.user_group_proj = make_dense("user_group_proj", d, k, seed);
  p.item_group_proj = make_dense("item_group_proj", d, k, seed);
  p.user_recon = make_dense("user_recon", dg, d, seed);
  p.item_recon = make_dense("item_recon", dg, d, seed);

  p.mlp_uv = make_mlp("mlp_uv", 3 * d, hyper.hidden_uv, seed);
  p.mlp_ug = make_mlp("mlp_ug", d + dg + 1, hyper.hidden_ug, seed);
  p.mlp_vg = make_mlp("mlp_vg", d + dg + 1, hyper.hidden_vg, seed);

  std::vector<std::size_t> hier = hyper.hidden_hierarchy;
  hier.push_back(dg);
  p.hier_user = make_mlp("hier_user", d, hier, seed);
  p.hier_item = make_mlp("hier_item", d, hier, seed);

  p.bilinear_user = ParameterTensor("bilinear_user", {d, dg});
  p.bilinear_item = ParameterTensor("bilinear_item", {d, dg});
  glorot(p.bilinear_user, d, dg, seed);
  glorot(p.bilinear_item, d, dg, seed);
  p.fusion_uv = make_vector("fusion_uv", p.mlp_uv.output_dim(), seed);
  p.fusion_ug = make_vector("fusion_ug", p.mlp_ug.output_dim(), seed);
  p.fusion_vg = make_vector("fusion_vg", p.mlp_vg.output_dim(), seed);
  return p;
}

std::vector<ParameterTensor*> ModelParams::all() {
  return collect<ModelParams, ParameterTensor*>(*this);
}

std::vector<const ParameterTensor*> ModelParams::all() const {
  return collect<const ModelParams, const ParameterTensor*>(*this);
}

ParameterTensor& ModelParams::find(std::string_view name) {
  for (ParameterTensor* t : all()) {
    if (t->name == name) return *t;
  }
  throw ConfigError("no parameter named '" + std::string(name) + "'");
}

const ParameterTensor& ModelParams::find(std::string_view name) const {
  for (const ParameterTensor* t : all()) {
    if (t->name == name) return *t;
  }
  throw ConfigError("no parameter named '" + std::string(name) + "'");
}

std::vector<ParameterTensor*> basic_params(ModelParams& p) {
  std::vector<ParameterTensor*> out{&p.user_emb, &p.item_emb};
  add_mlp(out, p.mlp_uv);
  out.push_back(&p.fusion_uv);
  return out;
}

std::vector<ParameterTensor*> trainable_params(ModelParams& p, const ComponentMask& mask) {
  std::vector<ParameterTensor*> out = basic_params(p);
  if (mask.user_groups) {
    out.push_back(&p.user_group_emb);
    out.push_back(&p.user_offset);
    add_dense(out, p.user_group_proj);
    add_dense(out, p.user_recon);
    add_mlp(out, p.hier_user);
  }
  if (mask.item_groups) {
    out.push_back(&p.item_group_emb);
    out.push_back(&p.item_offset);
    add_dense(out, p.item_group_proj);
    add_dense(out, p.item_recon);
    add_mlp(out, p.hier_item);
  }
  if (mask.ug_branch) {
    add_mlp(out, p.mlp_ug);
    out.push_back(&p.fusion_ug);
    out.push_back(&p.bilinear_user);
    add_unique(out, &p.item_group_emb);
  }
  if (mask.vg_branch) {
    add_mlp(out, p.mlp_vg);
    out.push_back(&p.fusion_vg);
    out.push_back(&p.bilinear_item);
    add_unique(out, &p.user_group_emb);
  }
  return out;
}

std::uint64_t values_hash(const ModelParams& params) {
  std::uint64_t h = 0;
  for (const ParameterTensor* t : params.all()) {
    std::string_view raw(reinterpret_cast<const char*>(t->values.data()),
                         t->values.size() * sizeof(double));
    h = mix64(h ^ fnv1a64(raw));
  }
  return h;
}

}  // namespace dbrec::model
