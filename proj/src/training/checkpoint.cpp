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

#include "dbrec/training/checkpoint.hpp"

#include "dbrec/common/binary_io.hpp"
#include "dbrec/common/errors.hpp"

namespace dbrec::training {

namespace {

void write_sizes(BinaryWriter& w, const std::vector<std::size_t>& sizes) {
  w.u64(sizes.size());
  for (std::size_t s : sizes) w.u64(s);
}

std::vector<std::size_t> read_sizes(BinaryReader& r) {
  std::vector<std::size_t> sizes(r.u64());
  for (auto& s : sizes) s = r.u64();
  return sizes;
}

void write_hyper(BinaryWriter& w, const model::HyperParams& h) {
  w.u64(h.embedding_dim);
  w.u64(h.group_dim);
  w.u64(h.num_groups);
  w.f64(h.alpha);
  w.f64(h.learning_rate);
  w.u64(h.batch_size);
  w.u64(h.cf_negatives);
  w.u64(h.group_negatives);
  write_sizes(w, h.hidden_uv);
  write_sizes(w, h.hidden_ug);
  write_sizes(w, h.hidden_vg);
  write_sizes(w, h.hidden_hierarchy);
  w.u64(h.epochs);
  w.u64(h.seed);
}

model::HyperParams read_hyper(BinaryReader& r) {
  model::HyperParams h;
  h.embedding_dim = r.u64();
  h.group_dim = r.u64();
  h.num_groups = r.u64();
  h.alpha = r.f64();
  h.learning_rate = r.f64();
  h.batch_size = r.u64();
  h.cf_negatives = r.u64();
  h.group_negatives = r.u64();
  h.hidden_uv = read_sizes(r);
  h.hidden_ug = read_sizes(r);
  h.hidden_vg = read_sizes(r);
  h.hidden_hierarchy = read_sizes(r);
  h.epochs = r.u64();
  h.seed = r.u64();
  return h;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  BinaryWriter w;
  w.str(ckpt.phase);
  w.str(model::variant_name(ckpt.variant));
  write_hyper(w, ckpt.params.hyper);
  w.u64(ckpt.params.num_users);
  w.u64(ckpt.params.num_items);

  const TrainingState& s = ckpt.state;
  w.u64(s.epoch);
  w.u64(s.global_epoch);
  w.f64(s.best_valid_hr);
  w.f64(s.best_valid_ndcg);
  w.u64(s.best_epoch);
  w.u64(s.evals_since_best);
  w.u8(s.stopped_early ? 1 : 0);

  const auto tensors = ckpt.params.all();
  w.u64(tensors.size());
  for (const auto* t : tensors) {
    w.str(t->name);
    w.u64(t->rows());
    w.u64(t->cols());
    w.u64(t->step_count);
    w.f64s(t->values);
    w.f64s(t->m);
    w.f64s(t->v);
  }
  return w.bytes();
}

Checkpoint deserialize_checkpoint(const std::string& payload) {
  BinaryReader r(payload);
  Checkpoint ckpt;
  ckpt.phase = r.str();
  try {
    ckpt.variant = model::parse_variant(r.str());
  } catch (const ConfigError& e) {
    throw IntegrityError(std::string("checkpoint names an unknown variant: ") + e.what());
  }
  const model::HyperParams hyper = read_hyper(r);
  const std::size_t num_users = r.u64();
  const std::size_t num_items = r.u64();
  try {
    hyper.validate_for(num_users, num_items);
  } catch (const ConfigError& e) {
    throw IntegrityError(std::string("checkpoint holds invalid hyperparameters: ") + e.what());
  }

  TrainingState& s = ckpt.state;
  s.epoch = r.u64();
  s.global_epoch = r.u64();
  s.best_valid_hr = r.f64();
  s.best_valid_ndcg = r.f64();
  s.best_epoch = r.u64();
  s.evals_since_best = r.u64();
  s.stopped_early = r.u8() != 0;

  // Shapes come from the hyperparameters; values are overwritten below.
  ckpt.params = model::ModelParams::create(num_users, num_items, hyper, 0);
  auto tensors = ckpt.params.all();
  if (r.u64() != tensors.size()) throw IntegrityError("checkpoint tensor count mismatch");
  for (auto* t : tensors) {
    const std::string name = r.str();
    if (name != t->name) {
      throw IntegrityError("checkpoint tensor '" + name + "' where '" + t->name + "' expected");
    }
    const std::size_t rows = r.u64();
    const std::size_t cols = r.u64();
    if (rows != t->rows() || cols != t->cols()) {
      throw IntegrityError("checkpoint tensor '" + name + "' has the wrong shape");
    }
    t->step_count = r.u64();
    t->values = r.f64s();
    t->m = r.f64s();
    t->v = r.f64s();
    const std::size_t n = rows * cols;
    if (t->values.size() != n || t->m.size() != n || t->v.size() != n) {
      throw IntegrityError("checkpoint tensor '" + name + "' has the wrong length");
    }
    t->grad.assign(n, 0.0);
  }
  if (!r.at_end()) throw IntegrityError("trailing bytes after checkpoint payload");
  return ckpt;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  write_container(path, kCheckpointMagic, kCheckpointVersion, serialize_checkpoint(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint(read_container(path, kCheckpointMagic, kCheckpointVersion));
}

}  // namespace dbrec::training
