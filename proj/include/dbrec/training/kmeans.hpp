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
#include <vector>

#include "dbrec/engine/matrix.hpp"
#include "dbrec/model/params.hpp"

namespace dbrec::training {

struct KMeansResult {
  engine::Matrix centroids;  // k x dim
  std::vector<std::size_t> labels;
  double inertia = 0.0;  // sum of squared distances to the assigned centroid
  std::size_t iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding. Stops after `max_iters` rounds or
// once no centroid moves by `tol` or more (Euclidean). A cluster that loses
// all its points is re-seeded with the point farthest from its centroid.
// Nearest-centroid ties go to the lower index.
KMeansResult kmeans(const engine::Matrix& points, std::size_t k, std::size_t max_iters,
                    double tol, std::uint64_t seed);

// centroids (k x d) times a seeded d x out_dim Gaussian matrix scaled by
// 1/sqrt(d). With `identity` (requires out_dim == d) the input is returned.
engine::Matrix project_centroids(const engine::Matrix& centroids, std::size_t out_dim,
                                 std::uint64_t seed, bool identity = false);

struct GroupInitOptions {
  std::size_t kmeans_iters = 100;
  double kmeans_tol = 1e-4;
  std::uint64_t seed = 0;
};

// Clusters the user (item) embeddings into k groups and writes the projected
// centroids into the user (item) group embedding table.
void init_group_embeddings(model::ModelParams& params, const GroupInitOptions& options);

engine::Matrix to_matrix(const engine::ParameterTensor& tensor);

}  // namespace dbrec::training
