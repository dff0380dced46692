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

#include "dbrec/training/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dbrec/common/errors.hpp"
#include "dbrec/common/rng.hpp"

namespace dbrec::training {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return acc;
}

// Returns the index of the nearest centroid and its squared distance.
std::pair<std::size_t, double> nearest(const engine::Matrix& centroids,
                                       std::span<const double> point) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.rows(); ++c) {
    const double d = squared_distance(point, centroids.row(c));
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return {best, best_d};
}

engine::Matrix seed_plus_plus(const engine::Matrix& points, std::size_t k, Rng& rng) {
  const std::size_t n = points.rows();
  engine::Matrix centroids(k, points.cols());
  std::vector<bool> chosen(n, false);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());

  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  std::size_t pick = first(rng);
  for (std::size_t c = 0; c < k; ++c) {
    if (c > 0) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) total += d2[i];
      if (total > 0.0) {
        std::uniform_real_distribution<double> u(0.0, total);
        double target = u(rng);
        pick = n;
        for (std::size_t i = 0; i < n; ++i) {
          if (d2[i] <= 0.0) continue;
          target -= d2[i];
          if (target <= 0.0) {
            pick = i;
            break;
          }
        }
        if (pick == n) {  // rounding left a sliver; take the last candidate
          for (std::size_t i = n; i-- > 0;) {
            if (d2[i] > 0.0) {
              pick = i;
              break;
            }
          }
        }
      } else {
        // Every point coincides with a chosen centroid.
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < n; ++i) {
          if (!chosen[i]) rest.push_back(i);
        }
        std::uniform_int_distribution<std::size_t> any(0, rest.size() - 1);
        pick = rest[any(rng)];
      }
    }
    chosen[pick] = true;
    auto src = points.row(pick);
    std::copy(src.begin(), src.end(), centroids.row(c).begin());
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points.row(i), centroids.row(c)));
    }
  }
  return centroids;
}

}  // namespace

KMeansResult kmeans(const engine::Matrix& points, std::size_t k, std::size_t max_iters,
                    double tol, std::uint64_t seed) {
  const std::size_t n = points.rows();
  const std::size_t dim = points.cols();
  if (k == 0) throw ConfigError("kmeans: k must be positive");
  if (n < k) {
    throw ConfigError("kmeans: " + std::to_string(n) + " points cannot form " +
                      std::to_string(k) + " clusters");
  }
  Rng rng = make_rng({seed, 0x4b4d});
  KMeansResult result;
  result.centroids = seed_plus_plus(points, k, rng);
  result.labels.assign(n, 0);

  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto [c, d] = nearest(result.centroids, points.row(i));
      result.labels[i] = c;
      dist[i] = d;
    }
    engine::Matrix next(k, dim);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = result.labels[i];
      ++counts[c];
      auto src = points.row(i);
      auto dst = next.row(c);
      for (std::size_t j = 0; j < dim; ++j) dst[j] += src[j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        const std::size_t far =
            static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
        auto src = points.row(far);
        std::copy(src.begin(), src.end(), next.row(c).begin());
        dist[far] = 0.0;
        continue;
      }
      for (double& x : next.row(c)) x /= static_cast<double>(counts[c]);
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      shift = std::max(shift, std::sqrt(squared_distance(next.row(c), result.centroids.row(c))));
    }
    result.centroids = std::move(next);
    result.iterations = iter + 1;
    if (shift < tol) break;
  }

  result.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto [c, d] = nearest(result.centroids, points.row(i));
    result.labels[i] = c;
    result.inertia += d;
  }
  return result;
}

engine::Matrix project_centroids(const engine::Matrix& centroids, std::size_t out_dim,
                                 std::uint64_t seed, bool identity) {
  const std::size_t d = centroids.cols();
  if (out_dim > d) {
    throw ConfigError("project_centroids: target dimension " + std::to_string(out_dim) +
                      " exceeds source dimension " + std::to_string(d));
  }
  if (identity) {
    if (out_dim != d) throw ConfigError("identity projection needs equal dimensions");
    return centroids;
  }
  Rng rng = make_rng({seed, 0x9a0e});
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  engine::Matrix proj(d, out_dim);
  for (double& x : proj.values()) x = gauss(rng) * scale;

  engine::Matrix out(centroids.rows(), out_dim);
  for (std::size_t r = 0; r < centroids.rows(); ++r) {
    for (std::size_t i = 0; i < d; ++i) {
      const double c = centroids(r, i);
      for (std::size_t j = 0; j < out_dim; ++j) out(r, j) += c * proj(i, j);
    }
  }
  return out;
}

engine::Matrix to_matrix(const engine::ParameterTensor& tensor) {
  return engine::Matrix(tensor.rows(), tensor.cols(), tensor.values);
}

void init_group_embeddings(model::ModelParams& params, const GroupInitOptions& options) {
  const std::size_t k = params.hyper.num_groups;
  const std::size_t dg = params.hyper.group_dim;
  auto init_side = [&](const engine::ParameterTensor& emb, engine::ParameterTensor& groups,
                       std::uint64_t tag) {
    const KMeansResult km = kmeans(to_matrix(emb), k, options.kmeans_iters, options.kmeans_tol,
                                   derive_seed({options.seed, tag}));
    const engine::Matrix projected =
        project_centroids(km.centroids, dg, derive_seed({options.seed, tag, 1}));
    std::copy(projected.values().begin(), projected.values().end(), groups.values.begin());
  };
  init_side(params.user_emb, params.user_group_emb, 0x75);
  init_side(params.item_emb, params.item_group_emb, 0x69);
}

}  // namespace dbrec::training
