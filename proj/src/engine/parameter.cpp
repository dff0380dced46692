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

#include "dbrec/engine/parameter.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "dbrec/common/errors.hpp"

namespace dbrec::engine {

ParameterTensor::ParameterTensor(std::string name_in, std::vector<std::size_t> shape_in)
    : name(std::move(name_in)), shape(std::move(shape_in)) {
  if (shape.empty() || shape.size() > 2) {
    throw ConfigError("parameter " + name + ": rank must be 1 or 2");
  }
  for (std::size_t d : shape) {
    if (d == 0) throw ConfigError("parameter " + name + ": zero dimension");
  }
  const std::size_t n = std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                                        std::multiplies<>());
  values.assign(n, 0.0);
  grad.assign(n, 0.0);
  m.assign(n, 0.0);
  v.assign(n, 0.0);
}

std::size_t ParameterTensor::rows() const { return shape.size() == 1 ? 1 : shape[0]; }

std::size_t ParameterTensor::cols() const {
  return shape.size() == 1 ? shape[0] : shape[1];
}

void ParameterTensor::zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }

bool ParameterTensor::grad_is_zero() const {
  return std::all_of(grad.begin(), grad.end(), [](double g) { return g == 0.0; });
}

void ParameterTensor::check_finite() const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw NumericError("non-finite value in parameter '" + name + "' at flat index " +
                         std::to_string(i));
    }
  }
}

void zero_grads(std::span<ParameterTensor* const> params) {
  for (ParameterTensor* p : params) p->zero_grad();
}

}  // namespace dbrec::engine
