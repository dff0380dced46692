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
#include <string>
#include <vector>

namespace dbrec::engine {

// A named learnable array together with its gradient accumulator and Adam
// moment buffers. values, grad, m and v always have the same length.
//
// Shapes of rank 1 are viewed as a single row (1 x n); rank 2 as rows x cols.
struct ParameterTensor {
  ParameterTensor() = default;
  ParameterTensor(std::string name, std::vector<std::size_t> shape);

  std::size_t rows() const;
  std::size_t cols() const;
  std::size_t size() const { return values.size(); }

  double& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
  std::span<double> row(std::size_t r) { return {values.data() + r * cols(), cols()}; }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * cols(), cols()};
  }

  void zero_grad();
  bool grad_is_zero() const;

  // Throws NumericError naming this tensor if any value is NaN/Inf.
  void check_finite() const;

  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> values;
  std::vector<double> grad;
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step_count = 0;
};

void zero_grads(std::span<ParameterTensor* const> params);

}  // namespace dbrec::engine
