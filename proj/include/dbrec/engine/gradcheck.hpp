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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dbrec/engine/parameter.hpp"

namespace dbrec::engine {

// Evaluates the loss at the current parameter values. When `accumulate_grads`
// is true it must also run backward so that analytic gradients are added onto
// ParameterTensor::grad.
using LossFunction = std::function<double(bool accumulate_grads)>;

struct GradCheckOptions {
  double step = 1e-4;          // central-difference h, in [1e-6, 1e-3]
  double tolerance = 1e-4;     // max allowed relative error
  std::size_t coords_per_tensor = 20;
  // Denominator floor of the relative error, so coordinates whose true
  // gradient is ~0 are compared on an absolute scale.
  double magnitude_floor = 1e-6;
  std::uint64_t seed = 1234;
};

struct CoordinateCheck {
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double relative_error = 0.0;
};

struct TensorCheck {
  std::string name;
  std::vector<CoordinateCheck> coords;
  double max_relative_error = 0.0;
  bool passed = true;
};

struct GradCheckReport {
  std::vector<TensorCheck> tensors;
  bool passed() const;
  std::string summary() const;
};

double relative_error(double analytic, double numeric, double floor);

// Compares analytic gradients against (L(x+h) - L(x-h)) / 2h on a seeded
// subset of coordinates per tensor (all coordinates when the tensor is
// smaller). Parameter values are restored exactly afterwards; gradients are
// left zeroed.
//
// Throws OracleError if two loss evaluations at identical parameters differ.
GradCheckReport finite_diff_check(const LossFunction& loss,
                                  std::span<ParameterTensor* const> params,
                                  const GradCheckOptions& options = {});

}  // namespace dbrec::engine
