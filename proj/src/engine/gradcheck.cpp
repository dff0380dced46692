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

#include "dbrec/engine/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dbrec/common/errors.hpp"
#include "dbrec/common/rng.hpp"

namespace dbrec::engine {

bool GradCheckReport::passed() const {
  return std::all_of(tensors.begin(), tensors.end(),
                     [](const TensorCheck& t) { return t.passed; });
}

std::string GradCheckReport::summary() const {
  std::ostringstream os;
  for (const TensorCheck& t : tensors) {
    os << (t.passed ? "ok   " : "FAIL ") << t.name << " coords=" << t.coords.size()
       << " max_rel_err=" << t.max_relative_error << "\n";
  }
  return os.str();
}

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport finite_diff_check(const LossFunction& loss,
                                  std::span<ParameterTensor* const> params,
                                  const GradCheckOptions& options) {
  if (!(options.step >= 1e-6 && options.step <= 1e-3)) {
    throw ConfigError("finite_diff_check: step must lie in [1e-6, 1e-3]");
  }

  const double first = loss(false);
  const double second = loss(false);
  if (first != second) {
    throw OracleError("finite_diff_check: loss is not deterministic (" +
                      std::to_string(first) + " vs " + std::to_string(second) + ")");
  }

  zero_grads(params);
  loss(true);
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (ParameterTensor* p : params) analytic.push_back(p->grad);
  zero_grads(params);

  Rng rng(options.seed);
  GradCheckReport report;
  for (std::size_t t = 0; t < params.size(); ++t) {
    ParameterTensor& p = *params[t];
    std::vector<std::size_t> coords(p.size());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (coords.size() > options.coords_per_tensor) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(options.coords_per_tensor);
      std::sort(coords.begin(), coords.end());
    }

    TensorCheck check;
    check.name = p.name;
    for (std::size_t idx : coords) {
      const double saved = p.values[idx];
      p.values[idx] = saved + options.step;
      const double plus = loss(false);
      p.values[idx] = saved - options.step;
      const double minus = loss(false);
      p.values[idx] = saved;

      CoordinateCheck c;
      c.index = idx;
      c.analytic = analytic[t][idx];
      c.numeric = (plus - minus) / (2.0 * options.step);
      c.relative_error = relative_error(c.analytic, c.numeric, options.magnitude_floor);
      check.max_relative_error = std::max(check.max_relative_error, c.relative_error);
      check.coords.push_back(c);
    }
    check.passed = check.max_relative_error <= options.tolerance;
    report.tensors.push_back(std::move(check));
  }
  return report;
}

}  // namespace dbrec::engine
