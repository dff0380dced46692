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

#include "dbrec/engine/adam.hpp"

#include <cmath>

#include "dbrec/common/errors.hpp"

namespace dbrec::engine {

void AdamOptions::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("adam: learning rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("adam: beta1 must be in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("adam: beta2 must be in [0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("adam: epsilon must be > 0");
}

void adam_step(std::span<ParameterTensor* const> params, const AdamOptions& options) {
  options.validate();
  for (const ParameterTensor* p : params) {
    if (p->m.size() != p->values.size() || p->v.size() != p->values.size() ||
        p->grad.size() != p->values.size()) {
      throw InternalError("adam: moment buffers of '" + p->name + "' are not initialized");
    }
    for (std::size_t i = 0; i < p->grad.size(); ++i) {
      if (!std::isfinite(p->grad[i])) {
        throw NumericError("adam: non-finite gradient in '" + p->name + "' at flat index " +
                           std::to_string(i));
      }
    }
  }

  for (ParameterTensor* p : params) {
    const double t = static_cast<double>(p->step_count + 1);
    const double bias1 = 1.0 - std::pow(options.beta1, t);
    const double bias2 = 1.0 - std::pow(options.beta2, t);
    for (std::size_t i = 0; i < p->values.size(); ++i) {
      const double g = p->grad[i];
      p->m[i] = options.beta1 * p->m[i] + (1.0 - options.beta1) * g;
      p->v[i] = options.beta2 * p->v[i] + (1.0 - options.beta2) * g * g;
      const double m_hat = p->m[i] / bias1;
      const double v_hat = p->v[i] / bias2;
      p->values[i] -= options.learning_rate * m_hat / (std::sqrt(v_hat) + options.epsilon);
    }
    ++p->step_count;
    p->zero_grad();
    p->check_finite();
  }
}

}  // namespace dbrec::engine
