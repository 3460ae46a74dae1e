// Copyright 2026 The WNC Neutralizer Authors.
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

#include "wnc/optim.hpp"

#include <cmath>

namespace wnc::nn {

void Adam::step(ParameterSet& params) {
  ++step_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
  for (Parameter& p : params) {
    if (p.frozen || p.grad.size() != p.value.size()) continue;
    Moments& mo = moments_[&p];
    if (mo.m.size() != p.value.size()) {
      mo.m.assign(p.value.size(), 0.0);
      mo.v.assign(p.value.size(), 0.0);
    }
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      mo.m[i] = cfg_.beta1 * mo.m[i] + (1.0 - cfg_.beta1) * g;
      mo.v[i] = cfg_.beta2 * mo.v[i] + (1.0 - cfg_.beta2) * g * g;
      const double m_hat = mo.m[i] / c1;
      const double v_hat = mo.v[i] / c2;
      p.value[i] = static_cast<real>(p.value[i] - cfg_.lr * m_hat / (std::sqrt(v_hat) + cfg_.eps));
    }
  }
}

double global_grad_norm(const ParameterSet& params) { return params.grad_norm(); }

double clip_gradients(ParameterSet& params, double max_norm) {
  const double norm = global_grad_norm(params);
  if (!(norm > max_norm)) return 1.0;
  const double scale = max_norm / norm;
  for (Parameter& p : params) {
    for (auto& g : p.grad.values()) g = static_cast<real>(g * scale);
  }
  return scale;
}

}  // namespace wnc::nn
