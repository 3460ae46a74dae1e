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

#pragma once

#include <cstdint>
#include <unordered_map>

#include "wnc/tensor.hpp"

namespace wnc::nn {

struct AdamConfig {
  double lr = 5e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction. Moments are created lazily per parameter.
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  // Applies one update to every non-frozen parameter from its grad.
  void step(ParameterSet& params);

  const AdamConfig& config() const { return cfg_; }
  void set_lr(double lr) { cfg_.lr = lr; }
  std::int64_t steps() const { return step_; }

 private:
  struct Moments {
    std::vector<double> m;
    std::vector<double> v;
  };

  AdamConfig cfg_;
  std::int64_t step_ = 0;
  std::unordered_map<const Parameter*, Moments> moments_;
};

// Global L2 norm of all parameter gradients.
double global_grad_norm(const ParameterSet& params);

// Rescales every gradient by max_norm / norm when the global norm exceeds
// max_norm. Returns the scale that was applied (1 when untouched).
double clip_gradients(ParameterSet& params, double max_norm = 3.0);

}  // namespace wnc::nn
