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
#include <functional>
#include <vector>

#include "wnc/graph.hpp"
#include "wnc/optim.hpp"

namespace wnc::nn {

struct StepResult {
  double loss = 0;        // mean example loss in the batch
  double grad_norm = 0;   // before clipping
  double clip_scale = 1;
};

// Builds the scalar loss of one example on a fresh graph.
using ExampleLoss = std::function<Var(Graph& g, std::size_t example)>;

// Mini-batch driver: one graph per example (optionally on worker threads),
// gradients averaged in example order so results do not depend on the
// thread count, then global-norm clipping and an Adam update.
class BatchTrainer {
 public:
  BatchTrainer(ParameterSet& params, AdamConfig adam, double clip_norm, int threads = 1);

  StepResult step(const std::vector<std::size_t>& batch, const ExampleLoss& loss_fn, std::uint64_t seed);
  // Mean loss without updating anything (no dropout).
  double evaluate(const std::vector<std::size_t>& examples, const ExampleLoss& loss_fn) const;

  Adam& optimizer() { return adam_; }

 private:
  ParameterSet& params_;
  Adam adam_;
  double clip_norm_;
  int threads_;
};

// Deterministic per-example seed.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

}  // namespace wnc::nn
