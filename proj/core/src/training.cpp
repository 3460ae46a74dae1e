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

#include "wnc/training.hpp"

#include <algorithm>
#include <memory>
#include <thread>

namespace wnc::nn {

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over the combined words
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (a + 1) + 0xBF58476D1CE4E5B9ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

BatchTrainer::BatchTrainer(ParameterSet& params, AdamConfig adam, double clip_norm, int threads)
    : params_(params), adam_(adam), clip_norm_(clip_norm), threads_(std::max(threads, 1)) {}

StepResult BatchTrainer::step(const std::vector<std::size_t>& batch, const ExampleLoss& loss_fn,
                              std::uint64_t seed) {
  StepResult result;
  params_.zero_grad();
  const std::size_t n = batch.size();
  if (n == 0) return result;
  const Tensor seed_grad = Tensor::scalar(real(1) / static_cast<real>(n));

  std::vector<std::unique_ptr<Graph>> graphs(n);
  std::vector<double> losses(n, 0.0);
  auto run = [&](std::size_t k) {
    graphs[k] = std::make_unique<Graph>(true, true, mix_seed(seed, k));
    Var loss = loss_fn(*graphs[k], batch[k]);
    losses[k] = loss.value().item();
    graphs[k]->backward(loss, Tensor(loss.value().shape(), seed_grad.item()));
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads_), n);
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) {
      run(k);
      graphs[k]->accumulate_parameter_grads();
      graphs[k].reset();
    }
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < n; k += workers) run(k);
      });
    }
    for (auto& t : pool) t.join();
    for (std::size_t k = 0; k < n; ++k) graphs[k]->accumulate_parameter_grads();
  }

  for (double l : losses) result.loss += l;
  result.loss /= static_cast<double>(n);
  result.grad_norm = global_grad_norm(params_);
  result.clip_scale = clip_gradients(params_, clip_norm_);
  adam_.step(params_);
  return result;
}

double BatchTrainer::evaluate(const std::vector<std::size_t>& examples, const ExampleLoss& loss_fn) const {
  if (examples.empty()) return 0.0;
  double total = 0;
  for (std::size_t k : examples) {
    Graph g(false, false, 0);
    total += loss_fn(g, k).value().item();
  }
  return total / static_cast<double>(examples.size());
}

}  // namespace wnc::nn
