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
#include <deque>
#include <functional>
#include <random>
#include <unordered_map>
#include <vector>

#include "wnc/tensor.hpp"

namespace wnc::nn {

class Graph;

// Handle to a node recorded on a Graph.
struct Var {
  Graph* graph = nullptr;
  int id = -1;

  bool valid() const { return graph != nullptr && id >= 0; }
  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
};

// Reverse-mode tape. Nodes are appended in creation order, which is a
// topological order, and backward() walks them once in reverse.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, int)>;

  explicit Graph(bool grad_enabled = true, bool training = false, std::uint64_t seed = 0);
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor t);
  // Leaf that receives a gradient (used by gradient checks).
  Var variable(Tensor t);
  // Leaf bound to a parameter; one node per parameter per graph.
  Var param(Parameter& p);

  const Tensor& value(Var v) const { return value(v.id); }
  const Tensor& value(int id) const;
  // Gradient of a node; an empty tensor when the node was never reached.
  const Tensor& grad(Var v) const;

  // Seeds d(loss)/d(loss) = 1. Throws ShapeError for a non-scalar loss.
  void backward(Var loss);
  void backward(Var output, const Tensor& seed);
  // Adds leaf gradients into Parameter::grad for every non-frozen parameter.
  void accumulate_parameter_grads();

  bool grad_enabled() const { return grad_enabled_; }
  bool training() const { return training_; }
  std::mt19937_64& rng() { return rng_; }
  std::size_t size() const { return nodes_.size(); }

  // Op plumbing.
  Var record(Tensor value, const std::vector<Var>& parents, BackwardFn fn);
  bool requires_grad(int id) const { return nodes_[id].requires_grad; }
  bool requires_grad(Var v) const { return requires_grad(v.id); }
  Tensor& grad_buffer(int id);

 private:
  struct Node {
    Tensor value;
    const Tensor* external = nullptr;
    Tensor grad;
    bool requires_grad = false;
    Parameter* param = nullptr;
    BackwardFn backward;
  };

  std::deque<Node> nodes_;
  std::unordered_map<const Parameter*, int> param_nodes_;
  bool grad_enabled_;
  bool training_;
  std::mt19937_64 rng_;
};

// ---- differentiable ops -------------------------------------------------
// Matrices are rank-2; rank-1 arguments of matmul act as a single row.

Var matmul(Var a, Var b);
// a [m,k] times b[n,k] transposed -> [m,n].
Var matmul_nt(Var a, Var b);
Var transpose(Var a);

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var minimum(Var a, Var b);
// a [m,n] + b broadcast over rows (b has n values).
Var add_bias(Var a, Var b);
// a * s + shift, scalars fixed.
Var affine(Var a, real scale, real shift = 0);
inline Var scale(Var a, real s) { return affine(a, s, 0); }
inline Var one_minus(Var a) { return affine(a, -1, 1); }
// a times a single-element Var.
Var mul_scalar(Var a, Var s);

Var concat(const std::vector<Var>& parts, int axis);
Var slice_rows(Var a, int begin, int end);
Var slice_cols(Var a, int begin, int end);
Var reshape(Var a, Shape shape);
Var embedding(Var table, const std::vector<int>& ids);

Var sigmoid(Var a);
Var tanh(Var a);
Var relu(Var a);
Var exp(Var a);
// Natural log; inputs below `floor` are clamped and pass no gradient.
Var log(Var a, real floor = real(1e-30));
// Row-wise softmax / log-softmax over the last axis.
Var softmax(Var a);
Var log_softmax(Var a);
// Inverted dropout; identity unless the graph is in training mode.
Var dropout(Var a, real p);

Var sum(Var a);
Var mean(Var a);
// Column sums over rows: [m,n] -> [1,n].
Var sum_rows(Var a);
Var mean_rows(Var a);
// Flat-index gather -> [k].
Var gather(Var a, const std::vector<int>& flat_indices);
// out[0, index[j]] += a[0, j]; a is [1,n].
Var scatter_cols(Var a, const std::vector<int>& index, int width);
Var pad_cols(Var a, int width);
Var layer_norm(Var a, Var gain, Var bias, real eps = real(1e-5));
// LSTM cell nonlinearity. gates [1,4h] in (input, forget, cell, output)
// order, c_prev [1,h]; returns [1,2h] = [h_t | c_t].
Var lstm_cell(Var gates, Var c_prev);
Var detach(Var a);

}  // namespace wnc::nn
