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

#include "wnc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Core>

namespace wnc::nn {
namespace {

using Mat = Eigen::Matrix<real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapC = Eigen::Map<const Mat>;
using Map = Eigen::Map<Mat>;

// Matrix view of a tensor: rank 0 and 1 act as a single row.
int mrows(const Tensor& t) { return t.rank() < 2 ? 1 : t.rows(); }
int mcols(const Tensor& t) { return t.rank() == 0 ? 1 : t.cols(); }

MapC view(const Tensor& t) { return MapC(t.data(), mrows(t), mcols(t)); }
Map view(Tensor& t) { return Map(t.data(), mrows(t), mcols(t)); }

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                     shape_string(b.shape()));
  }
}

Graph& graph_of(Var a) {
  if (!a.valid()) throw std::invalid_argument("op applied to an invalid Var");
  return *a.graph;
}

real sigmoid_value(real x) {
  if (x >= 0) {
    const real z = std::exp(-x);
    return real(1) / (real(1) + z);
  }
  const real z = std::exp(x);
  return z / (real(1) + z);
}

}  // namespace

const Tensor& Var::value() const { return graph->value(id); }

Graph::Graph(bool grad_enabled, bool training, std::uint64_t seed)
    : grad_enabled_(grad_enabled), training_(training), rng_(seed) {}

Var Graph::constant(Tensor t) {
  Node& n = nodes_.emplace_back();
  n.value = std::move(t);
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Var Graph::variable(Tensor t) {
  Node& n = nodes_.emplace_back();
  n.value = std::move(t);
  n.requires_grad = grad_enabled_;
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Var Graph::param(Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var{this, it->second};
  Node& n = nodes_.emplace_back();
  n.external = &p.value;
  n.param = &p;
  n.requires_grad = grad_enabled_ && !p.frozen;
  const int id = static_cast<int>(nodes_.size()) - 1;
  param_nodes_.emplace(&p, id);
  return Var{this, id};
}

const Tensor& Graph::value(int id) const {
  const Node& n = nodes_[id];
  return n.external ? *n.external : n.value;
}

const Tensor& Graph::grad(Var v) const { return nodes_[v.id].grad; }

Tensor& Graph::grad_buffer(int id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad = Tensor(value(id).shape());
  return n.grad;
}

Var Graph::record(Tensor value, const std::vector<Var>& parents, BackwardFn fn) {
  bool needs = false;
  if (grad_enabled_) {
    for (const Var& p : parents) needs = needs || nodes_[p.id].requires_grad;
  }
  Node& n = nodes_.emplace_back();
  n.value = std::move(value);
  n.requires_grad = needs;
  if (needs) n.backward = std::move(fn);
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

void Graph::backward(Var loss) {
  if (value(loss).size() != 1) {
    throw ShapeError("backward: loss must be a scalar, got shape " + shape_string(value(loss).shape()));
  }
  Tensor seed(value(loss).shape(), real(1));
  backward(loss, seed);
}

void Graph::backward(Var output, const Tensor& seed) {
  require_same_shape("backward seed", value(output), seed);
  if (!nodes_[output.id].requires_grad) return;
  Tensor& g = grad_buffer(output.id);
  for (std::size_t i = 0; i < seed.size(); ++i) g[i] += seed[i];
  for (int id = output.id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.requires_grad || n.grad.empty() || !n.backward) continue;
    n.backward(*this, id);
  }
}

void Graph::accumulate_parameter_grads() {
  for (auto& [param, id] : param_nodes_) {
    Node& n = nodes_[id];
    if (n.grad.empty() || param->frozen) continue;
    Parameter* p = n.param;
    if (p->grad.size() != p->value.size()) p->zero_grad();
    for (std::size_t i = 0; i < n.grad.size(); ++i) p->grad[i] += n.grad[i];
  }
}

// ---- ops ------------------------------------------------------------------

Var matmul(Var a, Var b) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  const Tensor& B = g.value(b);
  if (A.rank() > 2 || B.rank() > 2 || mcols(A) != mrows(B)) {
    throw ShapeError("matmul: shape mismatch " + shape_string(A.shape()) + " x " + shape_string(B.shape()));
  }
  Tensor C(Shape{mrows(A), mcols(B)});
  view(C).noalias() = view(A) * view(B);
  return g.record(std::move(C), {a, b}, [ia = a.id, ib = b.id](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    if (g.requires_grad(ia)) view(g.grad_buffer(ia)).noalias() += view(G) * view(g.value(ib)).transpose();
    if (g.requires_grad(ib)) view(g.grad_buffer(ib)).noalias() += view(g.value(ia)).transpose() * view(G);
  });
}

Var matmul_nt(Var a, Var b) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  const Tensor& B = g.value(b);
  if (A.rank() > 2 || B.rank() > 2 || mcols(A) != mcols(B)) {
    throw ShapeError("matmul_nt: shape mismatch " + shape_string(A.shape()) + " x " +
                     shape_string(B.shape()) + "^T");
  }
  Tensor C(Shape{mrows(A), mrows(B)});
  view(C).noalias() = view(A) * view(B).transpose();
  return g.record(std::move(C), {a, b}, [ia = a.id, ib = b.id](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    if (g.requires_grad(ia)) view(g.grad_buffer(ia)).noalias() += view(G) * view(g.value(ib));
    if (g.requires_grad(ib)) view(g.grad_buffer(ib)).noalias() += view(G).transpose() * view(g.value(ia));
  });
}

Var transpose(Var a) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  if (A.rank() > 2) throw ShapeError("transpose: rank > 2 " + shape_string(A.shape()));
  Tensor T(Shape{mcols(A), mrows(A)});
  view(T) = view(A).transpose();
  return g.record(std::move(T), {a}, [ia = a.id](Graph& g, int self) {
    if (g.requires_grad(ia)) view(g.grad_buffer(ia)) += view(g.grad_buffer(self)).transpose();
  });
}

Var add(Var a, Var b) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  const Tensor& B = g.value(b);
  require_same_shape("add", A, B);
  Tensor C(A.shape());
  for (std::size_t i = 0; i < C.size(); ++i) C[i] = A[i] + B[i];
  return g.record(std::move(C), {a, b}, [ia = a.id, ib = b.id](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    for (int id : {ia, ib}) {
      if (!g.requires_grad(id)) continue;
      Tensor& d = g.grad_buffer(id);
      for (std::size_t i = 0; i < G.size(); ++i) d[i] += G[i];
    }
  });
}

Var sub(Var a, Var b) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  const Tensor& B = g.value(b);
  require_same_shape("sub", A, B);
  Tensor C(A.shape());
  for (std::size_t i = 0; i < C.size(); ++i) C[i] = A[i] - B[i];
  return g.record(std::move(C), {a, b}, [ia = a.id, ib = b.id](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    if (g.requires_grad(ia)) {
      Tensor& d = g.grad_buffer(ia);
      for (std::size_t i = 0; i < G.size(); ++i) d[i] += G[i];
    }
    if (g.requires_grad(ib)) {
      Tensor& d = g.grad_buffer(ib);
      for (std::size_t i = 0; i < G.size(); ++i) d[i] -= G[i];
    }
  });
}

Var mul(Var a, Var b) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  const Tensor& B = g.value(b);
  require_same_shape("mul", A, B);
  Tensor C(A.shape());
  for (std::size_t i = 0; i < C.size(); ++i) C[i] = A[i] * B[i];
  return g.record(std::move(C), {a, b}, [ia = a.id, ib = b.id](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    if (g.requires_grad(ia)) {
      Tensor& d = g.grad_buffer(ia);
      const Tensor& B = g.value(ib);
      for (std::size_t i = 0; i < G.size(); ++i) d[i] += G[i] * B[i];
    }
    if (g.requires_grad(ib)) {
      Tensor& d = g.grad_buffer(ib);
      const Tensor& A = g.value(ia);
      for (std::size_t i = 0; i < G.size(); ++i) d[i] += G[i] * A[i];
    }
  });
}

Var minimum(Var a, Var b) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  const Tensor& B = g.value(b);
  require_same_shape("minimum", A, B);
  Tensor C(A.shape());
  for (std::size_t i = 0; i < C.size(); ++i) C[i] = std::min(A[i], B[i]);
  return g.record(std::move(C), {a, b}, [ia = a.id, ib = b.id](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    const Tensor& A = g.value(ia);
    const Tensor& B = g.value(ib);
    // Ties route the gradient to the first argument.
    if (g.requires_grad(ia)) {
      Tensor& d = g.grad_buffer(ia);
      for (std::size_t i = 0; i < G.size(); ++i) {
        if (A[i] <= B[i]) d[i] += G[i];
      }
    }
    if (g.requires_grad(ib)) {
      Tensor& d = g.grad_buffer(ib);
      for (std::size_t i = 0; i < G.size(); ++i) {
        if (A[i] > B[i]) d[i] += G[i];
      }
    }
  });
}

Var add_bias(Var a, Var b) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  const Tensor& B = g.value(b);
  const int cols = mcols(A);
  if (static_cast<int>(B.size()) != cols) {
    throw ShapeError("add_bias: shape mismatch " + shape_string(A.shape()) + " + " + shape_string(B.shape()));
  }
  Tensor C = A;
  const int rows = static_cast<int>(A.size()) / std::max(cols, 1);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) C[static_cast<std::size_t>(r) * cols + c] += B[c];
  }
  return g.record(std::move(C), {a, b}, [ia = a.id, ib = b.id, rows, cols](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    if (g.requires_grad(ia)) {
      Tensor& d = g.grad_buffer(ia);
      for (std::size_t i = 0; i < G.size(); ++i) d[i] += G[i];
    }
    if (g.requires_grad(ib)) {
      Tensor& d = g.grad_buffer(ib);
      for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) d[c] += G[static_cast<std::size_t>(r) * cols + c];
      }
    }
  });
}

Var affine(Var a, real s, real shift) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  Tensor C(A.shape());
  for (std::size_t i = 0; i < C.size(); ++i) C[i] = A[i] * s + shift;
  return g.record(std::move(C), {a}, [ia = a.id, s](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    Tensor& d = g.grad_buffer(ia);
    for (std::size_t i = 0; i < G.size(); ++i) d[i] += G[i] * s;
  });
}

Var mul_scalar(Var a, Var s) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  const Tensor& S = g.value(s);
  if (S.size() != 1) throw ShapeError("mul_scalar: scale has shape " + shape_string(S.shape()));
  const real k = S[0];
  Tensor C(A.shape());
  for (std::size_t i = 0; i < C.size(); ++i) C[i] = A[i] * k;
  return g.record(std::move(C), {a, s}, [ia = a.id, is = s.id](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    if (g.requires_grad(ia)) {
      Tensor& d = g.grad_buffer(ia);
      const real k = g.value(is)[0];
      for (std::size_t i = 0; i < G.size(); ++i) d[i] += G[i] * k;
    }
    if (g.requires_grad(is)) {
      const Tensor& A = g.value(ia);
      real acc = 0;
      for (std::size_t i = 0; i < G.size(); ++i) acc += G[i] * A[i];
      g.grad_buffer(is)[0] += acc;
    }
  });
}

Var concat(const std::vector<Var>& parts, int axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  if (axis != 0 && axis != 1) throw ShapeError("concat: axis must be 0 or 1");
  Graph& g = graph_of(parts.front());
  std::vector<int> ids;
  std::vector<int> extents;
  int rows = 0, cols = 0;
  for (const Var& v : parts) {
    const Tensor& t = g.value(v);
    if (t.rank() > 2) throw ShapeError("concat: rank > 2 input " + shape_string(t.shape()));
    ids.push_back(v.id);
    if (axis == 0) {
      if (cols == 0) cols = mcols(t);
      if (mcols(t) != cols) {
        throw ShapeError("concat(axis 0): column mismatch " + shape_string(g.value(parts.front()).shape()) +
                         " vs " + shape_string(t.shape()));
      }
      extents.push_back(mrows(t));
      rows += mrows(t);
    } else {
      if (rows == 0) rows = mrows(t);
      if (mrows(t) != rows) {
        throw ShapeError("concat(axis 1): row mismatch " + shape_string(g.value(parts.front()).shape()) +
                         " vs " + shape_string(t.shape()));
      }
      extents.push_back(mcols(t));
      cols += mcols(t);
    }
  }
  Tensor out(Shape{rows, cols});
  int offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor& t = g.value(parts[k]);
    if (axis == 0) {
      std::copy(t.data(), t.data() + t.size(), out.data() + static_cast<std::size_t>(offset) * cols);
    } else {
      view(out).block(0, offset, rows, extents[k]) = view(t);
    }
    offset += extents[k];
  }
  return g.record(std::move(out), parts, [ids, extents, axis, rows, cols](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    int offset = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (g.requires_grad(ids[k])) {
        Tensor& d = g.grad_buffer(ids[k]);
        if (axis == 0) {
          const real* src = G.data() + static_cast<std::size_t>(offset) * cols;
          for (std::size_t i = 0; i < d.size(); ++i) d[i] += src[i];
        } else {
          view(d) += view(G).block(0, offset, rows, extents[k]);
        }
      }
      offset += extents[k];
    }
  });
}

Var slice_rows(Var a, int begin, int end) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  if (A.rank() > 2 || begin < 0 || end > mrows(A) || begin >= end) {
    throw ShapeError("slice_rows: [" + std::to_string(begin) + "," + std::to_string(end) + ") out of " +
                     shape_string(A.shape()));
  }
  const int cols = mcols(A);
  Tensor out(Shape{end - begin, cols});
  std::copy(A.data() + static_cast<std::size_t>(begin) * cols, A.data() + static_cast<std::size_t>(end) * cols,
            out.data());
  return g.record(std::move(out), {a}, [ia = a.id, begin, cols](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    Tensor& d = g.grad_buffer(ia);
    real* dst = d.data() + static_cast<std::size_t>(begin) * cols;
    for (std::size_t i = 0; i < G.size(); ++i) dst[i] += G[i];
  });
}

Var slice_cols(Var a, int begin, int end) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  if (A.rank() > 2 || begin < 0 || end > mcols(A) || begin >= end) {
    throw ShapeError("slice_cols: [" + std::to_string(begin) + "," + std::to_string(end) + ") out of " +
                     shape_string(A.shape()));
  }
  const int rows = mrows(A);
  Tensor out(Shape{rows, end - begin});
  view(out) = view(A).block(0, begin, rows, end - begin);
  return g.record(std::move(out), {a}, [ia = a.id, begin, end, rows](Graph& g, int self) {
    view(g.grad_buffer(ia)).block(0, begin, rows, end - begin) += view(g.grad_buffer(self));
  });
}

Var reshape(Var a, Shape shape) {
  Graph& g = graph_of(a);
  Tensor out = g.value(a).reshaped(std::move(shape));
  return g.record(std::move(out), {a}, [ia = a.id](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    Tensor& d = g.grad_buffer(ia);
    for (std::size_t i = 0; i < G.size(); ++i) d[i] += G[i];
  });
}

Var embedding(Var table, const std::vector<int>& ids) {
  Graph& g = graph_of(table);
  const Tensor& T = g.value(table);
  if (T.rank() != 2) throw ShapeError("embedding: table must be rank 2, got " + shape_string(T.shape()));
  const int vocab = T.rows(), dim = T.cols();
  Tensor out(Shape{static_cast<int>(ids.size()), dim});
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (ids[k] < 0 || ids[k] >= vocab) {
      throw ShapeError("embedding: id " + std::to_string(ids[k]) + " outside table " + shape_string(T.shape()));
    }
    std::copy(T.data() + static_cast<std::size_t>(ids[k]) * dim, T.data() + static_cast<std::size_t>(ids[k] + 1) * dim,
              out.data() + k * dim);
  }
  return g.record(std::move(out), {table}, [it = table.id, ids, dim](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    Tensor& d = g.grad_buffer(it);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      real* dst = d.data() + static_cast<std::size_t>(ids[k]) * dim;
      const real* src = G.data() + k * dim;
      for (int j = 0; j < dim; ++j) dst[j] += src[j];
    }
  });
}

Var sigmoid(Var a) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  Tensor Y(A.shape());
  for (std::size_t i = 0; i < A.size(); ++i) Y[i] = sigmoid_value(A[i]);
  return g.record(std::move(Y), {a}, [ia = a.id](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    const Tensor& Y = g.value(self);
    Tensor& d = g.grad_buffer(ia);
    for (std::size_t i = 0; i < G.size(); ++i) d[i] += G[i] * Y[i] * (real(1) - Y[i]);
  });
}

Var tanh(Var a) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  Tensor Y(A.shape());
  for (std::size_t i = 0; i < A.size(); ++i) Y[i] = std::tanh(A[i]);
  return g.record(std::move(Y), {a}, [ia = a.id](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    const Tensor& Y = g.value(self);
    Tensor& d = g.grad_buffer(ia);
    for (std::size_t i = 0; i < G.size(); ++i) d[i] += G[i] * (real(1) - Y[i] * Y[i]);
  });
}

Var relu(Var a) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  Tensor Y(A.shape());
  for (std::size_t i = 0; i < A.size(); ++i) Y[i] = A[i] > 0 ? A[i] : real(0);
  return g.record(std::move(Y), {a}, [ia = a.id](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    const Tensor& A = g.value(ia);
    Tensor& d = g.grad_buffer(ia);
    for (std::size_t i = 0; i < G.size(); ++i) {
      if (A[i] > 0) d[i] += G[i];
    }
  });
}

Var exp(Var a) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  Tensor Y(A.shape());
  for (std::size_t i = 0; i < A.size(); ++i) Y[i] = std::exp(A[i]);
  return g.record(std::move(Y), {a}, [ia = a.id](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    const Tensor& Y = g.value(self);
    Tensor& d = g.grad_buffer(ia);
    for (std::size_t i = 0; i < G.size(); ++i) d[i] += G[i] * Y[i];
  });
}

Var log(Var a, real floor) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  Tensor Y(A.shape());
  for (std::size_t i = 0; i < A.size(); ++i) Y[i] = std::log(std::max(A[i], floor));
  return g.record(std::move(Y), {a}, [ia = a.id, floor](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    const Tensor& A = g.value(ia);
    Tensor& d = g.grad_buffer(ia);
    for (std::size_t i = 0; i < G.size(); ++i) {
      if (A[i] > floor) d[i] += G[i] / A[i];
    }
  });
}

Var softmax(Var a) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  const int cols = mcols(A);
  const int rows = static_cast<int>(A.size()) / std::max(cols, 1);
  Tensor Y(A.shape());
  for (int r = 0; r < rows; ++r) {
    const real* x = A.data() + static_cast<std::size_t>(r) * cols;
    real* y = Y.data() + static_cast<std::size_t>(r) * cols;
    const real mx = *std::max_element(x, x + cols);
    real total = 0;
    for (int c = 0; c < cols; ++c) total += (y[c] = std::exp(x[c] - mx));
    for (int c = 0; c < cols; ++c) y[c] /= total;
  }
  return g.record(std::move(Y), {a}, [ia = a.id, rows, cols](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    const Tensor& Y = g.value(self);
    Tensor& d = g.grad_buffer(ia);
    for (int r = 0; r < rows; ++r) {
      const std::size_t off = static_cast<std::size_t>(r) * cols;
      real dot = 0;
      for (int c = 0; c < cols; ++c) dot += G[off + c] * Y[off + c];
      for (int c = 0; c < cols; ++c) d[off + c] += Y[off + c] * (G[off + c] - dot);
    }
  });
}

Var log_softmax(Var a) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  const int cols = mcols(A);
  const int rows = static_cast<int>(A.size()) / std::max(cols, 1);
  Tensor Y(A.shape());
  for (int r = 0; r < rows; ++r) {
    const real* x = A.data() + static_cast<std::size_t>(r) * cols;
    real* y = Y.data() + static_cast<std::size_t>(r) * cols;
    const real mx = *std::max_element(x, x + cols);
    real total = 0;
    for (int c = 0; c < cols; ++c) total += std::exp(x[c] - mx);
    const real lse = mx + std::log(total);
    for (int c = 0; c < cols; ++c) y[c] = x[c] - lse;
  }
  return g.record(std::move(Y), {a}, [ia = a.id, rows, cols](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    const Tensor& Y = g.value(self);
    Tensor& d = g.grad_buffer(ia);
    for (int r = 0; r < rows; ++r) {
      const std::size_t off = static_cast<std::size_t>(r) * cols;
      real gsum = 0;
      for (int c = 0; c < cols; ++c) gsum += G[off + c];
      for (int c = 0; c < cols; ++c) d[off + c] += G[off + c] - std::exp(Y[off + c]) * gsum;
    }
  });
}

Var dropout(Var a, real p) {
  Graph& g = graph_of(a);
  if (!g.training() || p <= 0) return a;
  if (p >= 1) throw std::invalid_argument("dropout: p must be < 1");
  const Tensor& A = g.value(a);
  std::bernoulli_distribution keep(1.0 - static_cast<double>(p));
  const real scale = real(1) / (real(1) - p);
  std::vector<real> mask(A.size());
  Tensor Y(A.shape());
  for (std::size_t i = 0; i < A.size(); ++i) {
    mask[i] = keep(g.rng()) ? scale : real(0);
    Y[i] = A[i] * mask[i];
  }
  return g.record(std::move(Y), {a}, [ia = a.id, mask = std::move(mask)](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    Tensor& d = g.grad_buffer(ia);
    for (std::size_t i = 0; i < G.size(); ++i) d[i] += G[i] * mask[i];
  });
}

Var sum(Var a) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  double acc = 0;
  for (real v : A.values()) acc += v;
  return g.record(Tensor::scalar(static_cast<real>(acc)), {a}, [ia = a.id](Graph& g, int self) {
    const real s = g.grad_buffer(self)[0];
    Tensor& d = g.grad_buffer(ia);
    for (auto& v : d.values()) v += s;
  });
}

Var mean(Var a) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  if (A.empty()) throw ShapeError("mean: empty tensor");
  double acc = 0;
  for (real v : A.values()) acc += v;
  const double n = static_cast<double>(A.size());
  return g.record(Tensor::scalar(static_cast<real>(acc / n)), {a}, [ia = a.id, n](Graph& g, int self) {
    const real s = static_cast<real>(g.grad_buffer(self)[0] / n);
    Tensor& d = g.grad_buffer(ia);
    for (auto& v : d.values()) v += s;
  });
}

Var sum_rows(Var a) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  const int rows = mrows(A), cols = mcols(A);
  Tensor out(Shape{1, cols});
  view(out) = view(A).colwise().sum();
  return g.record(std::move(out), {a}, [ia = a.id, rows](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    view(g.grad_buffer(ia)).rowwise() += view(G).row(0);
    (void)rows;
  });
}

Var mean_rows(Var a) {
  Graph& g = graph_of(a);
  const int rows = mrows(g.value(a));
  return scale(sum_rows(a), real(1) / static_cast<real>(rows));
}

Var gather(Var a, const std::vector<int>& flat_indices) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  Tensor out(Shape{static_cast<int>(flat_indices.size())});
  for (std::size_t k = 0; k < flat_indices.size(); ++k) {
    const int idx = flat_indices[k];
    if (idx < 0 || static_cast<std::size_t>(idx) >= A.size()) {
      throw ShapeError("gather: index " + std::to_string(idx) + " outside " + shape_string(A.shape()));
    }
    out[k] = A[idx];
  }
  return g.record(std::move(out), {a}, [ia = a.id, flat_indices](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    Tensor& d = g.grad_buffer(ia);
    for (std::size_t k = 0; k < flat_indices.size(); ++k) d[flat_indices[k]] += G[k];
  });
}

Var scatter_cols(Var a, const std::vector<int>& index, int width) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  if (A.size() != index.size()) {
    throw ShapeError("scatter_cols: " + std::to_string(index.size()) + " indices for " + shape_string(A.shape()));
  }
  Tensor out(Shape{1, width});
  for (std::size_t j = 0; j < index.size(); ++j) {
    if (index[j] < 0 || index[j] >= width) {
      throw ShapeError("scatter_cols: index " + std::to_string(index[j]) + " outside width " + std::to_string(width));
    }
    out[index[j]] += A[j];
  }
  return g.record(std::move(out), {a}, [ia = a.id, index](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    Tensor& d = g.grad_buffer(ia);
    for (std::size_t j = 0; j < index.size(); ++j) d[j] += G[index[j]];
  });
}

Var pad_cols(Var a, int width) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  if (mrows(A) != 1 || mcols(A) > width) {
    throw ShapeError("pad_cols: cannot pad " + shape_string(A.shape()) + " to width " + std::to_string(width));
  }
  if (mcols(A) == width && A.rank() == 2) return a;
  Tensor out(Shape{1, width});
  std::copy(A.data(), A.data() + A.size(), out.data());
  return g.record(std::move(out), {a}, [ia = a.id](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    Tensor& d = g.grad_buffer(ia);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += G[i];
  });
}

Var layer_norm(Var a, Var gain, Var bias, real eps) {
  Graph& g = graph_of(a);
  const Tensor& A = g.value(a);
  const int cols = mcols(A);
  const int rows = static_cast<int>(A.size()) / std::max(cols, 1);
  if (static_cast<int>(g.value(gain).size()) != cols || static_cast<int>(g.value(bias).size()) != cols) {
    throw ShapeError("layer_norm: gain/bias " + shape_string(g.value(gain).shape()) + " for input " +
                     shape_string(A.shape()));
  }
  const Tensor& W = g.value(gain);
  const Tensor& B = g.value(bias);
  Tensor Y(A.shape());
  std::vector<real> xhat(A.size()), inv_std(rows);
  for (int r = 0; r < rows; ++r) {
    const std::size_t off = static_cast<std::size_t>(r) * cols;
    real mu = 0;
    for (int c = 0; c < cols; ++c) mu += A[off + c];
    mu /= static_cast<real>(cols);
    real var = 0;
    for (int c = 0; c < cols; ++c) var += (A[off + c] - mu) * (A[off + c] - mu);
    var /= static_cast<real>(cols);
    inv_std[r] = real(1) / std::sqrt(var + eps);
    for (int c = 0; c < cols; ++c) {
      xhat[off + c] = (A[off + c] - mu) * inv_std[r];
      Y[off + c] = xhat[off + c] * W[c] + B[c];
    }
  }
  return g.record(std::move(Y), {a, gain, bias},
                  [ia = a.id, iw = gain.id, ib = bias.id, rows, cols, xhat = std::move(xhat),
                   inv_std = std::move(inv_std)](Graph& g, int self) {
                    const Tensor& G = g.grad_buffer(self);
                    const Tensor& W = g.value(iw);
                    if (g.requires_grad(iw) || g.requires_grad(ib)) {
                      for (int r = 0; r < rows; ++r) {
                        for (int c = 0; c < cols; ++c) {
                          const std::size_t k = static_cast<std::size_t>(r) * cols + c;
                          if (g.requires_grad(iw)) g.grad_buffer(iw)[c] += G[k] * xhat[k];
                          if (g.requires_grad(ib)) g.grad_buffer(ib)[c] += G[k];
                        }
                      }
                    }
                    if (!g.requires_grad(ia)) return;
                    Tensor& d = g.grad_buffer(ia);
                    for (int r = 0; r < rows; ++r) {
                      const std::size_t off = static_cast<std::size_t>(r) * cols;
                      real m1 = 0, m2 = 0;
                      for (int c = 0; c < cols; ++c) {
                        const real dx = G[off + c] * W[c];
                        m1 += dx;
                        m2 += dx * xhat[off + c];
                      }
                      m1 /= static_cast<real>(cols);
                      m2 /= static_cast<real>(cols);
                      for (int c = 0; c < cols; ++c) {
                        const real dx = G[off + c] * W[c];
                        d[off + c] += inv_std[r] * (dx - m1 - xhat[off + c] * m2);
                      }
                    }
                  });
}

Var lstm_cell(Var gates, Var c_prev) {
  Graph& g = graph_of(gates);
  const Tensor& Z = g.value(gates);
  const Tensor& C0 = g.value(c_prev);
  const int h = mcols(C0);
  const int rows = mrows(C0);
  if (mcols(Z) != 4 * h || mrows(Z) != rows) {
    throw ShapeError("lstm_cell: gates " + shape_string(Z.shape()) + " vs cell " + shape_string(C0.shape()));
  }
  Tensor out(Shape{rows, 2 * h});
  for (int r = 0; r < rows; ++r) {
    const real* z = Z.data() + static_cast<std::size_t>(r) * 4 * h;
    const real* c0 = C0.data() + static_cast<std::size_t>(r) * h;
    real* o = out.data() + static_cast<std::size_t>(r) * 2 * h;
    for (int k = 0; k < h; ++k) {
      const real ig = sigmoid_value(z[k]);
      const real fg = sigmoid_value(z[h + k]);
      const real cg = std::tanh(z[2 * h + k]);
      const real og = sigmoid_value(z[3 * h + k]);
      const real c = fg * c0[k] + ig * cg;
      o[h + k] = c;
      o[k] = og * std::tanh(c);
    }
  }
  return g.record(std::move(out), {gates, c_prev}, [iz = gates.id, ic = c_prev.id, h, rows](Graph& g, int self) {
    const Tensor& G = g.grad_buffer(self);
    const Tensor& Z = g.value(iz);
    const Tensor& C0 = g.value(ic);
    const Tensor& Out = g.value(self);
    const bool need_z = g.requires_grad(iz), need_c = g.requires_grad(ic);
    Tensor* dz_t = need_z ? &g.grad_buffer(iz) : nullptr;
    Tensor* dc_t = need_c ? &g.grad_buffer(ic) : nullptr;
    for (int r = 0; r < rows; ++r) {
      const std::size_t zo = static_cast<std::size_t>(r) * 4 * h, co = static_cast<std::size_t>(r) * h,
                        oo = static_cast<std::size_t>(r) * 2 * h;
      for (int k = 0; k < h; ++k) {
        const real ig = sigmoid_value(Z[zo + k]);
        const real fg = sigmoid_value(Z[zo + h + k]);
        const real cg = std::tanh(Z[zo + 2 * h + k]);
        const real og = sigmoid_value(Z[zo + 3 * h + k]);
        const real c = Out[oo + h + k];
        const real tc = std::tanh(c);
        const real dh = G[oo + k];
        const real dc = G[oo + h + k] + dh * og * (real(1) - tc * tc);
        if (need_z) {
          Tensor& dz = *dz_t;
          dz[zo + k] += dc * cg * ig * (real(1) - ig);
          dz[zo + h + k] += dc * C0[co + k] * fg * (real(1) - fg);
          dz[zo + 2 * h + k] += dc * ig * (real(1) - cg * cg);
          dz[zo + 3 * h + k] += dh * tc * og * (real(1) - og);
        }
        if (need_c) (*dc_t)[co + k] += dc * fg;
      }
    }
  });
}

Var detach(Var a) {
  Graph& g = graph_of(a);
  return g.constant(g.value(a));
}

}  // namespace wnc::nn
