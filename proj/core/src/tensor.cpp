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

#include "wnc/tensor.hpp"

#include <cmath>
#include <algorithm>
#include <functional>
#include <numeric>

namespace wnc::nn {

std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d < 0) throw ShapeError("negative dimension in shape " + shape_string(shape));
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

Tensor::Tensor(Shape shape, real fill) : shape_(std::move(shape)), data_(shape_size(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<real> values) : shape_(std::move(shape)), data_(std::move(values)) {
  if (data_.size() != shape_size(shape_)) {
    throw ShapeError("tensor: " + std::to_string(data_.size()) + " values do not fill shape " +
                     shape_string(shape_));
  }
}

Tensor Tensor::row(std::vector<real> values) {
  const int n = static_cast<int>(values.size());
  return Tensor(Shape{1, n}, std::move(values));
}

Tensor Tensor::matrix(int rows, int cols, std::vector<real> values) {
  return Tensor(Shape{rows, cols}, std::move(values));
}

int Tensor::rows() const {
  if (shape_.size() < 2) return 1;
  int r = 1;
  for (std::size_t i = 0; i + 1 < shape_.size(); ++i) r *= shape_[i];
  return r;
}

int Tensor::cols() const { return shape_.empty() ? 1 : shape_.back(); }

real Tensor::item() const {
  if (data_.size() != 1) throw ShapeError("item() on tensor of shape " + shape_string(shape_));
  return data_[0];
}

void Tensor::fill(real v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](real v) { return std::isfinite(v); });
}

Tensor Tensor::reshaped(Shape shape) const {
  if (shape_size(shape) != data_.size()) {
    throw ShapeError("reshape: " + shape_string(shape_) + " -> " + shape_string(shape));
  }
  return Tensor(std::move(shape), data_);
}

void Parameter::zero_grad() {
  if (grad.size() != value.size()) grad = Tensor(value.shape());
  grad.fill(0);
}

Parameter& ParameterSet::add(std::string name, Shape shape) {
  if (find(name)) throw std::invalid_argument("duplicate parameter name: " + name);
  Parameter& p = params_.emplace_back();
  p.name = std::move(name);
  p.value = Tensor(shape);
  p.grad = Tensor(std::move(shape));
  return p;
}

Parameter& ParameterSet::add_uniform(std::string name, Shape shape, real range, std::mt19937_64& rng) {
  Parameter& p = add(std::move(name), std::move(shape));
  uniform_fill(p.value, range, rng);
  return p;
}

Parameter* ParameterSet::find(std::string_view name) {
  for (auto& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const Parameter* ParameterSet::find(std::string_view name) const {
  for (const auto& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

Parameter& ParameterSet::at(std::string_view name) {
  if (Parameter* p = find(name)) return *p;
  throw std::out_of_range("unknown parameter: " + std::string(name));
}

std::size_t ParameterSet::num_values() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void ParameterSet::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

void ParameterSet::set_frozen(std::string_view prefix, bool frozen) {
  for (auto& p : params_) {
    if (std::string_view(p.name).starts_with(prefix)) p.frozen = frozen;
  }
}

double ParameterSet::grad_norm() const {
  double sq = 0;
  for (const auto& p : params_) {
    for (real g : p.grad.values()) sq += static_cast<double>(g) * g;
  }
  return std::sqrt(sq);
}

void uniform_fill(Tensor& t, real range, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-range, range);
  for (auto& v : t.values()) v = static_cast<real>(dist(rng));
}

}  // namespace wnc::nn
