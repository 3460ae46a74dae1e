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

#include <cstddef>
#include <cstdint>
#include <deque>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// The scalar type is a build-time choice. Production builds use 32-bit
// floats; the gradient-check build compiles the same sources with double.
#ifndef WNC_REAL
#define WNC_REAL float
#endif

namespace wnc::nn {

using real = WNC_REAL;
using Shape = std::vector<int>;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string shape_string(const Shape& shape);
std::size_t shape_size(const Shape& shape);

// Dense row-major tensor. Rank 0 is a scalar; for rank >= 2, rows() is the
// product of all leading dimensions and cols() the last dimension.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, real fill = 0);
  Tensor(Shape shape, std::vector<real> values);

  static Tensor scalar(real v) { return Tensor(Shape{}, std::vector<real>{v}); }
  static Tensor row(std::vector<real> values);
  static Tensor matrix(int rows, int cols, std::vector<real> values);

  const Shape& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  int rows() const;
  int cols() const;

  real* data() { return data_.data(); }
  const real* data() const { return data_.data(); }
  std::span<real> values() { return data_; }
  std::span<const real> values() const { return data_; }
  std::vector<real>& storage() { return data_; }

  real& operator[](std::size_t i) { return data_[i]; }
  real operator[](std::size_t i) const { return data_[i]; }
  real& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols() + c]; }
  real at(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols() + c]; }

  // Value of a single-element tensor.
  real item() const;
  void fill(real v);
  bool all_finite() const;
  Tensor reshaped(Shape shape) const;

 private:
  Shape shape_;
  std::vector<real> data_;
};

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  bool frozen = false;

  void zero_grad();
};

// Owns named parameters at stable addresses.
class ParameterSet {
 public:
  Parameter& add(std::string name, Shape shape);
  Parameter& add_uniform(std::string name, Shape shape, real range, std::mt19937_64& rng);

  Parameter* find(std::string_view name);
  const Parameter* find(std::string_view name) const;
  Parameter& at(std::string_view name);

  std::size_t size() const { return params_.size(); }
  std::size_t num_values() const;
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  void zero_grad();
  // Freezes or unfreezes every parameter whose name starts with `prefix`.
  void set_frozen(std::string_view prefix, bool frozen);
  double grad_norm() const;

 private:
  std::deque<Parameter> params_;
};

void uniform_fill(Tensor& t, real range, std::mt19937_64& rng);

}  // namespace wnc::nn
