// Copyright 2026 The Abduct Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ABDUCT_PARAM_HPP
#define ABDUCT_PARAM_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "abduct/common.hpp"
#include "abduct/tensor.hpp"

namespace abduct {

// Named learnable tensor with a paired gradient buffer.
//
// Storage is always a Tensor2. A 3-way tensor (the bilinear weight, shape
// d0 x d1 x d2) is stored as d0 rows by d1*d2 columns with entry [i][j][k]
// at (i, j*d2 + k); `logical_shape` keeps the true rank for checkpoints.
class Param {
 public:
  Param(std::string name, std::int64_t rows, std::int64_t cols)
      : name_(std::move(name)),
        logical_shape_{rows, cols},
        value_(rows, cols),
        grad_(rows, cols) {}
  Param(std::string name, std::int64_t d0, std::int64_t d1, std::int64_t d2)
      : name_(std::move(name)),
        logical_shape_{d0, d1, d2},
        value_(d0, d1 * d2),
        grad_(d0, d1 * d2) {}

  const std::string& name() const { return name_; }
  const std::vector<std::int64_t>& logical_shape() const { return logical_shape_; }

  Tensor2& value() { return value_; }
  const Tensor2& value() const { return value_; }
  Tensor2& grad() { return grad_; }
  const Tensor2& grad() const { return grad_; }

  std::int64_t size() const { return value_.size(); }
  void zero_grad();

 private:
  std::string name_;
  std::vector<std::int64_t> logical_shape_;
  Tensor2 value_;
  Tensor2 grad_;
};

// Owning collection of params in deterministic (insertion) order.
// Single-writer during training; read-only during eval.
class ParamStore {
 public:
  Param& create(const std::string& name, std::int64_t rows, std::int64_t cols);
  Param& create3(const std::string& name, std::int64_t d0, std::int64_t d1,
                 std::int64_t d2);

  Param& at(const std::string& name);
  const Param& at(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  const std::vector<std::unique_ptr<Param>>& ordered() const { return params_; }
  std::size_t count() const { return params_.size(); }
  std::int64_t total_size() const;

  void zero_grad();
  // Global L2 norm over all gradient buffers.
  double grad_norm() const;
  void scale_grads(double factor);

 private:
  std::vector<std::unique_ptr<Param>> params_;
  std::unordered_map<std::string, Param*> index_;
};

// Glorot-uniform init for weight matrices; biases stay zero.
void init_xavier(Param& p, Rng& rng);
// Uniform in [-scale, scale]; used for the bilinear 3-way tensor where
// fan-in/fan-out is ambiguous.
void init_uniform(Param& p, double scale, Rng& rng);
void fill(Param& p, double v);

}  // namespace abduct

#endif  // ABDUCT_PARAM_HPP
