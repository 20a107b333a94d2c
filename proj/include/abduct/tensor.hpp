// Copyright 2026 The Abduct Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ABDUCT_TENSOR_HPP
#define ABDUCT_TENSOR_HPP

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "abduct/common.hpp"

namespace abduct {

// Dense row-major matrix of doubles. All internal math runs in 64-bit;
// checkpoints downcast to 32-bit on disk.
class Tensor2 {
 public:
  Tensor2() = default;
  Tensor2(std::int64_t rows, std::int64_t cols)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols), 0.0) {}
  Tensor2(std::int64_t rows, std::int64_t cols, std::vector<double> data);

  // Literal constructor for tests and fixtures.
  static Tensor2 from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor2 row(const std::vector<double>& values);

  std::int64_t rows() const { return rows_; }
  std::int64_t cols() const { return cols_; }
  std::int64_t size() const { return rows_ * cols_; }

  double& operator()(std::int64_t r, std::int64_t c) {
    return data_[static_cast<std::size_t>(r * cols_ + c)];
  }
  double operator()(std::int64_t r, std::int64_t c) const {
    return data_[static_cast<std::size_t>(r * cols_ + c)];
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  const double* row_ptr(std::int64_t r) const { return data_.data() + r * cols_; }
  double* row_ptr(std::int64_t r) { return data_.data() + r * cols_; }

  std::vector<double> row_copy(std::int64_t r) const;
  bool all_finite() const;
  bool same_shape(const Tensor2& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
  std::string shape_str() const;

 private:
  std::int64_t rows_ = 0;
  std::int64_t cols_ = 0;
  std::vector<double> data_;
};

// Throws DimensionError naming both shapes.
void require_shape(const Tensor2& t, std::int64_t rows, std::int64_t cols,
                   const std::string& where);
// Throws NumericError naming `where` if any entry is NaN/Inf.
void require_finite(const Tensor2& t, const std::string& where);

}  // namespace abduct

#endif  // ABDUCT_TENSOR_HPP
