// Copyright 2026 The Abduct Authors
// SPDX-License-Identifier: Apache-2.0

#include "abduct/tensor.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace abduct {

Tensor2::Tensor2(std::int64_t rows, std::int64_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (static_cast<std::int64_t>(data_.size()) != rows * cols) {
    throw DimensionError("Tensor2: data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_str());
  }
}

Tensor2 Tensor2::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::int64_t r = static_cast<std::int64_t>(rows.size());
  const std::int64_t c = r > 0 ? static_cast<std::int64_t>(rows.begin()->size()) : 0;
  Tensor2 t(r, c);
  std::int64_t i = 0;
  for (const auto& row : rows) {
    if (static_cast<std::int64_t>(row.size()) != c) {
      throw DimensionError("Tensor2::from_rows: ragged rows");
    }
    std::int64_t j = 0;
    for (double v : row) t(i, j++) = v;
    ++i;
  }
  return t;
}

Tensor2 Tensor2::row(const std::vector<double>& values) {
  return Tensor2(1, static_cast<std::int64_t>(values.size()), values);
}

std::vector<double> Tensor2::row_copy(std::int64_t r) const {
  return std::vector<double>(row_ptr(r), row_ptr(r) + cols_);
}

bool Tensor2::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

std::string Tensor2::shape_str() const {
  std::ostringstream os;
  os << rows_ << "x" << cols_;
  return os.str();
}

void require_shape(const Tensor2& t, std::int64_t rows, std::int64_t cols,
                   const std::string& where) {
  if (t.rows() != rows || t.cols() != cols) {
    throw DimensionError(where + ": expected " + std::to_string(rows) + "x" +
                         std::to_string(cols) + ", got " + t.shape_str());
  }
}

void require_finite(const Tensor2& t, const std::string& where) {
  if (!t.all_finite()) {
    throw NumericError(where + ": non-finite values in " + t.shape_str() + " tensor");
  }
}

}  // namespace abduct
