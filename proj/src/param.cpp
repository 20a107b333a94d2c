// Copyright 2026 The Abduct Authors
// SPDX-License-Identifier: Apache-2.0

#include "abduct/param.hpp"

#include <algorithm>
#include <cmath>

namespace abduct {

void Param::zero_grad() {
  std::fill(grad_.data(), grad_.data() + grad_.size(), 0.0);
}

Param& ParamStore::create(const std::string& name, std::int64_t rows,
                          std::int64_t cols) {
  if (index_.count(name)) {
    throw ConfigError("ParamStore: duplicate parameter name '" + name + "'");
  }
  params_.push_back(std::make_unique<Param>(name, rows, cols));
  index_[name] = params_.back().get();
  return *params_.back();
}

Param& ParamStore::create3(const std::string& name, std::int64_t d0, std::int64_t d1,
                           std::int64_t d2) {
  if (index_.count(name)) {
    throw ConfigError("ParamStore: duplicate parameter name '" + name + "'");
  }
  params_.push_back(std::make_unique<Param>(name, d0, d1, d2));
  index_[name] = params_.back().get();
  return *params_.back();
}

Param& ParamStore::at(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw ConfigError("ParamStore: unknown parameter '" + name + "'");
  return *it->second;
}

const Param& ParamStore::at(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ConfigError("ParamStore: unknown parameter '" + name + "'");
  return *it->second;
}

std::int64_t ParamStore::total_size() const {
  std::int64_t n = 0;
  for (const auto& p : params_) n += p->size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p->zero_grad();
}

double ParamStore::grad_norm() const {
  double sq = 0.0;
  for (const auto& p : params_) {
    const double* g = p->grad().data();
    for (std::int64_t i = 0; i < p->size(); ++i) sq += g[i] * g[i];
  }
  return std::sqrt(sq);
}

void ParamStore::scale_grads(double factor) {
  for (auto& p : params_) {
    double* g = p->grad().data();
    for (std::int64_t i = 0; i < p->size(); ++i) g[i] *= factor;
  }
}

void init_xavier(Param& p, Rng& rng) {
  const auto& shape = p.logical_shape();
  const double fan_in = static_cast<double>(shape.front());
  const double fan_out = static_cast<double>(shape.back());
  const double s = std::sqrt(6.0 / (fan_in + fan_out));
  double* v = p.value().data();
  for (std::int64_t i = 0; i < p.size(); ++i) v[i] = rng.uniform(-s, s);
}

void init_uniform(Param& p, double s, Rng& rng) {
  double* v = p.value().data();
  for (std::int64_t i = 0; i < p.size(); ++i) v[i] = rng.uniform(-s, s);
}

void fill(Param& p, double value) {
  double* v = p.value().data();
  for (std::int64_t i = 0; i < p.size(); ++i) v[i] = value;
}

}  // namespace abduct
