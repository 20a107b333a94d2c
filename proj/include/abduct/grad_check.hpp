// Copyright 2026 The Abduct Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ABDUCT_GRAD_CHECK_HPP
#define ABDUCT_GRAD_CHECK_HPP

#include <functional>
#include <string>

#include "abduct/param.hpp"

namespace abduct {

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::string worst_param;
  std::int64_t worst_index = -1;
};

// Central finite differences against the analytic gradient.
//
// `scalar_fn` must evaluate the scalar objective and, as a side effect,
// accumulate analytic gradients into `params` (forward + hand-derived
// backward). It must be deterministic: dropout in eval mode or a fixed mask.
//
// For each coordinate the relative error is
//   |g_fd - g_an| / max(1e-8, |g_fd| + |g_an|).
// Throws NumericError naming the parameter if any evaluation or gradient is
// non-finite.
GradCheckReport grad_check(const std::function<double()>& scalar_fn,
                           ParamStore& params, double step = 1e-5);

}  // namespace abduct

#endif  // ABDUCT_GRAD_CHECK_HPP
