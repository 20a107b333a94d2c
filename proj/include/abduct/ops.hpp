// Copyright 2026 The Abduct Authors
// SPDX-License-Identifier: Apache-2.0
//
// Differentiable primitives: forward plus hand-derived backward for each.
// There is no tape; composite models chain these backwards explicitly in
// reverse order, caching whatever forward state the backward needs.

#ifndef ABDUCT_OPS_HPP
#define ABDUCT_OPS_HPP

#include <cstdint>
#include <vector>

#include "abduct/param.hpp"
#include "abduct/tensor.hpp"

namespace abduct {

enum class Mode { kTrain, kEval };

constexpr double kJaccardEps = 1e-8;
constexpr double kLayerNormEps = 1e-5;

// ---------------------------------------------------------------------------
// Plumbing (not spec-level ops, used to build the composites)

Tensor2 matmul(const Tensor2& a, const Tensor2& b);
Tensor2 transpose(const Tensor2& a);
Tensor2 add(const Tensor2& a, const Tensor2& b);
Tensor2 scale(const Tensor2& a, double s);
// Column-wise concatenation of equally tall blocks.
Tensor2 concat_cols(const std::vector<const Tensor2*>& blocks);
Tensor2 slice_cols(const Tensor2& a, std::int64_t begin, std::int64_t end);
// Adds `src` into columns [begin, begin+src.cols) of `dst`.
void add_into_cols(Tensor2& dst, std::int64_t begin, const Tensor2& src);

// ---------------------------------------------------------------------------
// linear: out = x * w + b (bias broadcast over rows)

Tensor2 linear(const Tensor2& x, const Param& w, const Param& b);
// Accumulates into w.grad / b.grad, returns d_x.
Tensor2 linear_backward(const Tensor2& d_out, const Tensor2& x, Param& w, Param& b);

// ---------------------------------------------------------------------------
// relu: elementwise max(0, x); subgradient at exactly 0 is 0.

Tensor2 relu(const Tensor2& x);
Tensor2 relu_backward(const Tensor2& d_out, const Tensor2& x);

// ---------------------------------------------------------------------------
// Jaccard vector similarity affinity:
//   W_A(i,j) = 2 <r_i, r_j> / (<r_i,r_i> + <r_j,r_j> + eps)
// Symmetric, bounded [-1, 1], diagonal ~1 for non-degenerate rows.

Tensor2 jaccard_affinity(const Tensor2& r_prime);
// Quotient-rule gradient w.r.t. r_prime.
Tensor2 jaccard_affinity_backward(const Tensor2& d_out, const Tensor2& r_prime);

// Rectangular variant between two row sets: W(i,j) = JVS(a_i, b_j).
Tensor2 jaccard_cross(const Tensor2& a, const Tensor2& b);
struct JaccardCrossGrad {
  Tensor2 d_a;
  Tensor2 d_b;
};
JaccardCrossGrad jaccard_cross_backward(const Tensor2& d_out, const Tensor2& a,
                                        const Tensor2& b);

// ---------------------------------------------------------------------------
// layer_norm: per-row zero-mean unit-variance, then affine gain/shift.

Tensor2 layer_norm(const Tensor2& x, const Param& gain, const Param& shift);
Tensor2 layer_norm_backward(const Tensor2& d_out, const Tensor2& x, Param& gain,
                            Param& shift);

// ---------------------------------------------------------------------------
// dropout: inverted dropout, kept entries scaled by 1/(1-p). Eval mode is the
// exact identity. The mask comes from the caller's seeded stream.

struct DropoutMask {
  bool identity = true;  // eval mode or p == 0
  double keep_scale = 1.0;
  std::vector<std::uint8_t> kept;
};

Tensor2 dropout(const Tensor2& x, double p, Mode mode, Rng* rng, DropoutMask* mask);
Tensor2 dropout_backward(const Tensor2& d_out, const DropoutMask& mask);

// ---------------------------------------------------------------------------
// softmax_rows: numerically stable row softmax.

Tensor2 softmax_rows(const Tensor2& x);
// `y` is the forward output.
Tensor2 softmax_rows_backward(const Tensor2& d_out, const Tensor2& y);

// ---------------------------------------------------------------------------
// bilinear_form: out[m][k] = sum_ij h[i] * W_b[i][j][k] * o[m][j]
// h is 1 x d_b, W_b is d_b x d_b x d_b (stored per Param), o is n x d_b.

Tensor2 bilinear_form(const Tensor2& h, const Param& w_b, const Tensor2& o);
struct BilinearGrad {
  Tensor2 d_h;
  Tensor2 d_o;
};
// Accumulates into w_b.grad.
BilinearGrad bilinear_form_backward(const Tensor2& d_out, const Tensor2& h,
                                    Param& w_b, const Tensor2& o);

// ---------------------------------------------------------------------------
// Set pooling over rows. Both error on n = 0.

struct MaxPoolResult {
  Tensor2 out;                         // 1 x d
  std::vector<std::int64_t> argmax;    // per column; ties -> lowest row index
};
MaxPoolResult max_pool_set(const Tensor2& x);
Tensor2 max_pool_set_backward(const Tensor2& d_out, const MaxPoolResult& fwd,
                              std::int64_t n_rows);

Tensor2 mean_pool_set(const Tensor2& x);
Tensor2 mean_pool_set_backward(const Tensor2& d_out, std::int64_t n_rows);

}  // namespace abduct

#endif  // ABDUCT_OPS_HPP
