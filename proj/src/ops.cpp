// Copyright 2026 The Abduct Authors
// SPDX-License-Identifier: Apache-2.0

#include "abduct/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace abduct {

namespace {

// i-k-j loop order so the inner loop runs over contiguous memory.
void matmul_into(const Tensor2& a, const Tensor2& b, Tensor2& out, bool accumulate) {
  const std::int64_t n = a.rows(), p = a.cols(), q = b.cols();
  if (!accumulate) std::fill(out.data(), out.data() + out.size(), 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    const double* arow = a.row_ptr(i);
    double* orow = out.row_ptr(i);
    for (std::int64_t k = 0; k < p; ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = b.row_ptr(k);
      for (std::int64_t j = 0; j < q; ++j) orow[j] += aik * brow[j];
    }
  }
}

}  // namespace

Tensor2 matmul(const Tensor2& a, const Tensor2& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: inner dims differ, " + a.shape_str() + " vs " +
                         b.shape_str());
  }
  Tensor2 out(a.rows(), b.cols());
  matmul_into(a, b, out, false);
  return out;
}

Tensor2 transpose(const Tensor2& a) {
  Tensor2 out(a.cols(), a.rows());
  for (std::int64_t i = 0; i < a.rows(); ++i)
    for (std::int64_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Tensor2 add(const Tensor2& a, const Tensor2& b) {
  if (!a.same_shape(b)) {
    throw DimensionError("add: shape mismatch, " + a.shape_str() + " vs " +
                         b.shape_str());
  }
  Tensor2 out = a;
  double* o = out.data();
  const double* bb = b.data();
  for (std::int64_t i = 0; i < out.size(); ++i) o[i] += bb[i];
  return out;
}

Tensor2 scale(const Tensor2& a, double s) {
  Tensor2 out = a;
  double* o = out.data();
  for (std::int64_t i = 0; i < out.size(); ++i) o[i] *= s;
  return out;
}

Tensor2 concat_cols(const std::vector<const Tensor2*>& blocks) {
  std::int64_t rows = blocks.empty() ? 0 : blocks.front()->rows();
  std::int64_t cols = 0;
  for (const Tensor2* b : blocks) {
    if (b->rows() != rows) {
      throw DimensionError("concat_cols: row mismatch, " +
                           std::to_string(b->rows()) + " vs " + std::to_string(rows));
    }
    cols += b->cols();
  }
  Tensor2 out(rows, cols);
  for (std::int64_t r = 0; r < rows; ++r) {
    double* dst = out.row_ptr(r);
    for (const Tensor2* b : blocks) {
      const double* src = b->row_ptr(r);
      std::copy(src, src + b->cols(), dst);
      dst += b->cols();
    }
  }
  return out;
}

Tensor2 slice_cols(const Tensor2& a, std::int64_t begin, std::int64_t end) {
  Tensor2 out(a.rows(), end - begin);
  for (std::int64_t r = 0; r < a.rows(); ++r) {
    const double* src = a.row_ptr(r) + begin;
    std::copy(src, src + (end - begin), out.row_ptr(r));
  }
  return out;
}

void add_into_cols(Tensor2& dst, std::int64_t begin, const Tensor2& src) {
  for (std::int64_t r = 0; r < src.rows(); ++r) {
    double* d = dst.row_ptr(r) + begin;
    const double* s = src.row_ptr(r);
    for (std::int64_t c = 0; c < src.cols(); ++c) d[c] += s[c];
  }
}

// ---------------------------------------------------------------------------

Tensor2 linear(const Tensor2& x, const Param& w, const Param& b) {
  const Tensor2& wv = w.value();
  const Tensor2& bv = b.value();
  if (x.cols() != wv.rows()) {
    throw DimensionError("linear: x " + x.shape_str() + " does not conform with " +
                         w.name() + " " + wv.shape_str());
  }
  require_shape(bv, 1, wv.cols(), "linear: bias " + b.name());
  require_finite(x, "linear input");
  Tensor2 out(x.rows(), wv.cols());
  for (std::int64_t i = 0; i < x.rows(); ++i)
    std::copy(bv.data(), bv.data() + bv.cols(), out.row_ptr(i));
  matmul_into(x, wv, out, true);
  return out;
}

Tensor2 linear_backward(const Tensor2& d_out, const Tensor2& x, Param& w, Param& b) {
  // d_w += x^T d_out; d_b += column sums of d_out; d_x = d_out w^T
  Tensor2& gw = w.grad();
  for (std::int64_t i = 0; i < x.rows(); ++i) {
    const double* xrow = x.row_ptr(i);
    const double* drow = d_out.row_ptr(i);
    for (std::int64_t k = 0; k < x.cols(); ++k) {
      const double xik = xrow[k];
      if (xik == 0.0) continue;
      double* grow = gw.row_ptr(k);
      for (std::int64_t j = 0; j < d_out.cols(); ++j) grow[j] += xik * drow[j];
    }
  }
  Tensor2& gb = b.grad();
  for (std::int64_t i = 0; i < d_out.rows(); ++i) {
    const double* drow = d_out.row_ptr(i);
    for (std::int64_t j = 0; j < d_out.cols(); ++j) gb(0, j) += drow[j];
  }
  const Tensor2& wv = w.value();
  Tensor2 d_x(x.rows(), x.cols());
  for (std::int64_t i = 0; i < d_out.rows(); ++i) {
    const double* drow = d_out.row_ptr(i);
    double* dxrow = d_x.row_ptr(i);
    for (std::int64_t j = 0; j < d_out.cols(); ++j) {
      const double dij = drow[j];
      if (dij == 0.0) continue;
      for (std::int64_t k = 0; k < x.cols(); ++k) dxrow[k] += dij * wv(k, j);
    }
  }
  return d_x;
}

// ---------------------------------------------------------------------------

Tensor2 relu(const Tensor2& x) {
  Tensor2 out = x;
  double* o = out.data();
  for (std::int64_t i = 0; i < out.size(); ++i) o[i] = o[i] > 0.0 ? o[i] : 0.0;
  return out;
}

Tensor2 relu_backward(const Tensor2& d_out, const Tensor2& x) {
  Tensor2 d_x = d_out;
  double* d = d_x.data();
  const double* xv = x.data();
  for (std::int64_t i = 0; i < d_x.size(); ++i)
    if (xv[i] <= 0.0) d[i] = 0.0;
  return d_x;
}

// ---------------------------------------------------------------------------

Tensor2 jaccard_affinity(const Tensor2& r) {
  require_finite(r, "jaccard_affinity input");
  const std::int64_t n = r.rows(), d = r.cols();
  std::vector<double> sq(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const double* ri = r.row_ptr(i);
    double s = 0.0;
    for (std::int64_t c = 0; c < d; ++c) s += ri[c] * ri[c];
    sq[i] = s;
  }
  Tensor2 out(n, n);
  for (std::int64_t i = 0; i < n; ++i) {
    const double* ri = r.row_ptr(i);
    for (std::int64_t j = i; j < n; ++j) {
      const double* rj = r.row_ptr(j);
      double dot = 0.0;
      for (std::int64_t c = 0; c < d; ++c) dot += ri[c] * rj[c];
      const double v = 2.0 * dot / (sq[i] + sq[j] + kJaccardEps);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

Tensor2 jaccard_affinity_backward(const Tensor2& d_out, const Tensor2& r) {
  const std::int64_t n = r.rows(), d = r.cols();
  std::vector<double> sq(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const double* ri = r.row_ptr(i);
    double s = 0.0;
    for (std::int64_t c = 0; c < d; ++c) s += ri[c] * ri[c];
    sq[i] = s;
  }
  Tensor2 d_r(n, d);
  for (std::int64_t i = 0; i < n; ++i) {
    const double* ri = r.row_ptr(i);
    // Diagonal term: W_ii = 2 q_i / (2 q_i + eps) depends on r_i only through
    // the epsilon-regularized denominator.
    const double den_ii = 2.0 * sq[i] + kJaccardEps;
    const double diag_coef = d_out(i, i) * 4.0 * kJaccardEps / (den_ii * den_ii);
    double* gi = d_r.row_ptr(i);
    for (std::int64_t c = 0; c < d; ++c) gi[c] += diag_coef * ri[c];

    for (std::int64_t j = i + 1; j < n; ++j) {
      const double* rj = r.row_ptr(j);
      double dot = 0.0;
      for (std::int64_t c = 0; c < d; ++c) dot += ri[c] * rj[c];
      const double den = sq[i] + sq[j] + kJaccardEps;
      // W_ij and W_ji are the same value; both output cells feed the grad.
      const double g = d_out(i, j) + d_out(j, i);
      const double a = 2.0 * g / den;
      const double b = 4.0 * g * dot / (den * den);
      double* gj = d_r.row_ptr(j);
      for (std::int64_t c = 0; c < d; ++c) {
        gi[c] += a * rj[c] - b * ri[c];
        gj[c] += a * ri[c] - b * rj[c];
      }
    }
  }
  return d_r;
}

Tensor2 jaccard_cross(const Tensor2& a, const Tensor2& b) {
  if (a.cols() != b.cols()) {
    throw DimensionError("jaccard_cross: width mismatch, " + a.shape_str() + " vs " +
                         b.shape_str());
  }
  const std::int64_t na = a.rows(), nb = b.rows(), d = a.cols();
  std::vector<double> qa(na), qb(nb);
  for (std::int64_t i = 0; i < na; ++i) {
    const double* p = a.row_ptr(i);
    double s = 0.0;
    for (std::int64_t c = 0; c < d; ++c) s += p[c] * p[c];
    qa[i] = s;
  }
  for (std::int64_t j = 0; j < nb; ++j) {
    const double* p = b.row_ptr(j);
    double s = 0.0;
    for (std::int64_t c = 0; c < d; ++c) s += p[c] * p[c];
    qb[j] = s;
  }
  Tensor2 out(na, nb);
  for (std::int64_t i = 0; i < na; ++i) {
    const double* ai = a.row_ptr(i);
    for (std::int64_t j = 0; j < nb; ++j) {
      const double* bj = b.row_ptr(j);
      double dot = 0.0;
      for (std::int64_t c = 0; c < d; ++c) dot += ai[c] * bj[c];
      out(i, j) = 2.0 * dot / (qa[i] + qb[j] + kJaccardEps);
    }
  }
  return out;
}

JaccardCrossGrad jaccard_cross_backward(const Tensor2& d_out, const Tensor2& a,
                                        const Tensor2& b) {
  const std::int64_t na = a.rows(), nb = b.rows(), d = a.cols();
  std::vector<double> qa(na), qb(nb);
  for (std::int64_t i = 0; i < na; ++i) {
    const double* p = a.row_ptr(i);
    double s = 0.0;
    for (std::int64_t c = 0; c < d; ++c) s += p[c] * p[c];
    qa[i] = s;
  }
  for (std::int64_t j = 0; j < nb; ++j) {
    const double* p = b.row_ptr(j);
    double s = 0.0;
    for (std::int64_t c = 0; c < d; ++c) s += p[c] * p[c];
    qb[j] = s;
  }
  JaccardCrossGrad g{Tensor2(na, d), Tensor2(nb, d)};
  for (std::int64_t i = 0; i < na; ++i) {
    const double* ai = a.row_ptr(i);
    double* gai = g.d_a.row_ptr(i);
    for (std::int64_t j = 0; j < nb; ++j) {
      const double go = d_out(i, j);
      if (go == 0.0) continue;
      const double* bj = b.row_ptr(j);
      double* gbj = g.d_b.row_ptr(j);
      double dot = 0.0;
      for (std::int64_t c = 0; c < d; ++c) dot += ai[c] * bj[c];
      const double den = qa[i] + qb[j] + kJaccardEps;
      const double s = 2.0 * go / den;
      const double t = 4.0 * go * dot / (den * den);
      for (std::int64_t c = 0; c < d; ++c) {
        gai[c] += s * bj[c] - t * ai[c];
        gbj[c] += s * ai[c] - t * bj[c];
      }
    }
  }
  return g;
}

// ---------------------------------------------------------------------------

Tensor2 layer_norm(const Tensor2& x, const Param& gain, const Param& shift) {
  const std::int64_t n = x.rows(), d = x.cols();
  require_shape(gain.value(), 1, d, "layer_norm: gain " + gain.name());
  require_shape(shift.value(), 1, d, "layer_norm: shift " + shift.name());
  Tensor2 out(n, d);
  const double* g = gain.value().data();
  const double* s = shift.value().data();
  for (std::int64_t i = 0; i < n; ++i) {
    const double* xr = x.row_ptr(i);
    double mean = 0.0;
    for (std::int64_t c = 0; c < d; ++c) mean += xr[c];
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::int64_t c = 0; c < d; ++c) var += (xr[c] - mean) * (xr[c] - mean);
    var /= static_cast<double>(d);
    const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
    double* orow = out.row_ptr(i);
    for (std::int64_t c = 0; c < d; ++c) orow[c] = (xr[c] - mean) * inv * g[c] + s[c];
  }
  return out;
}

Tensor2 layer_norm_backward(const Tensor2& d_out, const Tensor2& x, Param& gain,
                            Param& shift) {
  const std::int64_t n = x.rows(), d = x.cols();
  const double* g = gain.value().data();
  double* dg = gain.grad().data();
  double* ds = shift.grad().data();
  Tensor2 d_x(n, d);
  std::vector<double> xhat(static_cast<std::size_t>(d));
  std::vector<double> dxhat(static_cast<std::size_t>(d));
  for (std::int64_t i = 0; i < n; ++i) {
    const double* xr = x.row_ptr(i);
    const double* dr = d_out.row_ptr(i);
    double mean = 0.0;
    for (std::int64_t c = 0; c < d; ++c) mean += xr[c];
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::int64_t c = 0; c < d; ++c) var += (xr[c] - mean) * (xr[c] - mean);
    var /= static_cast<double>(d);
    const double inv = 1.0 / std::sqrt(var + kLayerNormEps);

    double m1 = 0.0, m2 = 0.0;  // mean(dxhat), mean(dxhat * xhat)
    for (std::int64_t c = 0; c < d; ++c) {
      xhat[c] = (xr[c] - mean) * inv;
      dxhat[c] = dr[c] * g[c];
      dg[c] += dr[c] * xhat[c];
      ds[c] += dr[c];
      m1 += dxhat[c];
      m2 += dxhat[c] * xhat[c];
    }
    m1 /= static_cast<double>(d);
    m2 /= static_cast<double>(d);
    double* dxr = d_x.row_ptr(i);
    for (std::int64_t c = 0; c < d; ++c)
      dxr[c] = inv * (dxhat[c] - m1 - xhat[c] * m2);
  }
  return d_x;
}

// ---------------------------------------------------------------------------

Tensor2 dropout(const Tensor2& x, double p, Mode mode, Rng* rng, DropoutMask* mask) {
  if (p < 0.0 || p >= 1.0) {
    throw ConfigError("dropout: rate must be in [0, 1), got " + std::to_string(p));
  }
  if (mode == Mode::kEval || p == 0.0) {
    if (mask) {
      mask->identity = true;
      mask->keep_scale = 1.0;
      mask->kept.clear();
    }
    return x;
  }
  if (!rng) throw ConfigError("dropout: train mode requires an rng stream");
  const double keep_scale = 1.0 / (1.0 - p);
  Tensor2 out = x;
  double* o = out.data();
  std::vector<std::uint8_t> kept(static_cast<std::size_t>(x.size()));
  for (std::int64_t i = 0; i < x.size(); ++i) {
    const bool keep = !rng->bernoulli(p);
    kept[static_cast<std::size_t>(i)] = keep ? 1 : 0;
    o[i] = keep ? o[i] * keep_scale : 0.0;
  }
  if (mask) {
    mask->identity = false;
    mask->keep_scale = keep_scale;
    mask->kept = std::move(kept);
  }
  return out;
}

Tensor2 dropout_backward(const Tensor2& d_out, const DropoutMask& mask) {
  if (mask.identity) return d_out;
  Tensor2 d_x = d_out;
  double* d = d_x.data();
  for (std::int64_t i = 0; i < d_x.size(); ++i)
    d[i] = mask.kept[static_cast<std::size_t>(i)] ? d[i] * mask.keep_scale : 0.0;
  return d_x;
}

// ---------------------------------------------------------------------------

Tensor2 softmax_rows(const Tensor2& x) {
  Tensor2 out(x.rows(), x.cols());
  for (std::int64_t i = 0; i < x.rows(); ++i) {
    const double* xr = x.row_ptr(i);
    double* orow = out.row_ptr(i);
    double mx = xr[0];
    for (std::int64_t c = 1; c < x.cols(); ++c) mx = std::max(mx, xr[c]);
    double sum = 0.0;
    for (std::int64_t c = 0; c < x.cols(); ++c) {
      orow[c] = std::exp(xr[c] - mx);
      sum += orow[c];
    }
    for (std::int64_t c = 0; c < x.cols(); ++c) orow[c] /= sum;
  }
  return out;
}

Tensor2 softmax_rows_backward(const Tensor2& d_out, const Tensor2& y) {
  Tensor2 d_x(y.rows(), y.cols());
  for (std::int64_t i = 0; i < y.rows(); ++i) {
    const double* yr = y.row_ptr(i);
    const double* dr = d_out.row_ptr(i);
    double dot = 0.0;
    for (std::int64_t c = 0; c < y.cols(); ++c) dot += dr[c] * yr[c];
    double* dxr = d_x.row_ptr(i);
    for (std::int64_t c = 0; c < y.cols(); ++c) dxr[c] = yr[c] * (dr[c] - dot);
  }
  return d_x;
}

// ---------------------------------------------------------------------------

namespace {

void check_bilinear_shapes(const Tensor2& h, const Param& w_b, const Tensor2& o) {
  const auto& shape = w_b.logical_shape();
  if (shape.size() != 3) {
    throw DimensionError("bilinear_form: " + w_b.name() + " is not a 3-way tensor");
  }
  const std::int64_t d = shape[0];
  if (shape[1] != d || shape[2] != d || h.rows() != 1 || h.cols() != d ||
      o.cols() != d) {
    throw DimensionError("bilinear_form: shapes do not conform, h " + h.shape_str() +
                         ", W " + std::to_string(shape[0]) + "x" +
                         std::to_string(shape[1]) + "x" + std::to_string(shape[2]) +
                         ", o " + o.shape_str());
  }
}

}  // namespace

Tensor2 bilinear_form(const Tensor2& h, const Param& w_b, const Tensor2& o) {
  check_bilinear_shapes(h, w_b, o);
  const std::int64_t d = h.cols(), n = o.rows();
  // Contract h once: C[j][k] = sum_i h[i] W[i][j][k]. h is shared across the
  // whole relation set, so this turns n*d^3 into d^3 + n*d^2.
  Tensor2 c(d, d);
  const Tensor2& w = w_b.value();
  for (std::int64_t i = 0; i < d; ++i) {
    const double hi = h(0, i);
    if (hi == 0.0) continue;
    const double* wrow = w.row_ptr(i);  // d1*d2 flat
    double* cd = c.data();
    for (std::int64_t jk = 0; jk < d * d; ++jk) cd[jk] += hi * wrow[jk];
  }
  Tensor2 out(n, d);
  for (std::int64_t m = 0; m < n; ++m) {
    const double* orow = o.row_ptr(m);
    double* outrow = out.row_ptr(m);
    for (std::int64_t j = 0; j < d; ++j) {
      const double omj = orow[j];
      if (omj == 0.0) continue;
      const double* crow = c.row_ptr(j);
      for (std::int64_t k = 0; k < d; ++k) outrow[k] += omj * crow[k];
    }
  }
  return out;
}

BilinearGrad bilinear_form_backward(const Tensor2& d_out, const Tensor2& h,
                                    Param& w_b, const Tensor2& o) {
  check_bilinear_shapes(h, w_b, o);
  const std::int64_t d = h.cols(), n = o.rows();
  const Tensor2& w = w_b.value();

  // E[j][k] = sum_m o[m][j] d_out[m][k]
  Tensor2 e(d, d);
  for (std::int64_t m = 0; m < n; ++m) {
    const double* orow = o.row_ptr(m);
    const double* drow = d_out.row_ptr(m);
    for (std::int64_t j = 0; j < d; ++j) {
      const double omj = orow[j];
      if (omj == 0.0) continue;
      double* erow = e.row_ptr(j);
      for (std::int64_t k = 0; k < d; ++k) erow[k] += omj * drow[k];
    }
  }

  BilinearGrad g{Tensor2(1, d), Tensor2(n, d)};
  // d_h[i] = sum_jk W[i][j][k] E[j][k];  d_W[i][j][k] += h[i] E[j][k]
  Tensor2& gw = w_b.grad();
  const double* ed = e.data();
  for (std::int64_t i = 0; i < d; ++i) {
    const double* wrow = w.row_ptr(i);
    double* gwrow = gw.row_ptr(i);
    const double hi = h(0, i);
    double acc = 0.0;
    for (std::int64_t jk = 0; jk < d * d; ++jk) {
      acc += wrow[jk] * ed[jk];
      gwrow[jk] += hi * ed[jk];
    }
    g.d_h(0, i) = acc;
  }
  // d_o[m][j] = sum_k d_out[m][k] C[j][k] with C as in forward
  Tensor2 c(d, d);
  for (std::int64_t i = 0; i < d; ++i) {
    const double hi = h(0, i);
    if (hi == 0.0) continue;
    const double* wrow = w.row_ptr(i);
    double* cd = c.data();
    for (std::int64_t jk = 0; jk < d * d; ++jk) cd[jk] += hi * wrow[jk];
  }
  for (std::int64_t m = 0; m < n; ++m) {
    const double* drow = d_out.row_ptr(m);
    double* gorow = g.d_o.row_ptr(m);
    for (std::int64_t j = 0; j < d; ++j) {
      const double* crow = c.row_ptr(j);
      double acc = 0.0;
      for (std::int64_t k = 0; k < d; ++k) acc += drow[k] * crow[k];
      gorow[j] = acc;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------

MaxPoolResult max_pool_set(const Tensor2& x) {
  if (x.rows() == 0) throw DataError("max_pool_set: empty set");
  MaxPoolResult res{Tensor2(1, x.cols()), std::vector<std::int64_t>(x.cols(), 0)};
  for (std::int64_t c = 0; c < x.cols(); ++c) {
    double best = x(0, c);
    std::int64_t arg = 0;
    for (std::int64_t r = 1; r < x.rows(); ++r) {
      if (x(r, c) > best) {  // strict: ties keep the lowest row index
        best = x(r, c);
        arg = r;
      }
    }
    res.out(0, c) = best;
    res.argmax[static_cast<std::size_t>(c)] = arg;
  }
  return res;
}

Tensor2 max_pool_set_backward(const Tensor2& d_out, const MaxPoolResult& fwd,
                              std::int64_t n_rows) {
  Tensor2 d_x(n_rows, d_out.cols());
  for (std::int64_t c = 0; c < d_out.cols(); ++c)
    d_x(fwd.argmax[static_cast<std::size_t>(c)], c) = d_out(0, c);
  return d_x;
}

Tensor2 mean_pool_set(const Tensor2& x) {
  if (x.rows() == 0) throw DataError("mean_pool_set: empty set");
  Tensor2 out(1, x.cols());
  for (std::int64_t r = 0; r < x.rows(); ++r) {
    const double* xr = x.row_ptr(r);
    for (std::int64_t c = 0; c < x.cols(); ++c) out(0, c) += xr[c];
  }
  const double inv = 1.0 / static_cast<double>(x.rows());
  for (std::int64_t c = 0; c < x.cols(); ++c) out(0, c) *= inv;
  return out;
}

Tensor2 mean_pool_set_backward(const Tensor2& d_out, std::int64_t n_rows) {
  Tensor2 d_x(n_rows, d_out.cols());
  const double inv = 1.0 / static_cast<double>(n_rows);
  for (std::int64_t r = 0; r < n_rows; ++r)
    for (std::int64_t c = 0; c < d_out.cols(); ++c) d_x(r, c) = d_out(0, c) * inv;
  return d_x;
}

}  // namespace abduct
