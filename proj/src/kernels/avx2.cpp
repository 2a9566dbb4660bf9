// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "variants.hpp"

namespace shiftscope::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

// Register tile: 6 x 8 accumulators plus two weight vectors and one
// broadcast fill the 16 ymm registers.
constexpr size_t kRows = 6;
constexpr size_t kDepth = 256;

// Six gram rows against one 8-column weight panel. Named accumulators keep
// GCC from spilling an accumulator array to the stack.
inline void tile6(const double* gram, size_t n, const double* panel, size_t i, size_t j0, size_t j1, double* out) {
  const double* g0 = gram + i * n;
  const double* g1 = g0 + n;
  const double* g2 = g1 + n;
  const double* g3 = g2 + n;
  const double* g4 = g3 + n;
  const double* g5 = g4 + n;
  __m256d a0 = _mm256_setzero_pd(), b0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd(), b1 = _mm256_setzero_pd();
  __m256d a2 = _mm256_setzero_pd(), b2 = _mm256_setzero_pd();
  __m256d a3 = _mm256_setzero_pd(), b3 = _mm256_setzero_pd();
  __m256d a4 = _mm256_setzero_pd(), b4 = _mm256_setzero_pd();
  __m256d a5 = _mm256_setzero_pd(), b5 = _mm256_setzero_pd();
  for (size_t j = j0; j < j1; ++j) {
    const __m256d lo = _mm256_loadu_pd(panel + j * 8);
    const __m256d hi = _mm256_loadu_pd(panel + j * 8 + 4);
    __m256d g = _mm256_broadcast_sd(g0 + j);
    a0 = _mm256_fmadd_pd(g, lo, a0);
    b0 = _mm256_fmadd_pd(g, hi, b0);
    g = _mm256_broadcast_sd(g1 + j);
    a1 = _mm256_fmadd_pd(g, lo, a1);
    b1 = _mm256_fmadd_pd(g, hi, b1);
    g = _mm256_broadcast_sd(g2 + j);
    a2 = _mm256_fmadd_pd(g, lo, a2);
    b2 = _mm256_fmadd_pd(g, hi, b2);
    g = _mm256_broadcast_sd(g3 + j);
    a3 = _mm256_fmadd_pd(g, lo, a3);
    b3 = _mm256_fmadd_pd(g, hi, b3);
    g = _mm256_broadcast_sd(g4 + j);
    a4 = _mm256_fmadd_pd(g, lo, a4);
    b4 = _mm256_fmadd_pd(g, hi, b4);
    g = _mm256_broadcast_sd(g5 + j);
    a5 = _mm256_fmadd_pd(g, lo, a5);
    b5 = _mm256_fmadd_pd(g, hi, b5);
  }
  const double* w = panel + i * 8;
  __m256d o_lo = _mm256_loadu_pd(out);
  __m256d o_hi = _mm256_loadu_pd(out + 4);
  o_lo = _mm256_fmadd_pd(_mm256_loadu_pd(w), a0, o_lo);
  o_hi = _mm256_fmadd_pd(_mm256_loadu_pd(w + 4), b0, o_hi);
  o_lo = _mm256_fmadd_pd(_mm256_loadu_pd(w + 8), a1, o_lo);
  o_hi = _mm256_fmadd_pd(_mm256_loadu_pd(w + 12), b1, o_hi);
  o_lo = _mm256_fmadd_pd(_mm256_loadu_pd(w + 16), a2, o_lo);
  o_hi = _mm256_fmadd_pd(_mm256_loadu_pd(w + 20), b2, o_hi);
  o_lo = _mm256_fmadd_pd(_mm256_loadu_pd(w + 24), a3, o_lo);
  o_hi = _mm256_fmadd_pd(_mm256_loadu_pd(w + 28), b3, o_hi);
  o_lo = _mm256_fmadd_pd(_mm256_loadu_pd(w + 32), a4, o_lo);
  o_hi = _mm256_fmadd_pd(_mm256_loadu_pd(w + 36), b4, o_hi);
  o_lo = _mm256_fmadd_pd(_mm256_loadu_pd(w + 40), a5, o_lo);
  o_hi = _mm256_fmadd_pd(_mm256_loadu_pd(w + 44), b5, o_hi);
  _mm256_storeu_pd(out, o_lo);
  _mm256_storeu_pd(out + 4, o_hi);
}

inline void tile1(const double* gram, size_t n, const double* panel, size_t i, size_t j0, size_t j1, double* out) {
  const double* g0 = gram + i * n;
  __m256d a = _mm256_setzero_pd();
  __m256d b = _mm256_setzero_pd();
  for (size_t j = j0; j < j1; ++j) {
    const __m256d g = _mm256_broadcast_sd(g0 + j);
    a = _mm256_fmadd_pd(g, _mm256_loadu_pd(panel + j * 8), a);
    b = _mm256_fmadd_pd(g, _mm256_loadu_pd(panel + j * 8 + 4), b);
  }
  const double* w = panel + i * 8;
  _mm256_storeu_pd(out, _mm256_fmadd_pd(_mm256_loadu_pd(w), a, _mm256_loadu_pd(out)));
  _mm256_storeu_pd(out + 4, _mm256_fmadd_pd(_mm256_loadu_pd(w + 4), b, _mm256_loadu_pd(out + 4)));
}

// Four squared distances from a to consecutive rows of b, each reduced in
// the same order as squared_distance so results match it bit for bit.
inline void distances4(const double* a, const double* b, size_t d, double* out) {
  const double* b0 = b;
  const double* b1 = b + d;
  const double* b2 = b1 + d;
  const double* b3 = b2 + d;
  __m256d p0 = _mm256_setzero_pd(), q0 = _mm256_setzero_pd();
  __m256d p1 = _mm256_setzero_pd(), q1 = _mm256_setzero_pd();
  __m256d p2 = _mm256_setzero_pd(), q2 = _mm256_setzero_pd();
  __m256d p3 = _mm256_setzero_pd(), q3 = _mm256_setzero_pd();
  size_t k = 0;
  for (; k + 8 <= d; k += 8) {
    const __m256d x0 = _mm256_loadu_pd(a + k);
    const __m256d x1 = _mm256_loadu_pd(a + k + 4);
    __m256d e0 = _mm256_sub_pd(x0, _mm256_loadu_pd(b0 + k));
    __m256d e1 = _mm256_sub_pd(x1, _mm256_loadu_pd(b0 + k + 4));
    p0 = _mm256_fmadd_pd(e0, e0, p0);
    q0 = _mm256_fmadd_pd(e1, e1, q0);
    e0 = _mm256_sub_pd(x0, _mm256_loadu_pd(b1 + k));
    e1 = _mm256_sub_pd(x1, _mm256_loadu_pd(b1 + k + 4));
    p1 = _mm256_fmadd_pd(e0, e0, p1);
    q1 = _mm256_fmadd_pd(e1, e1, q1);
    e0 = _mm256_sub_pd(x0, _mm256_loadu_pd(b2 + k));
    e1 = _mm256_sub_pd(x1, _mm256_loadu_pd(b2 + k + 4));
    p2 = _mm256_fmadd_pd(e0, e0, p2);
    q2 = _mm256_fmadd_pd(e1, e1, q2);
    e0 = _mm256_sub_pd(x0, _mm256_loadu_pd(b3 + k));
    e1 = _mm256_sub_pd(x1, _mm256_loadu_pd(b3 + k + 4));
    p3 = _mm256_fmadd_pd(e0, e0, p3);
    q3 = _mm256_fmadd_pd(e1, e1, q3);
  }
  for (; k + 4 <= d; k += 4) {
    const __m256d x0 = _mm256_loadu_pd(a + k);
    __m256d e = _mm256_sub_pd(x0, _mm256_loadu_pd(b0 + k));
    p0 = _mm256_fmadd_pd(e, e, p0);
    e = _mm256_sub_pd(x0, _mm256_loadu_pd(b1 + k));
    p1 = _mm256_fmadd_pd(e, e, p1);
    e = _mm256_sub_pd(x0, _mm256_loadu_pd(b2 + k));
    p2 = _mm256_fmadd_pd(e, e, p2);
    e = _mm256_sub_pd(x0, _mm256_loadu_pd(b3 + k));
    p3 = _mm256_fmadd_pd(e, e, p3);
  }
  const __m256d v0 = _mm256_add_pd(p0, q0);
  const __m256d v1 = _mm256_add_pd(p1, q1);
  const __m256d v2 = _mm256_add_pd(p2, q2);
  const __m256d v3 = _mm256_add_pd(p3, q3);
  // Halves first, then pairs: the reduction order of hsum.
  const __m256d u01 = _mm256_add_pd(_mm256_permute2f128_pd(v0, v1, 0x20), _mm256_permute2f128_pd(v0, v1, 0x31));
  const __m256d u23 = _mm256_add_pd(_mm256_permute2f128_pd(v2, v3, 0x20), _mm256_permute2f128_pd(v2, v3, 0x31));
  __m256d sums = _mm256_permute4x64_pd(_mm256_hadd_pd(u01, u23), 0xD8);
  if (k < d) {
    alignas(32) double tmp[4];
    _mm256_store_pd(tmp, sums);
    const double* rows[4] = {b0, b1, b2, b3};
    for (size_t r = 0; r < 4; ++r) {
      for (size_t t = k; t < d; ++t) {
        const double diff = a[t] - rows[r][t];
        tmp[r] += diff * diff;
      }
    }
    sums = _mm256_load_pd(tmp);
  }
  _mm256_storeu_pd(out, sums);
}

}  // namespace

double squared_distance(const double* a, const double* b, size_t d) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  size_t k = 0;
  for (; k + 8 <= d; k += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
  }
  for (; k + 4 <= d; k += 4) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < d; ++k) {
    const double diff = a[k] - b[k];
    sum += diff * diff;
  }
  return sum;
}

void cross_squared_distances(const double* a, size_t na, const double* b, size_t nb, size_t d, double* out) {
  for (size_t i = 0; i < na; ++i) {
    const double* ai = a + i * d;
    size_t j = 0;
    for (; j + 4 <= nb; j += 4) distances4(ai, b + j * d, d, out + i * nb + j);
    for (; j < nb; ++j) out[i * nb + j] = squared_distance(ai, b + j * d, d);
  }
}

void upper_squared_distances(const double* rows, size_t n, size_t d, double* out) {
  for (size_t i = 0; i < n; ++i) {
    const double* ri = rows + i * d;
    double* dst = out + i * n;
    dst[i] = 0.0;
    size_t j = i + 1;
    for (; j + 4 <= n; j += 4) distances4(ri, rows + j * d, d, dst + j);
    for (; j < n; ++j) dst[j] = squared_distance(ri, rows + j * d, d);
  }
}

// Off-diagonal pairs accumulate into out through the register tiles; the
// diagonal is added at the end: out = 2 * sum_{i<j} + sum_i K_ii w_i^2.
void quadratic_forms(const double* gram, size_t n, const double* weights, size_t cols, double* out) {
  for (size_t c = 0; c < cols; ++c) out[c] = 0.0;
  for (size_t j0 = 0; j0 < n; j0 += kDepth) {
    const size_t j1 = j0 + kDepth < n ? j0 + kDepth : n;
    size_t i = 0;
    for (; i + kRows <= n && i + kRows < j1; i += kRows) {
      const size_t start = j0 > i + kRows ? j0 : i + kRows;
      if (start >= j1) continue;
      for (size_t c = 0; c < cols; c += 8) tile6(gram, n, weights + c * n, i, start, j1, out + c);
    }
    for (i = n - n % kRows; i < n; ++i) {
      const size_t start = j0 > i + 1 ? j0 : i + 1;
      if (start >= j1) continue;
      for (size_t c = 0; c < cols; c += 8) tile1(gram, n, weights + c * n, i, start, j1, out + c);
    }
  }
  // Pairs inside each 6-row block.
  for (size_t i = 0; i + kRows <= n; i += kRows) {
    for (size_t r = i; r + 1 < i + kRows; ++r) {
      for (size_t c = 0; c < cols; c += 8) tile1(gram, n, weights + c * n, r, r + 1, i + kRows, out + c);
    }
  }
  const __m256d two = _mm256_set1_pd(2.0);
  for (size_t c = 0; c < cols; c += 8) {
    const double* panel = weights + c * n;
    __m256d lo = _mm256_setzero_pd();
    __m256d hi = _mm256_setzero_pd();
    for (size_t i = 0; i < n; ++i) {
      const __m256d g = _mm256_broadcast_sd(gram + i * n + i);
      const __m256d w_lo = _mm256_loadu_pd(panel + i * 8);
      const __m256d w_hi = _mm256_loadu_pd(panel + i * 8 + 4);
      lo = _mm256_fmadd_pd(_mm256_mul_pd(g, w_lo), w_lo, lo);
      hi = _mm256_fmadd_pd(_mm256_mul_pd(g, w_hi), w_hi, hi);
    }
    _mm256_storeu_pd(out + c, _mm256_fmadd_pd(two, _mm256_loadu_pd(out + c), lo));
    _mm256_storeu_pd(out + c + 4, _mm256_fmadd_pd(two, _mm256_loadu_pd(out + c + 4), hi));
  }
}

}  // namespace shiftscope::kernels::avx2
