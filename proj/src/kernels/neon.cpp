// AArch64 Advanced SIMD variant; NEON is architecturally guaranteed there.
#if defined(__aarch64__)

#include <arm_neon.h>

#include "variants.hpp"

namespace shiftscope::kernels::neon {

namespace {

// 4 rows x 8 columns = 16 accumulators out of 32 vector registers.
constexpr size_t kRows = 4;
constexpr size_t kDepth = 256;

// R gram rows against one 8-column weight panel over columns [j0, j1).
template <size_t R>
inline void tile(const double* gram, size_t n, const double* panel, size_t i, size_t j0, size_t j1, double* out) {
  float64x2_t acc[R][4];
  for (size_t r = 0; r < R; ++r) {
    for (int q = 0; q < 4; ++q) acc[r][q] = vdupq_n_f64(0.0);
  }
  for (size_t j = j0; j < j1; ++j) {
    const double* w = panel + j * 8;
    const float64x2_t w0 = vld1q_f64(w);
    const float64x2_t w1 = vld1q_f64(w + 2);
    const float64x2_t w2 = vld1q_f64(w + 4);
    const float64x2_t w3 = vld1q_f64(w + 6);
    for (size_t r = 0; r < R; ++r) {
      const float64x2_t g = vdupq_n_f64(gram[(i + r) * n + j]);
      acc[r][0] = vfmaq_f64(acc[r][0], g, w0);
      acc[r][1] = vfmaq_f64(acc[r][1], g, w1);
      acc[r][2] = vfmaq_f64(acc[r][2], g, w2);
      acc[r][3] = vfmaq_f64(acc[r][3], g, w3);
    }
  }
  float64x2_t o[4] = {vld1q_f64(out), vld1q_f64(out + 2), vld1q_f64(out + 4), vld1q_f64(out + 6)};
  for (size_t r = 0; r < R; ++r) {
    const double* wi = panel + (i + r) * 8;
    for (int q = 0; q < 4; ++q) o[q] = vfmaq_f64(o[q], vld1q_f64(wi + 2 * q), acc[r][q]);
  }
  for (int q = 0; q < 4; ++q) vst1q_f64(out + 2 * q, o[q]);
}

}  // namespace

double squared_distance(const double* a, const double* b, size_t d) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  size_t k = 0;
  for (; k + 4 <= d; k += 4) {
    const float64x2_t d0 = vsubq_f64(vld1q_f64(a + k), vld1q_f64(b + k));
    const float64x2_t d1 = vsubq_f64(vld1q_f64(a + k + 2), vld1q_f64(b + k + 2));
    acc0 = vfmaq_f64(acc0, d0, d0);
    acc1 = vfmaq_f64(acc1, d1, d1);
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; k < d; ++k) {
    const double diff = a[k] - b[k];
    sum += diff * diff;
  }
  return sum;
}

void cross_squared_distances(const double* a, size_t na, const double* b, size_t nb, size_t d, double* out) {
  for (size_t i = 0; i < na; ++i) {
    for (size_t j = 0; j < nb; ++j) out[i * nb + j] = squared_distance(a + i * d, b + j * d, d);
  }
}

void upper_squared_distances(const double* rows, size_t n, size_t d, double* out) {
  for (size_t i = 0; i < n; ++i) {
    out[i * n + i] = 0.0;
    for (size_t j = i + 1; j < n; ++j) out[i * n + j] = squared_distance(rows + i * d, rows + j * d, d);
  }
}

// Same decomposition as the AVX2 variant: off-diagonal tiles, in-block
// pairs, then out = 2 * off-diagonal + diagonal.
void quadratic_forms(const double* gram, size_t n, const double* weights, size_t cols, double* out) {
  for (size_t c = 0; c < cols; ++c) out[c] = 0.0;
  for (size_t j0 = 0; j0 < n; j0 += kDepth) {
    const size_t j1 = j0 + kDepth < n ? j0 + kDepth : n;
    for (size_t i = 0; i + kRows <= n && i + kRows < j1; i += kRows) {
      const size_t start = j0 > i + kRows ? j0 : i + kRows;
      for (size_t c = 0; c < cols; c += 8) tile<kRows>(gram, n, weights + c * n, i, start, j1, out + c);
    }
    for (size_t i = n - n % kRows; i < n; ++i) {
      const size_t start = j0 > i + 1 ? j0 : i + 1;
      if (start >= j1) continue;
      for (size_t c = 0; c < cols; c += 8) tile<1>(gram, n, weights + c * n, i, start, j1, out + c);
    }
  }
  for (size_t i = 0; i + kRows <= n; i += kRows) {
    for (size_t r = i; r + 1 < i + kRows; ++r) {
      for (size_t c = 0; c < cols; c += 8) tile<1>(gram, n, weights + c * n, r, r + 1, i + kRows, out + c);
    }
  }
  const float64x2_t two = vdupq_n_f64(2.0);
  for (size_t c = 0; c < cols; c += 8) {
    const double* panel = weights + c * n;
    float64x2_t diag[4] = {vdupq_n_f64(0.0), vdupq_n_f64(0.0), vdupq_n_f64(0.0), vdupq_n_f64(0.0)};
    for (size_t i = 0; i < n; ++i) {
      const float64x2_t g = vdupq_n_f64(gram[i * n + i]);
      for (int q = 0; q < 4; ++q) {
        const float64x2_t w = vld1q_f64(panel + i * 8 + 2 * q);
        diag[q] = vfmaq_f64(diag[q], vmulq_f64(g, w), w);
      }
    }
    for (int q = 0; q < 4; ++q) vst1q_f64(out + c + 2 * q, vfmaq_f64(diag[q], two, vld1q_f64(out + c + 2 * q)));
  }
}

}  // namespace shiftscope::kernels::neon

#endif
