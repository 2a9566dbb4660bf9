#include "variants.hpp"

namespace shiftscope::kernels::scalar {

double squared_distance(const double* a, const double* b, size_t d) {
  double sum = 0.0;
  for (size_t k = 0; k < d; ++k) {
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

// sum_i w_i (K_ii w_i + 2 sum_{j>i} K_ij w_j), one 8-column panel at a time.
void quadratic_forms(const double* gram, size_t n, const double* weights, size_t cols, double* out) {
  constexpr size_t kPanel = 8;
  for (size_t c = 0; c < cols; ++c) out[c] = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double* gram_row = gram + i * n;
    for (size_t c0 = 0; c0 < cols; c0 += kPanel) {
      const double* panel = weights + c0 * n;
      double projected[kPanel] = {};
      for (size_t j = i + 1; j < n; ++j) {
        const double g = gram_row[j];
        for (size_t c = 0; c < kPanel; ++c) projected[c] += g * panel[j * kPanel + c];
      }
      for (size_t c = 0; c < kPanel; ++c) {
        const double wi = panel[i * kPanel + c];
        out[c0 + c] += wi * (gram_row[i] * wi + 2.0 * projected[c]);
      }
    }
  }
}

}  // namespace shiftscope::kernels::scalar
