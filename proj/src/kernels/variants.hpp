#pragma once

// Per-ISA entry points. Kept free of standard-library headers so the NEON
// translation unit builds in freestanding cross-compile checks.
#include <stddef.h>

namespace shiftscope::kernels {

namespace scalar {
double squared_distance(const double* a, const double* b, size_t d);
void cross_squared_distances(const double* a, size_t na, const double* b, size_t nb, size_t d, double* out);
void upper_squared_distances(const double* rows, size_t n, size_t d, double* out);
void quadratic_forms(const double* gram, size_t n, const double* weights, size_t cols, double* out);
}  // namespace scalar

namespace avx2 {
double squared_distance(const double* a, const double* b, size_t d);
void cross_squared_distances(const double* a, size_t na, const double* b, size_t nb, size_t d, double* out);
void upper_squared_distances(const double* rows, size_t n, size_t d, double* out);
void quadratic_forms(const double* gram, size_t n, const double* weights, size_t cols, double* out);
}  // namespace avx2

namespace neon {
double squared_distance(const double* a, const double* b, size_t d);
void cross_squared_distances(const double* a, size_t na, const double* b, size_t nb, size_t d, double* out);
void upper_squared_distances(const double* rows, size_t n, size_t d, double* out);
void quadratic_forms(const double* gram, size_t n, const double* weights, size_t cols, double* out);
}  // namespace neon

}  // namespace shiftscope::kernels
