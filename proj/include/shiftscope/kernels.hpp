#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

// Data-parallel inner loops behind the kernel two-sample test. Every routine
// has a portable scalar reference and, where the target supports it, an
// intrinsics variant; the variant is chosen once at runtime from CPU features.
namespace shiftscope::kernels {

enum class Isa { scalar, avx2, neon };

/// Column-panel width of quadratic_forms: `cols` must be a multiple of it.
inline constexpr std::size_t kPanelWidth = 8;

struct KernelSet {
  Isa isa;
  std::string_view name;

  /// ||a - b||^2 over d coordinates, summed as (a_i - b_i)^2 so the result
  /// is bit-identical when a and b are swapped.
  double (*squared_distance)(const double* a, const double* b, std::size_t d);

  /// out[i * nb + j] = ||a_i - b_j||^2 for row-major a (na x d), b (nb x d).
  void (*cross_squared_distances)(const double* a, std::size_t na, const double* b, std::size_t nb,
                                  std::size_t d, double* out);

  /// Upper triangle of the n x n squared-distance matrix between rows:
  /// out[i * n + j] for j >= i, zero on the diagonal. The lower triangle is
  /// left untouched.
  void (*upper_squared_distances)(const double* rows, std::size_t n, std::size_t d, double* out);

  /// out[c] = sum_ij w(i, c) * gram[i][j] * w(j, c) for every column c of an
  /// n x cols weight matrix stored as consecutive n x kPanelWidth row-major
  /// panels: w(j, c) = weights[c * n + j * kPanelWidth + c % kPanelWidth] for
  /// c a multiple of kPanelWidth. gram is a symmetric row-major n x n matrix
  /// of which only the upper triangle (j >= i) is read.
  void (*quadratic_forms)(const double* gram, std::size_t n, const double* weights, std::size_t cols,
                          double* out);
};

const KernelSet& scalar_kernels();

/// Best intrinsics variant compiled in and supported by this CPU, or nullptr.
const KernelSet* simd_kernels();

/// Kernels used by the library. SIMD unless unavailable or the environment
/// variable SHIFTSCOPE_SIMD is set to "off" or "scalar".
const KernelSet& active_kernels();

/// Scalar first, then any supported intrinsics variants.
std::vector<const KernelSet*> available_kernels();

}  // namespace shiftscope::kernels
