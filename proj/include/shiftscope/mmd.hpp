#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "shiftscope/features.hpp"
#include "shiftscope/rng.hpp"

namespace shiftscope {

enum class Estimator { biased, unbiased };

std::string_view to_string(Estimator e) noexcept;
Estimator parse_estimator(std::string_view text);

/// RBF kernel k(x, y) = exp(-||x - y||^2 / (2 sigma^2)).
struct KernelConfig {
  /// Explicit sigma^2; empty selects the median heuristic.
  std::optional<double> bandwidth_sq;

  static KernelConfig median_heuristic() { return {}; }
  /// Throws InvalidArgument unless bandwidth_sq is finite and positive.
  static KernelConfig fixed(double bandwidth_sq);

  bool uses_median_heuristic() const noexcept { return !bandwidth_sq.has_value(); }
  friend bool operator==(const KernelConfig&, const KernelConfig&) = default;
};

struct MmdResult {
  double statistic = 0.0;
  Estimator estimator = Estimator::biased;
  double bandwidth_sq = 0.0;
  std::optional<double> p_value;
  std::size_t n_permutations = 0;
  RngSeed seed;
};

inline constexpr std::size_t kDefaultPermutations = 199;
/// Gram blocks are held in memory; larger samples are rejected.
inline constexpr std::size_t kMaxRowsPerSide = 4096;

/// sigma^2 = median of squared pairwise distances over the pooled rows
/// (self-pairs excluded; even counts average the two central values) / 2.
double median_heuristic(const FeatureMatrix& x, const FeatureMatrix& y);

/// Same rule over an n x n squared-distance matrix; only the upper triangle
/// (j > i) is read.
double median_heuristic_from_distances(std::span<const double> squared_distances, std::size_t n);

/// MMD^2 between the row sets of x and y. Block sums are exactly rounded, so
/// the biased statistic is exactly symmetric in (x, y) and exactly invariant
/// under row reordering.
MmdResult mmd2(const FeatureMatrix& x, const FeatureMatrix& y, const KernelConfig& kernel,
               Estimator estimator = Estimator::biased);

/// Permutation two-sample test: p = (1 + #{permuted >= observed}) / (1 + n_permutations).
/// Trial t shuffles the pooled rows with seed.derive(t); the bandwidth is fixed
/// from the unshuffled pooled sample.
MmdResult permutation_test(const FeatureMatrix& x, const FeatureMatrix& y, const KernelConfig& kernel,
                           Estimator estimator = Estimator::biased,
                           std::size_t n_permutations = kDefaultPermutations, RngSeed seed = {});

}  // namespace shiftscope
