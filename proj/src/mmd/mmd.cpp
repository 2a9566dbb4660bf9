#include "shiftscope/mmd.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "shiftscope/error.hpp"
#include "shiftscope/exact_sum.hpp"
#include "shiftscope/kernels.hpp"

namespace shiftscope {

namespace {

// Trials are evaluated in column batches to bound the weight matrix size.
constexpr std::size_t kTrialBatch = 128;

void check_inputs(const FeatureMatrix& x, const FeatureMatrix& y, Estimator estimator) {
  if (x.empty() || y.empty()) throw InvalidArgument("MMD needs nonempty samples on both sides");
  if (x.dim() != y.dim()) {
    throw InvalidArgument("MMD dimension mismatch: " + std::to_string(x.dim()) + " vs " + std::to_string(y.dim()));
  }
  if (estimator == Estimator::unbiased && (x.rows() < 2 || y.rows() < 2)) {
    throw InvalidArgument("unbiased MMD needs at least 2 rows per side");
  }
  if (x.rows() > kMaxRowsPerSide || y.rows() > kMaxRowsPerSide) {
    throw InvalidArgument("MMD supports at most " + std::to_string(kMaxRowsPerSide) +
                          " rows per side; subsample first");
  }
}

std::vector<double> pooled_rows(const FeatureMatrix& x, const FeatureMatrix& y) {
  std::vector<double> pooled(x.data().begin(), x.data().end());
  pooled.insert(pooled.end(), y.data().begin(), y.data().end());
  return pooled;
}

double rbf(double squared_distance, double bandwidth_sq) {
  return std::exp(-squared_distance / (2.0 * bandwidth_sq));
}

double resolve_bandwidth(const KernelConfig& kernel, std::span<const double> pooled_distances, std::size_t n) {
  if (kernel.bandwidth_sq) return *kernel.bandwidth_sq;
  return median_heuristic_from_distances(pooled_distances, n);
}

// Statistic from the three Gram block sums (diagonal sums used by the unbiased form).
double combine(Estimator estimator, double sxx, double syy, double sxy, double diag_x, double diag_y, double nx,
               double ny) {
  if (estimator == Estimator::biased) {
    return (sxx / (nx * nx) + syy / (ny * ny)) - 2.0 * sxy / (nx * ny);
  }
  return ((sxx - diag_x) / (nx * (nx - 1.0)) + (syy - diag_y) / (ny * (ny - 1.0))) - 2.0 * sxy / (nx * ny);
}

}  // namespace

std::string_view to_string(Estimator e) noexcept { return e == Estimator::unbiased ? "unbiased" : "biased"; }

Estimator parse_estimator(std::string_view text) {
  if (text == "biased") return Estimator::biased;
  if (text == "unbiased") return Estimator::unbiased;
  throw InvalidArgument("unknown estimator '" + std::string(text) + "'");
}

KernelConfig KernelConfig::fixed(double bandwidth_sq) {
  if (!std::isfinite(bandwidth_sq) || bandwidth_sq <= 0.0) {
    throw InvalidArgument("kernel bandwidth sigma^2 must be finite and positive");
  }
  return KernelConfig{bandwidth_sq};
}

double median_heuristic_from_distances(std::span<const double> squared_distances, std::size_t n) {
  if (n < 2) throw InvalidArgument("median heuristic needs at least 2 pooled rows");
  std::vector<double> upper;
  upper.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = squared_distances.subspan(i * n + i + 1, n - i - 1);
    upper.insert(upper.end(), row.begin(), row.end());
  }
  const std::size_t m = upper.size();
  const auto mid = upper.begin() + static_cast<std::ptrdiff_t>(m / 2);
  std::nth_element(upper.begin(), mid, upper.end());
  double median = *mid;
  if (m % 2 == 0) {
    const double lower = *std::max_element(upper.begin(), mid);
    median = (lower + median) / 2.0;
  }
  if (!(median > 0.0)) {
    throw InvalidArgument(
        "median heuristic is degenerate (median pairwise distance is zero); pass an explicit bandwidth");
  }
  return median / 2.0;
}

double median_heuristic(const FeatureMatrix& x, const FeatureMatrix& y) {
  if (x.dim() != y.dim() && !x.empty() && !y.empty()) throw InvalidArgument("median heuristic: dimension mismatch");
  const std::size_t n = x.rows() + y.rows();
  if (n < 2) throw InvalidArgument("median heuristic needs at least 2 pooled rows");
  const auto pooled = pooled_rows(x, y);
  std::vector<double> dist(n * n);
  kernels::active_kernels().upper_squared_distances(pooled.data(), n, x.empty() ? y.dim() : x.dim(), dist.data());
  return median_heuristic_from_distances(dist, n);
}

MmdResult mmd2(const FeatureMatrix& x, const FeatureMatrix& y, const KernelConfig& kernel, Estimator estimator) {
  check_inputs(x, y, estimator);
  const auto& k = kernels::active_kernels();
  const std::size_t nx = x.rows();
  const std::size_t ny = y.rows();
  const std::size_t d = x.dim();

  double bandwidth_sq = 0.0;
  if (kernel.bandwidth_sq) {
    bandwidth_sq = *kernel.bandwidth_sq;
  } else {
    bandwidth_sq = median_heuristic(x, y);
  }

  auto block_sum = [&](const FeatureMatrix& a, const FeatureMatrix& b, double* diag) {
    std::vector<double> dist(a.rows() * b.rows());
    k.cross_squared_distances(a.data().data(), a.rows(), b.data().data(), b.rows(), d, dist.data());
    ExactSum total;
    ExactSum diagonal;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      for (std::size_t j = 0; j < b.rows(); ++j) {
        const double v = rbf(dist[i * b.rows() + j], bandwidth_sq);
        total.add(v);
        if (diag != nullptr && i == j) diagonal.add(v);
      }
    }
    if (diag != nullptr) *diag = diagonal.value();
    return total.value();
  };

  double diag_x = 0.0;
  double diag_y = 0.0;
  const double sxx = block_sum(x, x, &diag_x);
  const double syy = block_sum(y, y, &diag_y);
  const double sxy = block_sum(x, y, nullptr);

  MmdResult result;
  result.estimator = estimator;
  result.bandwidth_sq = bandwidth_sq;
  result.statistic = combine(estimator, sxx, syy, sxy, diag_x, diag_y, static_cast<double>(nx), static_cast<double>(ny));
  return result;
}

MmdResult permutation_test(const FeatureMatrix& x, const FeatureMatrix& y, const KernelConfig& kernel,
                           Estimator estimator, std::size_t n_permutations, RngSeed seed) {
  check_inputs(x, y, estimator);
  if (n_permutations < 1) throw InvalidArgument("permutation test needs at least one permutation");
  const auto& k = kernels::active_kernels();
  const std::size_t nx = x.rows();
  const std::size_t ny = y.rows();
  const std::size_t n = nx + ny;

  // Upper triangle of the pooled Gram matrix, built once: distances first,
  // then the RBF in place. The lower triangle is never touched.
  const auto pooled = pooled_rows(x, y);
  std::unique_ptr<double[]> gram_storage(new double[n * n]);
  const std::span<double> gram(gram_storage.get(), n * n);
  k.upper_squared_distances(pooled.data(), n, x.dim(), gram.data());
  const double bandwidth_sq = resolve_bandwidth(kernel, gram, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) gram[i * n + j] = rbf(gram[i * n + j], bandwidth_sq);
  }

  // Biased MMD^2 is the quadratic form w'Kw with w = +1/nx on X, -1/ny on Y.
  // The unbiased form needs block sums, so its weights are X indicators and
  // the Y and cross blocks follow from row sums.
  std::vector<double> row_sums(n, 0.0);
  double total = 0.0;
  double trace = 0.0;
  if (estimator == Estimator::unbiased) {
    for (std::size_t i = 0; i < n; ++i) {
      row_sums[i] += gram[i * n + i];
      for (std::size_t j = i + 1; j < n; ++j) {
        row_sums[i] += gram[i * n + j];
        row_sums[j] += gram[i * n + j];
      }
      trace += gram[i * n + i];
    }
    for (double r : row_sums) total += r;
  }
  const double wx = estimator == Estimator::biased ? 1.0 / static_cast<double>(nx) : 1.0;
  const double wy = estimator == Estimator::biased ? -1.0 / static_cast<double>(ny) : 0.0;

  const std::size_t trials = n_permutations + 1;  // column 0 is the observed split
  std::vector<std::size_t> scratch(n);
  std::vector<double> statistics(trials);
  for (std::size_t first = 0; first < trials; first += kTrialBatch) {
    const std::size_t count = std::min(kTrialBatch, trials - first);
    const std::size_t cols = (count + kernels::kPanelWidth - 1) / kernels::kPanelWidth * kernels::kPanelWidth;
    std::vector<double> weights(n * cols, 0.0);
    std::vector<double> in_x(n * count, 0.0);
    for (std::size_t c = 0; c < count; ++c) {
      const std::size_t trial = first + c;
      if (trial == 0) {
        for (std::size_t i = 0; i < n; ++i) in_x[c * n + i] = i < nx ? 1.0 : 0.0;
      } else {
        CounterRng rng(seed.derive(trial));
        sample_indices_into(scratch, nx, rng);
        for (std::size_t t = 0; t < nx; ++t) in_x[c * n + scratch[t]] = 1.0;
      }
      double* panel = weights.data() + (c / kernels::kPanelWidth) * kernels::kPanelWidth * n + c % kernels::kPanelWidth;
      for (std::size_t i = 0; i < n; ++i) panel[i * kernels::kPanelWidth] = in_x[c * n + i] != 0.0 ? wx : wy;
    }
    std::vector<double> forms(cols);
    k.quadratic_forms(gram.data(), n, weights.data(), cols, forms.data());

    for (std::size_t c = 0; c < count; ++c) {
      if (estimator == Estimator::biased) {
        statistics[first + c] = forms[c];
        continue;
      }
      double row_sum_x = 0.0;
      double diag_x = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (in_x[c * n + i] != 0.0) {
          row_sum_x += row_sums[i];
          diag_x += gram[i * n + i];
        }
      }
      const double sxx = forms[c];
      const double sxy = row_sum_x - sxx;
      const double syy = total - sxx - 2.0 * sxy;
      statistics[first + c] = combine(estimator, sxx, syy, sxy, diag_x, trace - diag_x, static_cast<double>(nx),
                                      static_cast<double>(ny));
    }
  }

  const double observed = statistics[0];
  std::size_t extreme = 0;
  for (std::size_t t = 1; t < trials; ++t) extreme += statistics[t] >= observed ? 1 : 0;

  MmdResult result;
  result.statistic = observed;
  result.estimator = estimator;
  result.bandwidth_sq = bandwidth_sq;
  result.p_value = static_cast<double>(1 + extreme) / static_cast<double>(1 + n_permutations);
  result.n_permutations = n_permutations;
  result.seed = seed;
  return result;
}

}  // namespace shiftscope
