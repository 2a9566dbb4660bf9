#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "shiftscope/features.hpp"

namespace shiftscope {

/// Fitted principal-component reducer.
///
/// `components` is k x d row-major with orthonormal rows; `eigenvalues` are
/// the matching sample-covariance eigenvalues (divisor n - 1), descending and
/// nonnegative. `total_variance` is the covariance trace.
struct PcaModel {
  std::vector<double> mean;
  std::vector<double> components;
  std::vector<double> eigenvalues;
  double total_variance = 0.0;

  std::size_t dim() const noexcept { return mean.size(); }
  std::size_t k() const noexcept { return eigenvalues.size(); }
  const double* component(std::size_t i) const noexcept { return components.data() + i * dim(); }

  /// eigenvalue / total_variance, or all zeros for zero-variance data.
  std::vector<double> explained_variance_ratio() const;

  friend bool operator==(const PcaModel&, const PcaModel&) = default;
};

/// Which eigenproblem pca_fit solves. `automatic` picks the d x d covariance
/// when d <= n and the n x n Gram matrix otherwise.
enum class PcaSolver { automatic, covariance, gram };

inline constexpr std::size_t kDefaultPcaComponents = 32;

PcaModel pca_fit(const FeatureMatrix& m, std::size_t k, PcaSolver solver = PcaSolver::automatic);
FeatureMatrix pca_transform(const PcaModel& model, const FeatureMatrix& m);
FeatureMatrix pca_inverse_transform(const PcaModel& model, const FeatureMatrix& z);

std::string serialize_pca_model(const PcaModel& model);
PcaModel parse_pca_model(std::string_view bytes);
void save_pca_model(const PcaModel& model, const std::filesystem::path& path);
PcaModel load_pca_model(const std::filesystem::path& path);

/// Front-end applied before the two-sample test.
struct ReducerKind {
  enum class Kind { pca, identity, external_scores };
  Kind kind = Kind::pca;
  /// Components for pca; 0 means min(kDefaultPcaComponents, d).
  std::size_t k = 0;

  static ReducerKind pca(std::size_t k = 0) { return {Kind::pca, k}; }
  static ReducerKind identity() { return {Kind::identity, 0}; }
  /// Pre-computed classifier outputs passed through unchanged.
  static ReducerKind external_scores() { return {Kind::external_scores, 0}; }

  friend bool operator==(const ReducerKind&, const ReducerKind&) = default;
};

std::string_view to_string(ReducerKind::Kind kind) noexcept;
ReducerKind::Kind parse_reducer_kind(std::string_view text);

/// Components actually used for data of dimension d (resolves the default).
std::size_t resolved_components(const ReducerKind& reducer, std::size_t d);

}  // namespace shiftscope
