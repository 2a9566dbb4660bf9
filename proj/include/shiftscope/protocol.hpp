#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "shiftscope/features.hpp"
#include "shiftscope/manifest.hpp"
#include "shiftscope/mmd.hpp"
#include "shiftscope/reduce.hpp"

namespace shiftscope {

/// Repeated-subsampling MMD protocol settings. Defaults: 1,000 rows per side,
/// 30 repetitions, alpha = 0.05, biased MMD^2 with the median heuristic.
struct DetectionConfig {
  ReducerKind reducer = ReducerKind::pca();
  std::size_t sample_size = 1000;
  std::size_t repetitions = 30;
  double alpha = 0.05;
  KernelConfig kernel = KernelConfig::median_heuristic();
  Estimator estimator = Estimator::biased;
  std::size_t n_permutations = kDefaultPermutations;
  RngSeed seed;

  /// Throws InvalidArgument when an invariant is violated.
  void validate() const;
  friend bool operator==(const DetectionConfig&, const DetectionConfig&) = default;
};

enum class Verdict { shift_detected, no_shift_detected };

std::string_view to_string(Verdict v) noexcept;
/// shift_detected iff mean_p < alpha.
Verdict verdict_for(double mean_p, double alpha) noexcept;

struct ShiftReport {
  std::string source_name;
  std::string target_name;
  std::vector<MmdResult> per_repetition;
  double mean_p = 0.0;
  double mean_statistic = 0.0;
  Verdict verdict = Verdict::no_shift_detected;
  DetectionConfig config;
  /// Reduced dimension fed to the test (PCA k, or the input width otherwise).
  std::size_t reduced_dim = 0;
};

/// Fits the reducer once on the pooled data, then for r = 1..repetitions
/// subsamples both sides independently (streams of seed.derive(r)) and runs
/// the permutation test on the reduced rows. Items whose id appears on both
/// sides are never drawn into both subsamples of the same repetition; when
/// too few target rows remain, InvalidArgument is thrown.
ShiftReport detect_covariate_shift(const FeatureMatrix& source, const FeatureMatrix& target,
                                   const DetectionConfig& config, std::string source_name = "source",
                                   std::string target_name = "target");

/// Arithmetic means of the repetition p-values and statistics, in order.
double mean_p_value(const std::vector<MmdResult>& results);
double mean_statistic(const std::vector<MmdResult>& results);

std::string serialize_shift_report(const ShiftReport& report);
/// Strict schema check; FormatError on any missing, extra, or mistyped field.
ShiftReport parse_shift_report(std::string_view json_text);
ShiftReport load_shift_report(const std::filesystem::path& path);

struct LabelShiftResult {
  std::vector<std::string> categories;  // lexicographic
  std::vector<std::uint64_t> counts_src;
  std::vector<std::uint64_t> counts_tgt;
  double statistic = 0.0;
  std::size_t degrees_of_freedom = 0;
  double p_value = 1.0;
};

/// Pearson chi-square test on the 2 x C table of per-class label counts.
LabelShiftResult detect_label_shift(const DatasetManifest& source, const DatasetManifest& target);
std::string serialize_label_shift(const LabelShiftResult& result);

enum class ShiftChange { reduced, unchanged, increased, inconclusive };

struct ShiftComparison {
  bool statistic_decreased = false;
  bool p_increased = false;
  double delta_statistic = 0.0;  // after - before
  double delta_p = 0.0;          // after - before
  ShiftChange change = ShiftChange::unchanged;
};

std::string_view to_string(ShiftChange c) noexcept;

/// Both reports must test against the same target (InvalidArgument otherwise).
ShiftComparison compare_shift(const ShiftReport& before, const ShiftReport& after);

}  // namespace shiftscope
