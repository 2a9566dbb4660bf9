#include <algorithm>
#include <cmath>
#include <string_view>
#include <unordered_map>

#include "shiftscope/error.hpp"
#include "shiftscope/protocol.hpp"

namespace shiftscope {

namespace {

// Sub-stream tags under each repetition seed.
constexpr std::uint64_t kSourceStream = 1;
constexpr std::uint64_t kTargetStream = 2;
constexpr std::uint64_t kPermutationStream = 3;

constexpr std::size_t kNoTwin = static_cast<std::size_t>(-1);

// For each target row, the source row carrying the same item id, if any.
std::vector<std::size_t> source_twins(const FeatureMatrix& source, const FeatureMatrix& target, bool& any) {
  std::unordered_map<std::string_view, std::size_t> by_id;
  by_id.reserve(source.rows());
  for (std::size_t i = 0; i < source.rows(); ++i) by_id.emplace(source.ids()[i], i);
  std::vector<std::size_t> twin(target.rows(), kNoTwin);
  any = false;
  for (std::size_t j = 0; j < target.rows(); ++j) {
    auto it = by_id.find(target.ids()[j]);
    if (it != by_id.end()) {
      twin[j] = it->second;
      any = true;
    }
  }
  return twin;
}

}  // namespace

void DetectionConfig::validate() const {
  if (sample_size < 2) throw InvalidArgument("sample_size must be at least 2");
  if (repetitions < 1) throw InvalidArgument("repetitions must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  if (n_permutations < 1) throw InvalidArgument("n_permutations must be at least 1");
  if (kernel.bandwidth_sq && !(std::isfinite(*kernel.bandwidth_sq) && *kernel.bandwidth_sq > 0.0)) {
    throw InvalidArgument("kernel bandwidth must be finite and positive");
  }
}

std::string_view to_string(Verdict v) noexcept {
  return v == Verdict::shift_detected ? "shift_detected" : "no_shift_detected";
}

Verdict verdict_for(double mean_p, double alpha) noexcept {
  return mean_p < alpha ? Verdict::shift_detected : Verdict::no_shift_detected;
}

double mean_p_value(const std::vector<MmdResult>& results) {
  if (results.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : results) sum += r.p_value.value_or(0.0);
  return sum / static_cast<double>(results.size());
}

double mean_statistic(const std::vector<MmdResult>& results) {
  if (results.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : results) sum += r.statistic;
  return sum / static_cast<double>(results.size());
}

ShiftReport detect_covariate_shift(const FeatureMatrix& source, const FeatureMatrix& target,
                                   const DetectionConfig& config, std::string source_name, std::string target_name) {
  config.validate();
  if (source.empty() || target.empty()) throw InvalidArgument("source and target must be nonempty");
  if (source.dim() != target.dim()) {
    throw InvalidArgument("dimension mismatch: source has " + std::to_string(source.dim()) + " columns, target " +
                          std::to_string(target.dim()));
  }
  if (config.sample_size > source.rows() || config.sample_size > target.rows()) {
    throw InvalidArgument("sample_size " + std::to_string(config.sample_size) + " exceeds available rows (source " +
                          std::to_string(source.rows()) + ", target " + std::to_string(target.rows()) + ")");
  }

  FeatureMatrix reduced_source;
  FeatureMatrix reduced_target;
  if (config.reducer.kind == ReducerKind::Kind::pca) {
    const std::size_t k = resolved_components(config.reducer, source.dim());
    const PcaModel model = pca_fit(concat_rows(source, target), k);
    reduced_source = pca_transform(model, source);
    reduced_target = pca_transform(model, target);
  } else {
    reduced_source = source;
    reduced_target = target;
  }

  ShiftReport report;
  report.source_name = std::move(source_name);
  report.target_name = std::move(target_name);
  report.config = config;
  report.reduced_dim = reduced_source.dim();
  report.per_repetition.reserve(config.repetitions);
  // An item present on both sides may enter only one subsample per
  // repetition; otherwise the two samples are not independent.
  bool shared_items = false;
  const auto twins = source_twins(source, target, shared_items);
  std::vector<bool> source_taken;
  std::vector<std::size_t> eligible;

  for (std::size_t r = 1; r <= config.repetitions; ++r) {
    const RngSeed rep = config.seed.derive(r);
    const auto source_rows = sample_indices(source.rows(), config.sample_size, rep.stream(kSourceStream));
    const FeatureMatrix xs = reduced_source.select(source_rows);
    FeatureMatrix ys;
    if (!shared_items) {
      ys = reduced_target.select(sample_indices(target.rows(), config.sample_size, rep.stream(kTargetStream)));
    } else {
      source_taken.assign(source.rows(), false);
      for (auto i : source_rows) source_taken[i] = true;
      eligible.clear();
      for (std::size_t j = 0; j < target.rows(); ++j) {
        if (twins[j] == kNoTwin || !source_taken[twins[j]]) eligible.push_back(j);
      }
      if (eligible.size() < config.sample_size) {
        throw InvalidArgument("source and target share items; only " + std::to_string(eligible.size()) +
                              " target rows remain outside the source subsample, sample_size is " +
                              std::to_string(config.sample_size));
      }
      auto picks = sample_indices(eligible.size(), config.sample_size, rep.stream(kTargetStream));
      for (auto& p : picks) p = eligible[p];
      ys = reduced_target.select(picks);
    }
    report.per_repetition.push_back(permutation_test(xs, ys, config.kernel, config.estimator, config.n_permutations,
                                                     rep.stream(kPermutationStream)));
  }
  report.mean_p = mean_p_value(report.per_repetition);
  report.mean_statistic = mean_statistic(report.per_repetition);
  report.verdict = verdict_for(report.mean_p, config.alpha);
  return report;
}

std::string_view to_string(ShiftChange c) noexcept {
  switch (c) {
    case ShiftChange::reduced:
      return "shift reduced";
    case ShiftChange::unchanged:
      return "no change";
    case ShiftChange::increased:
      return "shift increased";
    case ShiftChange::inconclusive:
      break;
  }
  return "inconclusive";
}

ShiftComparison compare_shift(const ShiftReport& before, const ShiftReport& after) {
  if (before.target_name != after.target_name) {
    throw InvalidArgument("cannot compare reports against different targets ('" + before.target_name + "' vs '" +
                          after.target_name + "')");
  }
  ShiftComparison cmp;
  cmp.delta_statistic = after.mean_statistic - before.mean_statistic;
  cmp.delta_p = after.mean_p - before.mean_p;
  cmp.statistic_decreased = after.mean_statistic < before.mean_statistic;
  cmp.p_increased = after.mean_p > before.mean_p;
  const bool statistic_increased = after.mean_statistic > before.mean_statistic;
  const bool p_decreased = after.mean_p < before.mean_p;
  if (cmp.statistic_decreased && cmp.p_increased) {
    cmp.change = ShiftChange::reduced;
  } else if (statistic_increased && p_decreased) {
    cmp.change = ShiftChange::increased;
  } else if (!cmp.statistic_decreased && !statistic_increased && !cmp.p_increased && !p_decreased) {
    cmp.change = ShiftChange::unchanged;
  } else {
    cmp.change = ShiftChange::inconclusive;
  }
  return cmp;
}

}  // namespace shiftscope
