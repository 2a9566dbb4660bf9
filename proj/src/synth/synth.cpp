#include "shiftscope/synth.hpp"

#include <cmath>
#include <cstdio>

#include <boost/math/distributions/normal.hpp>

#include "shiftscope/error.hpp"

namespace shiftscope {

namespace {

constexpr std::uint64_t kSourceStream = 21;
constexpr std::uint64_t kTargetStream = 22;
constexpr std::uint64_t kDayNightStream = 23;
constexpr std::uint64_t kLabelStream = 24;
constexpr std::size_t kMaxLabelsPerItem = 4;

std::string padded_id(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%07zu", prefix, i);
  return buf;
}

FeatureMatrix gaussian_cloud(std::size_t n, std::size_t d, double mean, RngSeed seed, const char* prefix) {
  CounterRng rng(seed);
  std::vector<std::string> ids;
  std::vector<double> data(n * d);
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back(padded_id(prefix, i));
    for (std::size_t j = 0; j < d; ++j) data[i * d + j] = mean + normal_quantile(rng.uniform_open());
  }
  return FeatureMatrix(std::move(ids), std::move(data), d);
}

// One coordinate pair inside [0, extent]; never degenerate.
std::pair<double, double> span_in(CounterRng& rng, double extent) {
  while (true) {
    const double a = rng.uniform_open() * extent;
    const double b = rng.uniform_open() * extent;
    if (a != b) return {std::min(a, b), std::max(a, b)};
  }
}

}  // namespace

const std::map<std::string, double>& default_label_probs() {
  static const std::map<std::string, double> probs = [] {
    std::map<std::string, double> m;
    for (const char* name : {"bike", "bus", "car", "motor", "person", "rider", "traffic light", "traffic sign",
                             "train", "truck"}) {
      m[name] = 0.1;
    }
    return m;
  }();
  return probs;
}

void SynthSpec::validate() const {
  if (d < 1) throw InvalidArgument("synthetic dimension must be at least 1");
  if (!std::isfinite(shift_delta) || shift_delta < 0.0) throw InvalidArgument("shift_delta must be finite and >= 0");
  if (!(day_fraction >= 0.0 && day_fraction <= 1.0)) throw InvalidArgument("day_fraction must lie in [0, 1]");
  if (!label_probs.empty()) {
    double sum = 0.0;
    for (const auto& [name, p] : label_probs) {
      if (name.empty()) throw InvalidArgument("label class names must be nonempty");
      if (!(p >= 0.0)) throw InvalidArgument("label probabilities must be nonnegative");
      sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-9) throw InvalidArgument("label probabilities must sum to 1");
  }
}

double normal_quantile(double u) {
  static const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, u);
}

std::pair<FeatureMatrix, FeatureMatrix> gen_features(const SynthSpec& spec) {
  spec.validate();
  if (spec.n < 1) throw InvalidArgument("synthetic feature count must be at least 1");
  return {gaussian_cloud(spec.n, spec.d, 0.0, spec.seed.stream(kSourceStream), "src_"),
          gaussian_cloud(spec.n, spec.d, spec.shift_delta, spec.seed.stream(kTargetStream), "tgt_")};
}

DatasetManifest gen_manifest(const SynthSpec& spec, std::string name) {
  spec.validate();
  const auto& probs = spec.label_probs.empty() ? default_label_probs() : spec.label_probs;
  const auto n_day = static_cast<std::size_t>(std::floor(static_cast<double>(spec.n) * spec.day_fraction));

  std::vector<bool> is_day(spec.n, false);
  for (auto i : sample_indices(spec.n, n_day, spec.seed.stream(kDayNightStream))) is_day[i] = true;

  CounterRng rng(spec.seed.stream(kLabelStream));
  std::vector<ManifestItem> items(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    auto& item = items[i];
    item.id = padded_id("img_", i);
    item.timeofday = is_day[i] ? TimeOfDay::day : TimeOfDay::night;
    const std::size_t n_labels = 1 + static_cast<std::size_t>(rng.below(kMaxLabelsPerItem));
    for (std::size_t l = 0; l < n_labels; ++l) {
      const double u = rng.uniform_open();
      double cumulative = 0.0;
      const std::string* category = nullptr;
      for (const auto& [cls, p] : probs) {
        if (p <= 0.0) continue;
        category = &cls;
        cumulative += p;
        if (u < cumulative) break;
      }
      const auto [x1, x2] = span_in(rng, kFrameWidth);
      const auto [y1, y2] = span_in(rng, kFrameHeight);
      item.labels.push_back(ObjectLabel{*category, Box2D{x1, y1, x2, y2}});
    }
  }
  return DatasetManifest(std::move(name), std::move(items));
}

}  // namespace shiftscope
