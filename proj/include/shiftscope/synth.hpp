#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "shiftscope/features.hpp"
#include "shiftscope/manifest.hpp"
#include "shiftscope/rng.hpp"

namespace shiftscope {

inline constexpr double kFrameWidth = 1280.0;
inline constexpr double kFrameHeight = 720.0;

/// Parameters for the synthetic surrogates.
struct SynthSpec {
  std::size_t n = 1000;
  std::size_t d = 32;
  /// Per-coordinate mean offset of the target cloud.
  double shift_delta = 0.0;
  /// Class -> probability; empty selects the ten road-object classes uniformly.
  std::map<std::string, double> label_probs;
  double day_fraction = 0.5;
  RngSeed seed;

  /// Throws InvalidArgument when an invariant is violated.
  void validate() const;
};

/// The ten road-object detection classes.
const std::map<std::string, double>& default_label_probs();

/// Standard normal quantile; used to turn the uniform stream into Gaussians.
double normal_quantile(double u);

/// Source rows ~ N(0, I_d), target rows ~ N(shift_delta * 1, I_d), n rows each.
std::pair<FeatureMatrix, FeatureMatrix> gen_features(const SynthSpec& spec);

/// n items: floor(n * day_fraction) day, the rest night, in shuffled order.
/// Each item carries 1-4 labels drawn from label_probs with one box each,
/// inside a 1280 x 720 frame.
DatasetManifest gen_manifest(const SynthSpec& spec, std::string name = "synthetic");

}  // namespace shiftscope
