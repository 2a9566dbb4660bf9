#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "shiftscope/manifest.hpp"
#include "shiftscope/rng.hpp"

namespace shiftscope {

/// Requested day/night composition of a training set.
struct RatioSpec {
  std::size_t n_day = 0;
  std::size_t n_night = 0;
  std::string label;
};

/// The five day/night training-set compositions (40,000 images each).
inline const std::array<RatioSpec, 5>& ratio_presets() {
  static const std::array<RatioSpec, 5> presets{{
      {40000, 0, "Set A"},
      {35000, 5000, "Set B"},
      {30000, 10000, "Set C"},
      {25000, 15000, "Set D"},
      {20000, 20000, "Set E"},
  }};
  return presets;
}

/// Looks up "setA".."setE" (case-insensitive, also "A".."E").
std::optional<RatioSpec> find_preset(std::string_view name);

/// Exactly n_day day items and n_night night items, sampled without
/// replacement and kept in pool order. Dawn/dusk and unknown items are never
/// selected. Throws InsufficientItems naming the deficit.
DatasetManifest build_ratio_set(const DatasetManifest& pool, const RatioSpec& spec, RngSeed seed);

/// Night items in pool order.
DatasetManifest filter_night(const DatasetManifest& pool);

inline constexpr std::string_view kGeneratedPrefix = "gen/";

/// Real items followed by generated items; generated ids gain the "gen/"
/// prefix unless they already carry it. FormatError on id collision.
DatasetManifest augment_union(const DatasetManifest& real_night, const DatasetManifest& generated_night);

/// Sidecar describing how a split was produced: {label, n_day, n_night, seed}.
struct SplitRecord {
  std::string label;
  std::size_t n_day = 0;
  std::size_t n_night = 0;
  std::uint64_t seed = 0;
  friend bool operator==(const SplitRecord&, const SplitRecord&) = default;
};

std::string serialize_split(const SplitRecord& split);
SplitRecord parse_split(std::string_view json_text);
SplitRecord load_split(const std::filesystem::path& path);

}  // namespace shiftscope
