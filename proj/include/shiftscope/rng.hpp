#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace shiftscope {

/// Seed for every stochastic step. Equal seeds give bit-identical streams.
struct RngSeed {
  std::uint64_t value = 0;

  /// Per-trial / per-repetition seed: value XOR index.
  constexpr RngSeed derive(std::uint64_t index) const noexcept { return RngSeed{value ^ index}; }

  /// Independent sub-stream identified by a tag (hash-separated, unlike derive()).
  RngSeed stream(std::uint64_t tag) const noexcept;

  friend constexpr bool operator==(RngSeed, RngSeed) = default;
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: the i-th output is a pure function of (seed, i),
/// so streams are reproducible on every platform.
class CounterRng {
 public:
  explicit CounterRng(RngSeed seed) noexcept : key_(mix64(seed.value ^ 0x6A09E667F3BCC909ULL)) {}

  std::uint64_t next() noexcept {
    return mix64(key_ + 0x9E3779B97F4A7C15ULL * ++counter_);
  }

  /// Uniform integer in [0, bound). Integer-only (Lemire's multiply-shift with rejection).
  std::uint64_t below(std::uint64_t bound) noexcept;

  /// Uniform double in the open interval (0, 1) with 53 random bits.
  double uniform_open() noexcept {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// First `k` entries of a Fisher-Yates shuffle of [0, n): a uniform ordered
/// k-subset drawn without replacement.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, RngSeed seed);

/// Same as above into caller storage; `scratch` must have size n.
void sample_indices_into(std::span<std::size_t> scratch, std::size_t k, CounterRng& rng);

}  // namespace shiftscope
