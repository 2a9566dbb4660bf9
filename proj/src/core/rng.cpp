#include "shiftscope/rng.hpp"

#include <numeric>
#include <utility>

#include "shiftscope/error.hpp"

namespace shiftscope {

RngSeed RngSeed::stream(std::uint64_t tag) const noexcept {
  return RngSeed{mix64(value + mix64(tag + 0x243F6A8885A308D3ULL))};
}

std::uint64_t CounterRng::below(std::uint64_t bound) noexcept {
  if (bound <= 1) return 0;
  unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

void sample_indices_into(std::span<std::size_t> scratch, std::size_t k, CounterRng& rng) {
  const std::size_t n = scratch.size();
  std::iota(scratch.begin(), scratch.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(scratch[i], scratch[j]);
  }
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, RngSeed seed) {
  if (k > n) {
    throw InvalidArgument("cannot sample " + std::to_string(k) + " of " + std::to_string(n) +
                          " without replacement");
  }
  std::vector<std::size_t> idx(n);
  CounterRng rng(seed);
  sample_indices_into(idx, k, rng);
  idx.resize(k);
  return idx;
}

}  // namespace shiftscope
