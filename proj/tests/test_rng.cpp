#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "shiftscope/error.hpp"
#include "shiftscope/exact_sum.hpp"
#include "shiftscope/features.hpp"
#include "shiftscope/rng.hpp"

using namespace shiftscope;

namespace {

// Upper 0.999 quantile of chi-square via Wilson-Hilferty.
double chi2_critical_999(double dof) {
  const double z = 3.090232;
  const double a = 2.0 / (9.0 * dof);
  return dof * std::pow(1.0 - a + z * std::sqrt(a), 3.0);
}

double chi2_uniform(const std::vector<double>& counts) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  const double expected = total / static_cast<double>(counts.size());
  double stat = 0.0;
  for (double c : counts) stat += (c - expected) * (c - expected) / expected;
  return stat;
}

FeatureMatrix iota_matrix(std::size_t n, std::size_t d) {
  std::vector<std::string> ids;
  std::vector<double> data;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("row" + std::to_string(i));
    for (std::size_t j = 0; j < d; ++j) data.push_back(static_cast<double>(i * d + j));
  }
  return FeatureMatrix(std::move(ids), std::move(data), d);
}

}  // namespace

TEST(Rng, EqualSeedsGiveEqualStreams) {
  CounterRng a(RngSeed{42}), b(RngSeed{42}), c(RngSeed{43});
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a.next();
    EXPECT_EQ(va, b.next());
    differs |= va != c.next();
  }
  EXPECT_TRUE(differs);
  EXPECT_EQ(a.counter(), 1000u);
}

TEST(Rng, DeriveIsXorAndStreamsAreSeparated) {
  const RngSeed s{0xDEADBEEF};
  EXPECT_EQ(s.derive(5).value, 0xDEADBEEFu ^ 5u);
  EXPECT_EQ(s.derive(0), s);
  EXPECT_NE(s.stream(1), s.stream(2));
  EXPECT_NE(s.stream(1), s.derive(1));
  EXPECT_EQ(s.stream(7), RngSeed{0xDEADBEEF}.stream(7));
}

TEST(Rng, BelowStaysInRange) {
  CounterRng rng(RngSeed{1});
  EXPECT_EQ(rng.below(0), 0u);
  EXPECT_EQ(rng.below(1), 0u);
  std::vector<double> counts(7, 0.0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    counts[v] += 1.0;
  }
  EXPECT_LT(chi2_uniform(counts), chi2_critical_999(6.0));
}

TEST(Rng, UniformOpenExcludesEndpoints) {
  CounterRng rng(RngSeed{9});
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform_open();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000.0, 0.5, 0.005);
}

TEST(Rng, SampleIndicesAreDistinctAndDeterministic) {
  const auto a = sample_indices(50, 20, RngSeed{3});
  const auto b = sample_indices(50, 20, RngSeed{3});
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 20u);
  EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), 20u);
  for (auto i : a) EXPECT_LT(i, 50u);
  EXPECT_TRUE(sample_indices(10, 0, RngSeed{3}).empty());
  EXPECT_THROW(sample_indices(3, 4, RngSeed{3}), InvalidArgument);
}

TEST(Rng, SampleIndicesIntoMatchesSampleIndices) {
  std::vector<std::size_t> scratch(40);
  CounterRng rng(RngSeed{11});
  sample_indices_into(scratch, 15, rng);
  const auto expected = sample_indices(40, 15, RngSeed{11});
  EXPECT_TRUE(std::equal(expected.begin(), expected.end(), scratch.begin()));
}

TEST(Rng, SelectionFrequencyIsUniform) {
  // Selection counts of every row, k = 100 of n = 1000 over 10,000 seeds.
  constexpr std::size_t n = 1000, k = 100, seeds = 10000;
  std::vector<double> counts(n, 0.0);
  std::vector<double> first(n, 0.0);
  std::vector<std::size_t> scratch(n);
  for (std::uint64_t s = 0; s < seeds; ++s) {
    CounterRng rng(RngSeed{s});
    sample_indices_into(scratch, k, rng);
    for (std::size_t i = 0; i < k; ++i) counts[scratch[i]] += 1.0;
  }
  EXPECT_LT(chi2_uniform(counts), chi2_critical_999(n - 1.0));

  // k = n: every row is always present; the leading position is uniform.
  for (std::uint64_t s = 0; s < seeds; ++s) {
    const auto idx = sample_indices(n, n, RngSeed{s});
    first[idx[0]] += 1.0;
  }
  EXPECT_LT(chi2_uniform(first), chi2_critical_999(n - 1.0));
}

TEST(Subsample, FullSizeIsAPermutation) {
  const auto m = iota_matrix(30, 3);
  const auto s = subsample(m, 30, RngSeed{5});
  ASSERT_EQ(s.rows(), 30u);
  std::multiset<std::string> a(m.ids().begin(), m.ids().end()), b(s.ids().begin(), s.ids().end());
  EXPECT_EQ(a, b);
  for (std::size_t i = 0; i < s.rows(); ++i) {
    const auto src = m.ids().begin();
    const auto pos = static_cast<std::size_t>(std::find(src, m.ids().end(), s.ids()[i]) - src);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(s(i, j), m(pos, j));
  }
}

TEST(Subsample, ZeroKeepsDimension) {
  const auto s = subsample(iota_matrix(5, 4), 0, RngSeed{1});
  EXPECT_EQ(s.rows(), 0u);
  EXPECT_EQ(s.dim(), 4u);
}

TEST(Subsample, RejectsOversizedRequestAndIsReproducible) {
  const auto m = iota_matrix(10, 2);
  EXPECT_THROW(subsample(m, 11, RngSeed{1}), InvalidArgument);
  EXPECT_EQ(subsample(m, 4, RngSeed{8}), subsample(m, 4, RngSeed{8}));
}

TEST(ExactSum, IsOrderIndependentAndCorrectlyRounded) {
  ExactSum a, b;
  const std::vector<double> v{1e16, 1.0, -1e16, 1.0, 3.5e-10, -2.0};
  for (double x : v) a.add(x);
  for (auto it = v.rbegin(); it != v.rend(); ++it) b.add(*it);
  EXPECT_EQ(a.value(), b.value());
  EXPECT_EQ(a.value(), 3.5e-10);
  ExactSum c;
  for (int i = 0; i < 10; ++i) c.add(0.1);
  EXPECT_EQ(c.value(), 1.0);
  EXPECT_EQ(ExactSum{}.value(), 0.0);
}
