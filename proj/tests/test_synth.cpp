#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "shiftscope/error.hpp"
#include "shiftscope/partition.hpp"
#include "shiftscope/synth.hpp"

using namespace shiftscope;

TEST(SynthFeatures, DeterministicAndShaped) {
  SynthSpec spec;
  spec.n = 50;
  spec.d = 7;
  spec.shift_delta = 1.5;
  spec.seed = RngSeed{4};
  const auto [a_src, a_tgt] = gen_features(spec);
  const auto [b_src, b_tgt] = gen_features(spec);
  EXPECT_EQ(a_src, b_src);
  EXPECT_EQ(a_tgt, b_tgt);
  EXPECT_EQ(a_src.rows(), 50u);
  EXPECT_EQ(a_src.dim(), 7u);
  EXPECT_NE(a_src.ids()[0], a_tgt.ids()[0]);
  spec.seed = RngSeed{5};
  EXPECT_NE(gen_features(spec).first, a_src);
}

TEST(SynthFeatures, MomentsWithinFiveStandardErrors) {
  SynthSpec spec;
  spec.n = 10000;
  spec.d = 8;
  spec.shift_delta = 3.0;
  spec.seed = RngSeed{9};
  const auto [src, tgt] = gen_features(spec);
  const double se = 1.0 / std::sqrt(10000.0);
  for (std::size_t j = 0; j < spec.d; ++j) {
    double ms = 0, mt = 0, vs = 0;
    for (std::size_t i = 0; i < spec.n; ++i) {
      ms += src(i, j);
      mt += tgt(i, j);
      vs += src(i, j) * src(i, j);
    }
    ms /= 10000.0;
    mt /= 10000.0;
    EXPECT_NEAR(ms, 0.0, 5 * se);
    EXPECT_NEAR(mt, 3.0, 5 * se);
    EXPECT_NEAR(vs / 10000.0 - ms * ms, 1.0, 0.05);
  }
}

TEST(SynthFeatures, Validation) {
  SynthSpec spec;
  spec.d = 0;
  EXPECT_THROW(gen_features(spec), InvalidArgument);
  spec.d = 2;
  spec.shift_delta = -1.0;
  EXPECT_THROW(gen_features(spec), InvalidArgument);
  spec.shift_delta = 0.0;
  spec.label_probs = {{"car", 0.5}, {"bus", 0.4}};
  EXPECT_THROW(spec.validate(), InvalidArgument);
}

TEST(NormalQuantile, KnownValues) {
  EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-15);
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-12);
  EXPECT_NEAR(normal_quantile(0.025), -1.959963984540054, 1e-12);
}

TEST(SynthManifest, CountsAndInvariants) {
  SynthSpec spec;
  spec.n = 1001;
  spec.day_fraction = 0.3;
  spec.seed = RngSeed{1};
  const auto m = gen_manifest(spec, "pool");
  EXPECT_EQ(m.size(), 1001u);
  EXPECT_EQ(m.count(TimeOfDay::day), 300u);
  EXPECT_EQ(m.count(TimeOfDay::night), 701u);
  EXPECT_EQ(m, gen_manifest(spec, "pool"));
  std::set<std::string> ids, classes;
  for (const auto& item : m.items()) {
    EXPECT_TRUE(ids.insert(item.id).second);
    EXPECT_GE(item.labels.size(), 1u);
    EXPECT_LE(item.labels.size(), 4u);
    for (const auto& l : item.labels) {
      classes.insert(l.category);
      EXPECT_TRUE(l.box.valid());
      EXPECT_GT(l.box.area(), 0.0);
      EXPECT_GE(l.box.x1, 0.0);
      EXPECT_LE(l.box.x2, kFrameWidth);
      EXPECT_GE(l.box.y1, 0.0);
      EXPECT_LE(l.box.y2, kFrameHeight);
    }
  }
  EXPECT_EQ(classes.size(), 10u);
}

TEST(SynthManifest, EdgeCases) {
  SynthSpec spec;
  spec.n = 200;
  spec.day_fraction = 1.0;
  const auto all_day = gen_manifest(spec);
  EXPECT_EQ(all_day.count(TimeOfDay::night), 0u);
  EXPECT_TRUE(filter_night(all_day).empty());

  spec.label_probs = {{"car", 1.0}};
  const auto cars = gen_manifest(spec);
  for (const auto& item : cars.items()) {
    for (const auto& l : item.labels) EXPECT_EQ(l.category, "car");
  }
  spec.label_probs = {{"car", 0.0}, {"person", 1.0}};
  const auto people = gen_manifest(spec);
  for (const auto& item : people.items()) {
    for (const auto& l : item.labels) EXPECT_EQ(l.category, "person");
  }

  spec.n = 70000;
  spec.day_fraction = 0.6;
  spec.label_probs.clear();
  const auto pool = gen_manifest(spec);
  EXPECT_GE(pool.count(TimeOfDay::day), 40000u);
  EXPECT_GE(pool.count(TimeOfDay::night), 20000u);
  spec.day_fraction = 1.5;
  EXPECT_THROW(gen_manifest(spec), InvalidArgument);
}
