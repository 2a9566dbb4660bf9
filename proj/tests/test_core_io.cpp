#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "shiftscope/error.hpp"
#include "shiftscope/features.hpp"
#include "shiftscope/io.hpp"
#include "shiftscope/manifest.hpp"
#include "shiftscope/synth.hpp"
#include "test_util.hpp"

using namespace shiftscope;

TEST(Manifest, ThreeRecordsWithMissingTimeOfDay) {
  const char* text = R"([
    {"name": "a", "attributes": {"timeofday": "daytime"}, "labels": []},
    {"name": "b", "attributes": {"timeofday": "night", "weather": "rainy"},
     "labels": [{"category": "car", "box2d": {"x1": 1, "y1": 2, "x2": 3, "y2": 4}}]},
    {"name": "c"}
  ])";
  const auto m = parse_manifest(text, "three");
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m.name(), "three");
  EXPECT_EQ(m.items()[0].timeofday, TimeOfDay::day);
  EXPECT_EQ(m.items()[1].timeofday, TimeOfDay::night);
  EXPECT_EQ(m.items()[2].timeofday, TimeOfDay::unknown);
  EXPECT_EQ(m.items()[2].provenance, Provenance::real);
  ASSERT_EQ(m.items()[1].labels.size(), 1u);
  EXPECT_EQ(m.items()[1].labels[0].box, (Box2D{1, 2, 3, 4}));
  EXPECT_EQ(m.find("b"), 1u);
  EXPECT_EQ(m.find("zzz"), 3u);
}

TEST(Manifest, DawnDuskAndUnknownAttributes) {
  EXPECT_EQ(parse_timeofday("dawn/dusk"), TimeOfDay::dawn_dusk);
  EXPECT_EQ(parse_timeofday("undefined"), TimeOfDay::unknown);
  EXPECT_EQ(parse_timeofday(""), TimeOfDay::unknown);
}

TEST(Manifest, LabelsWithoutBoxesAreSkipped) {
  const auto m = parse_manifest(
      R"([{"name": "a", "labels": [{"category": "lane", "poly2d": []},
                                   {"category": "car", "box2d": {"x1": 0, "y1": 0, "x2": 1, "y2": 1}}]}])",
      "m");
  ASSERT_EQ(m.items()[0].labels.size(), 1u);
  EXPECT_EQ(m.items()[0].labels[0].category, "car");
}

TEST(Manifest, Errors) {
  EXPECT_THROW(parse_manifest(R"([{"name": "img1"}, {"name": "img1"}])", "dup"), FormatError);
  EXPECT_THROW(parse_manifest(R"([{"attributes": {}}])", "noid"), FormatError);
  EXPECT_THROW(parse_manifest(R"({"name": "x"})", "obj"), FormatError);
  EXPECT_THROW(parse_manifest("[", "broken"), FormatError);
  EXPECT_THROW(parse_manifest(R"([{"name": "a", "provenance": "fake"}])", "p"), FormatError);
  EXPECT_THROW(parse_manifest(R"([{"name": "a", "labels": [{"category": "car",
               "box2d": {"x1": 5, "y1": 0, "x2": 1, "y2": 1}}]}])", "inv"), FormatError);
  EXPECT_THROW(load_manifest("/nonexistent/dir/file.json"), IoError);
}

TEST(Manifest, RoundTripIsIdentity) {
  SynthSpec spec;
  spec.n = 500;
  spec.seed = RngSeed{77};
  auto items = gen_manifest(spec, "pool").items();
  items[3].timeofday = TimeOfDay::dawn_dusk;
  items[4].timeofday = TimeOfDay::unknown;
  items[5].provenance = Provenance::generated;
  const DatasetManifest m("pool", items);
  testutil::TempDir dir;
  save_manifest(m, dir / "pool.json");
  const auto back = load_manifest(dir / "pool.json");
  EXPECT_EQ(back, m);
  EXPECT_EQ(serialize_manifest(back), serialize_manifest(m));
}

TEST(Manifest, LargeManifestPreservesOrder) {
  SynthSpec spec;
  spec.n = 70000;
  spec.seed = RngSeed{5};
  const auto m = gen_manifest(spec, "big");
  const auto back = parse_manifest(serialize_manifest(m), "big");
  ASSERT_EQ(back.size(), 70000u);
  for (std::size_t i = 0; i < back.size(); i += 997) EXPECT_EQ(back.items()[i].id, m.items()[i].id);
}

TEST(Features, TwoRowsOfWidthThree) {
  const auto m = parse_features("id,f0,f1,f2\na,1,2,3\nb,4,5,6.5\n");
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.dim(), 3u);
  EXPECT_EQ(m.ids()[1], "b");
  EXPECT_EQ(m(1, 2), 6.5);
}

TEST(Features, Errors) {
  EXPECT_THROW(parse_features("id,f0,f1\na,1,NaN\n"), FormatError);
  EXPECT_THROW(parse_features("id,f0,f1\na,1,inf\n"), FormatError);
  EXPECT_THROW(parse_features("id,f0,f1\na,1,2\nb,3\n"), FormatError);
  EXPECT_THROW(parse_features(""), FormatError);
  EXPECT_THROW(parse_features("id,f0\na,abc\n"), FormatError);
  EXPECT_THROW(FeatureMatrix({"a"}, {std::numeric_limits<double>::quiet_NaN()}, 1), InvalidArgument);
  EXPECT_THROW(FeatureMatrix({"a"}, {1.0, 2.0}, 1), InvalidArgument);
}

TEST(Features, RoundTripIsBitExactInBothFormats) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  std::vector<std::string> ids;
  std::vector<double> data;
  for (int i = 0; i < 50; ++i) {
    ids.push_back("item_" + std::to_string(i));
    for (int j = 0; j < 7; ++j) data.push_back(u(gen) * std::pow(10.0, (i % 9) - 4));
  }
  data[0] = 0.1;
  data[1] = -0.0;
  data[2] = 5e-324;
  data[3] = std::numeric_limits<double>::max();
  const FeatureMatrix m(ids, data, 7);
  testutil::TempDir dir;
  for (const char* name : {"f.csv", "f.dgf"}) {
    save_features(m, dir / name);
    const auto back = load_features(dir / name);
    ASSERT_EQ(back.ids(), m.ids());
    ASSERT_EQ(back.dim(), m.dim());
    for (std::size_t i = 0; i < m.data().size(); ++i) {
      EXPECT_EQ(std::signbit(back.data()[i]), std::signbit(m.data()[i]));
      EXPECT_EQ(back.data()[i], m.data()[i]);
    }
  }
  EXPECT_TRUE(serialize_features_binary(m).starts_with("DGF1"));
}

TEST(Features, BinaryLayout) {
  const FeatureMatrix m({"x", "y"}, {1.0, 2.0}, 1);
  const auto bytes = serialize_features_binary(m);
  io::ByteReader in(bytes);
  EXPECT_EQ(in.take(4), "DGF1");
  EXPECT_EQ(in.u64(), 2u);
  EXPECT_EQ(in.u64(), 1u);
  EXPECT_EQ(in.f64(), 1.0);
  EXPECT_EQ(in.f64(), 2.0);
  EXPECT_EQ(in.rest(), "x\ny\n");
  EXPECT_THROW(parse_features(bytes.substr(0, 20)), FormatError);
}

TEST(Features, ConcatAndSelect) {
  const FeatureMatrix a({"a0", "a1"}, {1, 2, 3, 4}, 2);
  const FeatureMatrix b({"b0"}, {5, 6}, 2);
  const auto c = concat_rows(a, b);
  EXPECT_EQ(c.rows(), 3u);
  EXPECT_EQ(c(2, 1), 6.0);
  const std::vector<std::size_t> idx{2, 0};
  const auto s = c.select(idx);
  EXPECT_EQ(s.ids(), (std::vector<std::string>{"b0", "a0"}));
  EXPECT_THROW(concat_rows(a, FeatureMatrix({"z"}, {1}, 1)), InvalidArgument);
}

TEST(Io, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5, 123456789.0}) {
    EXPECT_EQ(std::stod(io::format_double(v)), v);
  }
  EXPECT_EQ(io::format_double(0.5), "0.5");
}
