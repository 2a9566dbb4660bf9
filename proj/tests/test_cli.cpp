#include <gtest/gtest.h>

#include <json.hpp>

#include "cli_harness.hpp"
#include "shiftscope/eval.hpp"
#include "shiftscope/features.hpp"
#include "shiftscope/io.hpp"
#include "shiftscope/manifest.hpp"
#include "shiftscope/partition.hpp"
#include "shiftscope/protocol.hpp"
#include "shiftscope/reduce.hpp"
#include "test_util.hpp"

using namespace shiftscope;
using namespace shiftscope::cli;
using testutil::run_cli;

namespace {

class Cli : public ::testing::Test {
 protected:
  testutil::TempDir dir{"shiftscope_cli"};
  std::string path(const std::string& name) const { return (dir / name).string(); }

  void write(const std::string& name, const std::string& text) const { io::write_file(dir / name, text); }

  void write_gt() const {
    write("gt.json", R"([
      {"name": "a", "labels": [{"category": "car", "box2d": {"x1": 0, "y1": 0, "x2": 10, "y2": 10}},
                               {"category": "car", "box2d": {"x1": 20, "y1": 20, "x2": 30, "y2": 30}}]}
    ])");
  }
};

std::string fixture(const std::string& name) { return testutil::fixture("report/" + name).string(); }

}  // namespace

TEST_F(Cli, HelpDocumentsFlagsAndDefaults) {
  const auto top = run_cli({"--help"});
  EXPECT_EQ(top.code, kExitOk);
  for (const char* sub : {"partition", "synth", "reduce", "detect", "label-shift", "eval", "report"}) {
    EXPECT_NE(top.out.find(sub), std::string::npos) << sub;
  }
  const auto detect = run_cli({"detect", "--help"});
  EXPECT_EQ(detect.code, kExitOk);
  for (const char* flag : {"--sample-size", "--repetitions", "--alpha", "--permutations", "--estimator", "--seed"}) {
    EXPECT_NE(detect.out.find(flag), std::string::npos) << flag;
  }
  EXPECT_NE(detect.out.find("1000"), std::string::npos);
  EXPECT_NE(detect.out.find("199"), std::string::npos);
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli({}).code, kExitUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"detect", "--source", "a.csv"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"--format", "xml", "eval", "--gt", "a", "--predictions", "b"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"detect", "--source", "a", "--target", "b", "--alpha", "2"}).code, kExitUsage);
}

TEST_F(Cli, DetectExitCodes) {
  ASSERT_EQ(run_cli({"--seed", "3", "synth", "--kind", "features", "--n", "200", "--d", "8", "--delta", "3",
                     "--output-source", path("s.csv"), "--output-target", path("t.dgf")})
                .code,
            kExitOk);
  const std::vector<std::string> small{"--sample-size", "50", "--repetitions", "3", "--permutations", "49"};
  auto args = std::vector<std::string>{"--output", path("r.json"), "detect", "--source", path("s.csv"), "--target",
                                       path("t.dgf")};
  args.insert(args.end(), small.begin(), small.end());
  const auto shifted = run_cli(args);
  EXPECT_EQ(shifted.code, kExitShiftDetected) << shifted.err;
  const auto report = load_shift_report(path("r.json"));
  EXPECT_LT(report.mean_p, 0.05);
  EXPECT_EQ(report.source_name, "s");
  EXPECT_EQ(report.target_name, "t");
  EXPECT_NE(shifted.out.find("shift_detected"), std::string::npos);

  args = {"detect", "--source", path("s.csv"), "--target", path("s.csv")};
  args.insert(args.end(), small.begin(), small.end());
  const auto same = run_cli(args);
  EXPECT_EQ(same.code, kExitOk) << same.err;
  EXPECT_NO_THROW(parse_shift_report(same.out));

  EXPECT_EQ(run_cli({"detect", "--source", path("missing.csv"), "--target", path("s.csv")}).code, kExitError);
  const auto too_big = run_cli({"detect", "--source", path("s.csv"), "--target", path("t.dgf"), "--sample-size", "500"});
  EXPECT_EQ(too_big.code, kExitError);
  EXPECT_NE(too_big.err.find("sample_size"), std::string::npos);
}

TEST_F(Cli, PartitionExitCodesAndSidecar) {
  ASSERT_EQ(run_cli({"--seed", "1", "--output", path("pool.json"), "synth", "--kind", "manifest", "--n", "300",
                     "--day-fraction", "0.5"})
                .code,
            kExitOk);
  const auto ok = run_cli({"--seed", "4", "--output", path("set.json"), "partition", "--manifest", path("pool.json"),
                           "--day", "100", "--night", "50", "--label", "mine"});
  EXPECT_EQ(ok.code, kExitOk) << ok.err;
  const auto set = load_manifest(path("set.json"));
  EXPECT_EQ(set.count(TimeOfDay::day), 100u);
  EXPECT_EQ(set.count(TimeOfDay::night), 50u);
  EXPECT_EQ(load_split(path("set.split.json")), (SplitRecord{"mine", 100, 50, 4}));

  EXPECT_EQ(run_cli({"--output", path("x.json"), "partition", "--manifest", path("pool.json"), "--day", "0", "--night",
                     "0"})
                .code,
            kExitUsage);
  const auto short_pool = run_cli({"--output", path("x.json"), "partition", "--manifest", path("pool.json"), "--night",
                                   "151"});
  EXPECT_EQ(short_pool.code, kExitUsage);
  EXPECT_NE(short_pool.err.find("deficit 1"), std::string::npos);
  EXPECT_EQ(run_cli({"--output", path("x.json"), "partition", "--manifest", path("nope.json"), "--preset", "setA"}).code,
            kExitError);
  write("broken.json", "[{");
  EXPECT_EQ(run_cli({"--output", path("x.json"), "partition", "--manifest", path("broken.json"), "--filter-night"}).code,
            kExitError);
}

TEST_F(Cli, PartitionAugmentUnion) {
  ASSERT_EQ(run_cli({"--output", path("pool.json"), "synth", "--kind", "manifest", "--n", "100", "--day-fraction", "0"})
                .code,
            kExitOk);
  ASSERT_EQ(run_cli({"--seed", "2", "--output", path("gen.json"), "synth", "--kind", "manifest", "--n", "40",
                     "--day-fraction", "0", "--generated"})
                .code,
            kExitOk);
  const auto r = run_cli({"--output", path("aug.json"), "partition", "--manifest", path("pool.json"), "--filter-night",
                          "--augment", path("gen.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto aug = load_manifest(path("aug.json"));
  EXPECT_EQ(aug.size(), 140u);
  EXPECT_EQ(aug.items().back().provenance, Provenance::generated);
  EXPECT_TRUE(aug.items().back().id.starts_with("gen/"));
}

TEST_F(Cli, EvalHeadlinesAndPayload) {
  write_gt();
  write("perfect.json", R"([
    {"image": "a", "category": "car", "score": 0.9, "box": {"x1": 0, "y1": 0, "x2": 10, "y2": 10}},
    {"image": "a", "category": "car", "score": 0.8, "box": {"x1": 20, "y1": 20, "x2": 30, "y2": 30}}])");
  write("empty.json", "[]");
  write("three.json", R"([
    {"image": "a", "category": "car", "score": 0.9, "box": {"x1": 0, "y1": 0, "x2": 10, "y2": 10}},
    {"image": "a", "category": "car", "score": 0.8, "box": {"x1": 50, "y1": 50, "x2": 60, "y2": 60}},
    {"image": "a", "category": "car", "score": 0.7, "box": {"x1": 20, "y1": 20, "x2": 30, "y2": 30}}])");
  const auto perfect = run_cli({"eval", "--gt", path("gt.json"), "--predictions", path("perfect.json")});
  EXPECT_EQ(perfect.code, kExitOk);
  EXPECT_NE(perfect.out.find("mAP@0.5 = 1.0000\n"), std::string::npos) << perfect.out;
  EXPECT_NE(run_cli({"eval", "--gt", path("gt.json"), "--predictions", path("empty.json")}).out.find("mAP@0.5 = 0.0000"),
            std::string::npos);
  const auto three = run_cli({"--output", path("e.json"), "eval", "--gt", path("gt.json"), "--predictions",
                              path("three.json")});
  EXPECT_NE(three.out.find("mAP@0.5 = 0.8333"), std::string::npos);
  EXPECT_NEAR(load_eval_result(path("e.json")).map50, 5.0 / 6.0, 1e-12);
  write("bad.json", R"([{"image": "a", "category": "car", "score": 1.5, "box": {"x1": 0, "y1": 0, "x2": 1, "y2": 1}}])");
  EXPECT_EQ(run_cli({"eval", "--gt", path("gt.json"), "--predictions", path("bad.json")}).code, kExitError);
  write("ghost.json", R"([{"image": "zz", "category": "car", "score": 0.5, "box": {"x1": 0, "y1": 0, "x2": 1, "y2": 1}}])");
  EXPECT_EQ(run_cli({"eval", "--gt", path("gt.json"), "--predictions", path("ghost.json")}).code, kExitError);
}

TEST_F(Cli, ReportGoldens) {
  std::vector<std::string> rows;
  for (char s : std::string("ABCDE")) {
    const std::string set = std::string("set") + s;
    rows.push_back("--row");
    rows.push_back(fixture("split_" + set + ".json") + "," + fixture("eval_" + set + ".json") + "," +
                   fixture("eval_" + set + "_aug.json"));
  }
  auto args = std::vector<std::string>{"report", "--before", fixture("before.json"), "--after", fixture("after.json")};
  args.insert(args.end(), rows.begin(), rows.end());
  const auto text = run_cli(args);
  EXPECT_EQ(text.code, kExitOk) << text.err;
  EXPECT_EQ(text.out, io::read_file(fixture("expected_full.txt")));
  EXPECT_NE(text.out.find("0.03 / 0.15"), std::string::npos);
  EXPECT_NE(text.out.find("31.8 → 37.9"), std::string::npos);

  args.insert(args.begin(), {"--format", "csv"});
  const auto csv = run_cli(args);
  EXPECT_EQ(csv.out, io::read_file(fixture("expected_full.csv")));

  const auto single = run_cli({"report", "--before", fixture("before.json")});
  EXPECT_EQ(single.out, io::read_file(fixture("expected_single.txt")));
  EXPECT_EQ(single.out.find("Before / After"), std::string::npos);

  const auto json_out = run_cli({"--format", "json", "report", "--before", fixture("before.json"), "--after",
                                 fixture("after.json")});
  EXPECT_EQ(json_out.code, kExitOk);
  const auto doc = nlohmann::json::parse(json_out.out);
  EXPECT_TRUE(doc.contains("shift"));

  write("schema.json", R"({"source": "x"})");
  EXPECT_EQ(run_cli({"report", "--before", path("schema.json")}).code, kExitError);
}

TEST_F(Cli, LabelShiftExitCodes) {
  write("s.json", R"([{"name": "a", "labels": [)" + std::string([] {
          std::string s;
          for (int i = 0; i < 50; ++i) s += std::string(i ? "," : "") + R"({"category": "car", "box2d": {"x1": 0, "y1": 0, "x2": 1, "y2": 1}})";
          return s;
        }()) + "]}]");
  write("t.json", R"([{"name": "b", "labels": [)" + std::string([] {
          std::string s;
          for (int i = 0; i < 50; ++i) s += std::string(i ? "," : "") + R"({"category": "person", "box2d": {"x1": 0, "y1": 0, "x2": 1, "y2": 1}})";
          return s;
        }()) + "]}]");
  EXPECT_EQ(run_cli({"label-shift", "--source", path("s.json"), "--target", path("t.json")}).code, kExitShiftDetected);
  const auto same = run_cli({"label-shift", "--source", path("s.json"), "--target", path("s.json")});
  EXPECT_EQ(same.code, kExitOk);
  EXPECT_EQ(nlohmann::json::parse(same.out)["p_value"], 1.0);
  write("none.json", R"([{"name": "c"}])");
  EXPECT_EQ(run_cli({"label-shift", "--source", path("s.json"), "--target", path("none.json")}).code, kExitError);
}

TEST_F(Cli, ReduceFitAndApply) {
  ASSERT_EQ(run_cli({"synth", "--kind", "features", "--n", "60", "--d", "5", "--output-source", path("a.csv"),
                     "--output-target", path("b.csv")})
                .code,
            kExitOk);
  const auto fit = run_cli({"reduce", "--input", path("a.csv"), "--k", "3", "--model", path("m.dgp")});
  EXPECT_EQ(fit.code, kExitOk) << fit.err;
  EXPECT_EQ(load_pca_model(path("m.dgp")).k(), 3u);
  EXPECT_EQ(run_cli({"--output", path("z.csv"), "reduce", "--input", path("b.csv"), "--apply", path("m.dgp")}).code,
            kExitOk);
  EXPECT_EQ(load_features(path("z.csv")).dim(), 3u);
  EXPECT_EQ(run_cli({"--output", path("back.csv"), "reduce", "--input", path("z.csv"), "--apply", path("m.dgp"),
                     "--inverse"})
                .code,
            kExitOk);
  EXPECT_EQ(load_features(path("back.csv")).dim(), 5u);
  EXPECT_EQ(run_cli({"reduce", "--input", path("a.csv")}).code, kExitUsage);
  EXPECT_EQ(run_cli({"reduce", "--input", path("a.csv"), "--k", "9", "--model", path("m2.dgp")}).code, kExitError);
}

TEST_F(Cli, EchoFormats) {
  write_gt();
  write("p.json", "[]");
  const auto csv = run_cli({"--format", "csv", "eval", "--gt", path("gt.json"), "--predictions", path("p.json")});
  EXPECT_TRUE(csv.out.starts_with("key,value\n"));
  EXPECT_NE(csv.out.find("summary,mAP@0.5 = 0.0000"), std::string::npos);
  const auto js = run_cli({"--format", "json", "eval", "--gt", path("gt.json"), "--predictions", path("p.json")});
  const auto doc = nlohmann::json::parse(js.out);
  EXPECT_EQ(doc["summary"], "mAP@0.5 = 0.0000");
  EXPECT_EQ(doc["result"]["map50"], 0.0);
}
