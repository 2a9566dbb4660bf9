#include <set>

#include <json.hpp>

#include "shiftscope/error.hpp"
#include "shiftscope/io.hpp"
#include "shiftscope/protocol.hpp"

namespace shiftscope {

using nlohmann::ordered_json;

namespace {

constexpr std::string_view kMedianRule = "median_heuristic";
constexpr std::string_view kFixedRule = "fixed";

void expect_keys(const ordered_json& obj, std::initializer_list<std::string_view> keys, std::string_view where) {
  if (!obj.is_object()) throw FormatError(std::string(where) + " must be a JSON object");
  std::set<std::string, std::less<>> expected(keys.begin(), keys.end());
  for (const auto& [key, value] : obj.items()) {
    if (!expected.contains(key)) throw FormatError(std::string(where) + ": unexpected field '" + key + "'");
  }
  for (auto key : keys) {
    if (!obj.contains(key)) throw FormatError(std::string(where) + ": missing field '" + std::string(key) + "'");
  }
}

const ordered_json& field(const ordered_json& obj, const char* key, bool (ordered_json::*is)() const noexcept,
                          std::string_view where) {
  const auto& v = obj.at(key);
  if (!(v.*is)()) throw FormatError(std::string(where) + ": field '" + key + "' has the wrong type");
  return v;
}

double number(const ordered_json& obj, const char* key, std::string_view where) {
  return field(obj, key, &ordered_json::is_number, where).get<double>();
}

std::uint64_t count(const ordered_json& obj, const char* key, std::string_view where) {
  return field(obj, key, &ordered_json::is_number_unsigned, where).get<std::uint64_t>();
}

std::string text(const ordered_json& obj, const char* key, std::string_view where) {
  return field(obj, key, &ordered_json::is_string, where).get<std::string>();
}

}  // namespace

std::string serialize_shift_report(const ShiftReport& report) {
  const auto& cfg = report.config;
  ordered_json config;
  config["reducer"] = std::string(to_string(cfg.reducer.kind));
  if (cfg.reducer.kind == ReducerKind::Kind::pca) {
    config["k"] = report.reduced_dim;
  } else {
    config["k"] = nullptr;
  }
  config["sample_size"] = cfg.sample_size;
  config["repetitions"] = cfg.repetitions;
  config["alpha"] = cfg.alpha;
  config["estimator"] = std::string(to_string(cfg.estimator));
  config["n_permutations"] = cfg.n_permutations;
  config["bandwidth_rule"] = std::string(cfg.kernel.uses_median_heuristic() ? kMedianRule : kFixedRule);
  config["seed"] = cfg.seed.value;

  ordered_json reps = ordered_json::array();
  for (const auto& r : report.per_repetition) {
    ordered_json rep;
    rep["statistic"] = r.statistic;
    rep["p_value"] = r.p_value.value_or(1.0);
    rep["bandwidth_sq"] = r.bandwidth_sq;
    reps.push_back(std::move(rep));
  }

  ordered_json doc;
  doc["source"] = report.source_name;
  doc["target"] = report.target_name;
  doc["config"] = std::move(config);
  doc["repetitions"] = std::move(reps);
  doc["mean_statistic"] = report.mean_statistic;
  doc["mean_p"] = report.mean_p;
  doc["verdict"] = std::string(to_string(report.verdict));
  return doc.dump(2) + "\n";
}

ShiftReport parse_shift_report(std::string_view json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const ordered_json::parse_error& e) {
    throw FormatError(std::string("shift report: ") + e.what());
  }
  expect_keys(doc, {"source", "target", "config", "repetitions", "mean_statistic", "mean_p", "verdict"},
              "shift report");
  const auto& cfg_json = doc.at("config");
  expect_keys(cfg_json,
              {"reducer", "k", "sample_size", "repetitions", "alpha", "estimator", "n_permutations", "bandwidth_rule",
               "seed"},
              "shift report config");

  ShiftReport report;
  report.source_name = text(doc, "source", "shift report");
  report.target_name = text(doc, "target", "shift report");

  auto& cfg = report.config;
  try {
    cfg.reducer.kind = parse_reducer_kind(text(cfg_json, "reducer", "config"));
    cfg.estimator = parse_estimator(text(cfg_json, "estimator", "config"));
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("shift report config: ") + e.what());
  }
  const auto& k = cfg_json.at("k");
  if (cfg.reducer.kind == ReducerKind::Kind::pca) {
    if (!k.is_number_unsigned()) throw FormatError("shift report config: pca reducer needs an integer k");
    cfg.reducer.k = k.get<std::size_t>();
    report.reduced_dim = cfg.reducer.k;
  } else if (!k.is_null()) {
    throw FormatError("shift report config: k must be null for non-pca reducers");
  }
  cfg.sample_size = count(cfg_json, "sample_size", "config");
  cfg.repetitions = count(cfg_json, "repetitions", "config");
  cfg.alpha = number(cfg_json, "alpha", "config");
  cfg.n_permutations = count(cfg_json, "n_permutations", "config");
  cfg.seed = RngSeed{count(cfg_json, "seed", "config")};
  const auto rule = text(cfg_json, "bandwidth_rule", "config");
  if (rule != kMedianRule && rule != kFixedRule) throw FormatError("shift report config: unknown bandwidth_rule");

  const auto& reps = doc.at("repetitions");
  if (!reps.is_array()) throw FormatError("shift report: repetitions must be an array");
  if (reps.size() != cfg.repetitions) {
    throw FormatError("shift report: repetitions list length does not match config.repetitions");
  }
  for (const auto& rep : reps) {
    expect_keys(rep, {"statistic", "p_value", "bandwidth_sq"}, "shift report repetition");
    MmdResult r;
    r.statistic = number(rep, "statistic", "repetition");
    r.p_value = number(rep, "p_value", "repetition");
    r.bandwidth_sq = number(rep, "bandwidth_sq", "repetition");
    r.estimator = cfg.estimator;
    r.n_permutations = cfg.n_permutations;
    if (*r.p_value < 0.0 || *r.p_value > 1.0) throw FormatError("shift report: p_value outside [0, 1]");
    report.per_repetition.push_back(r);
  }
  if (rule == kFixedRule && !report.per_repetition.empty()) {
    cfg.kernel = KernelConfig{report.per_repetition.front().bandwidth_sq};
  }

  report.mean_statistic = number(doc, "mean_statistic", "shift report");
  report.mean_p = number(doc, "mean_p", "shift report");
  const auto verdict = text(doc, "verdict", "shift report");
  if (verdict == "shift_detected") {
    report.verdict = Verdict::shift_detected;
  } else if (verdict == "no_shift_detected") {
    report.verdict = Verdict::no_shift_detected;
  } else {
    throw FormatError("shift report: unknown verdict '" + verdict + "'");
  }
  return report;
}

ShiftReport load_shift_report(const std::filesystem::path& path) {
  try {
    return parse_shift_report(io::read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace shiftscope
