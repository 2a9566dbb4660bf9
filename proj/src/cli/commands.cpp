#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <unordered_map>

#include "shiftscope/eval.hpp"
#include "shiftscope/features.hpp"
#include "shiftscope/io.hpp"
#include "shiftscope/manifest.hpp"
#include "shiftscope/partition.hpp"
#include "shiftscope/protocol.hpp"
#include "shiftscope/reduce.hpp"
#include "shiftscope/synth.hpp"

namespace shiftscope::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// Library argument checks raised while resolving flags are usage errors.
template <class F>
auto resolving_flags(F&& f) {
  try {
    return f();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

FeatureMatrix restrict_to_manifest(const FeatureMatrix& features, const DatasetManifest& manifest,
                                   const std::string& features_path) {
  std::unordered_map<std::string_view, std::size_t> row_of;
  row_of.reserve(features.rows());
  for (std::size_t i = 0; i < features.rows(); ++i) row_of.emplace(features.ids()[i], i);
  std::vector<std::size_t> rows;
  rows.reserve(manifest.size());
  for (const auto& item : manifest.items()) {
    auto it = row_of.find(item.id);
    if (it == row_of.end()) {
      throw FormatError(features_path + ": no feature row for manifest item '" + item.id + "'");
    }
    rows.push_back(it->second);
  }
  return features.select(rows);
}

std::map<std::string, double> parse_label_probs(const std::string& text) {
  std::map<std::string, double> probs;
  std::stringstream in(text);
  std::string entry;
  while (std::getline(in, entry, ',')) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--labels entries must look like class=probability");
    const std::string name = entry.substr(0, eq);
    const std::string value = entry.substr(eq + 1);
    std::size_t used = 0;
    double p = 0.0;
    try {
      p = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty()) throw UsageError("--labels: bad probability '" + value + "'");
    if (!probs.emplace(name, p).second) throw UsageError("--labels: class '" + name + "' given twice");
  }
  return probs;
}

PcaSolver parse_solver(const std::string& text) {
  if (text == "auto") return PcaSolver::automatic;
  if (text == "covariance") return PcaSolver::covariance;
  if (text == "gram") return PcaSolver::gram;
  throw UsageError("unknown PCA solver '" + text + "'");
}

std::string split_path_for(const std::string& output) {
  fs::path p(output);
  return (p.parent_path() / (p.stem().string() + ".split.json")).string();
}

}  // namespace

CommandResult cmd_partition(const GlobalOptions& g, const PartitionOptions& o) {
  const int modes = (o.preset.empty() ? 0 : 1) + (o.day || o.night ? 1 : 0) + (o.filter_night ? 1 : 0);
  if (modes != 1) throw UsageError("choose exactly one of --preset, --day/--night, --filter-night");
  if (g.output.empty()) throw UsageError("partition needs --output for the resulting manifest");

  std::optional<RatioSpec> spec;
  if (!o.preset.empty()) {
    spec = find_preset(o.preset);
    if (!spec) throw UsageError("unknown preset '" + o.preset + "' (expected setA..setE)");
    if (!o.label.empty()) spec->label = o.label;
  } else if (!o.filter_night) {
    spec = RatioSpec{o.day.value_or(0), o.night.value_or(0), o.label.empty() ? "custom" : o.label};
    if (spec->n_day + spec->n_night == 0) throw UsageError("--day and --night cannot both be 0");
  }

  const auto pool = load_manifest(o.manifest);
  const RngSeed seed{g.seed};
  DatasetManifest selected = spec ? build_ratio_set(pool, *spec, seed) : filter_night(pool);
  SplitRecord record{spec ? spec->label : "night", selected.count(TimeOfDay::day), selected.count(TimeOfDay::night),
                     g.seed};

  std::size_t generated = 0;
  if (!o.augment.empty()) {
    const auto gen = load_manifest(o.augment);
    generated = gen.size();
    selected = augment_union(selected, gen);
  }

  const std::string split_output = o.split_output.empty() ? split_path_for(g.output) : o.split_output;
  save_manifest(selected, g.output);
  io::write_file(split_output, serialize_split(record));

  CommandResult r;
  r.echo["command"] = "partition";
  r.echo["config"] = {{"manifest", o.manifest},
                      {"mode", spec ? (o.preset.empty() ? "ratio" : "preset") : "filter_night"},
                      {"label", record.label},
                      {"n_day", spec ? spec->n_day : 0},
                      {"n_night", spec ? spec->n_night : selected.count(TimeOfDay::night)},
                      {"augment", o.augment.empty() ? json() : json(o.augment)},
                      {"seed", g.seed},
                      {"output", g.output},
                      {"split_output", split_output}};
  r.echo["result"] = {{"items", selected.size()},
                      {"day", selected.count(TimeOfDay::day)},
                      {"night", selected.count(TimeOfDay::night)},
                      {"generated", generated}};
  r.headline = record.label + ": " + std::to_string(record.n_day) + " day / " + std::to_string(record.n_night) +
               " night" + (generated ? " + " + std::to_string(generated) + " generated" : "");
  return r;
}

CommandResult cmd_synth(const GlobalOptions& g, const SynthOptions& o) {
  SynthSpec spec;
  spec.n = o.n;
  spec.d = o.d;
  spec.shift_delta = o.delta;
  spec.day_fraction = o.day_fraction;
  spec.seed = RngSeed{g.seed};
  if (!o.labels.empty()) spec.label_probs = parse_label_probs(o.labels);
  resolving_flags([&] {
    spec.validate();
    return 0;
  });

  CommandResult r;
  r.echo["command"] = "synth";
  json config = {{"kind", o.kind}, {"n", o.n}, {"d", o.d}};

  if (o.kind == "features") {
    if (o.output_source.empty() || o.output_target.empty()) {
      throw UsageError("synth --kind features needs --output-source and --output-target");
    }
    if (spec.n < 1) throw UsageError("--n must be at least 1");
    const auto [source, target] = gen_features(spec);
    save_features(source, o.output_source);
    save_features(target, o.output_target);
    config["delta"] = o.delta;
    config["seed"] = g.seed;
    config["output_source"] = o.output_source;
    config["output_target"] = o.output_target;
    r.headline = "wrote " + std::to_string(source.rows()) + " x " + std::to_string(source.dim()) + " source and target";
  } else if (o.kind == "manifest") {
    if (g.output.empty()) throw UsageError("synth --kind manifest needs --output");
    auto manifest = gen_manifest(spec, stem_of(g.output));
    if (o.generated) {
      auto items = manifest.items();
      for (auto& item : items) item.provenance = Provenance::generated;
      manifest = DatasetManifest(manifest.name(), std::move(items));
    }
    save_manifest(manifest, g.output);
    config["day_fraction"] = o.day_fraction;
    json probs = json::object();
    for (const auto& [name, p] : spec.label_probs.empty() ? default_label_probs() : spec.label_probs) probs[name] = p;
    config["labels"] = probs;
    config["provenance"] = o.generated ? "generated" : "real";
    config["seed"] = g.seed;
    config["output"] = g.output;
    r.headline = "wrote " + std::to_string(manifest.size()) + " items (" +
                 std::to_string(manifest.count(TimeOfDay::day)) + " day, " +
                 std::to_string(manifest.count(TimeOfDay::night)) + " night)";
  } else {
    throw UsageError("--kind must be features or manifest");
  }
  r.echo["config"] = config;
  return r;
}

CommandResult cmd_reduce(const GlobalOptions& g, const ReduceOptions& o) {
  if (o.model.empty() == o.apply.empty()) throw UsageError("reduce needs exactly one of --model (fit) or --apply");
  if (o.inverse && o.apply.empty()) throw UsageError("--inverse only works with --apply");
  if (!o.apply.empty() && g.output.empty()) throw UsageError("reduce --apply needs --output");
  const PcaSolver solver = parse_solver(o.solver);

  const auto input = load_features(o.input);
  CommandResult r;
  r.echo["command"] = "reduce";
  json config = {{"input", o.input}};

  PcaModel model;
  if (o.model.empty()) {
    model = load_pca_model(o.apply);
    config["apply"] = o.apply;
    config["inverse"] = o.inverse;
  } else {
    const std::size_t k = o.k == 0 ? resolved_components(ReducerKind::pca(), input.dim()) : o.k;
    model = pca_fit(input, k, solver);
    save_pca_model(model, o.model);
    config["k"] = k;
    config["solver"] = o.solver;
    config["model"] = o.model;
  }
  config["output"] = g.output.empty() ? json() : json(g.output);
  r.echo["config"] = config;

  if (!g.output.empty()) {
    const auto out = o.inverse ? pca_inverse_transform(model, input) : pca_transform(model, input);
    save_features(out, g.output);
  }
  double explained = 0.0;
  for (double v : model.explained_variance_ratio()) explained += v;
  r.echo["result"] = {{"dim", model.dim()}, {"k", model.k()}, {"explained_variance", explained}};
  char buf[96];
  std::snprintf(buf, sizeof buf, "PCA %zu -> %zu, explained variance %.4f", model.dim(), model.k(), explained);
  r.headline = buf;
  return r;
}

CommandResult cmd_detect(const GlobalOptions& g, const DetectOptions& o) {
  DetectionConfig config = resolving_flags([&] {
    DetectionConfig c;
    c.reducer = ReducerKind{parse_reducer_kind(o.reducer), o.k};
    if (c.reducer.kind != ReducerKind::Kind::pca && o.k != 0) throw InvalidArgument("--k only applies to --reducer pca");
    c.sample_size = o.sample_size;
    c.repetitions = o.repetitions;
    c.alpha = o.alpha;
    c.estimator = parse_estimator(o.estimator);
    c.n_permutations = o.permutations;
    if (o.bandwidth) c.kernel = KernelConfig::fixed(*o.bandwidth);
    c.seed = RngSeed{g.seed};
    c.validate();
    return c;
  });

  auto source = load_features(o.source);
  auto target = load_features(o.target);
  std::string source_name = stem_of(o.source);
  std::string target_name = stem_of(o.target);
  if (!o.source_manifest.empty()) {
    const auto m = load_manifest(o.source_manifest);
    source = restrict_to_manifest(source, m, o.source);
    source_name = m.name();
  }
  if (!o.target_manifest.empty()) {
    const auto m = load_manifest(o.target_manifest);
    target = restrict_to_manifest(target, m, o.target);
    target_name = m.name();
  }
  if (!o.source_name.empty()) source_name = o.source_name;
  if (!o.target_name.empty()) target_name = o.target_name;

  ShiftReport report;
  try {
    report = detect_covariate_shift(source, target, config, source_name, target_name);
  } catch (const InvalidArgument& e) {
    // Data that cannot satisfy the configured test is an input error.
    throw Error(std::string("detect: ") + e.what());
  }

  CommandResult r;
  r.payload = serialize_shift_report(report);
  r.exit_code = report.verdict == Verdict::shift_detected ? kExitShiftDetected : kExitOk;
  r.echo["command"] = "detect";
  r.echo["source"] = o.source;
  r.echo["target"] = o.target;
  const auto full = json::parse(*r.payload);
  r.echo["config"] = full["config"];
  r.echo["result"] = {{"mean_statistic", full["mean_statistic"]}, {"mean_p", full["mean_p"]}, {"verdict", full["verdict"]}};
  r.headline = "mean p = " + format_p(report.mean_p) + ": " + std::string(to_string(report.verdict));
  return r;
}

CommandResult cmd_label_shift(const GlobalOptions&, const LabelShiftOptions& o) {
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
  const auto source = load_manifest(o.source);
  const auto target = load_manifest(o.target);
  LabelShiftResult result;
  try {
    result = detect_label_shift(source, target);
  } catch (const InvalidArgument& e) {
    throw Error(e.what());
  }
  const bool shifted = result.p_value < o.alpha;

  json doc;
  doc["source"] = source.name();
  doc["target"] = target.name();
  doc["alpha"] = o.alpha;
  const json fields = json::parse(serialize_label_shift(result));
  for (const auto& [key, value] : fields.items()) doc[key] = value;
  doc["verdict"] = to_string(shifted ? Verdict::shift_detected : Verdict::no_shift_detected);

  CommandResult r;
  r.payload = doc.dump(2) + "\n";
  r.exit_code = shifted ? kExitShiftDetected : kExitOk;
  r.echo["command"] = "label-shift";
  r.echo["config"] = {{"source", o.source}, {"target", o.target}, {"alpha", o.alpha}};
  r.echo["result"] = doc;
  char buf[128];
  std::snprintf(buf, sizeof buf, "chi2 = %.4f (dof %zu), p = %s", result.statistic, result.degrees_of_freedom,
                format_p(result.p_value).c_str());
  r.headline = buf;
  return r;
}

CommandResult cmd_eval(const GlobalOptions& g, const EvalOptions& o) {
  if (!(o.iou > 0.0 && o.iou < 1.0)) throw UsageError("--iou must lie in (0, 1)");
  const auto gt = load_manifest(o.ground_truth);
  const auto predictions = load_predictions(o.predictions);
  EvalResult result;
  try {
    result = evaluate(gt, predictions, o.iou);
  } catch (const InvalidArgument& e) {
    throw FormatError(o.predictions + ": " + e.what());
  }

  CommandResult r;
  r.payload = serialize_eval_result(result);
  r.payload_to_stdout = false;
  r.echo["command"] = "eval";
  r.echo["config"] = {{"gt", o.ground_truth},
                      {"predictions", o.predictions},
                      {"iou_threshold", o.iou},
                      {"output", g.output.empty() ? json() : json(g.output)}};
  r.echo["result"] = json::parse(*r.payload);
  char buf[64];
  std::snprintf(buf, sizeof buf, "mAP@0.5 = %.4f", result.map50);
  r.headline = buf;
  return r;
}

CommandResult cmd_report(const GlobalOptions& g, const ReportOptions& o) {
  const OutputFormat format = resolving_flags([&] { return parse_output_format(g.format); });
  ReportInputs inputs;
  inputs.before = load_shift_report(o.before);
  if (!o.after.empty()) {
    inputs.after = load_shift_report(o.after);
    if (inputs.after->target_name != inputs.before.target_name) {
      throw FormatError("reports test different targets ('" + inputs.before.target_name + "' vs '" +
                        inputs.after->target_name + "')");
    }
  }
  for (const auto& spec : o.rows) {
    std::vector<std::string> parts;
    std::stringstream in(spec);
    std::string part;
    while (std::getline(in, part, ',')) parts.push_back(part);
    if (parts.size() < 2 || parts.size() > 3 || parts[0].empty() || parts[1].empty()) {
      throw UsageError("--row expects SPLIT,EVAL[,EVAL_AUG], got '" + spec + "'");
    }
    MapRow row{load_split(parts[0]), load_eval_result(parts[1]), std::nullopt};
    if (parts.size() == 3) row.augmented = load_eval_result(parts[2]);
    inputs.rows.push_back(std::move(row));
  }

  CommandResult r;
  r.payload = render_report(inputs, format);
  r.echo["command"] = "report";
  r.echo["config"] = {{"before", o.before},
                      {"after", o.after.empty() ? json() : json(o.after)},
                      {"rows", o.rows},
                      {"format", g.format},
                      {"output", g.output}};
  r.headline = inputs.after ? comparison_summary(inputs.before, *inputs.after)
                            : "mean p = " + format_p(inputs.before.mean_p);
  return r;
}

}  // namespace shiftscope::cli
