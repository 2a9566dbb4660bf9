#include "shiftscope/cli.hpp"

#include <ostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "shiftscope/io.hpp"

namespace shiftscope::cli {

namespace {

using json = nlohmann::ordered_json;

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

void flatten(const json& v, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (v.is_object() && !v.empty()) {
    for (const auto& [key, child] : v.items()) flatten(child, prefix.empty() ? key : prefix + "." + key, out);
  } else if (v.is_array() && !v.empty() && (v.front().is_object() || v.front().is_array())) {
    for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], prefix + "." + std::to_string(i), out);
  } else {
    out.emplace_back(prefix, v.is_array() ? v.dump() : scalar_text(v));
  }
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string render_echo(const CommandResult& r, const std::string& format) {
  if (format == "json") {
    json doc = r.echo;
    doc["summary"] = r.headline;
    return doc.dump(2) + "\n";
  }
  std::vector<std::pair<std::string, std::string>> lines;
  flatten(r.echo, "", lines);
  std::string out;
  if (format == "csv") {
    out = "key,value\n";
    for (const auto& [k, v] : lines) out += csv_cell(k) + "," + csv_cell(v) + "\n";
    out += "summary," + csv_cell(r.headline) + "\n";
    return out;
  }
  for (const auto& [k, v] : lines) out += k + ": " + v + "\n";
  return out + r.headline + "\n";
}

void add_global_options(CLI::App& app, GlobalOptions& g) {
  app.add_option("--seed", g.seed, "Seed for every random draw")->capture_default_str();
  app.add_option("--output", g.output, "Primary output file (standard output when omitted, where allowed)");
  app.add_option("--format", g.format, "Rendering of standard output and reports")
      ->check(CLI::IsMember({"json", "csv", "text"}))
      ->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Covariate and label shift detection for detector training sets", "shiftscope"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  add_global_options(app, g);

  PartitionOptions part;
  auto* partition = app.add_subcommand("partition", "Build a day/night training set from a manifest pool");
  partition->add_option("--manifest", part.manifest, "Pool manifest (BDD-style JSON)")->required();
  partition->add_option("--preset", part.preset, "setA..setE (40000/0 .. 20000/20000 day/night)");
  partition->add_option("--day", part.day, "Day items to draw");
  partition->add_option("--night", part.night, "Night items to draw");
  partition->add_option("--label", part.label, "Set label recorded in the split sidecar");
  partition->add_flag("--filter-night", part.filter_night, "Keep only the night items of the pool");
  partition->add_option("--augment", part.augment, "Generated-night manifest to union into the result");
  partition->add_option("--split-output", part.split_output, "Split sidecar path (default: <output stem>.split.json)");

  SynthOptions syn;
  auto* synth = app.add_subcommand("synth", "Generate synthetic feature clouds or manifests");
  synth->add_option("--kind", syn.kind, "features or manifest")
      ->check(CLI::IsMember({"features", "manifest"}))
      ->capture_default_str();
  synth->add_option("--n", syn.n, "Rows per cloud, or manifest items")->capture_default_str();
  synth->add_option("--d", syn.d, "Feature dimension")->capture_default_str();
  synth->add_option("--delta", syn.delta, "Per-coordinate mean offset of the target cloud")->capture_default_str();
  synth->add_option("--day-fraction", syn.day_fraction, "Fraction of day items")->capture_default_str();
  synth->add_option("--labels", syn.labels, "Class probabilities, e.g. car=0.7,person=0.3 (default: 10 classes)");
  synth->add_flag("--generated", syn.generated, "Mark manifest items as generated");
  synth->add_option("--output-source", syn.output_source, "Source feature file (.csv or .dgf)");
  synth->add_option("--output-target", syn.output_target, "Target feature file (.csv or .dgf)");

  ReduceOptions red;
  auto* reduce = app.add_subcommand("reduce", "Fit or apply a PCA projection");
  reduce->add_option("--input", red.input, "Feature file")->required();
  reduce->add_option("--k", red.k, "Components (0: min(32, d))")->capture_default_str();
  reduce->add_option("--solver", red.solver, "auto, covariance or gram")
      ->check(CLI::IsMember({"auto", "covariance", "gram"}))
      ->capture_default_str();
  reduce->add_option("--model", red.model, "Fit on --input and write the model here");
  reduce->add_option("--apply", red.apply, "Project --input with this saved model");
  reduce->add_flag("--inverse", red.inverse, "With --apply: map reduced rows back to input space");

  DetectOptions det;
  auto* detect = app.add_subcommand("detect", "Repeated-subsampling MMD covariate shift test");
  detect->add_option("--source", det.source, "Source feature file")->required();
  detect->add_option("--target", det.target, "Target feature file")->required();
  detect->add_option("--source-manifest", det.source_manifest, "Restrict source rows to this manifest's items");
  detect->add_option("--target-manifest", det.target_manifest, "Restrict target rows to this manifest's items");
  detect->add_option("--source-name", det.source_name, "Name in the report (default: file stem)");
  detect->add_option("--target-name", det.target_name, "Name in the report (default: file stem)");
  detect->add_option("--reducer", det.reducer, "pca, identity or external_scores")
      ->check(CLI::IsMember({"pca", "identity", "external_scores"}))
      ->capture_default_str();
  detect->add_option("--k", det.k, "PCA components (0: min(32, d))")->capture_default_str();
  detect->add_option("--sample-size", det.sample_size, "Rows drawn per side and repetition")->capture_default_str();
  detect->add_option("--repetitions", det.repetitions, "Independent subsample repetitions")->capture_default_str();
  detect->add_option("--alpha", det.alpha, "Significance level for the mean p-value")->capture_default_str();
  detect->add_option("--estimator", det.estimator, "biased or unbiased MMD^2")
      ->check(CLI::IsMember({"biased", "unbiased"}))
      ->capture_default_str();
  detect->add_option("--permutations", det.permutations, "Permutations per test")->capture_default_str();
  detect->add_option("--bandwidth", det.bandwidth, "Fixed sigma^2 (default: median heuristic)");

  LabelShiftOptions lab;
  auto* label_shift = app.add_subcommand("label-shift", "Chi-square test of per-class label counts");
  label_shift->add_option("--source", lab.source, "Source manifest")->required();
  label_shift->add_option("--target", lab.target, "Target manifest")->required();
  label_shift->add_option("--alpha", lab.alpha, "Significance level")->capture_default_str();

  EvalOptions ev;
  auto* eval = app.add_subcommand("eval", "mAP@0.5 of predictions against a ground-truth manifest");
  eval->add_option("--gt", ev.ground_truth, "Ground-truth manifest")->required();
  eval->add_option("--predictions", ev.predictions, "Prediction file")->required();
  eval->add_option("--iou", ev.iou, "IoU match threshold")->capture_default_str();

  ReportOptions rep;
  auto* report = app.add_subcommand("report", "Render before/after shift and accuracy tables");
  report->add_option("--before", rep.before, "Shift report before augmentation")->required();
  report->add_option("--after", rep.after, "Shift report after augmentation");
  report->add_option("--row", rep.rows, "SPLIT,EVAL[,EVAL_AUG] accuracy row (repeatable)");

  auto entry = [](std::string flag, const std::string& text) {
    flag = "  " + flag;
    if (!text.empty()) flag.append(flag.size() < 32 ? 32 - flag.size() : 1, ' ');
    return flag + text + "\n";
  };
  const std::string globals = "Global options (before or after the subcommand):\n" +
                              entry("--seed UINT [" + std::to_string(g.seed) + "]", "Seed for every random draw") +
                              entry("--output TEXT", "Primary output file (standard output when omitted, where allowed)") +
                              entry("--format TEXT:{json,csv,text} [" + g.format + "]", "") +
                              entry("", "Rendering of standard output and reports");
  for (auto* sub : app.get_subcommands({})) {
    sub->fallthrough();
    sub->footer(globals);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    CommandResult r;
    if (partition->parsed()) r = cmd_partition(g, part);
    else if (synth->parsed()) r = cmd_synth(g, syn);
    else if (reduce->parsed()) r = cmd_reduce(g, red);
    else if (detect->parsed()) r = cmd_detect(g, det);
    else if (label_shift->parsed()) r = cmd_label_shift(g, lab);
    else if (eval->parsed()) r = cmd_eval(g, ev);
    else r = cmd_report(g, rep);

    const bool to_file = r.payload && !g.output.empty();
    if (to_file) io::write_file(g.output, *r.payload);
    if (r.payload && !to_file && r.payload_to_stdout) {
      out << *r.payload;
    } else {
      out << render_echo(r, g.format);
    }
    out.flush();
    return r.exit_code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InsufficientItems& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace shiftscope::cli
