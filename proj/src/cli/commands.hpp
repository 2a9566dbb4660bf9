#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "shiftscope/cli.hpp"
#include "shiftscope/error.hpp"
#include "shiftscope/report.hpp"

namespace shiftscope::cli {

/// Flag combinations the parser cannot reject on its own.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string output;
  std::string format = "text";
};

struct PartitionOptions {
  std::string manifest;
  std::string preset;
  std::optional<std::size_t> day;
  std::optional<std::size_t> night;
  std::string label;
  bool filter_night = false;
  std::string augment;
  std::string split_output;
};

struct SynthOptions {
  std::string kind = "features";
  std::size_t n = 1000;
  std::size_t d = 32;
  double delta = 0.0;
  double day_fraction = 0.5;
  std::string labels;
  bool generated = false;
  std::string output_source;
  std::string output_target;
};

struct ReduceOptions {
  std::string input;
  std::size_t k = 0;
  std::string solver = "auto";
  std::string model;
  std::string apply;
  bool inverse = false;
};

struct DetectOptions {
  std::string source;
  std::string target;
  std::string source_manifest;
  std::string target_manifest;
  std::string source_name;
  std::string target_name;
  std::string reducer = "pca";
  std::size_t k = 0;
  std::size_t sample_size = 1000;
  std::size_t repetitions = 30;
  double alpha = 0.05;
  std::string estimator = "biased";
  std::size_t permutations = 199;
  std::optional<double> bandwidth;
};

struct LabelShiftOptions {
  std::string source;
  std::string target;
  double alpha = 0.05;
};

struct EvalOptions {
  std::string ground_truth;
  std::string predictions;
  double iou = 0.5;
};

struct ReportOptions {
  std::string before;
  std::string after;
  std::vector<std::string> rows;
};

/// What a command hands back. The payload goes to --output; without a path it
/// goes to standard output if `payload_to_stdout` is set. Otherwise standard
/// output gets the echoed configuration and the headline.
struct CommandResult {
  int exit_code = kExitOk;
  std::optional<std::string> payload;
  bool payload_to_stdout = true;
  nlohmann::ordered_json echo;
  std::string headline;
};

CommandResult cmd_partition(const GlobalOptions& g, const PartitionOptions& o);
CommandResult cmd_synth(const GlobalOptions& g, const SynthOptions& o);
CommandResult cmd_reduce(const GlobalOptions& g, const ReduceOptions& o);
CommandResult cmd_detect(const GlobalOptions& g, const DetectOptions& o);
CommandResult cmd_label_shift(const GlobalOptions& g, const LabelShiftOptions& o);
CommandResult cmd_eval(const GlobalOptions& g, const EvalOptions& o);
CommandResult cmd_report(const GlobalOptions& g, const ReportOptions& o);

}  // namespace shiftscope::cli
