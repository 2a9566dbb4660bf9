#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shiftscope/eval.hpp"
#include "shiftscope/partition.hpp"
#include "shiftscope/protocol.hpp"

namespace shiftscope {

enum class OutputFormat { text, csv, json };

std::string_view to_string(OutputFormat f) noexcept;
OutputFormat parse_output_format(std::string_view text);

/// One training-set row of the detection-accuracy table.
struct MapRow {
  SplitRecord split;
  EvalResult base;
  std::optional<EvalResult> augmented;
};

/// Inputs of the before/after rendering; `after` and `rows` are optional.
struct ReportInputs {
  ShiftReport before;
  std::optional<ShiftReport> after;
  std::vector<MapRow> rows;
};

/// p-values to three significant digits: 0.03, 0.15, 0.00503.
std::string format_p(double p);
/// Fractional mAP as a percentage with one decimal: 0.318 -> "31.8".
std::string format_map_percent(double map50);

/// "0.03 / 0.15 (shift reduced, Δp = +0.12)"
std::string comparison_summary(const ShiftReport& before, const ShiftReport& after);

std::string render_report(const ReportInputs& inputs, OutputFormat format);

}  // namespace shiftscope
