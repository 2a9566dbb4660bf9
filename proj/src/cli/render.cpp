#include "shiftscope/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "shiftscope/error.hpp"

namespace shiftscope {

namespace {

using Table = std::vector<std::vector<std::string>>;

// Display width in code points; the tables carry arrows and deltas.
std::size_t display_width(std::string_view s) {
  std::size_t w = 0;
  for (unsigned char c : s) w += (c & 0xC0) != 0x80 ? 1 : 0;
  return w;
}

std::string render_text_table(const Table& table) {
  std::vector<std::size_t> widths;
  for (const auto& row : table) {
    widths.resize(std::max(widths.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], display_width(row[c]));
  }
  std::string out;
  auto emit = [&](const std::vector<std::string>& row) {
    std::size_t used = row.size();
    while (used > 1 && row[used - 1].empty()) --used;
    std::string line;
    for (std::size_t c = 0; c < used; ++c) {
      if (c > 0) line += " | ";
      line += row[c];
      line.append(widths[c] - display_width(row[c]), ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  };
  emit(table.front());
  std::string rule;
  for (std::size_t c = 0; c < widths.size(); ++c) {
    if (c > 0) rule += "-+-";
    rule.append(widths[c], '-');
  }
  out += rule + "\n";
  for (std::size_t r = 1; r < table.size(); ++r) emit(table[r]);
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string render_csv_table(const Table& table) {
  std::string out;
  for (const auto& row : table) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += ',';
      out += csv_field(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string comparison_label(const ShiftReport& r) { return r.source_name + " vs. " + r.target_name; }

std::string signed_p(double delta) {
  std::string s = format_p(std::fabs(delta));
  return (delta < 0.0 ? "-" : "+") + s;
}

Table shift_table(const ReportInputs& in) {
  Table t;
  if (in.after) {
    t.push_back({"Dataset Comparison", "Average p-value", "Verdict", "Before / After"});
    t.push_back({comparison_label(in.before), format_p(in.before.mean_p), std::string(to_string(in.before.verdict)), ""});
    t.push_back({comparison_label(*in.after), format_p(in.after->mean_p), std::string(to_string(in.after->verdict)),
                 comparison_summary(in.before, *in.after)});
  } else {
    t.push_back({"Dataset Comparison", "Average p-value", "Verdict"});
    t.push_back({comparison_label(in.before), format_p(in.before.mean_p), std::string(to_string(in.before.verdict))});
  }
  return t;
}

Table map_table(const std::vector<MapRow>& rows) {
  const bool with_aug = std::any_of(rows.begin(), rows.end(), [](const MapRow& r) { return r.augmented.has_value(); });
  Table t;
  if (with_aug) {
    t.push_back({"Training Set", "Day/Night Ratio (D/N)", "mAP@0.5 (%)", "mAP@0.5 (%) (w/ Aug.)", "Change"});
  } else {
    t.push_back({"Training Set", "Day/Night Ratio (D/N)", "mAP@0.5 (%)"});
  }
  for (const auto& r : rows) {
    std::vector<std::string> row{r.split.label, std::to_string(r.split.n_day) + " / " + std::to_string(r.split.n_night),
                                 format_map_percent(r.base.map50)};
    if (with_aug) {
      if (r.augmented) {
        row.push_back(format_map_percent(r.augmented->map50));
        row.push_back(format_map_percent(r.base.map50) + " → " + format_map_percent(r.augmented->map50));
      } else {
        row.insert(row.end(), {"", ""});
      }
    }
    t.push_back(std::move(row));
  }
  return t;
}

nlohmann::ordered_json shift_json(const ShiftReport& r) {
  nlohmann::ordered_json j;
  j["source"] = r.source_name;
  j["target"] = r.target_name;
  j["mean_p"] = r.mean_p;
  j["mean_statistic"] = r.mean_statistic;
  j["verdict"] = to_string(r.verdict);
  return j;
}

std::string render_json(const ReportInputs& in) {
  nlohmann::ordered_json doc;
  doc["shift"] = nlohmann::ordered_json::array();
  doc["shift"].push_back(shift_json(in.before));
  if (in.after) {
    doc["shift"].push_back(shift_json(*in.after));
    const auto cmp = compare_shift(in.before, *in.after);
    doc["comparison"] = {{"change", to_string(cmp.change)},
                         {"delta_statistic", cmp.delta_statistic},
                         {"delta_p", cmp.delta_p}};
  }
  doc["map"] = nlohmann::ordered_json::array();
  for (const auto& r : in.rows) {
    nlohmann::ordered_json row;
    row["set"] = r.split.label;
    row["n_day"] = r.split.n_day;
    row["n_night"] = r.split.n_night;
    row["map50"] = r.base.map50;
    row["map50_augmented"] = r.augmented ? nlohmann::ordered_json(r.augmented->map50) : nlohmann::ordered_json();
    doc["map"].push_back(std::move(row));
  }
  return doc.dump(2) + "\n";
}

}  // namespace

std::string_view to_string(OutputFormat f) noexcept {
  switch (f) {
    case OutputFormat::text: return "text";
    case OutputFormat::csv: return "csv";
    case OutputFormat::json: return "json";
  }
  return "text";
}

OutputFormat parse_output_format(std::string_view text) {
  if (text == "text") return OutputFormat::text;
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  throw InvalidArgument("unknown output format '" + std::string(text) + "' (expected json, csv or text)");
}

std::string format_p(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", p);
  return buf;
}

std::string format_map_percent(double map50) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", map50 * 100.0);
  return buf;
}

std::string comparison_summary(const ShiftReport& before, const ShiftReport& after) {
  const auto cmp = compare_shift(before, after);
  return format_p(before.mean_p) + " / " + format_p(after.mean_p) + " (" + std::string(to_string(cmp.change)) +
         ", Δp = " + signed_p(cmp.delta_p) + ")";
}

std::string render_report(const ReportInputs& inputs, OutputFormat format) {
  if (format == OutputFormat::json) return render_json(inputs);
  auto render = format == OutputFormat::csv ? render_csv_table : render_text_table;
  std::string out = render(shift_table(inputs));
  if (!inputs.rows.empty()) {
    out += "\n";
    out += render(map_table(inputs.rows));
  }
  return out;
}

}  // namespace shiftscope
