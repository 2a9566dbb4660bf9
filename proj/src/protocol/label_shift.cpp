#include <map>

#include <boost/math/special_functions/gamma.hpp>
#include <json.hpp>

#include "shiftscope/error.hpp"
#include "shiftscope/protocol.hpp"

namespace shiftscope {

namespace {

void tally(const DatasetManifest& m, std::map<std::string, std::pair<std::uint64_t, std::uint64_t>>& counts,
           bool source) {
  for (const auto& item : m.items()) {
    for (const auto& label : item.labels) {
      auto& slot = counts[label.category];
      (source ? slot.first : slot.second) += 1;
    }
  }
}

}  // namespace

LabelShiftResult detect_label_shift(const DatasetManifest& source, const DatasetManifest& target) {
  const auto n_src = source.label_count();
  const auto n_tgt = target.label_count();
  if (n_src == 0) throw InvalidArgument("label shift: source manifest '" + source.name() + "' has no object labels");
  if (n_tgt == 0) throw InvalidArgument("label shift: target manifest '" + target.name() + "' has no object labels");

  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> counts;
  tally(source, counts, true);
  tally(target, counts, false);

  LabelShiftResult result;
  for (const auto& [category, c] : counts) {
    result.categories.push_back(category);
    result.counts_src.push_back(c.first);
    result.counts_tgt.push_back(c.second);
  }

  const double total = static_cast<double>(n_src + n_tgt);
  const double rows[2] = {static_cast<double>(n_src), static_cast<double>(n_tgt)};
  double statistic = 0.0;
  for (std::size_t c = 0; c < result.categories.size(); ++c) {
    const double observed[2] = {static_cast<double>(result.counts_src[c]), static_cast<double>(result.counts_tgt[c])};
    const double column = observed[0] + observed[1];
    for (int r = 0; r < 2; ++r) {
      const double expected = rows[r] * column / total;
      const double diff = observed[r] - expected;
      statistic += diff * diff / expected;
    }
  }
  result.statistic = statistic;
  result.degrees_of_freedom = result.categories.size() - 1;
  result.p_value = result.degrees_of_freedom == 0
                       ? 1.0
                       : boost::math::gamma_q(static_cast<double>(result.degrees_of_freedom) / 2.0, statistic / 2.0);
  return result;
}

std::string serialize_label_shift(const LabelShiftResult& result) {
  nlohmann::ordered_json doc;
  doc["categories"] = result.categories;
  doc["counts_src"] = result.counts_src;
  doc["counts_tgt"] = result.counts_tgt;
  doc["statistic"] = result.statistic;
  doc["degrees_of_freedom"] = result.degrees_of_freedom;
  doc["p_value"] = result.p_value;
  return doc.dump(2) + "\n";
}

}  // namespace shiftscope
