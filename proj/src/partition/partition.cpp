#include "shiftscope/partition.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include <json.hpp>

#include "shiftscope/error.hpp"
#include "shiftscope/io.hpp"

namespace shiftscope {

namespace {

constexpr std::uint64_t kDayStream = 11;
constexpr std::uint64_t kNightStream = 12;

std::vector<std::size_t> indices_of(const DatasetManifest& pool, TimeOfDay tod) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool.items()[i].timeofday == tod) idx.push_back(i);
  }
  return idx;
}

}  // namespace

std::optional<RatioSpec> find_preset(std::string_view name) {
  std::string key;
  for (char ch : name) {
    if (ch != ' ' && ch != '_' && ch != '-') key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  if (key.starts_with("set")) key.erase(0, 3);
  if (key.size() != 1 || key[0] < 'a' || key[0] > 'e') return std::nullopt;
  return ratio_presets()[static_cast<std::size_t>(key[0] - 'a')];
}

DatasetManifest build_ratio_set(const DatasetManifest& pool, const RatioSpec& spec, RngSeed seed) {
  if (spec.n_day + spec.n_night == 0) throw InvalidArgument("ratio set must request at least one item");
  const auto day = indices_of(pool, TimeOfDay::day);
  const auto night = indices_of(pool, TimeOfDay::night);
  if (day.size() < spec.n_day) throw InsufficientItems("day", spec.n_day, day.size());
  if (night.size() < spec.n_night) throw InsufficientItems("night", spec.n_night, night.size());

  std::vector<bool> chosen(pool.size(), false);
  for (auto pick : sample_indices(day.size(), spec.n_day, seed.stream(kDayStream))) chosen[day[pick]] = true;
  for (auto pick : sample_indices(night.size(), spec.n_night, seed.stream(kNightStream))) chosen[night[pick]] = true;

  std::vector<ManifestItem> items;
  items.reserve(spec.n_day + spec.n_night);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (chosen[i]) items.push_back(pool.items()[i]);
  }
  return DatasetManifest(spec.label.empty() ? pool.name() : spec.label, std::move(items));
}

DatasetManifest filter_night(const DatasetManifest& pool) {
  std::vector<ManifestItem> items;
  for (const auto& item : pool.items()) {
    if (item.timeofday == TimeOfDay::night) items.push_back(item);
  }
  return DatasetManifest(pool.name(), std::move(items));
}

DatasetManifest augment_union(const DatasetManifest& real_night, const DatasetManifest& generated_night) {
  std::vector<ManifestItem> items(real_night.items());
  items.reserve(real_night.size() + generated_night.size());
  std::unordered_set<std::string> ids;
  for (const auto& item : items) ids.insert(item.id);
  for (const auto& item : generated_night.items()) {
    if (item.provenance != Provenance::generated) {
      throw InvalidArgument("augment_union: item '" + item.id + "' of the generated set is not marked generated");
    }
    ManifestItem copy = item;
    if (!copy.id.starts_with(kGeneratedPrefix)) copy.id = std::string(kGeneratedPrefix) + copy.id;
    if (!ids.insert(copy.id).second) throw FormatError("augment_union: id collision on '" + copy.id + "'");
    items.push_back(std::move(copy));
  }
  return DatasetManifest(real_night.name() + "+" + generated_night.name(), std::move(items));
}

std::string serialize_split(const SplitRecord& split) {
  nlohmann::ordered_json doc;
  doc["label"] = split.label;
  doc["n_day"] = split.n_day;
  doc["n_night"] = split.n_night;
  doc["seed"] = split.seed;
  return doc.dump(2) + "\n";
}

SplitRecord parse_split(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("split record: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("label") || !doc["label"].is_string() || !doc.contains("n_day") ||
      !doc["n_day"].is_number_unsigned() || !doc.contains("n_night") || !doc["n_night"].is_number_unsigned() ||
      !doc.contains("seed") || !doc["seed"].is_number_unsigned()) {
    throw FormatError("split record must be {label: str, n_day: int, n_night: int, seed: int}");
  }
  return SplitRecord{doc["label"].get<std::string>(), doc["n_day"].get<std::size_t>(),
                     doc["n_night"].get<std::size_t>(), doc["seed"].get<std::uint64_t>()};
}

SplitRecord load_split(const std::filesystem::path& path) {
  try {
    return parse_split(io::read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace shiftscope
