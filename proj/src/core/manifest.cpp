#include "shiftscope/manifest.hpp"

#include <cmath>
#include <unordered_set>

#include <json.hpp>

#include "shiftscope/error.hpp"
#include "shiftscope/io.hpp"

namespace shiftscope {

using nlohmann::json;

bool Box2D::valid() const noexcept {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2) &&
         x1 <= x2 && y1 <= y2;
}

DatasetManifest::DatasetManifest(std::string name, std::vector<ManifestItem> items)
    : name_(std::move(name)), items_(std::move(items)) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(items_.size());
  for (const auto& item : items_) {
    if (item.id.empty()) throw FormatError("manifest '" + name_ + "': empty item id");
    if (!seen.insert(item.id).second) {
      throw FormatError("manifest '" + name_ + "': duplicate id '" + item.id + "'");
    }
    for (const auto& label : item.labels) {
      if (label.category.empty()) {
        throw FormatError("manifest '" + name_ + "': item '" + item.id + "' has an empty category");
      }
      if (!label.box.valid()) {
        throw FormatError("manifest '" + name_ + "': item '" + item.id + "' has an invalid box");
      }
    }
  }
}

std::size_t DatasetManifest::count(TimeOfDay tod) const noexcept {
  std::size_t n = 0;
  for (const auto& item : items_) n += item.timeofday == tod ? 1 : 0;
  return n;
}

std::size_t DatasetManifest::label_count() const noexcept {
  std::size_t n = 0;
  for (const auto& item : items_) n += item.labels.size();
  return n;
}

std::size_t DatasetManifest::find(std::string_view id) const {
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (items_[i].id == id) return i;
  }
  return items_.size();
}

std::string_view to_string(TimeOfDay tod) noexcept {
  switch (tod) {
    case TimeOfDay::day:
      return "day";
    case TimeOfDay::night:
      return "night";
    case TimeOfDay::dawn_dusk:
      return "dawn_dusk";
    case TimeOfDay::unknown:
      break;
  }
  return "unknown";
}

std::string_view to_string(Provenance p) noexcept {
  return p == Provenance::generated ? "generated" : "real";
}

TimeOfDay parse_timeofday(std::string_view attribute) noexcept {
  if (attribute == "daytime") return TimeOfDay::day;
  if (attribute == "night") return TimeOfDay::night;
  if (attribute == "dawn/dusk") return TimeOfDay::dawn_dusk;
  return TimeOfDay::unknown;
}

std::string_view timeofday_attribute(TimeOfDay tod) noexcept {
  switch (tod) {
    case TimeOfDay::day:
      return "daytime";
    case TimeOfDay::night:
      return "night";
    case TimeOfDay::dawn_dusk:
      return "dawn/dusk";
    case TimeOfDay::unknown:
      break;
  }
  return "undefined";
}

namespace {

double box_coord(const json& box, const char* key, std::size_t record) {
  auto it = box.find(key);
  if (it == box.end() || !it->is_number()) {
    throw FormatError("record " + std::to_string(record) + ": box2d." + key + " missing or not a number");
  }
  return it->get<double>();
}

ManifestItem parse_item(const json& rec, std::size_t index) {
  if (!rec.is_object()) throw FormatError("record " + std::to_string(index) + " is not an object");
  ManifestItem item;
  auto name = rec.find("name");
  if (name == rec.end() || !name->is_string()) {
    throw FormatError("record " + std::to_string(index) + ": required field 'name' missing");
  }
  item.id = name->get<std::string>();

  if (auto attrs = rec.find("attributes"); attrs != rec.end() && attrs->is_object()) {
    if (auto tod = attrs->find("timeofday"); tod != attrs->end() && tod->is_string()) {
      item.timeofday = parse_timeofday(tod->get_ref<const std::string&>());
    }
  }
  if (auto prov = rec.find("provenance"); prov != rec.end()) {
    if (!prov->is_string()) throw FormatError("record " + std::to_string(index) + ": provenance must be a string");
    const auto& p = prov->get_ref<const std::string&>();
    if (p == "generated") {
      item.provenance = Provenance::generated;
    } else if (p != "real") {
      throw FormatError("record " + std::to_string(index) + ": unknown provenance '" + p + "'");
    }
  }
  if (auto labels = rec.find("labels"); labels != rec.end() && labels->is_array()) {
    for (const auto& lab : *labels) {
      // Lane and drivable-area annotations carry poly2d instead of box2d.
      auto box = lab.find("box2d");
      if (!lab.is_object() || box == lab.end() || !box->is_object()) continue;
      auto cat = lab.find("category");
      if (cat == lab.end() || !cat->is_string() || cat->get_ref<const std::string&>().empty()) {
        throw FormatError("record " + std::to_string(index) + ": label without category");
      }
      ObjectLabel label{cat->get<std::string>(),
                        Box2D{box_coord(*box, "x1", index), box_coord(*box, "y1", index),
                              box_coord(*box, "x2", index), box_coord(*box, "y2", index)}};
      item.labels.push_back(std::move(label));
    }
  }
  return item;
}

}  // namespace

DatasetManifest parse_manifest(std::string_view json_text, std::string name) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError("manifest '" + name + "': " + e.what());
  }
  if (!doc.is_array()) throw FormatError("manifest '" + name + "': top level must be a JSON array");
  std::vector<ManifestItem> items;
  items.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) items.push_back(parse_item(doc[i], i));
  return DatasetManifest(std::move(name), std::move(items));
}

std::string serialize_manifest(const DatasetManifest& manifest) {
  json doc = json::array();
  for (const auto& item : manifest.items()) {
    json labels = json::array();
    for (const auto& label : item.labels) {
      labels.push_back({{"category", label.category},
                        {"box2d", {{"x1", label.box.x1}, {"y1", label.box.y1},
                                   {"x2", label.box.x2}, {"y2", label.box.y2}}}});
    }
    json rec = {{"name", item.id}, {"labels", std::move(labels)},
                {"provenance", std::string(to_string(item.provenance))}};
    if (item.timeofday != TimeOfDay::unknown) {
      rec["attributes"] = {{"timeofday", std::string(timeofday_attribute(item.timeofday))}};
    }
    doc.push_back(std::move(rec));
  }
  return doc.dump(1) + "\n";
}

DatasetManifest load_manifest(const std::filesystem::path& path, std::string name) {
  return parse_manifest(io::read_file(path), std::move(name));
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  return load_manifest(path, path.stem().string());
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  io::write_file(path, serialize_manifest(manifest));
}

}  // namespace shiftscope
