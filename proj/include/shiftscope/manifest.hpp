#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace shiftscope {

enum class TimeOfDay { day, night, dawn_dusk, unknown };
enum class Provenance { real, generated };

/// Axis-aligned box in pixel coordinates, x1 <= x2 and y1 <= y2.
struct Box2D {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  bool valid() const noexcept;
  double area() const noexcept { return (x2 - x1) * (y2 - y1); }
  friend bool operator==(const Box2D&, const Box2D&) = default;
};

struct ObjectLabel {
  std::string category;
  Box2D box;
  friend bool operator==(const ObjectLabel&, const ObjectLabel&) = default;
};

struct ManifestItem {
  std::string id;
  TimeOfDay timeofday = TimeOfDay::unknown;
  Provenance provenance = Provenance::real;
  std::vector<ObjectLabel> labels;
  friend bool operator==(const ManifestItem&, const ManifestItem&) = default;
};

/// Ordered, id-unique list of dataset items.
class DatasetManifest {
 public:
  DatasetManifest() = default;
  /// Throws FormatError on duplicate ids or invalid labels.
  DatasetManifest(std::string name, std::vector<ManifestItem> items);

  const std::string& name() const noexcept { return name_; }
  const std::vector<ManifestItem>& items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  std::size_t count(TimeOfDay tod) const noexcept;
  std::size_t label_count() const noexcept;
  /// Index of the item with this id, or size() when absent.
  std::size_t find(std::string_view id) const;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;

 private:
  std::string name_;
  std::vector<ManifestItem> items_;
};

std::string_view to_string(TimeOfDay tod) noexcept;
std::string_view to_string(Provenance p) noexcept;

/// BDD100K-style attribute value ("daytime", "night", "dawn/dusk"); anything else is unknown.
TimeOfDay parse_timeofday(std::string_view attribute) noexcept;
std::string_view timeofday_attribute(TimeOfDay tod) noexcept;

DatasetManifest parse_manifest(std::string_view json_text, std::string name);
std::string serialize_manifest(const DatasetManifest& manifest);

DatasetManifest load_manifest(const std::filesystem::path& path, std::string name);
/// Name defaults to the file stem.
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

}  // namespace shiftscope
