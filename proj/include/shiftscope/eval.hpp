#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "shiftscope/manifest.hpp"

namespace shiftscope {

struct Prediction {
  std::string image_id;
  std::string category;
  double score = 0.0;  // in [0, 1]
  Box2D box;
  friend bool operator==(const Prediction&, const Prediction&) = default;
};

struct EvalResult {
  /// Classes with at least one ground-truth box.
  std::map<std::string, double> per_class_ap;
  std::map<std::string, std::size_t> gt_counts;
  /// Mean of per_class_ap; 0 when the ground truth has no boxes.
  double map50 = 0.0;
  double iou_threshold = 0.5;
};

/// Intersection over union; 0 when the union is empty.
double iou(const Box2D& a, const Box2D& b) noexcept;

/// Per-class average precision with all-point interpolation.
///
/// Predictions are ranked by descending score (ties: image id, then box
/// coordinates). Each prediction claims the unmatched same-image, same-class
/// ground-truth box with the highest IoU >= threshold; every other prediction
/// is a false positive.
EvalResult evaluate(const DatasetManifest& ground_truth, const std::vector<Prediction>& predictions,
                    double iou_threshold = 0.5);

/// Area under the precision envelope for a ranked list of hit flags.
double average_precision(const std::vector<bool>& ranked_hits, std::size_t n_ground_truth);

std::vector<Prediction> parse_predictions(std::string_view json_text);
std::string serialize_predictions(const std::vector<Prediction>& predictions);
std::vector<Prediction> load_predictions(const std::filesystem::path& path);
void save_predictions(const std::vector<Prediction>& predictions, const std::filesystem::path& path);

/// {map50, per_class: {name: ap}, gt_counts: {name: n}}
std::string serialize_eval_result(const EvalResult& result);
EvalResult parse_eval_result(std::string_view json_text);
EvalResult load_eval_result(const std::filesystem::path& path);

}  // namespace shiftscope
