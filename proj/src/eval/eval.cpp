#include "shiftscope/eval.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <unordered_map>

#include <json.hpp>

#include "shiftscope/error.hpp"
#include "shiftscope/io.hpp"

namespace shiftscope {

namespace {

struct ClassTruth {
  std::size_t count = 0;
  std::unordered_map<std::size_t, std::vector<Box2D>> boxes_by_image;
};

bool ranks_before(const Prediction* a, const Prediction* b) {
  if (a->score != b->score) return a->score > b->score;
  return std::tie(a->image_id, a->box.x1, a->box.y1, a->box.x2, a->box.y2) <
         std::tie(b->image_id, b->box.x1, b->box.y1, b->box.x2, b->box.y2);
}

Box2D parse_box(const nlohmann::json& box, std::size_t index) {
  auto coord = [&](const char* key) {
    if (!box.is_object() || !box.contains(key) || !box[key].is_number()) {
      throw FormatError("prediction " + std::to_string(index) + ": box." + key + " missing or not a number");
    }
    return box[key].get<double>();
  };
  Box2D b{coord("x1"), coord("y1"), coord("x2"), coord("y2")};
  if (!b.valid()) throw FormatError("prediction " + std::to_string(index) + ": invalid box");
  return b;
}

}  // namespace

double iou(const Box2D& a, const Box2D& b) noexcept {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double average_precision(const std::vector<bool>& ranked_hits, std::size_t n_ground_truth) {
  if (n_ground_truth == 0 || ranked_hits.empty()) return 0.0;
  const std::size_t n = ranked_hits.size();
  std::vector<double> precision(n);
  std::vector<double> recall(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    tp += ranked_hits[i] ? 1 : 0;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(tp) / static_cast<double>(n_ground_truth);
  }
  for (std::size_t i = n - 1; i > 0; --i) precision[i - 1] = std::max(precision[i - 1], precision[i]);
  double ap = 0.0;
  double previous_recall = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ap += (recall[i] - previous_recall) * precision[i];
    previous_recall = recall[i];
  }
  return ap;
}

EvalResult evaluate(const DatasetManifest& ground_truth, const std::vector<Prediction>& predictions,
                    double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) throw InvalidArgument("IoU threshold must lie in (0, 1)");

  std::unordered_map<std::string_view, std::size_t> image_index;
  image_index.reserve(ground_truth.size());
  for (std::size_t i = 0; i < ground_truth.size(); ++i) image_index.emplace(ground_truth.items()[i].id, i);

  std::map<std::string, ClassTruth> truth;
  for (std::size_t i = 0; i < ground_truth.size(); ++i) {
    for (const auto& label : ground_truth.items()[i].labels) {
      auto& cls = truth[label.category];
      cls.count += 1;
      cls.boxes_by_image[i].push_back(label.box);
    }
  }

  std::map<std::string, std::vector<std::pair<const Prediction*, std::size_t>>> by_class;
  for (const auto& p : predictions) {
    auto it = image_index.find(p.image_id);
    if (it == image_index.end()) throw InvalidArgument("prediction refers to unknown image '" + p.image_id + "'");
    if (!(p.score >= 0.0 && p.score <= 1.0)) throw InvalidArgument("prediction score outside [0, 1]");
    by_class[p.category].emplace_back(&p, it->second);
  }

  EvalResult result;
  result.iou_threshold = iou_threshold;
  for (auto& [category, cls] : truth) {
    auto& preds = by_class[category];
    std::sort(preds.begin(), preds.end(), [](const auto& a, const auto& b) { return ranks_before(a.first, b.first); });

    std::unordered_map<std::size_t, std::vector<bool>> used;
    std::vector<bool> hits;
    hits.reserve(preds.size());
    for (const auto& [pred, image] : preds) {
      auto boxes = cls.boxes_by_image.find(image);
      if (boxes == cls.boxes_by_image.end()) {
        hits.push_back(false);
        continue;
      }
      auto& taken = used[image];
      taken.resize(boxes->second.size(), false);
      std::size_t best = boxes->second.size();
      double best_iou = iou_threshold;
      for (std::size_t g = 0; g < boxes->second.size(); ++g) {
        if (taken[g]) continue;
        const double v = iou(pred->box, boxes->second[g]);
        if (v >= best_iou && (best == boxes->second.size() || v > best_iou)) {
          best = g;
          best_iou = v;
        }
      }
      const bool hit = best < boxes->second.size();
      if (hit) taken[best] = true;
      hits.push_back(hit);
    }
    result.gt_counts[category] = cls.count;
    result.per_class_ap[category] = average_precision(hits, cls.count);
  }

  if (!result.per_class_ap.empty()) {
    double sum = 0.0;
    for (const auto& [category, ap] : result.per_class_ap) sum += ap;
    result.map50 = sum / static_cast<double>(result.per_class_ap.size());
  }
  return result;
}

std::vector<Prediction> parse_predictions(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("predictions: ") + e.what());
  }
  if (!doc.is_array()) throw FormatError("predictions: top level must be a JSON array");
  std::vector<Prediction> out;
  out.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& rec = doc[i];
    auto where = "prediction " + std::to_string(i);
    if (!rec.is_object()) throw FormatError(where + " is not an object");
    if (!rec.contains("image") || !rec["image"].is_string()) throw FormatError(where + ": 'image' missing");
    if (!rec.contains("category") || !rec["category"].is_string() || rec["category"].get_ref<const std::string&>().empty()) {
      throw FormatError(where + ": 'category' missing");
    }
    if (!rec.contains("score") || !rec["score"].is_number()) throw FormatError(where + ": 'score' missing");
    if (!rec.contains("box")) throw FormatError(where + ": 'box' missing");
    Prediction p{rec["image"].get<std::string>(), rec["category"].get<std::string>(), rec["score"].get<double>(),
                 parse_box(rec["box"], i)};
    if (!(p.score >= 0.0 && p.score <= 1.0)) {
      throw FormatError(where + ": score " + io::format_double(p.score) + " outside [0, 1]");
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::string serialize_predictions(const std::vector<Prediction>& predictions) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& p : predictions) {
    nlohmann::ordered_json rec;
    rec["image"] = p.image_id;
    rec["category"] = p.category;
    rec["score"] = p.score;
    rec["box"] = {{"x1", p.box.x1}, {"y1", p.box.y1}, {"x2", p.box.x2}, {"y2", p.box.y2}};
    doc.push_back(std::move(rec));
  }
  return doc.dump(1) + "\n";
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
  try {
    return parse_predictions(io::read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void save_predictions(const std::vector<Prediction>& predictions, const std::filesystem::path& path) {
  io::write_file(path, serialize_predictions(predictions));
}

std::string serialize_eval_result(const EvalResult& result) {
  nlohmann::ordered_json doc;
  doc["map50"] = result.map50;
  doc["per_class"] = nlohmann::ordered_json::object();
  for (const auto& [name, ap] : result.per_class_ap) doc["per_class"][name] = ap;
  doc["gt_counts"] = nlohmann::ordered_json::object();
  for (const auto& [name, n] : result.gt_counts) doc["gt_counts"][name] = n;
  return doc.dump(2) + "\n";
}

EvalResult parse_eval_result(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("eval result: ") + e.what());
  }
  if (!doc.is_object() || doc.size() != 3 || !doc.contains("map50") || !doc["map50"].is_number() ||
      !doc.contains("per_class") || !doc["per_class"].is_object() || !doc.contains("gt_counts") ||
      !doc["gt_counts"].is_object()) {
    throw FormatError("eval result must be {map50: number, per_class: {...}, gt_counts: {...}}");
  }
  EvalResult result;
  result.map50 = doc["map50"].get<double>();
  if (!(result.map50 >= 0.0 && result.map50 <= 1.0)) throw FormatError("eval result: map50 outside [0, 1]");
  for (const auto& [name, ap] : doc["per_class"].items()) {
    if (!ap.is_number()) throw FormatError("eval result: per_class values must be numbers");
    result.per_class_ap[name] = ap.get<double>();
  }
  for (const auto& [name, n] : doc["gt_counts"].items()) {
    if (!n.is_number_unsigned()) throw FormatError("eval result: gt_counts values must be nonnegative integers");
    result.gt_counts[name] = n.get<std::size_t>();
  }
  return result;
}

EvalResult load_eval_result(const std::filesystem::path& path) {
  try {
    return parse_eval_result(io::read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace shiftscope
