#pragma once

#include <random>
#include <string>
#include <vector>

#include "shiftscope/eval.hpp"

namespace testutil {

// Small integer-box scenes with jittered predictions, some duplicated and
// some with tied scores.
struct EvalScene {
  shiftscope::DatasetManifest truth;
  std::vector<shiftscope::Prediction> predictions;
};

inline EvalScene random_scene(std::mt19937_64& gen) {
  using namespace shiftscope;
  const char* classes[] = {"car", "person", "bus"};
  std::uniform_int_distribution<int> coord(0, 40), size(2, 12), jitter(-3, 3), n_img(1, 6), n_lab(0, 4), cls(0, 2);
  std::uniform_int_distribution<int> score_step(0, 10);
  EvalScene scene;
  std::vector<ManifestItem> items;
  const int images = n_img(gen);
  for (int i = 0; i < images; ++i) {
    ManifestItem item;
    item.id = "img" + std::to_string(i);
    const int labels = n_lab(gen);
    for (int l = 0; l < labels; ++l) {
      const double x = coord(gen), y = coord(gen);
      item.labels.push_back(ObjectLabel{classes[cls(gen)], Box2D{x, y, x + size(gen), y + size(gen)}});
    }
    for (const auto& label : item.labels) {
      std::bernoulli_distribution keep(0.7), dup(0.2);
      if (!keep(gen)) continue;
      const auto& b = label.box;
      const double dx = jitter(gen), dy = jitter(gen);
      Prediction p{item.id, label.category, score_step(gen) / 10.0, Box2D{b.x1 + dx, b.y1 + dy, b.x2 + dx, b.y2 + dy}};
      scene.predictions.push_back(p);
      if (dup(gen)) {
        p.score = score_step(gen) / 10.0;
        scene.predictions.push_back(p);
      }
    }
    const int spurious = n_lab(gen) / 2;
    for (int s = 0; s < spurious; ++s) {
      const double x = coord(gen), y = coord(gen);
      scene.predictions.push_back(
          Prediction{item.id, classes[cls(gen)], score_step(gen) / 10.0, Box2D{x, y, x + size(gen), y + size(gen)}});
    }
    items.push_back(std::move(item));
  }
  scene.truth = DatasetManifest("gt", std::move(items));
  return scene;
}

}  // namespace testutil
