#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace softmap {

enum class LabelCorner { top_right, top_left, bottom_right, bottom_left };

struct LabelExtent {
  double width = 0.0;
  double height = 0.0;
};

// Fixed-advance metric model; no font rasterizer in the loop.
inline LabelExtent measure_label(const std::string& text, double font_size) {
  if (font_size <= 0.0) return {};
  if (text.empty()) return {};
  return {0.6 * font_size * static_cast<double>(text.size()), 1.2 * font_size};
}

struct LabelCandidate {
  std::string entity_id;
  double anchor_x = 0.0, anchor_y = 0.0;  // pixel coordinates
  LabelExtent extent;
  double priority = 0.0;  // entity kloc
};

struct LabelBox {
  std::string entity_id;
  double anchor_x = 0.0, anchor_y = 0.0;
  LabelCorner corner = LabelCorner::top_right;
  LabelExtent extent;
  double priority = 0.0;
  bool visible = false;
  // box rectangle in pixel coordinates (y grows downward)
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
};

namespace detail {

// The box touches the anchor at the corner opposite to its placement name:
// a top-right label sits up-right of the anchor, its bottom-left vertex on
// the anchor point.
inline void place_box(LabelBox& box) {
  switch (box.corner) {
    case LabelCorner::top_right:
      box.x0 = box.anchor_x;
      box.y1 = box.anchor_y;
      break;
    case LabelCorner::top_left:
      box.x0 = box.anchor_x - box.extent.width;
      box.y1 = box.anchor_y;
      break;
    case LabelCorner::bottom_right:
      box.x0 = box.anchor_x;
      box.y1 = box.anchor_y + box.extent.height;
      break;
    case LabelCorner::bottom_left:
      box.x0 = box.anchor_x - box.extent.width;
      box.y1 = box.anchor_y + box.extent.height;
      break;
  }
  box.x1 = box.x0 + box.extent.width;
  box.y0 = box.y1 - box.extent.height;
}

inline bool boxes_overlap(const LabelBox& a, const LabelBox& b) {
  return a.x0 < b.x1 && b.x0 < a.x1 && a.y0 < b.y1 && b.y0 < a.y1;
}

inline std::vector<LabelBox> greedy_pass(const std::vector<LabelCandidate>& ordered,
                                         const std::array<LabelCorner, 4>& corner_order) {
  std::vector<LabelBox> placed;
  placed.reserve(ordered.size());
  for (const LabelCandidate& cand : ordered) {
    LabelBox box;
    box.entity_id = cand.entity_id;
    box.anchor_x = cand.anchor_x;
    box.anchor_y = cand.anchor_y;
    box.extent = cand.extent;
    box.priority = cand.priority;
    if (cand.extent.width <= 0.0 || cand.extent.height <= 0.0) {
      placed.push_back(box);  // empty label, stays hidden
      continue;
    }
    for (LabelCorner corner : corner_order) {
      box.corner = corner;
      place_box(box);
      bool collides = false;
      for (const LabelBox& other : placed) {
        if (other.visible && boxes_overlap(box, other)) {
          collides = true;
          break;
        }
      }
      if (!collides) {
        box.visible = true;
        break;
      }
    }
    placed.push_back(box);
  }
  return placed;
}

}  // namespace detail

// Greedy placement in descending priority. Each entity tries the four
// corner positions in a fixed rotation of the TR, TL, BR, BL preference
// order; of the four rotations, the one showing the most labels wins
// (ties keep the first).
inline std::vector<LabelBox> place_labels(const std::vector<LabelCandidate>& candidates) {
  std::vector<LabelCandidate> ordered = candidates;
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const LabelCandidate& a, const LabelCandidate& b) {
                     return a.priority > b.priority;
                   });

  static constexpr std::array<LabelCorner, 4> base = {
      LabelCorner::top_right, LabelCorner::top_left,
      LabelCorner::bottom_right, LabelCorner::bottom_left};

  std::vector<LabelBox> best;
  std::size_t best_visible = 0;
  for (std::size_t rot = 0; rot < 4; ++rot) {
    std::array<LabelCorner, 4> order;
    for (std::size_t i = 0; i < 4; ++i) order[i] = base[(i + rot) % 4];
    std::vector<LabelBox> result = detail::greedy_pass(ordered, order);
    const std::size_t visible = static_cast<std::size_t>(
        std::count_if(result.begin(), result.end(),
                      [](const LabelBox& b) { return b.visible; }));
    if (rot == 0 || visible > best_visible) {
      best_visible = visible;
      best = std::move(result);
    }
  }
  return best;
}

inline std::size_t visible_count(const std::vector<LabelBox>& boxes) {
  return static_cast<std::size_t>(
      std::count_if(boxes.begin(), boxes.end(), [](const LabelBox& b) { return b.visible; }));
}

}  // namespace softmap
