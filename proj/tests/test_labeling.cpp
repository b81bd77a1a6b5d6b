#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "softmap/labeling.hpp"
#include "softmap/rng.hpp"

using namespace softmap;

namespace {

void check_no_visible_overlap(const std::vector<LabelBox>& boxes) {
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (!boxes[i].visible) continue;
    for (std::size_t j = i + 1; j < boxes.size(); ++j) {
      if (!boxes[j].visible) continue;
      const oracle::Rect a{boxes[i].x0, boxes[i].y0, boxes[i].x1, boxes[i].y1};
      const oracle::Rect b{boxes[j].x0, boxes[j].y0, boxes[j].x1, boxes[j].y1};
      CAPTURE(i);
      CAPTURE(j);
      CHECK(!oracle::rects_overlap(a, b));
    }
  }
}

std::vector<LabelCandidate> random_candidates(std::size_t n, SplitMix64& rng,
                                              double span = 256.0) {
  std::vector<LabelCandidate> out;
  for (std::size_t i = 0; i < n; ++i) {
    LabelCandidate c;
    c.entity_id = "e" + std::to_string(i);
    c.anchor_x = rng.uniform(0.0, span);
    c.anchor_y = rng.uniform(0.0, span);
    c.extent = measure_label("Name" + std::to_string(i), 10.0);
    c.priority = rng.uniform(0.0, 5.0);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

TEST_CASE("measure_label uses the fixed-advance metric model") {
  const LabelExtent e = measure_label("Ludo", 10.0);
  CHECK(e.width == doctest::Approx(24.0));
  CHECK(e.height == doctest::Approx(12.0));
  const LabelExtent long_name = measure_label(std::string(20, 'x'), 10.0);
  CHECK(long_name.width == doctest::Approx(120.0));
  CHECK(long_name.height == doctest::Approx(12.0));
}

TEST_CASE("empty text measures zero and stays hidden") {
  const LabelExtent e = measure_label("", 10.0);
  CHECK(e.width == 0.0);
  std::vector<LabelCandidate> cands = {{"empty", 10, 10, e, 1.0}};
  const auto boxes = place_labels(cands);
  REQUIRE(boxes.size() == 1);
  CHECK(!boxes[0].visible);
}

TEST_CASE("two distant labels are both visible") {
  std::vector<LabelCandidate> cands = {
      {"a", 10, 10, measure_label("Alpha", 10.0), 1.0},
      {"b", 200, 200, measure_label("Beta", 10.0), 2.0},
  };
  const auto boxes = place_labels(cands);
  CHECK(visible_count(boxes) == 2);
}

TEST_CASE("a low-priority label surrounded on all sides stays hidden") {
  // four big labels share one anchor; greedily they tile the four quadrants
  // around it, covering [-400,600]^2. any placement of the small label lands
  // inside that region, so it must lose.
  const LabelExtent huge{500.0, 500.0};
  std::vector<LabelCandidate> cands = {
      {"small", 90, 90, {30.0, 12.0}, 1.0},
      {"big0", 100, 100, huge, 9.0},
      {"big1", 100, 100, huge, 9.0},
      {"big2", 100, 100, huge, 9.0},
      {"big3", 100, 100, huge, 9.0},
  };
  const auto boxes = place_labels(cands);
  REQUIRE(boxes.size() == 5);
  CHECK(visible_count(boxes) == 4);
  for (const auto& b : boxes)
    CHECK(b.visible == (b.entity_id != "small"));
}

TEST_CASE("no visible overlaps on random instances (exhaustive oracle)") {
  SplitMix64 rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const auto boxes = place_labels(random_candidates(10, rng));
    check_no_visible_overlap(boxes);
  }
}

TEST_CASE("box geometry touches the anchor at the opposite vertex") {
  std::vector<LabelCandidate> cands = {{"a", 50, 60, {30, 12}, 1.0}};
  auto boxes = place_labels(cands);
  REQUIRE(boxes[0].visible);
  // first preference is top-right: box extends up-right from the anchor
  CHECK(boxes[0].corner == LabelCorner::top_right);
  CHECK(boxes[0].x0 == doctest::Approx(50.0));
  CHECK(boxes[0].y1 == doctest::Approx(60.0));
  CHECK(boxes[0].x1 == doctest::Approx(80.0));
  CHECK(boxes[0].y0 == doctest::Approx(48.0));
}

TEST_CASE("chosen rotation shows at least as many labels as each other rotation") {
  SplitMix64 rng(7);
  // dense instance where the rotations genuinely differ
  const auto cands = random_candidates(60, rng, 150.0);
  const auto chosen = place_labels(cands);
  // re-run each single rotation by hand through the greedy pass
  std::vector<LabelCandidate> ordered = cands;
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const LabelCandidate& a, const LabelCandidate& b) {
                     return a.priority > b.priority;
                   });
  static constexpr std::array<LabelCorner, 4> base = {
      LabelCorner::top_right, LabelCorner::top_left,
      LabelCorner::bottom_right, LabelCorner::bottom_left};
  for (std::size_t rot = 0; rot < 4; ++rot) {
    std::array<LabelCorner, 4> order;
    for (std::size_t i = 0; i < 4; ++i) order[i] = base[(i + rot) % 4];
    const auto pass = detail::greedy_pass(ordered, order);
    CHECK(visible_count(chosen) >= visible_count(pass));
  }
}

TEST_CASE("a hidden label lost to at least one higher-priority visible label") {
  SplitMix64 rng(11);
  const auto boxes = place_labels(random_candidates(80, rng, 120.0));
  for (const auto& hidden : boxes) {
    if (hidden.visible || hidden.extent.width <= 0.0) continue;
    // try all 4 corners: each must overlap some visible box with >= priority
    bool justified = false;
    for (LabelCorner corner :
         {LabelCorner::top_right, LabelCorner::top_left, LabelCorner::bottom_right,
          LabelCorner::bottom_left}) {
      LabelBox probe = hidden;
      probe.corner = corner;
      detail::place_box(probe);
      for (const auto& vis : boxes) {
        if (!vis.visible) continue;
        if (detail::boxes_overlap(probe, vis) && vis.priority >= hidden.priority)
          justified = true;
      }
    }
    CHECK(justified);
  }
}

TEST_CASE("placement is deterministic") {
  SplitMix64 rng1(5), rng2(5);
  const auto a = place_labels(random_candidates(40, rng1, 180.0));
  const auto b = place_labels(random_candidates(40, rng2, 180.0));
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].entity_id == b[i].entity_id);
    CHECK(a[i].visible == b[i].visible);
    CHECK(a[i].x0 == b[i].x0);
    CHECK(a[i].y0 == b[i].y0);
  }
}
