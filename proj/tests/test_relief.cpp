#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "softmap/relief.hpp"
#include "softmap/rng.hpp"

using namespace softmap;

namespace {

GridSpec unit_grid(std::size_t w = 64, std::size_t h = 64) {
  GridSpec spec;
  spec.width = w;
  spec.height = h;
  spec.xmin = 0.0;
  spec.ymin = 0.0;
  spec.xmax = static_cast<double>(w - 1);
  spec.ymax = static_cast<double>(h - 1);
  return spec;
}

}  // namespace

TEST_CASE("grid spec validation") {
  GridSpec spec = unit_grid();
  CHECK_NOTHROW(spec.validate());
  spec.width = 8;
  CHECK_THROWS(spec.validate());
  spec = unit_grid();
  spec.xmax = spec.xmin;
  CHECK_THROWS(spec.validate());
  spec = unit_grid();
  spec.margin_fraction = 0.5;
  CHECK_THROWS(spec.validate());
}

TEST_CASE("single unit peak at a cell center") {
  const GridSpec spec = unit_grid();
  Matrix pos(1, 2);
  pos(0, 0) = 32.0;
  pos(0, 1) = 32.0;
  const double sigma = 4.0;
  const Dem dem = build_dem(pos, {1.0}, spec, sigma, {.truncate_radius_sigmas = 0.0});
  CHECK(dem.heights(32, 32) == doctest::Approx(1.0).epsilon(1e-12));
  // 3 sigma away: exp(-4.5) = 0.0111...
  CHECK(dem.heights(32, 32 + 12) <= 0.0112);
}

TEST_CASE("coincident entities sum their peaks") {
  const GridSpec spec = unit_grid();
  Matrix pos(2, 2);
  pos(0, 0) = pos(1, 0) = 20.0;
  pos(0, 1) = pos(1, 1) = 20.0;
  const Dem dem = build_dem(pos, {1.0, 2.0}, spec, 3.0, {.truncate_radius_sigmas = 0.0});
  CHECK(dem.heights(20, 20) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("untruncated dem equals the brute-force sum to 1e-12") {
  SplitMix64 rng(5);
  const GridSpec spec = unit_grid(32, 32);
  const std::size_t n = 5;
  Matrix pos(n, 2);
  std::vector<double> amps(n), xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    pos(i, 0) = xs[i] = rng.uniform(2.0, 29.0);
    pos(i, 1) = ys[i] = rng.uniform(2.0, 29.0);
    amps[i] = rng.uniform(0.1, 3.0);
  }
  const double sigma = 2.5;
  const Dem dem = build_dem(pos, amps, spec, sigma, {.truncate_radius_sigmas = 0.0});
  for (std::size_t r = 0; r < 32; ++r)
    for (std::size_t c = 0; c < 32; ++c) {
      const double expect = oracle::dem_height(static_cast<double>(c), static_cast<double>(r),
                                               xs, ys, amps, sigma);
      CHECK(dem.heights(r, c) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("truncated production dem stays within 1e-3 relative of brute force") {
  SplitMix64 rng(6);
  const GridSpec spec = unit_grid(48, 48);
  const std::size_t n = 6;
  Matrix pos(n, 2);
  std::vector<double> amps(n), xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    pos(i, 0) = xs[i] = rng.uniform(4.0, 43.0);
    pos(i, 1) = ys[i] = rng.uniform(4.0, 43.0);
    amps[i] = rng.uniform(0.5, 2.0);
  }
  const double sigma = 3.0;
  const Dem dem = build_dem(pos, amps, spec, sigma);  // default 4-sigma cutoff
  double peak = dem.max_height();
  for (std::size_t r = 0; r < 48; ++r)
    for (std::size_t c = 0; c < 48; ++c) {
      const double expect = oracle::dem_height(static_cast<double>(c), static_cast<double>(r),
                                               xs, ys, amps, sigma);
      CHECK(std::fabs(dem.heights(r, c) - expect) <= 1e-3 * peak);
    }
}

TEST_CASE("dem is monotone and linear in its entities") {
  SplitMix64 rng(7);
  const GridSpec spec = unit_grid(32, 32);
  Matrix a(2, 2), b(3, 2), both(5, 2);
  std::vector<double> wa = {1.0, 2.0}, wb = {0.5, 1.5, 0.7}, wboth;
  for (std::size_t i = 0; i < 2; ++i) {
    a(i, 0) = both(i, 0) = rng.uniform(4.0, 27.0);
    a(i, 1) = both(i, 1) = rng.uniform(4.0, 27.0);
  }
  for (std::size_t i = 0; i < 3; ++i) {
    b(i, 0) = both(2 + i, 0) = rng.uniform(4.0, 27.0);
    b(i, 1) = both(2 + i, 1) = rng.uniform(4.0, 27.0);
  }
  wboth = wa;
  wboth.insert(wboth.end(), wb.begin(), wb.end());
  const DemOptions exact{.truncate_radius_sigmas = 0.0};
  const Dem da = build_dem(a, wa, spec, 2.0, exact);
  const Dem db = build_dem(b, wb, spec, 2.0, exact);
  const Dem dboth = build_dem(both, wboth, spec, 2.0, exact);
  for (std::size_t i = 0; i < da.heights.data().size(); ++i) {
    const double sum = da.heights.data()[i] + db.heights.data()[i];
    CHECK(dboth.heights.data()[i] == doctest::Approx(sum).epsilon(1e-12));
    CHECK(dboth.heights.data()[i] >= da.heights.data()[i]);  // monotone
  }
}

TEST_CASE("entity outside the world bounds is fatal") {
  const GridSpec spec = unit_grid();
  Matrix pos(1, 2);
  pos(0, 0) = -5.0;
  pos(0, 1) = 10.0;
  CHECK_THROWS(build_dem(pos, {1.0}, spec, 2.0));
}

TEST_CASE("flat dem shades to sin(altitude) everywhere") {
  Dem dem;
  dem.spec = unit_grid(24, 24);
  dem.heights = Matrix(24, 24, 5.0);
  const Matrix shade = hillshade(dem, 315.0, 45.0);
  for (double v : shade.data())
    CHECK(v == doctest::Approx(std::sin(45.0 * M_PI / 180.0)).epsilon(1e-9));
}

TEST_CASE("plane tilted toward the light is brighter than flat ground") {
  Dem dem;
  dem.spec = unit_grid(24, 24);
  dem.heights = Matrix(24, 24);
  // z rises to the west, so the slope faces east; light from the east
  // (azimuth 90) hits it head-on
  for (std::size_t r = 0; r < 24; ++r)
    for (std::size_t c = 0; c < 24; ++c)
      dem.heights(r, c) = -0.3 * static_cast<double>(c);
  // heights must be >= 0 for a Dem; shift up (constant offset is invariant)
  for (auto& v : dem.heights.data()) v += 0.3 * 24.0;
  const Matrix shade = hillshade(dem, 90.0, 45.0);
  CHECK(shade(12, 12) > std::sin(45.0 * M_PI / 180.0));
}

TEST_CASE("inclined plane matches the closed-form Lambert value") {
  Dem dem;
  dem.spec = unit_grid(32, 32);
  dem.heights = Matrix(32, 32);
  const double gx = 0.2;  // z = 0.2 x, x east
  for (std::size_t r = 0; r < 32; ++r)
    for (std::size_t c = 0; c < 32; ++c) dem.heights(r, c) = gx * static_cast<double>(c);
  const Matrix shade = hillshade(dem, 270.0, 45.0);
  const double expect = oracle::plane_illumination(gx, 0.0, 270.0, 45.0);
  for (std::size_t r = 2; r < 30; ++r)
    for (std::size_t c = 2; c < 30; ++c)
      CHECK(shade(r, c) == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("hillshade output stays in [0,1] and ignores constant offsets") {
  SplitMix64 rng(8);
  Dem dem;
  dem.spec = unit_grid(20, 20);
  dem.heights = Matrix(20, 20);
  for (auto& v : dem.heights.data()) v = rng.uniform(0.0, 10.0);
  const Matrix a = hillshade(dem, 315.0, 45.0);
  for (double v : a.data()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  for (auto& v : dem.heights.data()) v += 123.0;
  const Matrix b = hillshade(dem, 315.0, 45.0);
  for (std::size_t i = 0; i < a.data().size(); ++i)
    CHECK(a.data()[i] == doctest::Approx(b.data()[i]).epsilon(1e-12));
}

TEST_CASE("contours of a flat zero dem are empty") {
  Dem dem;
  dem.spec = unit_grid(24, 24);
  dem.heights = Matrix(24, 24);
  const ContourSet cs = contours(dem, 0.5);
  CHECK(cs.levels.empty());
}

TEST_CASE("gaussian peak contour approximates the analytic circle") {
  const std::size_t res = 256;
  GridSpec spec = unit_grid(res, res);
  Matrix pos(1, 2);
  pos(0, 0) = pos(0, 1) = 127.5;
  const double sigma = 25.0;
  const Dem dem = build_dem(pos, {1.0}, spec, sigma, {.truncate_radius_sigmas = 0.0});
  const double level = 0.4;
  const ContourSet cs = contours(dem, level);  // first level = 0.4
  REQUIRE(!cs.levels.empty());
  CHECK(cs.levels[0] == doctest::Approx(level));
  REQUIRE(cs.polylines[0].size() == 1);  // one closed ring
  const auto& ring = cs.polylines[0][0];
  const double expect_r = sigma * std::sqrt(2.0 * std::log(1.0 / level));
  double err_sum = 0.0;
  for (const auto& [x, y] : ring)
    err_sum += std::fabs(std::hypot(x - 127.5, y - 127.5) - expect_r);
  CHECK(err_sum / static_cast<double>(ring.size()) < 1.0);
  // ring is closed
  CHECK(ring.front() == ring.back());
}

TEST_CASE("contour vertices sit on the level under bilinear interpolation") {
  SplitMix64 rng(9);
  const GridSpec spec = unit_grid(48, 48);
  Matrix pos(4, 2);
  std::vector<double> amps(4);
  for (std::size_t i = 0; i < 4; ++i) {
    pos(i, 0) = rng.uniform(8.0, 39.0);
    pos(i, 1) = rng.uniform(8.0, 39.0);
    amps[i] = rng.uniform(0.5, 2.0);
  }
  const Dem dem = build_dem(pos, amps, spec, 4.0, {.truncate_radius_sigmas = 0.0});
  const ContourSet cs = contours(dem, dem.max_height() / 5.0);
  auto bilinear = [&](double x, double y) {
    const std::size_t c0 = std::min(static_cast<std::size_t>(x), spec.width - 2);
    const std::size_t r0 = std::min(static_cast<std::size_t>(y), spec.height - 2);
    const double fx = x - static_cast<double>(c0), fy = y - static_cast<double>(r0);
    return dem.heights(r0, c0) * (1 - fx) * (1 - fy) +
           dem.heights(r0, c0 + 1) * fx * (1 - fy) +
           dem.heights(r0 + 1, c0) * (1 - fx) * fy +
           dem.heights(r0 + 1, c0 + 1) * fx * fy;
  };
  REQUIRE(!cs.levels.empty());
  for (std::size_t li = 0; li < cs.levels.size(); ++li)
    for (const auto& path : cs.polylines[li])
      for (const auto& [x, y] : path)
        CHECK(bilinear(x, y) == doctest::Approx(cs.levels[li]).epsilon(1e-6));
}

TEST_CASE("every polyline is closed or ends on the grid boundary") {
  SplitMix64 rng(10);
  const GridSpec spec = unit_grid(32, 32);
  Matrix pos(3, 2);
  std::vector<double> amps = {2.0, 1.0, 1.5};
  // peaks near the border so some contours run off the grid
  pos(0, 0) = 2.0;  pos(0, 1) = 16.0;
  pos(1, 0) = 30.0; pos(1, 1) = 4.0;
  pos(2, 0) = 16.0; pos(2, 1) = 16.0;
  const Dem dem = build_dem(pos, amps, spec, 5.0, {.truncate_radius_sigmas = 0.0});
  const ContourSet cs = contours(dem, dem.max_height() / 4.0);
  for (const auto& level_paths : cs.polylines)
    for (const auto& path : level_paths) {
      REQUIRE(path.size() >= 2);
      const bool closed = path.front() == path.back();
      auto on_boundary = [&](const std::pair<double, double>& p) {
        return p.first <= 0.0 || p.second <= 0.0 || p.first >= spec.width - 1.0 ||
               p.second >= spec.height - 1.0;
      };
      if (!closed) {
        CHECK(on_boundary(path.front()));
        CHECK(on_boundary(path.back()));
      }
    }
}

TEST_CASE("default contour interval is max/8 rounded to one significant digit") {
  Dem dem;
  dem.spec = unit_grid(24, 24);
  dem.heights = Matrix(24, 24);
  dem.heights(5, 5) = 33.0;
  CHECK(default_contour_interval(dem) == doctest::Approx(4.0));  // 33/8 = 4.125 -> 4
}

TEST_CASE("pgm export is well-formed and normalized") {
  Dem dem;
  dem.spec = unit_grid(16, 16);
  dem.heights = Matrix(16, 16);
  dem.heights(3, 4) = 2.0;
  const std::string pgm = to_pgm(dem);
  CHECK(pgm.substr(0, 3) == "P2\n");
  CHECK(pgm.find("65535") != std::string::npos);
}

TEST_CASE("fit_bounds expands the bounding box by the margin") {
  Matrix pos(2, 2);
  pos(0, 0) = 0.0; pos(0, 1) = 0.0;
  pos(1, 0) = 10.0; pos(1, 1) = 20.0;
  GridSpec spec;
  spec.margin_fraction = 0.1;
  spec = fit_bounds(spec, pos);
  CHECK(spec.xmin == doctest::Approx(-1.0));
  CHECK(spec.xmax == doctest::Approx(11.0));
  CHECK(spec.ymin == doctest::Approx(-2.0));
  CHECK(spec.ymax == doctest::Approx(22.0));
}
