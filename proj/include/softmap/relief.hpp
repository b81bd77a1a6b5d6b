#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "softmap/matrix.hpp"

namespace softmap {

struct GridSpec {
  std::size_t width = 256;
  std::size_t height = 256;
  double xmin = 0.0, ymin = 0.0, xmax = 1.0, ymax = 1.0;
  double margin_fraction = 0.1;

  void validate() const {
    if (width < 16 || height < 16) throw std::invalid_argument("grid must be at least 16x16");
    if (!(xmin < xmax) || !(ymin < ymax)) throw std::invalid_argument("grid bounds not ordered");
    if (margin_fraction < 0.0 || margin_fraction >= 0.5)
      throw std::invalid_argument("margin_fraction out of [0, 0.5)");
  }

  // World point -> pixel coordinates; pixel (0,0) center sits at the
  // world minimum corner. Every layer goes through this one transform.
  std::pair<double, double> world_to_pixel(double x, double y) const {
    const double px = (x - xmin) / (xmax - xmin) * static_cast<double>(width - 1);
    const double py = (y - ymin) / (ymax - ymin) * static_cast<double>(height - 1);
    return {px, py};
  }
};

// Tight bounding box of positions expanded by the margin fraction.
inline GridSpec fit_bounds(GridSpec spec, const Matrix& positions) {
  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  if (positions.rows() > 0) {
    xmin = xmax = positions(0, 0);
    ymin = ymax = positions(0, 1);
    for (std::size_t i = 1; i < positions.rows(); ++i) {
      xmin = std::min(xmin, positions(i, 0));
      xmax = std::max(xmax, positions(i, 0));
      ymin = std::min(ymin, positions(i, 1));
      ymax = std::max(ymax, positions(i, 1));
    }
  }
  double dx = xmax - xmin, dy = ymax - ymin;
  if (dx <= 0.0) dx = 1.0;
  if (dy <= 0.0) dy = 1.0;
  spec.xmin = xmin - spec.margin_fraction * dx;
  spec.xmax = xmax + spec.margin_fraction * dx;
  spec.ymin = ymin - spec.margin_fraction * dy;
  spec.ymax = ymax + spec.margin_fraction * dy;
  return spec;
}

struct Dem {
  GridSpec spec;
  Matrix heights;  // height x width, >= 0

  double max_height() const {
    double m = 0.0;
    for (double v : heights.data()) m = std::max(m, v);
    return m;
  }
};

inline double default_sigma(const GridSpec& spec) {
  return 0.04 * static_cast<double>(std::min(spec.width, spec.height));
}

struct DemOptions {
  double truncate_radius_sigmas = 4.0;  // 0 disables kernel truncation
  bool sqrt_damping = false;            // tames extreme size skew
};

/// Sum of per-entity Gaussian bumps: height(p) = sum_i a_i exp(-|p - p_i|^2
// / (2 sigma^2)), amplitudes from kloc, sigma in pixels.
inline Dem build_dem(const Matrix& positions, const std::vector<double>& sizes,
                     const GridSpec& spec, double sigma, const DemOptions& opts = {}) {
  spec.validate();
  if (sigma <= 0.0) throw std::invalid_argument("sigma must be positive");
  if (positions.rows() != sizes.size())
    throw std::invalid_argument("positions/sizes length mismatch");

  Dem dem;
  dem.spec = spec;
  dem.heights = Matrix(spec.height, spec.width);
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  const double cutoff = opts.truncate_radius_sigmas > 0.0
                            ? opts.truncate_radius_sigmas * sigma
                            : 0.0;
  for (std::size_t e = 0; e < positions.rows(); ++e) {
    const double wx = positions(e, 0), wy = positions(e, 1);
    if (wx < spec.xmin || wx > spec.xmax || wy < spec.ymin || wy > spec.ymax)
      throw std::invalid_argument("entity position outside grid world bounds");
    const auto [px, py] = spec.world_to_pixel(wx, wy);
    const double amp = opts.sqrt_damping ? std::sqrt(sizes[e]) : sizes[e];
    if (amp == 0.0) continue;
    std::size_t r0 = 0, r1 = spec.height, c0 = 0, c1 = spec.width;
    if (cutoff > 0.0) {
      r0 = static_cast<std::size_t>(std::max(0.0, std::floor(py - cutoff)));
      r1 = std::min(spec.height, static_cast<std::size_t>(std::max(0.0, std::ceil(py + cutoff) + 1.0)));
      c0 = static_cast<std::size_t>(std::max(0.0, std::floor(px - cutoff)));
      c1 = std::min(spec.width, static_cast<std::size_t>(std::max(0.0, std::ceil(px + cutoff) + 1.0)));
    }
    for (std::size_t r = r0; r < r1; ++r) {
      const double dy = static_cast<double>(r) - py;
      for (std::size_t c = c0; c < c1; ++c) {
        const double dx = static_cast<double>(c) - px;
        dem.heights(r, c) += amp * std::exp(-(dx * dx + dy * dy) * inv2s2);
      }
    }
  }
  return dem;
}

// Lambertian hill-shading with Horn gradients. Rows grow southward, so the
// north component of the gradient is the negated row derivative.
inline Matrix hillshade(const Dem& dem, double azimuth_deg = 315.0, double altitude_deg = 45.0) {
  if (altitude_deg <= 0.0 || altitude_deg > 90.0)
    throw std::invalid_argument("altitude must be in (0, 90]");
  const std::size_t h = dem.spec.height, w = dem.spec.width;
  const double az = azimuth_deg * M_PI / 180.0;
  const double alt = altitude_deg * M_PI / 180.0;
  // azimuth clockwise from north, east = +x
  const double lx = std::sin(az) * std::cos(alt);
  const double ly = std::cos(az) * std::cos(alt);
  const double lz = std::sin(alt);

  Matrix out(h, w);
  auto z = [&](std::size_t r, std::size_t c) {
    return dem.heights(std::min(r, h - 1), std::min(c, w - 1));
  };
  for (std::size_t r = 0; r < h; ++r) {
    const std::size_t rn = r > 0 ? r - 1 : 0;
    const std::size_t rs = std::min(r + 1, h - 1);
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t cw = c > 0 ? c - 1 : 0;
      const std::size_t ce = std::min(c + 1, w - 1);
      const double dzdx = ((z(rn, ce) + 2.0 * z(r, ce) + z(rs, ce)) -
                           (z(rn, cw) + 2.0 * z(r, cw) + z(rs, cw))) / 8.0;
      const double dzdrow = ((z(rs, cw) + 2.0 * z(rs, c) + z(rs, ce)) -
                             (z(rn, cw) + 2.0 * z(rn, c) + z(rn, ce))) / 8.0;
      const double dzdn = -dzdrow;  // north derivative
      const double nx = -dzdx, ny = -dzdn, nz = 1.0;
      const double nn = std::sqrt(nx * nx + ny * ny + nz * nz);
      out(r, c) = std::max(0.0, (nx * lx + ny * ly + nz * lz) / nn);
    }
  }
  return out;
}

struct ContourSet {
  std::vector<double> levels;
  // polylines[i] holds the paths at levels[i]; points in pixel coordinates
  std::vector<std::vector<std::vector<std::pair<double, double>>>> polylines;
};

namespace detail {

// A contour vertex lies on a grid edge; identifying vertices by their edge
// makes segment chaining exact.
struct EdgePoint {
  int horizontal;  // 1 = edge (c,r)-(c+1,r), 0 = edge (c,r)-(c,r+1)
  int c, r;
  auto operator<=>(const EdgePoint&) const = default;
};

inline std::pair<double, double> interpolate(const EdgePoint& e, const Matrix& z, double level) {
  if (e.horizontal) {
    const double z0 = z(e.r, e.c), z1 = z(e.r, e.c + 1);
    const double t = (level - z0) / (z1 - z0);
    return {static_cast<double>(e.c) + t, static_cast<double>(e.r)};
  }
  const double z0 = z(e.r, e.c), z1 = z(e.r + 1, e.c);
  const double t = (level - z0) / (z1 - z0);
  return {static_cast<double>(e.c), static_cast<double>(e.r) + t};
}

}  // namespace detail

// Marching squares at levels interval, 2*interval, ... up to the DEM
// maximum. Saddles resolve on the cell-center average. Segments are
// chained into maximal polylines; every polyline is closed or ends on the
// grid boundary.
inline ContourSet contours(const Dem& dem, double interval) {
  if (interval <= 0.0) throw std::invalid_argument("contour interval must be positive");
  ContourSet out;
  const double zmax = dem.max_height();
  const Matrix& z = dem.heights;
  const std::size_t h = dem.spec.height, w = dem.spec.width;

  for (double level = interval; level <= zmax; level += interval) {
    using detail::EdgePoint;
    std::map<EdgePoint, std::vector<EdgePoint>> adjacency;
    auto link = [&](const EdgePoint& a, const EdgePoint& b) {
      adjacency[a].push_back(b);
      adjacency[b].push_back(a);
    };

    for (std::size_t r = 0; r + 1 < h; ++r) {
      for (std::size_t c = 0; c + 1 < w; ++c) {
        const int ci = static_cast<int>(c), ri = static_cast<int>(r);
        const double ztl = z(r, c), ztr = z(r, c + 1);
        const double zbl = z(r + 1, c), zbr = z(r + 1, c + 1);
        int mask = 0;
        if (ztl > level) mask |= 1;
        if (ztr > level) mask |= 2;
        if (zbr > level) mask |= 4;
        if (zbl > level) mask |= 8;
        if (mask == 0 || mask == 15) continue;
        const EdgePoint top{1, ci, ri};
        const EdgePoint bottom{1, ci, ri + 1};
        const EdgePoint left{0, ci, ri};
        const EdgePoint right{0, ci + 1, ri};
        switch (mask) {
          case 1: case 14: link(left, top); break;
          case 2: case 13: link(top, right); break;
          case 3: case 12: link(left, right); break;
          case 4: case 11: link(right, bottom); break;
          case 6: case 9: link(top, bottom); break;
          case 7: case 8: link(left, bottom); break;
          case 5: {  // tl+br inside
            const double center = 0.25 * (ztl + ztr + zbl + zbr);
            if (center > level) { link(left, bottom); link(top, right); }
            else { link(left, top); link(right, bottom); }
            break;
          }
          case 10: {  // tr+bl inside
            const double center = 0.25 * (ztl + ztr + zbl + zbr);
            if (center > level) { link(left, top); link(right, bottom); }
            else { link(left, bottom); link(top, right); }
            break;
          }
        }
      }
    }

    std::vector<std::vector<std::pair<double, double>>> paths;
    std::map<detail::EdgePoint, bool> visited;
    auto walk = [&](const detail::EdgePoint& start) {
      std::vector<std::pair<double, double>> path;
      detail::EdgePoint prev = start;
      detail::EdgePoint cur = start;
      path.push_back(detail::interpolate(cur, z, level));
      visited[cur] = true;
      while (true) {
        const auto& nbrs = adjacency[cur];
        bool advanced = false;
        for (const auto& next : nbrs) {
          if (visited[next] && !(next == start && path.size() > 2)) continue;
          if (next == prev) continue;
          if (next == start && path.size() > 2) {
            path.push_back(detail::interpolate(start, z, level));  // close loop
            return path;
          }
          prev = cur;
          cur = next;
          visited[cur] = true;
          path.push_back(detail::interpolate(cur, z, level));
          advanced = true;
          break;
        }
        if (!advanced) return path;
      }
    };

    // open paths first (endpoints have degree 1), then closed loops
    for (const auto& [pt, nbrs] : adjacency)
      if (nbrs.size() == 1 && !visited[pt]) paths.push_back(walk(pt));
    for (const auto& [pt, nbrs] : adjacency)
      if (!visited[pt]) paths.push_back(walk(pt));

    out.levels.push_back(level);
    out.polylines.push_back(std::move(paths));
  }
  return out;
}

// Default contour interval: max height / 8, rounded to one significant digit.
inline double default_contour_interval(const Dem& dem) {
  const double raw = dem.max_height() / 8.0;
  if (raw <= 0.0) return 1.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  return std::round(raw / mag) * mag;
}

// ASCII PGM with heights normalized to 0-65535.
inline std::string to_pgm(const Dem& dem) {
  std::ostringstream out;
  out << "P2\n" << dem.spec.width << ' ' << dem.spec.height << "\n65535\n";
  const double zmax = dem.max_height();
  for (std::size_t r = 0; r < dem.spec.height; ++r) {
    for (std::size_t c = 0; c < dem.spec.width; ++c) {
      const int v = zmax > 0.0
                        ? static_cast<int>(std::lround(dem.heights(r, c) / zmax * 65535.0))
                        : 0;
      out << v << (c + 1 < dem.spec.width ? ' ' : '\n');
    }
  }
  return out.str();
}

}  // namespace softmap
