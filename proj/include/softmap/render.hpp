#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "softmap/labeling.hpp"
#include "softmap/png.hpp"
#include "softmap/relief.hpp"
#include "softmap/thematic.hpp"

namespace softmap {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
};

// Height/illumination -> color. Cells below sea level (1% of max height)
// are ocean; land ramps light-green -> brown -> white and is modulated by
// the illumination.
struct Palette {
  double sea_level_fraction = 0.01;

  Rgb color(double height, double max_height, double illumination) const {
    if (max_height <= 0.0 || height < sea_level_fraction * max_height)
      return {168, 205, 229};  // ocean
    const double t = (height - sea_level_fraction * max_height) /
                     (max_height * (1.0 - sea_level_fraction));
    double r, g, b;
    if (t < 0.6) {
      const double u = t / 0.6;
      r = 174.0 + u * (150.0 - 174.0);
      g = 204.0 + u * (118.0 - 204.0);
      b = 124.0 + u * (78.0 - 124.0);
    } else {
      const double u = (t - 0.6) / 0.4;
      r = 150.0 + u * (245.0 - 150.0);
      g = 118.0 + u * (245.0 - 118.0);
      b = 78.0 + u * (245.0 - 78.0);
    }
    const double shade = 0.35 + 0.65 * illumination;
    auto clamp8 = [](double v) {
      return static_cast<std::uint8_t>(std::min(255.0, std::max(0.0, v)));
    };
    return {clamp8(r * shade), clamp8(g * shade), clamp8(b * shade)};
  }
};

// Per-entity pixel anchor shared by every overlay layer.
struct EntityAnchor {
  std::string id;
  double px = 0.0, py = 0.0;
};

struct MapScene {
  GridSpec spec;
  Dem dem;
  Matrix shading;  // illumination grid, same dims as dem
  ContourSet contour_set;
  std::vector<LabelBox> labels;
  std::vector<EntityAnchor> anchors;
  GlyphLayer glyphs;
  MarkerLayer markers;
  EdgeLayer edges;
  Palette palette;
  double glyph_size = 8.0;
  double label_font_size = 10.0;
};

// Validates grid compatibility; the z-order is fixed at render time:
// terrain < contours < edges < glyphs/markers < labels.
inline MapScene compose(Dem dem, Matrix shading, ContourSet contour_set,
                        std::vector<LabelBox> labels, std::vector<EntityAnchor> anchors,
                        GlyphLayer glyphs = {}, MarkerLayer markers = {},
                        EdgeLayer edges = {}, Palette palette = {}) {
  if (shading.rows() != dem.spec.height || shading.cols() != dem.spec.width)
    throw std::invalid_argument("shading grid does not match dem grid");
  MapScene scene;
  scene.spec = dem.spec;
  scene.dem = std::move(dem);
  scene.shading = std::move(shading);
  scene.contour_set = std::move(contour_set);
  scene.labels = std::move(labels);
  scene.anchors = std::move(anchors);
  scene.glyphs = std::move(glyphs);
  scene.markers = std::move(markers);
  scene.edges = std::move(edges);
  scene.palette = palette;
  return scene;
}

namespace detail {

inline std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  // -0.000 and 0.000 must serialize the same
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

inline Image rasterize_terrain(const MapScene& scene) {
  const std::size_t w = scene.spec.width, h = scene.spec.height;
  Image img(w, h);
  const double zmax = scene.dem.max_height();
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      const Rgb c = scene.palette.color(scene.dem.heights(y, x), zmax, scene.shading(y, x));
      img.set(x, y, c.r, c.g, c.b);
    }
  return img;
}

inline void draw_line(Image& img, double x0, double y0, double x1, double y1, Rgb c) {
  const double len = std::max(std::fabs(x1 - x0), std::fabs(y1 - y0));
  const int steps = std::max(1, static_cast<int>(std::ceil(len)));
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    const auto x = static_cast<std::size_t>(std::lround(x0 + t * (x1 - x0)));
    const auto y = static_cast<std::size_t>(std::lround(y0 + t * (y1 - y0)));
    img.set(x, y, c.r, c.g, c.b);
  }
}

inline const char* glyph_svg_path(const std::string& tag) {
  // small vector shapes centered on the origin, unit scale
  if (tag == "test-tube") return "M -0.2 -0.5 L -0.2 0.3 Q -0.2 0.5 0 0.5 Q 0.2 0.5 0.2 0.3 L 0.2 -0.5 M -0.3 -0.5 L 0.3 -0.5";
  if (tag == "factory") return "M -0.5 0.5 L -0.5 -0.1 L -0.2 0.1 L -0.2 -0.1 L 0.1 0.1 L 0.1 -0.5 L 0.3 -0.5 L 0.3 0.1 L 0.5 0.1 L 0.5 0.5 Z";
  if (tag == "gear") return "M 0 -0.5 L 0.15 -0.2 L 0.5 0 L 0.15 0.2 L 0 0.5 L -0.15 0.2 L -0.5 0 L -0.15 -0.2 Z";
  return "M -0.5 0 L 0 -0.5 L 0.5 0 L 0 0.5 Z";  // flag/fallback: diamond
}

}  // namespace detail

// Deterministic SVG: terrain as an embedded base64 PNG, everything else as
// vector elements with 3-decimal coordinates, fixed element order.
inline std::string to_svg(const MapScene& scene) {
  using detail::fmt3;
  const std::size_t w = scene.spec.width, h = scene.spec.height;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\" "
      << "width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";

  // terrain
  out << "<image x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h
      << "\" xlink:href=\"data:image/png;base64,"
      << base64_encode(encode_png(detail::rasterize_terrain(scene))) << "\"/>\n";

  // contours
  out << "<g fill=\"none\" stroke=\"#6b5b42\" stroke-width=\"0.7\" stroke-opacity=\"0.6\">\n";
  for (std::size_t li = 0; li < scene.contour_set.levels.size(); ++li) {
    for (const auto& path : scene.contour_set.polylines[li]) {
      if (path.size() < 2) continue;
      out << "<path d=\"M " << fmt3(path[0].first) << ' ' << fmt3(path[0].second);
      for (std::size_t i = 1; i < path.size(); ++i)
        out << " L " << fmt3(path[i].first) << ' ' << fmt3(path[i].second);
      out << "\"/>\n";
    }
  }
  out << "</g>\n";

  // invocation edges as quadratic arcs, width by log weight
  if (!scene.edges.edges.empty()) {
    std::map<std::string, const EntityAnchor*> anchor_by_id;
    for (const EntityAnchor& a : scene.anchors) anchor_by_id[a.id] = &a;
    out << "<g fill=\"none\" stroke=\"#c03030\" stroke-opacity=\"0.8\">\n";
    for (const AnnotatedEdge& ae : scene.edges.edges) {
      auto fi = anchor_by_id.find(ae.edge.from_id);
      auto ti = anchor_by_id.find(ae.edge.to_id);
      if (fi == anchor_by_id.end() || ti == anchor_by_id.end()) continue;
      const double x0 = fi->second->px, y0 = fi->second->py;
      const double x1 = ti->second->px, y1 = ti->second->py;
      const double mx = 0.5 * (x0 + x1), my = 0.5 * (y0 + y1);
      // bow the arc perpendicular to the chord
      const double dx = x1 - x0, dy = y1 - y0;
      const double len = std::sqrt(dx * dx + dy * dy);
      const double ox = len > 0.0 ? -dy / len : 0.0;
      const double oy = len > 0.0 ? dx / len : 0.0;
      const double bow = 0.12 * len;
      out << "<path stroke-width=\"" << fmt3(edge_stroke_width(ae.edge.weight))
          << "\" d=\"M " << fmt3(x0) << ' ' << fmt3(y0) << " Q "
          << fmt3(mx + bow * ox) << ' ' << fmt3(my + bow * oy) << ' ' << fmt3(x1) << ' '
          << fmt3(y1) << "\"/>\n";
    }
    out << "</g>\n";
  }

  // glyphs and file-kind markers share the entity anchors
  out << "<g stroke=\"#202020\" stroke-width=\"0.8\" fill=\"none\">\n";
  for (const EntityAnchor& a : scene.anchors) {
    auto mk = scene.markers.markers.find(a.id);
    if (mk != scene.markers.markers.end()) {
      const double s = 3.0;
      switch (mk->second) {
        case MarkerShape::cross:
          out << "<path d=\"M " << fmt3(a.px - s) << ' ' << fmt3(a.py - s) << " L "
              << fmt3(a.px + s) << ' ' << fmt3(a.py + s) << " M " << fmt3(a.px - s) << ' '
              << fmt3(a.py + s) << " L " << fmt3(a.px + s) << ' ' << fmt3(a.py - s) << "\"/>\n";
          break;
        case MarkerShape::square:
          out << "<rect x=\"" << fmt3(a.px - s) << "\" y=\"" << fmt3(a.py - s) << "\" width=\""
              << fmt3(2 * s) << "\" height=\"" << fmt3(2 * s) << "\"/>\n";
          break;
        case MarkerShape::triangle:
          out << "<path d=\"M " << fmt3(a.px) << ' ' << fmt3(a.py - s) << " L " << fmt3(a.px + s)
              << ' ' << fmt3(a.py + s) << " L " << fmt3(a.px - s) << ' ' << fmt3(a.py + s)
              << " Z\"/>\n";
          break;
        case MarkerShape::circle:
          out << "<circle cx=\"" << fmt3(a.px) << "\" cy=\"" << fmt3(a.py) << "\" r=\"" << fmt3(s)
              << "\"/>\n";
          break;
        default:
          out << "<circle cx=\"" << fmt3(a.px) << "\" cy=\"" << fmt3(a.py)
              << "\" r=\"1.2\" fill=\"#202020\"/>\n";
      }
    }
    auto gl = scene.glyphs.assignments.find(a.id);
    if (gl != scene.glyphs.assignments.end()) {
      out << "<path transform=\"translate(" << fmt3(a.px) << ' ' << fmt3(a.py) << ") scale("
          << fmt3(scene.glyph_size) << ")\" stroke-width=\""
          << fmt3(1.5 / scene.glyph_size) << "\" d=\"" << detail::glyph_svg_path(gl->second)
          << "\"/>\n";
    }
  }
  out << "</g>\n";

  // labels on top
  out << "<g font-family=\"monospace\" font-size=\"" << detail::fmt3(scene.label_font_size)
      << "\" fill=\"#101010\">\n";
  for (const LabelBox& box : scene.labels) {
    if (!box.visible) continue;
    out << "<text x=\"" << fmt3(box.x0) << "\" y=\"" << fmt3(box.y1 - 0.25 * box.extent.height)
        << "\">" << box.entity_id << "</text>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

// Raster composition. Labels render as their boxes (the SVG carries the
// text); everything else matches the SVG layering.
inline std::string to_png_bytes(const MapScene& scene, int scale = 1) {
  if (scale < 1) throw std::invalid_argument("png scale must be >= 1");
  Image base = detail::rasterize_terrain(scene);

  const Rgb contour_color{107, 91, 66};
  for (std::size_t li = 0; li < scene.contour_set.levels.size(); ++li)
    for (const auto& path : scene.contour_set.polylines[li])
      for (std::size_t i = 1; i < path.size(); ++i)
        detail::draw_line(base, path[i - 1].first, path[i - 1].second, path[i].first,
                          path[i].second, contour_color);

  std::map<std::string, const EntityAnchor*> anchor_by_id;
  for (const EntityAnchor& a : scene.anchors) anchor_by_id[a.id] = &a;
  for (const AnnotatedEdge& ae : scene.edges.edges) {
    auto fi = anchor_by_id.find(ae.edge.from_id);
    auto ti = anchor_by_id.find(ae.edge.to_id);
    if (fi == anchor_by_id.end() || ti == anchor_by_id.end()) continue;
    detail::draw_line(base, fi->second->px, fi->second->py, ti->second->px, ti->second->py,
                      {192, 48, 48});
  }

  for (const EntityAnchor& a : scene.anchors) {
    if (scene.markers.markers.count(a.id) || scene.glyphs.assignments.count(a.id)) {
      detail::draw_line(base, a.px - 2, a.py, a.px + 2, a.py, {32, 32, 32});
      detail::draw_line(base, a.px, a.py - 2, a.px, a.py + 2, {32, 32, 32});
    }
  }

  for (const LabelBox& box : scene.labels) {
    if (!box.visible) continue;
    detail::draw_line(base, box.x0, box.y0, box.x1, box.y0, {16, 16, 16});
    detail::draw_line(base, box.x1, box.y0, box.x1, box.y1, {16, 16, 16});
    detail::draw_line(base, box.x1, box.y1, box.x0, box.y1, {16, 16, 16});
    detail::draw_line(base, box.x0, box.y1, box.x0, box.y0, {16, 16, 16});
  }

  if (scale == 1) return encode_png(base);
  Image big(base.width * scale, base.height * scale);
  for (std::size_t y = 0; y < big.height; ++y)
    for (std::size_t x = 0; x < big.width; ++x) {
      const std::uint8_t* p = &base.pixels[((y / scale) * base.width + x / scale) * 3];
      big.set(x, y, p[0], p[1], p[2]);
    }
  return encode_png(big);
}

}  // namespace softmap
