#pragma once

#include <cmath>
#include <istream>
#include <map>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "softmap/corpus.hpp"
#include "softmap/mds.hpp"

namespace softmap {

// --- glyph layer ------------------------------------------------------------

struct GlyphRule {
  std::string glyph;    // tag into the glyph catalog
  std::string pattern;  // regex searched against the entity id
};

struct GlyphLayer {
  std::map<std::string, std::string> assignments;  // entity id -> glyph tag
};

// Built-in catalog tags: test-tube, factory, gear, flag.
inline const std::vector<std::string>& glyph_catalog() {
  static const std::vector<std::string> tags = {"test-tube", "factory", "gear", "flag"};
  return tags;
}

// First matching rule wins.
inline GlyphLayer glyph_layer(const Corpus& corpus, const std::vector<GlyphRule>& rules) {
  GlyphLayer layer;
  std::vector<std::regex> compiled;
  compiled.reserve(rules.size());
  for (const GlyphRule& r : rules) compiled.emplace_back(r.pattern);
  for (const Document& doc : corpus.documents) {
    for (std::size_t i = 0; i < rules.size(); ++i) {
      if (std::regex_search(doc.id, compiled[i])) {
        layer.assignments[doc.id] = rules[i].glyph;
        break;
      }
    }
  }
  return layer;
}

// One `glyph_tag pattern` per line; # comments and blank lines skipped.
inline std::vector<GlyphRule> parse_glyph_rules(std::istream& in) {
  std::vector<GlyphRule> rules;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    GlyphRule r;
    if (ls >> r.glyph >> r.pattern) rules.push_back(std::move(r));
  }
  return rules;
}

// --- invocation edge layer --------------------------------------------------

struct Edge {
  std::string from_id;
  std::string to_id;
  double weight = 1.0;
};

struct AnnotatedEdge {
  Edge edge;
  double layout_length = 0.0;  // Euclidean distance in layout coordinates
};

struct EdgeLayer {
  std::vector<AnnotatedEdge> edges;
};

// Annotates each edge with its layout length; long edges are the
// "long-distance calls". Edges with unknown endpoints are skipped with a
// warning, self-loops are dropped.
inline EdgeLayer edge_layer(const Layout& layout, const std::vector<std::string>& ids,
                            const std::vector<Edge>& edges,
                            std::vector<std::string>* warnings = nullptr) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ids.size(); ++i) index[ids[i]] = i;
  EdgeLayer layer;
  for (const Edge& e : edges) {
    auto fi = index.find(e.from_id);
    auto ti = index.find(e.to_id);
    if (fi == index.end() || ti == index.end()) {
      if (warnings)
        warnings->push_back("edge endpoint not in layout: " + e.from_id + " -> " + e.to_id);
      continue;
    }
    if (fi->second == ti->second && e.from_id == e.to_id) continue;
    const double dx = layout.positions(fi->second, 0) - layout.positions(ti->second, 0);
    const double dy = layout.positions(fi->second, 1) - layout.positions(ti->second, 1);
    layer.edges.push_back({e, std::sqrt(dx * dx + dy * dy)});
  }
  return layer;
}

// One `from_id to_id [weight]` per line; # comments allowed.
inline std::vector<Edge> parse_edge_file(std::istream& in) {
  std::vector<Edge> edges;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    Edge e;
    if (!(ls >> e.from_id >> e.to_id)) continue;
    if (!(ls >> e.weight)) e.weight = 1.0;
    edges.push_back(std::move(e));
  }
  return edges;
}

inline double edge_stroke_width(double weight) { return std::log(1.0 + weight); }

// --- file-kind marker layer -------------------------------------------------

enum class MarkerShape { cross, square, triangle, circle, dot };

struct MarkerLayer {
  std::map<std::string, MarkerShape> markers;  // entity id -> shape
};

// Fixed kind -> shape mapping; unknown kinds get a small dot.
inline MarkerShape marker_shape_for(FileKind kind) {
  switch (kind) {
    case FileKind::source: return MarkerShape::cross;
    case FileKind::markup: return MarkerShape::square;
    case FileKind::config: return MarkerShape::triangle;
    case FileKind::property: return MarkerShape::circle;
    default: return MarkerShape::dot;
  }
}

inline MarkerLayer marker_layer(const Corpus& corpus) {
  MarkerLayer layer;
  for (const Document& doc : corpus.documents)
    layer.markers[doc.id] = marker_shape_for(doc.kind);
  return layer;
}

}  // namespace softmap
