#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "scenes.hpp"
#include "softmap/corpus.hpp"
#include "softmap/mds.hpp"
#include "softmap/render.hpp"
#include "softmap/thematic.hpp"

using namespace softmap;

namespace {

Corpus tiny_corpus() {
  Corpus c;
  c.documents.push_back({"Board.java", "Board", "board", 0.2, FileKind::source, "1"});
  c.documents.push_back({"RuleThreeTest.java", "RuleThreeTest", "rule", 0.1, FileKind::source, "1"});
  c.documents.push_back({"game.properties", "game", "game", 0.01, FileKind::property, "1"});
  c.documents.push_back({"web.xml", "web", "web", 0.02, FileKind::markup, "1"});
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("glyph rules: substring match, first match wins, empty rules") {
  const Corpus c = tiny_corpus();
  GlyphLayer layer = glyph_layer(c, {{"test-tube", "Test"}});
  CHECK(layer.assignments.size() == 1);
  CHECK(layer.assignments.at("RuleThreeTest.java") == "test-tube");

  CHECK(glyph_layer(c, {}).assignments.empty());

  // two matching rules: the first one's glyph sticks
  layer = glyph_layer(c, {{"factory", "Board"}, {"gear", "Board"}});
  CHECK(layer.assignments.at("Board.java") == "factory");
}

TEST_CASE("glyph rule file parsing skips comments") {
  std::istringstream in("test-tube Test # trailing\n# full comment line\nfactory Factory\n");
  const auto rules = parse_glyph_rules(in);
  REQUIRE(rules.size() == 2);
  CHECK(rules[0].glyph == "test-tube");
  CHECK(rules[1].pattern == "Factory");
}

TEST_CASE("edge layer annotates layout lengths") {
  Layout layout;
  layout.positions = Matrix(3, 2);
  layout.positions(1, 0) = 3.0;
  layout.positions(2, 0) = 3.0;
  layout.positions(2, 1) = 4.0;
  const std::vector<std::string> ids = {"a", "b", "c"};

  EdgeLayer layer = edge_layer(layout, ids, {{"a", "b", 1.0}, {"a", "c", 1.0}, {"b", "b", 1.0}});
  REQUIRE(layer.edges.size() == 2);  // self-loop dropped
  CHECK(layer.edges[0].layout_length == doctest::Approx(3.0));
  CHECK(layer.edges[1].layout_length == doctest::Approx(5.0));
}

TEST_CASE("edge layer: coincident endpoints give length zero, unknown ids skip") {
  Layout layout;
  layout.positions = Matrix(2, 2);
  const std::vector<std::string> ids = {"a", "b"};
  std::vector<std::string> warnings;
  EdgeLayer layer = edge_layer(layout, ids, {{"a", "b", 1.0}, {"a", "ghost", 1.0}}, &warnings);
  REQUIRE(layer.edges.size() == 1);
  CHECK(layer.edges[0].layout_length == 0.0);
  CHECK(warnings.size() == 1);
}

TEST_CASE("edge lengths are symmetric and match the serialized layout") {
  Layout layout;
  layout.positions = Matrix(3, 2);
  layout.positions(0, 0) = -1.25;
  layout.positions(1, 0) = 2.0;
  layout.positions(1, 1) = 0.5;
  layout.positions(2, 1) = -3.0;
  const std::vector<std::string> ids = {"a", "b", "c"};

  const EdgeLayer ab = edge_layer(layout, ids, {{"a", "b", 1.0}});
  const EdgeLayer ba = edge_layer(layout, ids, {{"b", "a", 1.0}});
  CHECK(ab.edges[0].layout_length == ba.edges[0].layout_length);

  // recompute from the serialized sidecar
  std::istringstream in(serialize(layout, ids));
  const NamedLayout reloaded = parse_layout(in);
  const double expect = std::hypot(
      reloaded.layout.positions(0, 0) - reloaded.layout.positions(1, 0),
      reloaded.layout.positions(0, 1) - reloaded.layout.positions(1, 1));
  CHECK(ab.edges[0].layout_length == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("edge file parsing") {
  std::istringstream in("a b 2.5\n# comment\nb c\n\nmalformed\n");
  const auto edges = parse_edge_file(in);
  REQUIRE(edges.size() == 2);
  CHECK(edges[0].weight == 2.5);
  CHECK(edges[1].weight == 1.0);
}

TEST_CASE("marker layer maps kinds to the fixed shapes") {
  const MarkerLayer layer = marker_layer(tiny_corpus());
  CHECK(layer.markers.at("Board.java") == MarkerShape::cross);
  CHECK(layer.markers.at("RuleThreeTest.java") == MarkerShape::cross);
  CHECK(layer.markers.at("game.properties") == MarkerShape::circle);
  CHECK(layer.markers.at("web.xml") == MarkerShape::square);
  CHECK(marker_layer(Corpus{}).markers.empty());
  CHECK(marker_shape_for(FileKind::other) == MarkerShape::dot);
}

TEST_CASE("compose rejects mismatched grid dimensions") {
  Dem dem;
  dem.spec = scenes::small_grid(32);
  dem.heights = Matrix(32, 32);
  Matrix bad_shading(16, 16);
  CHECK_THROWS(compose(std::move(dem), std::move(bad_shading), {}, {}, {}));
}

TEST_CASE("svg output is deterministic across runs") {
  CHECK(to_svg(scenes::full_scene()) == to_svg(scenes::full_scene()));
  CHECK(to_svg(scenes::empty_map()) == to_svg(scenes::empty_map()));
}

TEST_CASE("png output is deterministic across runs") {
  CHECK(to_png_bytes(scenes::full_scene()) == to_png_bytes(scenes::full_scene()));
  CHECK(to_png_bytes(scenes::single_peak(), 2) == to_png_bytes(scenes::single_peak(), 2));
}

TEST_CASE("png bytes form a valid png container") {
  const std::string png = to_png_bytes(scenes::single_peak());
  REQUIRE(png.size() > 8);
  CHECK(png.substr(1, 3) == "PNG");
  CHECK(png.find("IHDR") != std::string::npos);
  CHECK(png.find("IEND") != std::string::npos);
}

TEST_CASE("golden svg snapshots") {
  const std::string dir = GOLDEN_DIR;
  CHECK(to_svg(scenes::empty_map()) == read_file(dir + "/empty_map.svg"));
  CHECK(to_svg(scenes::single_peak()) == read_file(dir + "/single_peak.svg"));
  CHECK(to_svg(scenes::full_scene()) == read_file(dir + "/full_scene.svg"));
}

TEST_CASE("palette is a pure per-cell function of height and illumination") {
  Palette p;
  const Rgb a = p.color(0.5, 1.0, 0.8);
  const Rgb b = p.color(0.5, 1.0, 0.8);
  CHECK(a.r == b.r);
  CHECK(a.g == b.g);
  CHECK(a.b == b.b);
  // below sea level: ocean, unaffected by illumination
  const Rgb sea1 = p.color(0.001, 1.0, 0.1);
  const Rgb sea2 = p.color(0.001, 1.0, 0.9);
  CHECK(sea1.b == sea2.b);
}
