// Command-line front end: single-snapshot maps, evolution runs, and
// sidecar inspection.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "softmap/pipeline.hpp"

namespace {

int log_level() {
  const char* env = std::getenv("SOFTMAP_LOG");
  if (!env) return 1;
  try {
    return std::stoi(env);
  } catch (...) {
    return 1;
  }
}

void emit_warnings(const std::vector<std::string>& warnings) {
  if (log_level() < 1) return;
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

softmap::RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw softmap::ConfigError("cannot read config file " + path);
  return softmap::parse_config(in);
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k;
  std::optional<double> sigma;
  std::optional<std::string> grid;  // WxH
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::string> overlay_edges;
  std::optional<std::string> overlay_glyphs;

  void apply(softmap::RunConfig& cfg) const {
    if (seed) {
      cfg.mds.seed = *seed;
      cfg.seed_set = true;
    }
    if (k) cfg.k = *k;
    if (sigma) cfg.sigma = *sigma;
    if (grid) {
      const std::size_t x = grid->find('x');
      if (x == std::string::npos) throw softmap::ConfigError("--grid expects WxH");
      cfg.grid_width = std::stoul(grid->substr(0, x));
      cfg.grid_height = std::stoul(grid->substr(x + 1));
    }
    if (out) cfg.out_dir = *out;
    if (format) cfg.format = *format;
    if (overlay_edges) cfg.overlay_edges_path = *overlay_edges;
    if (overlay_glyphs) cfg.overlay_glyphs_path = *overlay_glyphs;
  }
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--seed", ov.seed, "RNG seed (overrides config)");
  cmd->add_option("--k", ov.k, "LSI rank");
  cmd->add_option("--sigma", ov.sigma, "Gaussian peak radius in pixels");
  cmd->add_option("--grid", ov.grid, "grid size as WxH");
  cmd->add_option("--out", ov.out, "output directory");
  cmd->add_option("--format", ov.format, "svg | png | both");
  cmd->add_option("--overlay-edges", ov.overlay_edges, "invocation edge file");
  cmd->add_option("--overlay-glyphs", ov.overlay_glyphs, "glyph rule file");
}

int run_inspect(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot read " << path << '\n';
    return 2;
  }
  std::string tag;
  in >> tag;
  in.seekg(0);
  if (tag == "layout") {
    softmap::NamedLayout nl = softmap::parse_layout(in);
    std::cout << "layout: " << nl.ids.size() << " entities, stress "
              << softmap::fmt9(nl.layout.stress) << ", seed " << nl.layout.seed << '\n';
    const double diam = softmap::layout_diameter(nl.layout.positions);
    std::cout << "diameter " << softmap::fmt9(diam) << '\n';
  } else if (tag == "lsi") {
    softmap::LsiSpace space = softmap::parse_lsi_space(in);
    std::cout << "lsi space: " << space.entity_vectors.rows() << " entities, "
              << space.term_factors.rows() << " terms, rank " << space.rank << '\n';
    std::cout << "singular values:";
    for (double v : space.singular_values) std::cout << ' ' << softmap::fmt9(v);
    std::cout << '\n';
  } else {
    std::cerr << "error: unrecognized sidecar format in " << path << '\n';
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"softmap: consistent 2-D cartographic maps of a codebase's vocabulary"};
  app.require_subcommand(1);

  std::string config_path, sidecar_path;
  Overrides ov;

  CLI::App* map_cmd = app.add_subcommand("map", "render one snapshot");
  map_cmd->add_option("config", config_path, "run config file")->required();
  add_override_flags(map_cmd, ov);

  CLI::App* evolve_cmd = app.add_subcommand("evolve", "render an evolution series");
  evolve_cmd->add_option("config", config_path, "run config file")->required();
  add_override_flags(evolve_cmd, ov);

  CLI::App* inspect_cmd = app.add_subcommand("inspect", "summarize a sidecar file");
  inspect_cmd->add_option("sidecar", sidecar_path, "layout.txt or space.txt")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (map_cmd->parsed()) {
      softmap::RunConfig cfg = load_config(config_path);
      ov.apply(cfg);
      softmap::MapArtifacts art = softmap::run_map(cfg);
      emit_warnings(art.snapshot.warnings);
      if (log_level() >= 1)
        std::cout << "map written to " << cfg.out_dir << " (stress "
                  << softmap::fmt9(art.snapshot.layout.stress) << ")\n";
      return 0;
    }
    if (evolve_cmd->parsed()) {
      softmap::RunConfig cfg = load_config(config_path);
      ov.apply(cfg);
      softmap::EvolutionResult evo = softmap::run_evolution(cfg);
      for (const auto& snap : evo.snapshots) emit_warnings(snap.warnings);
      if (log_level() >= 1)
        std::cout << evo.snapshots.size() << " snapshots written to " << cfg.out_dir << '\n';
      return 0;
    }
    if (inspect_cmd->parsed()) return run_inspect(sidecar_path);
  } catch (const softmap::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const softmap::IngestionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const softmap::EmptyVocabularyError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
