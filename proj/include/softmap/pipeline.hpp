#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "softmap/corpus.hpp"
#include "softmap/labeling.hpp"
#include "softmap/lsi.hpp"
#include "softmap/mds.hpp"
#include "softmap/relief.hpp"
#include "softmap/render.hpp"
#include "softmap/thematic.hpp"

namespace softmap {

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::vector<std::string> snapshots;  // input roots, ordered
  std::vector<std::string> include_globs = {"**"};
  std::vector<std::string> exclude_globs;
  std::string weighting = "tf-idf";
  std::size_t min_doc_freq = 2;
  std::size_t k = 0;  // 0 = heuristic default
  MdsParams mds;
  std::size_t grid_width = 256;
  std::size_t grid_height = 256;
  double margin_fraction = 0.1;
  double sigma = 0.0;  // pixels; 0 = 4% of min grid dimension
  double azimuth_deg = 315.0;
  double altitude_deg = 45.0;
  double contour_interval = 0.0;  // 0 = max height / 8
  double label_font_size = 10.0;
  std::string overlay_edges_path;
  std::string overlay_glyphs_path;
  std::string out_dir = "out";
  std::string format = "both";  // svg | png | both
  bool seed_set = false;

  void validate() const {
    if (snapshots.empty()) throw ConfigError("config needs at least one snapshot root");
    if (!seed_set) throw ConfigError("config must set an explicit seed");
    if (format != "svg" && format != "png" && format != "both")
      throw ConfigError("format must be svg, png or both");
    if (weighting != "raw" && weighting != "tf-idf")
      throw ConfigError("weighting must be raw or tf-idf");
  }
};

// `key value` lines, # comments. Repeatable keys: snapshot, include, exclude.
inline RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  cfg.include_globs.clear();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::string value;
    std::getline(ls, value);
    const std::size_t start = value.find_first_not_of(" \t");
    value = start == std::string::npos ? "" : value.substr(start);
    while (!value.empty() && (value.back() == ' ' || value.back() == '\t' || value.back() == '\r'))
      value.pop_back();
    try {
      if (key == "snapshot") cfg.snapshots.push_back(value);
      else if (key == "include") cfg.include_globs.push_back(value);
      else if (key == "exclude") cfg.exclude_globs.push_back(value);
      else if (key == "weighting") cfg.weighting = value;
      else if (key == "min_doc_freq") cfg.min_doc_freq = std::stoul(value);
      else if (key == "k") cfg.k = std::stoul(value);
      else if (key == "seed") { cfg.mds.seed = std::stoull(value); cfg.seed_set = true; }
      else if (key == "max_iterations") cfg.mds.max_iterations = std::stoul(value);
      else if (key == "stress_tolerance") cfg.mds.stress_tolerance = std::stod(value);
      else if (key == "learning_rate") cfg.mds.learning_rate = std::stod(value);
      else if (key == "grid_width") cfg.grid_width = std::stoul(value);
      else if (key == "grid_height") cfg.grid_height = std::stoul(value);
      else if (key == "margin_fraction") cfg.margin_fraction = std::stod(value);
      else if (key == "sigma") cfg.sigma = std::stod(value);
      else if (key == "azimuth") cfg.azimuth_deg = std::stod(value);
      else if (key == "altitude") cfg.altitude_deg = std::stod(value);
      else if (key == "contour_interval") cfg.contour_interval = std::stod(value);
      else if (key == "font_size") cfg.label_font_size = std::stod(value);
      else if (key == "overlay_edges") cfg.overlay_edges_path = value;
      else if (key == "overlay_glyphs") cfg.overlay_glyphs_path = value;
      else if (key == "out") cfg.out_dir = value;
      else if (key == "format") cfg.format = value;
      else throw ConfigError("unknown config key '" + key + "' at line " + std::to_string(lineno));
    } catch (const std::invalid_argument&) {
      throw ConfigError("bad value for '" + key + "' at line " + std::to_string(lineno));
    }
  }
  if (cfg.include_globs.empty()) cfg.include_globs.push_back("**");
  return cfg;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

// Recomputes per-term idf from the corpus so later snapshots can be
// weighted against an earlier vocabulary.
inline std::vector<double> idf_per_term(const Corpus& corpus, const TermDocumentMatrix& tdm,
                                        const MatrixOptions& opts) {
  std::vector<double> idf(tdm.terms.size(), 1.0);
  if (tdm.weighting != "tf-idf") return idf;
  std::map<std::string, std::size_t> doc_freq;
  for (const Document& doc : corpus.documents) {
    std::string cleaned;
    std::string_view view = doc.text;
    if (!opts.include_comments_and_strings) {
      cleaned = strip_comments_and_strings(doc.text);
      view = cleaned;
    }
    std::map<std::string, bool> seen;
    for (const std::string& tok : tokenize(view, opts.tokenize)) seen[tok] = true;
    for (const auto& [term, _] : seen) ++doc_freq[term];
  }
  const double n = static_cast<double>(corpus.documents.size());
  for (std::size_t j = 0; j < tdm.terms.size(); ++j) {
    auto it = doc_freq.find(tdm.terms[j]);
    idf[j] = it != doc_freq.end() && it->second > 0 ? std::log(n / it->second) : 0.0;
  }
  return idf;
}

}  // namespace detail

struct SnapshotResult {
  Corpus corpus;
  std::vector<std::string> ids;
  Layout layout;
  GridSpec grid;
  double label_visibility_ratio = 0.0;
  std::vector<std::string> warnings;
};

struct MapArtifacts {
  SnapshotResult snapshot;
  LsiSpace space;
  TermDocumentMatrix tdm;
};

namespace detail {

// Everything downstream of a finished layout: terrain, labels, overlays,
// rendering, sidecars.
inline void render_snapshot(SnapshotResult& snap, const RunConfig& cfg,
                            const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  GridSpec spec;
  spec.width = cfg.grid_width;
  spec.height = cfg.grid_height;
  spec.margin_fraction = cfg.margin_fraction;
  spec = fit_bounds(spec, snap.layout.positions);
  spec.validate();
  snap.grid = spec;

  std::vector<double> sizes;
  sizes.reserve(snap.corpus.documents.size());
  for (const Document& d : snap.corpus.documents) sizes.push_back(d.kloc);

  const double sigma = cfg.sigma > 0.0 ? cfg.sigma : default_sigma(spec);
  Dem dem = build_dem(snap.layout.positions, sizes, spec, sigma);
  Matrix shading = hillshade(dem, cfg.azimuth_deg, cfg.altitude_deg);
  const double interval =
      cfg.contour_interval > 0.0 ? cfg.contour_interval : default_contour_interval(dem);
  ContourSet contour_set = contours(dem, interval);

  std::vector<EntityAnchor> anchors;
  std::vector<LabelCandidate> candidates;
  for (std::size_t i = 0; i < snap.ids.size(); ++i) {
    const auto [px, py] = spec.world_to_pixel(snap.layout.positions(i, 0),
                                              snap.layout.positions(i, 1));
    anchors.push_back({snap.ids[i], px, py});
    const Document& doc = snap.corpus.documents[i];
    candidates.push_back({doc.id, px, py,
                          measure_label(doc.display_name, cfg.label_font_size), doc.kloc});
  }
  std::vector<LabelBox> labels = place_labels(candidates);
  snap.label_visibility_ratio =
      labels.empty() ? 0.0
                     : static_cast<double>(visible_count(labels)) / labels.size();

  GlyphLayer glyphs;
  if (!cfg.overlay_glyphs_path.empty()) {
    std::ifstream in(cfg.overlay_glyphs_path);
    if (!in) throw ConfigError("cannot read glyph rule file " + cfg.overlay_glyphs_path);
    glyphs = glyph_layer(snap.corpus, parse_glyph_rules(in));
  }
  EdgeLayer edges;
  if (!cfg.overlay_edges_path.empty()) {
    std::ifstream in(cfg.overlay_edges_path);
    if (!in) throw ConfigError("cannot read edge file " + cfg.overlay_edges_path);
    edges = edge_layer(snap.layout, snap.ids, parse_edge_file(in), &snap.warnings);
  }
  MarkerLayer markers = marker_layer(snap.corpus);

  MapScene scene = compose(std::move(dem), std::move(shading), std::move(contour_set),
                           std::move(labels), std::move(anchors), std::move(glyphs),
                           std::move(markers), std::move(edges));
  scene.label_font_size = cfg.label_font_size;

  if (cfg.format == "svg" || cfg.format == "both")
    write_file(out_dir / "map.svg", to_svg(scene));
  if (cfg.format == "png" || cfg.format == "both")
    write_file(out_dir / "map.png", to_png_bytes(scene));
  write_file(out_dir / "layout.txt", serialize(snap.layout, snap.ids));
}

inline void write_report(const std::filesystem::path& path,
                         const std::vector<std::pair<std::string, std::string>>& entries) {
  std::ostringstream out;
  for (const auto& [k, v] : entries) out << k << ' ' << v << '\n';
  write_file(path, out.str());
}

}  // namespace detail

// Single-snapshot run: ingest -> matrix -> LSI -> MDS -> terrain -> map.
inline MapArtifacts run_map(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  cfg.validate();

  MapArtifacts art;
  SnapshotResult& snap = art.snapshot;

  IngestOptions ingest_opts;
  ingest_opts.include_globs = cfg.include_globs;
  ingest_opts.exclude_globs = cfg.exclude_globs;
  ingest_opts.warnings = &snap.warnings;
  snap.corpus = ingest(cfg.snapshots[0], "1", ingest_opts);
  for (const Document& d : snap.corpus.documents) snap.ids.push_back(d.id);

  MatrixOptions mopts;
  mopts.weighting = cfg.weighting;
  mopts.min_doc_freq = cfg.min_doc_freq;
  art.tdm = build_matrix(snap.corpus, mopts);

  const std::size_t n = art.tdm.entries.rows(), m = art.tdm.entries.cols();
  const std::size_t k = cfg.k > 0 ? std::min(cfg.k, std::min(n, m)) : default_lsi_rank(n, m);
  art.space = lsi_index(art.tdm, k, &snap.warnings);
  DissimilarityMatrix d = dissimilarity(art.space);
  snap.layout = mds_layout(d, cfg.mds);

  const fs::path out_dir(cfg.out_dir);
  detail::render_snapshot(snap, cfg, out_dir);
  detail::write_file(out_dir / "matrix.txt", serialize(art.tdm));
  detail::write_file(out_dir / "space.txt", serialize(art.space));
  detail::write_report(out_dir / "report.txt",
                       {{"entities", std::to_string(snap.corpus.documents.size())},
                        {"vocabulary", std::to_string(art.tdm.terms.size())},
                        {"k", std::to_string(art.space.rank)},
                        {"stress", fmt9(snap.layout.stress)},
                        {"label_visibility", fmt9(snap.label_visibility_ratio)},
                        {"warnings", std::to_string(snap.warnings.size())}});
  return art;
}

struct EvolutionResult {
  std::vector<SnapshotResult> snapshots;
  std::vector<double> median_displacement_ratio;  // per transition
};

// Evolution run: snapshot 1 as run_map; later snapshots fold into the
// first space and anchor on the previous layout.
inline EvolutionResult run_evolution(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  cfg.validate();
  if (cfg.snapshots.size() < 2) throw ConfigError("evolve needs at least 2 snapshots");

  EvolutionResult evo;
  const fs::path base_out(cfg.out_dir);

  RunConfig first = cfg;
  first.snapshots = {cfg.snapshots[0]};
  first.out_dir = (base_out / "snapshot-1").string();
  MapArtifacts art = run_map(first);
  evo.snapshots.push_back(art.snapshot);

  MatrixOptions mopts;
  mopts.weighting = cfg.weighting;
  mopts.min_doc_freq = cfg.min_doc_freq;
  const std::vector<double> idf = detail::idf_per_term(art.snapshot.corpus, art.tdm, mopts);

  std::ostringstream stability;
  stability << "snapshots " << cfg.snapshots.size() << '\n';

  for (std::size_t s = 1; s < cfg.snapshots.size(); ++s) {
    SnapshotResult snap;
    IngestOptions ingest_opts;
    ingest_opts.include_globs = cfg.include_globs;
    ingest_opts.exclude_globs = cfg.exclude_globs;
    ingest_opts.warnings = &snap.warnings;
    snap.corpus = ingest(cfg.snapshots[s], std::to_string(s + 1), ingest_opts);
    if (snap.corpus.documents.empty()) throw EmptyVocabularyError("snapshot has no documents");
    for (const Document& d : snap.corpus.documents) snap.ids.push_back(d.id);

    Matrix folded(snap.corpus.documents.size(), art.space.rank);
    for (std::size_t i = 0; i < snap.corpus.documents.size(); ++i) {
      const std::vector<double> q =
          weighted_term_vector(art.tdm, idf, snap.corpus.documents[i].text, mopts);
      FoldInResult fi = fold_in(art.space, q);
      if (fi.vocabulary_disjoint)
        snap.warnings.push_back("vocabulary-disjoint entity: " + snap.corpus.documents[i].id);
      for (std::size_t c = 0; c < art.space.rank; ++c) folded(i, c) = fi.vector[c];
    }
    DissimilarityMatrix d = dissimilarity_of_rows(folded, "cosine");

    const SnapshotResult& prev = evo.snapshots.back();
    std::map<std::string, std::size_t> prev_index;
    for (std::size_t i = 0; i < prev.ids.size(); ++i) prev_index[prev.ids[i]] = i;
    std::vector<AnchorPair> shared;
    for (std::size_t i = 0; i < snap.ids.size(); ++i) {
      auto it = prev_index.find(snap.ids[i]);
      if (it != prev_index.end()) shared.push_back({i, it->second});
    }
    if (shared.empty())
      snap.warnings.push_back("zero entity overlap with previous snapshot; unanchored layout");
    snap.layout = anchored_layout(d, prev.layout, shared, cfg.mds, &snap.warnings);

    const fs::path out_dir = base_out / ("snapshot-" + std::to_string(s + 1));
    detail::render_snapshot(snap, cfg, out_dir);

    // stability accounting over shared entities
    const double diag = std::hypot(snap.grid.xmax - snap.grid.xmin,
                                   snap.grid.ymax - snap.grid.ymin);
    std::vector<double> ratios;
    stability << "transition " << s << ' ' << s + 1 << ' ' << shared.size() << " shared\n";
    for (const AnchorPair& p : shared) {
      const double dx = snap.layout.positions(p.current_index, 0) -
                        prev.layout.positions(p.prior_index, 0);
      const double dy = snap.layout.positions(p.current_index, 1) -
                        prev.layout.positions(p.prior_index, 1);
      const double ratio = diag > 0.0 ? std::hypot(dx, dy) / diag : 0.0;
      ratios.push_back(ratio);
      stability << "displacement " << snap.ids[p.current_index] << ' ' << fmt9(ratio) << '\n';
    }
    double median = 0.0;
    if (!ratios.empty()) {
      std::sort(ratios.begin(), ratios.end());
      median = ratios.size() % 2 ? ratios[ratios.size() / 2]
                                 : 0.5 * (ratios[ratios.size() / 2 - 1] + ratios[ratios.size() / 2]);
    }
    evo.median_displacement_ratio.push_back(median);
    stability << "median_displacement_ratio " << fmt9(median) << '\n';
    evo.snapshots.push_back(std::move(snap));
  }
  detail::write_file(base_out / "stability.txt", stability.str());
  return evo;
}

}  // namespace softmap
