#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "softmap/lsi.hpp"
#include "softmap/matrix.hpp"
#include "softmap/rng.hpp"
#include "softmap/svd.hpp"
#include "softmap/text.hpp"

namespace softmap {

struct Layout {
  Matrix positions;  // n x 2, centroid at origin
  double stress = 0.0;
  std::uint64_t seed = 0;
  std::size_t iterations_run = 0;
  bool converged = false;
  std::vector<double> stress_trace;  // stress after each accepted step
};

struct MdsParams {
  std::size_t max_iterations = 2000;
  double stress_tolerance = 1e-7;
  double learning_rate = 0.1;
  std::uint64_t seed = 1;
  std::size_t restarts = 8;  // independent seeded inits; lowest stress wins
};

// Normalized Kruskal stress-1 with the least-squares optimal uniform scale
// applied to the dissimilarities. 0 iff layout distances are a uniform
// scaling of the input.
inline double stress(const Matrix& positions, const DissimilarityMatrix& d) {
  const std::size_t n = positions.rows();
  if (n != d.n) throw std::invalid_argument("stress: dimension mismatch");
  double p = 0.0, q = 0.0, r = 0.0;  // sum dd, sum delta*d, sum d^2... see below
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = positions(i, 0) - positions(j, 0);
      const double dy = positions(i, 1) - positions(j, 1);
      const double delta = std::sqrt(dx * dx + dy * dy);
      const double dij = d.entries(i, j);
      p += delta * delta;
      q += delta * dij;
      r += dij * dij;
    }
  }
  if (r == 0.0) return 0.0;  // all dissimilarities zero
  if (q == 0.0) return 1.0;  // collapsed layout against nonzero input
  const double c = q / r;    // optimal uniform scale for d
  double num = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = positions(i, 0) - positions(j, 0);
      const double dy = positions(i, 1) - positions(j, 1);
      const double delta = std::sqrt(dx * dx + dy * dy);
      const double e = delta - c * d.entries(i, j);
      num += e * e;
    }
  }
  return std::sqrt(num / (c * c * r));
}

namespace detail {

inline void validate_dissimilarity(const DissimilarityMatrix& d) {
  for (double v : d.entries.data())
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite dissimilarity");
}

// Gradient of f = P*R / Q^2 where P = sum delta^2, Q = sum delta*d,
// R = sum d^2. stress^2 = f - 1, so descending f descends stress.
inline void stress_gradient(const Matrix& positions, const DissimilarityMatrix& d,
                            Matrix& grad) {
  const std::size_t n = positions.rows();
  double p = 0.0, q = 0.0, r = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = positions(i, 0) - positions(j, 0);
      const double dy = positions(i, 1) - positions(j, 1);
      const double delta = std::sqrt(dx * dx + dy * dy);
      p += delta * delta;
      q += delta * d.entries(i, j);
      r += d.entries(i, j) * d.entries(i, j);
    }
  }
  grad = Matrix(n, 2);
  if (r == 0.0 || q == 0.0) return;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = positions(i, 0) - positions(j, 0);
      const double dy = positions(i, 1) - positions(j, 1);
      const double delta = std::sqrt(dx * dx + dy * dy);
      if (delta == 0.0) continue;
      const double dij = d.entries(i, j);
      // d f / d delta_ij
      const double df = 2.0 * r * (delta * q - p * dij) / (q * q * q);
      const double gx = df * dx / delta;
      const double gy = df * dy / delta;
      grad(i, 0) += gx;
      grad(i, 1) += gy;
      grad(j, 0) -= gx;
      grad(j, 1) -= gy;
    }
  }
}

inline void center_at_origin(Matrix& positions) {
  const std::size_t n = positions.rows();
  if (n == 0) return;
  double cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cx += positions(i, 0);
    cy += positions(i, 1);
  }
  cx /= n;
  cy /= n;
  for (std::size_t i = 0; i < n; ++i) {
    positions(i, 0) -= cx;
    positions(i, 1) -= cy;
  }
}

// Gradient descent with step-halving; the accepted-stress trace is
// non-increasing by construction.
inline void optimize(Matrix& positions, const DissimilarityMatrix& d,
                     const MdsParams& params, Layout& out) {
  double lr = params.learning_rate;
  double current = stress(positions, d);
  out.stress_trace.push_back(current);
  Matrix grad;
  for (std::size_t iter = 0; iter < params.max_iterations; ++iter) {
    stress_gradient(positions, d, grad);
    double gnorm = grad.frobenius_norm();
    if (gnorm == 0.0) {
      out.converged = true;
      break;
    }
    // scale step to layout size so the learning rate is dimensionless
    double span = positions.frobenius_norm();
    if (span == 0.0) span = 1.0;
    double step = lr * span / gnorm;
    bool accepted = false;
    for (int halving = 0; halving < 50; ++halving) {
      Matrix candidate = positions;
      for (std::size_t i = 0; i < candidate.rows(); ++i) {
        candidate(i, 0) -= step * grad(i, 0);
        candidate(i, 1) -= step * grad(i, 1);
      }
      const double s = stress(candidate, d);
      if (s <= current) {
        const double improvement = current - s;
        positions = std::move(candidate);
        current = s;
        out.stress_trace.push_back(current);
        accepted = true;
        lr = std::min(lr * 1.2, 1.0);
        if (improvement < params.stress_tolerance) {
          out.converged = true;
          out.iterations_run = iter + 1;
          out.stress = current;
          return;
        }
        break;
      }
      step *= 0.5;
      lr *= 0.5;
    }
    out.iterations_run = iter + 1;
    if (!accepted) {
      out.converged = true;
      break;
    }
  }
  out.stress = current;
}

}  // namespace detail

// Best similarity transform (rotation/reflection/uniform scale/translation)
// mapping src points onto dst in the least-squares sense.
struct SimilarityTransform {
  double scale = 1.0;
  double r00 = 1.0, r01 = 0.0, r10 = 0.0, r11 = 1.0;
  double tx = 0.0, ty = 0.0;

  void apply(Matrix& positions) const {
    for (std::size_t i = 0; i < positions.rows(); ++i) {
      const double x = positions(i, 0), y = positions(i, 1);
      positions(i, 0) = scale * (r00 * x + r01 * y) + tx;
      positions(i, 1) = scale * (r10 * x + r11 * y) + ty;
    }
  }
};

inline SimilarityTransform procrustes(const Matrix& src, const Matrix& dst) {
  if (src.rows() != dst.rows() || src.cols() != 2 || dst.cols() != 2)
    throw std::invalid_argument("procrustes: point sets must be n x 2 and equal size");
  const std::size_t n = src.rows();
  SimilarityTransform t;
  if (n == 0) return t;
  double sx = 0.0, sy = 0.0, dx = 0.0, dy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += src(i, 0);
    sy += src(i, 1);
    dx += dst(i, 0);
    dy += dst(i, 1);
  }
  sx /= n; sy /= n; dx /= n; dy /= n;
  Matrix m(2, 2);
  double src_ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ax = src(i, 0) - sx, ay = src(i, 1) - sy;
    const double bx = dst(i, 0) - dx, by = dst(i, 1) - dy;
    m(0, 0) += ax * bx;
    m(0, 1) += ax * by;
    m(1, 0) += ay * bx;
    m(1, 1) += ay * by;
    src_ss += ax * ax + ay * ay;
  }
  if (src_ss == 0.0) {
    t.tx = dx - sx;
    t.ty = dy - sy;
    return t;
  }
  SvdResult dec = svd(m);  // m = U S V^T; rotation = V U^T
  t.r00 = dec.v(0, 0) * dec.u(0, 0) + dec.v(0, 1) * dec.u(0, 1);
  t.r01 = dec.v(0, 0) * dec.u(1, 0) + dec.v(0, 1) * dec.u(1, 1);
  t.r10 = dec.v(1, 0) * dec.u(0, 0) + dec.v(1, 1) * dec.u(0, 1);
  t.r11 = dec.v(1, 0) * dec.u(1, 0) + dec.v(1, 1) * dec.u(1, 1);
  t.scale = (dec.values[0] + dec.values[1]) / src_ss;
  t.tx = dx - t.scale * (t.r00 * sx + t.r01 * sy);
  t.ty = dy - t.scale * (t.r10 * sx + t.r11 * sy);
  return t;
}

// Metric MDS by seeded random inits plus monotone gradient descent; the
// restart with the lowest final stress wins, which sidesteps most local
// minima of the stress surface.
inline Layout mds_layout(const DissimilarityMatrix& d, const MdsParams& params) {
  detail::validate_dissimilarity(d);
  const std::size_t n = d.n;
  if (n == 0) throw std::invalid_argument("mds over empty dissimilarity matrix");
  if (n == 1) {
    Layout out;
    out.seed = params.seed;
    out.positions = Matrix(1, 2);
    out.converged = true;
    out.stress_trace.push_back(0.0);
    return out;
  }
  SplitMix64 seeder(params.seed);
  Layout best;
  const std::size_t restarts = std::max<std::size_t>(1, params.restarts);
  for (std::size_t r = 0; r < restarts; ++r) {
    Layout trial;
    trial.seed = params.seed;
    SplitMix64 rng(seeder.next());
    trial.positions = Matrix(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
      trial.positions(i, 0) = rng.uniform();
      trial.positions(i, 1) = rng.uniform();
    }
    detail::optimize(trial.positions, d, params, trial);
    detail::center_at_origin(trial.positions);
    if (r == 0 || trial.stress < best.stress) best = std::move(trial);
  }
  return best;
}

// Correspondence from current entity index to an index in the prior layout.
struct AnchorPair {
  std::size_t current_index;
  std::size_t prior_index;
};

inline double layout_diameter(const Matrix& positions) {
  double best = 0.0;
  for (std::size_t i = 0; i < positions.rows(); ++i) {
    for (std::size_t j = i + 1; j < positions.rows(); ++j) {
      const double dx = positions(i, 0) - positions(j, 0);
      const double dy = positions(i, 1) - positions(j, 1);
      best = std::max(best, std::sqrt(dx * dx + dy * dy));
    }
  }
  return best;
}

// Layout anchored to a prior snapshot: shared entities start at their prior
// positions, new ones near their dissimilarity-nearest shared neighbors,
// and the final result is Procrustes-aligned back onto the prior.
inline Layout anchored_layout(const DissimilarityMatrix& d, const Layout& prior,
                              const std::vector<AnchorPair>& shared,
                              const MdsParams& params,
                              std::vector<std::string>* warnings = nullptr) {
  if (shared.empty()) {
    if (warnings) warnings->push_back("empty anchor correspondence; running unanchored");
    return mds_layout(d, params);
  }
  detail::validate_dissimilarity(d);
  const std::size_t n = d.n;
  Layout out;
  out.seed = params.seed;
  out.positions = Matrix(n, 2);

  std::vector<bool> is_shared(n, false);
  for (const AnchorPair& p : shared) {
    out.positions(p.current_index, 0) = prior.positions(p.prior_index, 0);
    out.positions(p.current_index, 1) = prior.positions(p.prior_index, 1);
    is_shared[p.current_index] = true;
  }
  const double diameter = layout_diameter(prior.positions);
  const double jitter = 0.01 * (diameter > 0.0 ? diameter : 1.0);
  SplitMix64 rng(params.seed);
  for (std::size_t i = 0; i < n; ++i) {
    if (is_shared[i]) continue;
    // centroid of the 3 nearest shared neighbors by dissimilarity
    std::vector<std::pair<double, std::size_t>> neigh;
    for (const AnchorPair& p : shared)
      neigh.emplace_back(d.entries(i, p.current_index), p.current_index);
    std::stable_sort(neigh.begin(), neigh.end());
    const std::size_t take = std::min<std::size_t>(3, neigh.size());
    double cx = 0.0, cy = 0.0;
    for (std::size_t t = 0; t < take; ++t) {
      cx += out.positions(neigh[t].second, 0);
      cy += out.positions(neigh[t].second, 1);
    }
    out.positions(i, 0) = cx / take + jitter * (rng.uniform() - 0.5);
    out.positions(i, 1) = cy / take + jitter * (rng.uniform() - 0.5);
  }

  detail::optimize(out.positions, d, params, out);

  // Align back onto the prior over the shared entities.
  Matrix src(shared.size(), 2), dst(shared.size(), 2);
  for (std::size_t i = 0; i < shared.size(); ++i) {
    src(i, 0) = out.positions(shared[i].current_index, 0);
    src(i, 1) = out.positions(shared[i].current_index, 1);
    dst(i, 0) = prior.positions(shared[i].prior_index, 0);
    dst(i, 1) = prior.positions(shared[i].prior_index, 1);
  }
  procrustes(src, dst).apply(out.positions);
  return out;
}

// --- sidecar ----------------------------------------------------------------

inline std::string serialize(const Layout& layout, const std::vector<std::string>& ids) {
  if (ids.size() != layout.positions.rows())
    throw std::invalid_argument("layout id count mismatch");
  std::ostringstream out;
  out << "layout " << ids.size() << ' ' << fmt9(layout.stress) << ' ' << layout.seed << '\n';
  for (std::size_t i = 0; i < ids.size(); ++i)
    out << ids[i] << ' ' << fmt9(layout.positions(i, 0)) << ' '
        << fmt9(layout.positions(i, 1)) << '\n';
  return out.str();
}

struct NamedLayout {
  std::vector<std::string> ids;
  Layout layout;
};

inline NamedLayout parse_layout(std::istream& in) {
  std::string tag;
  std::size_t n = 0;
  NamedLayout out;
  in >> tag >> n >> out.layout.stress >> out.layout.seed;
  if (tag != "layout" || !in) throw std::runtime_error("bad layout sidecar header");
  out.layout.positions = Matrix(n, 2);
  out.ids.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    in >> out.ids[i] >> out.layout.positions(i, 0) >> out.layout.positions(i, 1);
  if (!in) throw std::runtime_error("truncated layout sidecar");
  return out;
}

}  // namespace softmap
