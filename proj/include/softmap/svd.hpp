#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "softmap/matrix.hpp"

namespace softmap {

struct SvdResult {
  Matrix u;                       // n x r, orthonormal columns
  std::vector<double> values;     // r, non-increasing, >= 0
  Matrix v;                       // m x r, orthonormal columns
};

namespace detail {

// Forces the largest-magnitude component of each column of u non-negative,
// flipping the matching column of v. Ties break on the first occurrence,
// which fixes the result across platforms.
inline void canonicalize_signs(Matrix& u, Matrix& v) {
  for (std::size_t c = 0; c < u.cols(); ++c) {
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t r = 0; r < u.rows(); ++r) {
      const double a = std::fabs(u(r, c));
      if (a > best) {
        best = a;
        arg = r;
      }
    }
    if (u(arg, c) < 0.0) {
      for (std::size_t r = 0; r < u.rows(); ++r) u(r, c) = -u(r, c);
      for (std::size_t r = 0; r < v.rows(); ++r) v(r, c) = -v(r, c);
    }
  }
}

// One-sided Jacobi on the columns of work (requires cols <= rows for good
// convergence; the caller transposes when needed). Columns of work end up
// mutually orthogonal; their norms are the singular values.
inline SvdResult jacobi_svd_tall(const Matrix& a) {
  const std::size_t n = a.rows();
  const std::size_t m = a.cols();
  Matrix work = a;
  Matrix v = Matrix::identity(m);

  const double tol = 1e-14;
  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < m; ++p) {
      for (std::size_t q = p + 1; q < m; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double wp = work(i, p), wq = work(i, q);
          alpha += wp * wp;
          beta += wq * wq;
          gamma += wp * wq;
        }
        if (std::fabs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) /
                         (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const double wp = work(i, p), wq = work(i, q);
          work(i, p) = c * wp - s * wq;
          work(i, q) = s * wp + c * wq;
        }
        for (std::size_t i = 0; i < m; ++i) {
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> norms(m);
  for (std::size_t c = 0; c < m; ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += work(i, c) * work(i, c);
    norms[c] = std::sqrt(s);
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  SvdResult out;
  out.u = Matrix(n, m);
  out.v = Matrix(m, m);
  out.values.resize(m);
  for (std::size_t c = 0; c < m; ++c) {
    const std::size_t src = order[c];
    out.values[c] = norms[src];
    if (norms[src] > 0.0) {
      for (std::size_t i = 0; i < n; ++i) out.u(i, c) = work(i, src) / norms[src];
    }
    for (std::size_t i = 0; i < m; ++i) out.v(i, c) = v(i, src);
  }
  canonicalize_signs(out.u, out.v);
  return out;
}

// Modified Gram-Schmidt, in place on the columns of q.
inline void orthonormalize_columns(Matrix& q) {
  const std::size_t n = q.rows();
  for (std::size_t c = 0; c < q.cols(); ++c) {
    for (std::size_t p = 0; p < c; ++p) {
      double d = 0.0;
      for (std::size_t i = 0; i < n; ++i) d += q(i, p) * q(i, c);
      for (std::size_t i = 0; i < n; ++i) q(i, c) -= d * q(i, p);
    }
    double nn = 0.0;
    for (std::size_t i = 0; i < n; ++i) nn += q(i, c) * q(i, c);
    nn = std::sqrt(nn);
    if (nn > 1e-300)
      for (std::size_t i = 0; i < n; ++i) q(i, c) /= nn;
  }
}

inline double rng_uniform(std::uint64_t& state) {
  // splitmix64; plain and bit-identical everywhere
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z = z ^ (z >> 31);
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

// Seeded subspace iteration for matrices too large for Jacobi sweeps.
// Iterates Q <- orth(A^T A Q) until the Ritz values settle, then resolves
// the small projected problem with Jacobi.
inline SvdResult subspace_svd(const Matrix& a, std::size_t k) {
  const std::size_t n = a.rows();
  const std::size_t m = a.cols();
  const std::size_t block = std::min(std::min(n, m), k + 8);
  Matrix at = a.transposed();

  std::uint64_t rng = 0x5eed5eed5eed5eedULL;
  Matrix q(m, block);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < block; ++j) q(i, j) = rng_uniform(rng) - 0.5;
  orthonormalize_columns(q);

  std::vector<double> prev(block, 0.0);
  for (int iter = 0; iter < 300; ++iter) {
    Matrix aq = a * q;        // n x block
    Matrix ataq = at * aq;    // m x block
    std::vector<double> ritz(block);
    for (std::size_t j = 0; j < block; ++j) {
      double num = 0.0;
      for (std::size_t i = 0; i < m; ++i) num += q(i, j) * ataq(i, j);
      ritz[j] = std::sqrt(std::max(0.0, num));
    }
    q = ataq;
    orthonormalize_columns(q);
    double delta = 0.0;
    for (std::size_t j = 0; j < std::min(block, k); ++j)
      delta = std::max(delta, std::fabs(ritz[j] - prev[j]) / (ritz[j] + 1e-300));
    prev = ritz;
    if (iter > 2 && delta < 1e-10) break;
  }

  // Project and finish exactly on the small block.
  Matrix aq = a * q;  // n x block
  SvdResult small = jacobi_svd_tall(aq);
  SvdResult out;
  out.u = std::move(small.u);
  out.values = std::move(small.values);
  out.v = q * small.v;  // m x block
  canonicalize_signs(out.u, out.v);
  return out;
}

}  // namespace detail

// Full SVD A = U diag(s) V^T with the deterministic sign convention.
inline SvdResult svd(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) throw std::invalid_argument("svd of empty matrix");
  if (a.cols() <= a.rows()) return detail::jacobi_svd_tall(a);
  SvdResult t = detail::jacobi_svd_tall(a.transposed());
  SvdResult out;
  out.u = std::move(t.v);
  out.values = std::move(t.values);
  out.v = std::move(t.u);
  detail::canonicalize_signs(out.u, out.v);
  return out;
}

// Rank-k truncation. Jacobi at desk scale, seeded subspace iteration above.
inline SvdResult truncated_svd(const Matrix& a, std::size_t k) {
  const std::size_t min_dim = std::min(a.rows(), a.cols());
  if (k == 0 || k > min_dim) throw std::invalid_argument("invalid truncation rank");
  SvdResult full = min_dim <= 500 ? svd(a) : detail::subspace_svd(a, k);
  const std::size_t kept = std::min(k, full.values.size());
  SvdResult out;
  out.values.assign(full.values.begin(), full.values.begin() + kept);
  out.u = Matrix(full.u.rows(), kept);
  out.v = Matrix(full.v.rows(), kept);
  for (std::size_t c = 0; c < kept; ++c) {
    for (std::size_t i = 0; i < out.u.rows(); ++i) out.u(i, c) = full.u(i, c);
    for (std::size_t i = 0; i < out.v.rows(); ++i) out.v(i, c) = full.v(i, c);
  }
  return out;
}

}  // namespace softmap
