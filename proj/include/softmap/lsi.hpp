#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "softmap/corpus.hpp"
#include "softmap/matrix.hpp"
#include "softmap/svd.hpp"
#include "softmap/text.hpp"

namespace softmap {

// Rank-k concept space of a term-document matrix. Entity vectors are the
// rows of U_k * Sigma_k, so cosine between them reflects concept weight.
struct LsiSpace {
  std::size_t rank = 0;
  std::vector<double> singular_values;  // non-increasing, > 0
  Matrix term_factors;                  // m x k (V_k)
  Matrix entity_vectors;                // n x k (U_k Sigma_k)
  std::string source_digest;
};

struct DissimilarityMatrix {
  std::size_t n = 0;
  Matrix entries;      // n x n symmetric, zero diagonal
  std::string metric;  // "cosine" | "pearson"
};

// Default rank heuristic; small systems get a small concept space.
inline std::size_t default_lsi_rank(std::size_t n, std::size_t m) {
  const std::size_t lo = std::min(n, m);
  const std::size_t heuristic = static_cast<std::size_t>(std::sqrt(static_cast<double>(lo))) + 5;
  return std::max<std::size_t>(1, std::min({static_cast<std::size_t>(25), heuristic, lo}));
}

// Truncated SVD of the term-document matrix. k above the numerical rank is
// clamped with a warning.
inline LsiSpace lsi_index(const TermDocumentMatrix& tdm, std::size_t k,
                          std::vector<std::string>* warnings = nullptr) {
  const std::size_t n = tdm.entries.rows();
  const std::size_t m = tdm.entries.cols();
  if (k == 0 || k > std::min(n, m))
    throw std::invalid_argument("lsi rank out of range");
  if (tdm.entries.frobenius_norm() == 0.0)
    throw std::invalid_argument("all-zero term-document matrix");

  SvdResult dec = truncated_svd(tdm.entries, k);
  // clamp to numerical rank
  const double cutoff = dec.values.empty() ? 0.0 : dec.values[0] * 1e-12;
  std::size_t rank = 0;
  while (rank < dec.values.size() && dec.values[rank] > cutoff) ++rank;
  if (rank == 0) throw std::invalid_argument("term-document matrix has rank 0");
  if (rank < k && warnings)
    warnings->push_back("lsi rank clamped from " + std::to_string(k) + " to " +
                        std::to_string(rank) + " (numerical rank)");

  LsiSpace space;
  space.rank = rank;
  space.singular_values.assign(dec.values.begin(), dec.values.begin() + rank);
  space.term_factors = Matrix(m, rank);
  space.entity_vectors = Matrix(n, rank);
  for (std::size_t c = 0; c < rank; ++c) {
    for (std::size_t i = 0; i < m; ++i) space.term_factors(i, c) = dec.v(i, c);
    for (std::size_t i = 0; i < n; ++i)
      space.entity_vectors(i, c) = dec.u(i, c) * dec.values[c];
  }
  space.source_digest = detail::fnv1a_hex(serialize(tdm));
  return space;
}

struct FoldInResult {
  std::vector<double> vector;  // length k
  bool vocabulary_disjoint = false;
};

// Standard LSI query projection q^T V_k; lands in the same geometry as the
// stored entity vectors.
inline FoldInResult fold_in(const LsiSpace& space, const std::vector<double>& raw_term_vector) {
  if (raw_term_vector.size() != space.term_factors.rows())
    throw std::invalid_argument("term vector length does not match space vocabulary");
  FoldInResult out;
  out.vector.assign(space.rank, 0.0);
  bool any = false;
  for (double v : raw_term_vector)
    if (v != 0.0) { any = true; break; }
  if (!any) {
    out.vocabulary_disjoint = true;
    return out;
  }
  for (std::size_t c = 0; c < space.rank; ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < raw_term_vector.size(); ++i)
      s += raw_term_vector[i] * space.term_factors(i, c);
    out.vector[c] = s;
  }
  return out;
}

inline double cosine_dissimilarity(const double* a, const double* b, std::size_t k) {
  const double na = norm2(a, k), nb = norm2(b, k);
  if (na == 0.0 || nb == 0.0) return 1.0;  // maximal ignorance
  return 1.0 - dot(a, b, k) / (na * nb);
}

inline double pearson_dissimilarity(const double* a, const double* b, std::size_t k) {
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < k; ++i) { ma += a[i]; mb += b[i]; }
  ma /= k;
  mb /= k;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 1.0;
  return 1.0 - sab / std::sqrt(saa * sbb);
}

// Pairwise dissimilarities between rows of a vector matrix.
inline DissimilarityMatrix dissimilarity_of_rows(const Matrix& vectors, const std::string& metric) {
  const std::size_t n = vectors.rows();
  const std::size_t k = vectors.cols();
  DissimilarityMatrix out;
  out.n = n;
  out.metric = metric;
  out.entries = Matrix(n, n);
  const bool pearson = metric == "pearson";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = pearson
                           ? pearson_dissimilarity(vectors.row_ptr(i), vectors.row_ptr(j), k)
                           : cosine_dissimilarity(vectors.row_ptr(i), vectors.row_ptr(j), k);
      out.entries(i, j) = d;
      out.entries(j, i) = d;
    }
  }
  return out;
}

inline DissimilarityMatrix dissimilarity(const LsiSpace& space, const std::string& metric = "cosine") {
  return dissimilarity_of_rows(space.entity_vectors, metric);
}

// --- sidecar ----------------------------------------------------------------

inline std::string serialize(const LsiSpace& space) {
  std::ostringstream out;
  out << "lsi " << space.entity_vectors.rows() << ' ' << space.term_factors.rows()
      << ' ' << space.rank << ' ' << space.source_digest << '\n';
  for (std::size_t i = 0; i < space.rank; ++i) {
    if (i) out << ' ';
    out << fmt9(space.singular_values[i]);
  }
  out << '\n';
  auto dump = [&out](const Matrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) {
        if (c) out << ' ';
        out << fmt9(m(r, c));
      }
      out << '\n';
    }
  };
  dump(space.entity_vectors);
  dump(space.term_factors);
  return out.str();
}

inline LsiSpace parse_lsi_space(std::istream& in) {
  std::string tag;
  std::size_t n = 0, m = 0, k = 0;
  LsiSpace space;
  in >> tag >> n >> m >> k >> space.source_digest;
  if (tag != "lsi" || !in) throw std::runtime_error("bad lsi sidecar header");
  space.rank = k;
  space.singular_values.resize(k);
  for (auto& v : space.singular_values) in >> v;
  space.entity_vectors = Matrix(n, k);
  for (auto& v : space.entity_vectors.data()) in >> v;
  space.term_factors = Matrix(m, k);
  for (auto& v : space.term_factors.data()) in >> v;
  if (!in) throw std::runtime_error("truncated lsi sidecar");
  return space;
}

}  // namespace softmap
