#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nuqmc/balancing.hpp"

namespace nuqmc {

/// Dyadic cells of {1..N_hat}^d. A level is a vector (m_1..m_d) with
/// 0 <= m_s <= m; at that level the cells are the products of the rank
/// intervals {j 2^{m_s} + 1, ..., (j+1) 2^{m_s}}. Vertices are lattice points
/// in row-major order; edge ids run level by level (levels in lexicographic
/// order), cells inside a level in row-major order of j.
struct DyadicScheme {
  Index n = 0;
  Index n_hat = 0;
  Index m = 0;
  Index d = 0;
  std::vector<std::vector<Index>> levels;
  std::vector<std::int64_t> level_offset;

  std::int64_t lattice_points() const;
  std::int64_t edge_count() const;
  Index degree() const;

  /// Edge id of cell j (0-based cell coordinates) at levels[level].
  std::int64_t edge_id(std::size_t level, const std::vector<Index>& j) const;
};

struct DyadicBuild {
  DyadicScheme scheme;
  Hypergraph graph;
};

/// Refuses (BudgetExceeded) above 2^24 lattice points or 2^27 incidences.
DyadicBuild build_scheme(Index n, Index d);

/// Every anchored prefix {1..J_1} x ... x {1..J_d} (1-based J, 0 <= J_s <=
/// N_hat) as a disjoint union of cells, at most one per level.
std::vector<std::int64_t> decompose_prefix(const DyadicScheme& scheme, const std::vector<Index>& j);

/// Vertices sorted by interleaved coordinate bits; nearby vertices share
/// most of their cells.
std::vector<Index> morton_order(const DyadicScheme& scheme);

/// A d-dimensional row-major array of doubles.
struct GridArray {
  std::vector<Index> shape;
  std::vector<double> values;

  GridArray() = default;
  GridArray(std::vector<Index> shape, double fill = 0.0);

  Index dim() const { return static_cast<Index>(shape.size()); }
  std::int64_t size() const { return static_cast<std::int64_t>(values.size()); }
  std::int64_t flat(const std::vector<Index>& idx) const;
};

struct PrefixError {
  double value = 0.0;
  std::vector<Index> witness;  // 1-based J; all zeros for the empty prefix
};

/// max over anchored lattice prefixes of |sum (b - beta)|, by d-dimensional
/// cumulative sums.
PrefixError max_prefix_error(const GridArray& beta, const GridArray& b);

struct DyadicCertificate {
  BalancingEngine engine = BalancingEngine::beck_fiala;
  bool fallback = false;
  Index n = 0;
  Index d = 0;
  Index levels = 0;                  // (m+1)^d
  double per_edge_error = 0.0;       // achieved by the engine
  double engine_bound = 0.0;         // engine's guaranteed per-edge bound
  double prefix_bound = 0.0;         // per_edge_error * levels
  double guaranteed_prefix_bound = 0.0;  // engine_bound * levels
  double measured_prefix_error = 0.0;
  std::vector<Index> witness;
  double paper_constant = 0.0;       // 10 sqrt(d) (2 + log2 N)^((3d+1)/2), recorded only
};

struct RoundedArray {
  GridArray b;
  DyadicCertificate certificate;
};

/// Pads beta with zeros to N_hat per axis (N = largest side), rounds it over
/// the dyadic hypergraph and unpads. Throws std::logic_error if the bound
/// chain measured <= per-edge x levels (<= engine bound x levels for the
/// deterministic engine) is violated.
RoundedArray round_array(const GridArray& beta, BalancingEngine engine, std::uint64_t seed = 0);

/// 10 sqrt(d) (2 + log2 N)^((3d+1)/2).
double dyadic_paper_constant(Index n, Index d);

/// Fixture format: raw little-endian doubles in row-major order.
void write_array(const std::string& path, const GridArray& a);
GridArray read_array(const std::string& path, std::vector<Index> shape);

}  // namespace nuqmc
