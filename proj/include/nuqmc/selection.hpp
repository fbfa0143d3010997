#pragma once

#include <cstdint>
#include <vector>

#include "nuqmc/dyadic.hpp"

namespace nuqmc {

/// Rank slabs of K points per coordinate and the scaled cell occupancies.
/// Ranks come from a stable sort by (coordinate, original index); rank r
/// (1-based) falls in slab i = ceil(r N / K), i.e. floor((i-1)K/N) < r <= floor(iK/N).
struct CellDecomposition {
  Index k = 0;
  Index n = 0;
  Index d = 0;
  std::vector<std::vector<std::int32_t>> slab;  // slab[s][point], 0-based
  std::vector<std::int64_t> cell;        // flat cell of each point (row-major over N^d)
  GridArray counts;
  GridArray beta;                        // N/(K+N) * counts
};

/// Throws PreconditionError unless 1 <= N and N^2 <= K.
CellDecomposition decompose(const PointSet& z, Index n);

/// #(G(J+1) \ G(J)) where G(J) holds the points whose slabs are <= J_s in
/// every coordinate (1-based J, 0 <= J_s < N).
std::int64_t slab_boundary_count(const CellDecomposition& dec, const std::vector<Index>& j);

struct SelectionCertificate {
  DyadicCertificate dyadic;
  double prefix_bound = 0.0;          // E: per-edge error * (m+1)^d
  double g_bound = 0.0;               // E + 1: cardinality gap of the raw selection
  double q_bound = 0.0;               // 2 (E + 1)
  double slab_bound = 0.0;            // 2 d K / N
  double box_bound = 0.0;             // 6 E + 4 d + 6
  double measured_box_bound = 0.0;    // same chain with the measured prefix error
  double paper_box_bound = 0.0;       // 60 sqrt(d) (2 + log2 N)^((3d+1)/2) + 4d + 6, recorded only
};

struct SelectionResult {
  PointSet selected;
  std::vector<Index> indices;  // into z, ascending
  Index raw_selected_count = 0;
  SelectionCertificate certificate;
};

/// Rounds the cell occupancies over the dyadic hypergraph, takes the lowest
/// index point of every cell rounded to 1, then drops the highest indices or
/// adds the lowest unselected indices until exactly N points remain.
SelectionResult select_subset(const PointSet& z, Index n, BalancingEngine engine, std::uint64_t seed = 0);

}  // namespace nuqmc
