#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nuqmc/point_set.hpp"

namespace nuqmc {

/// n vertices and m edges (sorted, duplicate-free vertex lists), stored in
/// compressed form in both directions.
class Hypergraph {
 public:
  Hypergraph() = default;
  Hypergraph(Index n, const std::vector<std::vector<Index>>& edges);

  /// Takes ownership of already sorted CSR edge data (offsets has m+1
  /// entries). Used by generators that produce edges in bulk.
  static Hypergraph from_csr(Index n, std::vector<std::int64_t> offsets, std::vector<std::int32_t> members);

  Index n() const { return n_; }
  Index m() const { return static_cast<Index>(edge_offsets_.size()) - 1; }
  Index max_degree() const { return max_degree_; }

  std::span<const std::int32_t> edge(Index e) const {
    return {members_.data() + edge_offsets_[static_cast<std::size_t>(e)],
            static_cast<std::size_t>(edge_offsets_[static_cast<std::size_t>(e) + 1] - edge_offsets_[static_cast<std::size_t>(e)])};
  }
  std::span<const std::int32_t> incident(Index v) const {
    return {incidence_.data() + vertex_offsets_[static_cast<std::size_t>(v)],
            static_cast<std::size_t>(vertex_offsets_[static_cast<std::size_t>(v) + 1] - vertex_offsets_[static_cast<std::size_t>(v)])};
  }
  Index degree(Index v) const { return static_cast<Index>(incident(v).size()); }
  std::int64_t incidences() const { return static_cast<std::int64_t>(members_.size()); }

 private:
  void index_vertices();

  Index n_ = 0;
  std::vector<std::int64_t> edge_offsets_{0};
  std::vector<std::int32_t> members_;
  std::vector<std::int64_t> vertex_offsets_;
  std::vector<std::int32_t> incidence_;
  Index max_degree_ = 0;
};

enum class BalancingEngine { beck_fiala, partial_coloring };

std::string to_string(BalancingEngine engine);
BalancingEngine parse_engine(const std::string& name);

struct RoundingResult {
  std::vector<std::int8_t> b;
  double achieved_error = 0.0;
  double guaranteed_bound = 0.0;
  BalancingEngine engine = BalancingEngine::beck_fiala;
  bool fallback = false;

  // Partial-coloring diagnostics: the sharper 5 sqrt(2 Delta log 2m) form,
  // the error of the walk before any fallback, and which bounds were met.
  double lemma_bound = 0.0;
  double walk_error = 0.0;
  bool within_guaranteed = true;
  bool within_lemma = true;
};

/// max over edges of |sum_{i in E} (beta_i - b_i)|.
double edge_error(const Hypergraph& h, std::span<const double> beta, std::span<const std::int8_t> b);

/// Deterministic floating-colors rounding. An edge stays active while more
/// than max_degree of its variables are fractional; each step moves along a
/// null-space direction of the active edges (restricted to a window of
/// consecutive fractional variables in `order`) until a variable reaches 0
/// or 1. Per-edge error is < max_degree <= 2 max_degree - 1.
///
/// `order` is a permutation of the vertices used to form windows; vertices
/// close in this order should share edges. Empty means identity.
RoundingResult beck_fiala_round(const Hypergraph& h, std::span<const double> beta,
                                std::span<const Index> order = {});

struct PartialColoringConfig {
  double step = 0.01;
  double cap_factor = 2.5;
  std::int64_t iteration_cap = 1'000'000;
};

/// Randomized edge-capped Gaussian walk in phases (each phase re-anchors the
/// caps and runs until half of its fractional variables are frozen). Stalls
/// or the iteration cap hand the survivors to beck_fiala_round.
RoundingResult partial_coloring_round(const Hypergraph& h, std::span<const double> beta, std::uint64_t seed,
                                      const PartialColoringConfig& config = {});

RoundingResult round_with(BalancingEngine engine, const Hypergraph& h, std::span<const double> beta,
                          std::uint64_t seed, std::span<const Index> order = {});

}  // namespace nuqmc
