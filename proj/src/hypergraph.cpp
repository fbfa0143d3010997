#include <algorithm>
#include <cmath>
#include <limits>

#include "nuqmc/balancing.hpp"

namespace nuqmc {

Hypergraph::Hypergraph(Index n, const std::vector<std::vector<Index>>& edges) : n_(n) {
  detail::require(n >= 0 && n < std::numeric_limits<std::int32_t>::max(), "vertex count out of range");
  for (const auto& e : edges) {
    std::vector<Index> sorted = e;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (Index v : sorted) {
      detail::require(v >= 0 && v < n, "edge member " + std::to_string(v) + " outside [0, n)");
      members_.push_back(static_cast<std::int32_t>(v));
    }
    edge_offsets_.push_back(static_cast<std::int64_t>(members_.size()));
  }
  index_vertices();
}

Hypergraph Hypergraph::from_csr(Index n, std::vector<std::int64_t> offsets, std::vector<std::int32_t> members) {
  detail::require(!offsets.empty() && offsets.front() == 0 &&
                      offsets.back() == static_cast<std::int64_t>(members.size()),
                  "malformed edge offsets");
  Hypergraph h;
  h.n_ = n;
  h.edge_offsets_ = std::move(offsets);
  h.members_ = std::move(members);
  for (auto v : h.members_) detail::require(v >= 0 && v < n, "edge member outside [0, n)");
  h.index_vertices();
  return h;
}

void Hypergraph::index_vertices() {
  vertex_offsets_.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (auto v : members_) ++vertex_offsets_[static_cast<std::size_t>(v) + 1];
  max_degree_ = 0;
  for (Index v = 0; v < n_; ++v) {
    max_degree_ = std::max<Index>(max_degree_, vertex_offsets_[static_cast<std::size_t>(v) + 1]);
    vertex_offsets_[static_cast<std::size_t>(v) + 1] += vertex_offsets_[static_cast<std::size_t>(v)];
  }
  incidence_.assign(members_.size(), 0);
  std::vector<std::int64_t> fill(vertex_offsets_.begin(), vertex_offsets_.end() - 1);
  for (Index e = 0; e < m(); ++e) {
    for (auto v : edge(e)) incidence_[static_cast<std::size_t>(fill[static_cast<std::size_t>(v)]++)] = static_cast<std::int32_t>(e);
  }
}

std::string to_string(BalancingEngine engine) {
  return engine == BalancingEngine::beck_fiala ? "beck_fiala" : "partial_coloring";
}

BalancingEngine parse_engine(const std::string& name) {
  if (name == "beck-fiala" || name == "beck_fiala") return BalancingEngine::beck_fiala;
  if (name == "partial" || name == "partial-coloring" || name == "partial_coloring") {
    return BalancingEngine::partial_coloring;
  }
  throw PreconditionError("unknown balancing engine '" + name + "' (expected beck-fiala or partial)");
}

double edge_error(const Hypergraph& h, std::span<const double> beta, std::span<const std::int8_t> b) {
  detail::require(static_cast<Index>(beta.size()) == h.n() && static_cast<Index>(b.size()) == h.n(),
                  "beta and b must have one entry per vertex");
  double worst = 0.0;
  for (Index e = 0; e < h.m(); ++e) {
    double sum = 0.0;
    for (auto v : h.edge(e)) sum += beta[static_cast<std::size_t>(v)] - static_cast<double>(b[static_cast<std::size_t>(v)]);
    worst = std::max(worst, std::abs(sum));
  }
  return worst;
}

RoundingResult round_with(BalancingEngine engine, const Hypergraph& h, std::span<const double> beta,
                          std::uint64_t seed, std::span<const Index> order) {
  if (engine == BalancingEngine::beck_fiala) return beck_fiala_round(h, beta, order);
  return partial_coloring_round(h, beta, seed);
}

}  // namespace nuqmc
