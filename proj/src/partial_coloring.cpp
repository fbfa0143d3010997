#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <random>

#include "nuqmc/balancing.hpp"

namespace nuqmc {

RoundingResult partial_coloring_round(const Hypergraph& h, std::span<const double> beta, std::uint64_t seed,
                                      const PartialColoringConfig& config) {
  detail::require(static_cast<Index>(beta.size()) == h.n(), "beta must have one entry per vertex");
  for (std::size_t i = 0; i < beta.size(); ++i) {
    detail::require(beta[i] >= 0.0 && beta[i] <= 1.0,
                    "beta[" + std::to_string(i) + "] outside [0,1] (values are not clamped)");
  }
  detail::require(config.step > 0.0 && config.cap_factor > 0.0 && config.iteration_cap >= 1,
                  "invalid partial-coloring configuration");

  const Index n = h.n();
  const Index m = h.m();
  const double delta = static_cast<double>(h.max_degree());
  const double log2m = std::log(2.0 * static_cast<double>(std::max<Index>(m, 1)));
  const double cap = config.cap_factor * std::sqrt(delta * log2m);

  std::vector<double> x(beta.begin(), beta.end());
  std::vector<char> floating(static_cast<std::size_t>(n), 0);
  Index num_floating = 0;
  for (Index v = 0; v < n; ++v) {
    if (x[static_cast<std::size_t>(v)] > 0.0 && x[static_cast<std::size_t>(v)] < 1.0) {
      floating[static_cast<std::size_t>(v)] = 1;
      ++num_floating;
    }
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  bool stalled = false;

  while (num_floating > 0 && !stalled) {
    const Index phase_start = num_floating;
    const std::vector<double> anchor = x;
    std::vector<char> tight(static_cast<std::size_t>(m), 0);

    std::vector<Index> free_vars;
    Eigen::MatrixXd basis;  // orthonormal basis of tight edge rows on free_vars
    bool dirty = true;

    std::int64_t it = 0;
    for (; it < config.iteration_cap && num_floating * 2 > phase_start; ++it) {
      if (dirty) {
        free_vars.clear();
        for (Index v = 0; v < n; ++v) {
          if (floating[static_cast<std::size_t>(v)]) free_vars.push_back(v);
        }
        std::vector<Index> local(static_cast<std::size_t>(n), -1);
        for (std::size_t k = 0; k < free_vars.size(); ++k) local[static_cast<std::size_t>(free_vars[k])] = static_cast<Index>(k);
        std::vector<Index> tight_edges;
        for (Index e = 0; e < m; ++e) {
          if (tight[static_cast<std::size_t>(e)]) tight_edges.push_back(e);
        }
        const auto f = static_cast<Index>(free_vars.size());
        Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(f, static_cast<Index>(tight_edges.size()));
        for (std::size_t k = 0; k < tight_edges.size(); ++k) {
          for (auto v : h.edge(tight_edges[k])) {
            if (local[static_cast<std::size_t>(v)] >= 0) rows(local[static_cast<std::size_t>(v)], static_cast<Index>(k)) = 1.0;
          }
        }
        if (rows.cols() == 0) {
          basis.resize(f, 0);
        } else {
          Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(rows);
          qr.setThreshold(1e-10);
          const Index rank = qr.rank();
          basis = Eigen::MatrixXd(qr.householderQ()).leftCols(rank);
        }
        if (basis.cols() >= f) {
          stalled = true;
          break;
        }
        dirty = false;
      }

      const auto f = static_cast<Index>(free_vars.size());
      Eigen::VectorXd g(f);
      for (Index k = 0; k < f; ++k) g[k] = gauss(rng);
      if (basis.cols() > 0) g -= basis * (basis.transpose() * g);

      for (Index k = 0; k < f; ++k) {
        const auto v = static_cast<std::size_t>(free_vars[static_cast<std::size_t>(k)]);
        x[v] += config.step * g[k];
        if (x[v] <= 0.0 || x[v] >= 1.0) {
          x[v] = x[v] <= 0.0 ? 0.0 : 1.0;
          floating[v] = 0;
          --num_floating;
          dirty = true;
        }
      }
      for (Index e = 0; e < m; ++e) {
        if (tight[static_cast<std::size_t>(e)]) continue;
        double drift = 0.0;
        for (auto v : h.edge(e)) drift += x[static_cast<std::size_t>(v)] - anchor[static_cast<std::size_t>(v)];
        if (std::abs(drift) >= cap) {
          tight[static_cast<std::size_t>(e)] = 1;
          dirty = true;
        }
      }
    }
    if (it >= config.iteration_cap) stalled = true;
  }

  RoundingResult out;
  out.engine = BalancingEngine::partial_coloring;
  out.guaranteed_bound = 10.0 * std::sqrt(2.0 * delta * log2m);
  out.lemma_bound = 5.0 * std::sqrt(2.0 * delta * log2m);

  std::vector<double> walked = x;
  if (num_floating > 0) {
    // Survivors are rounded by the deterministic engine; frozen coordinates
    // are already integral and stay fixed.
    RoundingResult rest = beck_fiala_round(h, walked);
    out.fallback = true;
    for (std::size_t v = 0; v < walked.size(); ++v) {
      if (floating[v]) walked[v] = static_cast<double>(rest.b[v]);
    }
  }
  out.b.resize(static_cast<std::size_t>(n));
  for (std::size_t v = 0; v < walked.size(); ++v) out.b[v] = walked[v] >= 0.5 ? 1 : 0;

  // Error of the walk alone: distance from beta to the fractional end state.
  out.walk_error = 0.0;
  for (Index e = 0; e < m; ++e) {
    double drift = 0.0;
    for (auto v : h.edge(e)) drift += x[static_cast<std::size_t>(v)] - beta[static_cast<std::size_t>(v)];
    out.walk_error = std::max(out.walk_error, std::abs(drift));
  }
  out.achieved_error = edge_error(h, beta, out.b);
  out.within_guaranteed = out.achieved_error <= out.guaranteed_bound;
  out.within_lemma = out.achieved_error <= out.lemma_bound;
  return out;
}

}  // namespace nuqmc
