#pragma once

#include <cstdint>
#include <string>

#include "nuqmc/measures.hpp"

namespace nuqmc {

/// exact: the supremum itself. estimate: a lower bound (max over sampled
/// corners). upper_bound: a bracketing bound on a coarse grid, >= the
/// supremum.
enum class DiscrepancyMode { exact, estimate, upper_bound };

std::string to_string(DiscrepancyMode mode);

struct DiscrepancyReport {
  double value = 0.0;
  AnchoredBox witness;
  DiscrepancyMode mode = DiscrepancyMode::exact;
  std::int64_t boxes_scanned = 0;
};

/// Step budget for exact scans: NUQMC_BUDGET if set, else 1e8.
double default_budget();

/// |(1/N) #{x_n in box} - mu(box)|. For exact reports this reproduces the
/// value at the witness bit for bit.
double local_discrepancy(const PointSet& ps, const BoxMeasure& mu, const AnchoredBox& box);

/// D*_N(ps; mu) by a scan of the critical grid (distinct point coordinates,
/// atom coordinates of a discrete mu, and 1.0 per axis), evaluating every
/// corner as a closed box and as an open box. Cost is the grid size times d;
/// throws BudgetExceeded above `budget`.
DiscrepancyReport exact_star_discrepancy(const PointSet& ps, const BoxMeasure& mu,
                                         double budget = default_budget());

/// Lower bound: max local discrepancy over `trials` random corners whose
/// coordinates are either uniform or copied from a random point. Trials are
/// drawn sequentially, so for a fixed seed more trials never lower the value.
/// When `trials` covers the whole critical grid the grid is scanned instead.
DiscrepancyReport estimate_star_discrepancy(const PointSet& ps, const BoxMeasure& mu, std::int64_t trials,
                                            std::uint64_t seed);

/// Upper bound from a grid of `resolution` empirical quantiles per axis: for
/// a corner a inside the grid cell [l, u],
///   emp(a) - mu(a) <= emp[0,u] - mu[0,l)   and   mu(a) - emp(a) <= mu[0,u] - emp[0,l).
DiscrepancyReport upper_bound_star_discrepancy(const PointSet& ps, const BoxMeasure& mu, Index resolution);

/// max over anchored boxes of |#(subset in A) - (N/K) #(full in A)|, on the
/// count scale. `subset` must be a sub-multiset of `full`.
double discrete_discrepancy(const PointSet& subset, const PointSet& full, double budget = default_budget());

}  // namespace nuqmc
