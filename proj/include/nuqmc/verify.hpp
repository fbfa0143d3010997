#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "nuqmc/integration.hpp"

namespace nuqmc {

/// Random hypergraph with 1 <= n <= max_n vertices, every vertex in at most
/// max_degree edges (each vertex joins a random number of random edges).
Hypergraph random_hypergraph(std::mt19937_64& rng, Index max_n, Index max_degree);

/// Fractional vector in [0,1]^n with some exact 0s and 1s mixed in.
std::vector<double> random_fractions(std::mt19937_64& rng, Index n);

/// One of uniform, product (power / piecewise marginals), restriction to a
/// random union of 1-3 boxes, or 8-24 discrete atoms.
MeasurePtr random_measure(std::mt19937_64& rng, Index d);

/// Calls body(i) for i in [0, count) on up to `jobs` threads. Callers write
/// into per-index slots, so results do not depend on the job count.
void parallel_for(Index count, int jobs, const std::function<void(Index)>& body);

struct SuiteRow {
  std::string check;
  Index instances = 0;
  double max_measured = 0.0;
  double bound = 0.0;       // largest bound seen (informational when per-instance)
  Index violations = 0;
};

struct SuiteReport {
  std::string suite;
  std::vector<SuiteRow> rows;
  bool passed() const;
};

/// Suites: balancing, measures, discrepancy, dyadic, selection.
std::vector<std::string> suite_names();
SuiteReport run_suite(const std::string& name, std::uint64_t seed = 0, int jobs = 1);
std::string format_table(const SuiteReport& report);

}  // namespace nuqmc
