#include "nuqmc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace nuqmc {

namespace {

std::uint64_t instance_seed(std::uint64_t seed, Index i) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(i + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

PointSet random_points(std::mt19937_64& rng, Index n, Index d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 3);
  PointMatrix m(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index s = 0; s < d; ++s) {
      // Some coordinates sit on a coarse grid so ties occur.
      m(i, s) = pick(rng) == 0 ? std::floor(u(rng) * 9.0) / 8.0 : u(rng);
    }
  }
  return PointSet(std::move(m));
}

SuiteRow run_rows(const std::string& check, Index count, int jobs,
                  const std::function<std::pair<double, double>(Index)>& instance) {
  std::vector<std::pair<double, double>> out(static_cast<std::size_t>(count));
  std::vector<char> failed(static_cast<std::size_t>(count), 0);
  parallel_for(count, jobs, [&](Index i) {
    try {
      out[static_cast<std::size_t>(i)] = instance(i);
    } catch (const std::logic_error&) {
      failed[static_cast<std::size_t>(i)] = 1;
    }
  });
  SuiteRow row;
  row.check = check;
  row.instances = count;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto [measured, bound] = out[i];
    row.max_measured = std::max(row.max_measured, measured);
    row.bound = std::max(row.bound, bound);
    if (failed[i] || measured > bound) ++row.violations;
  }
  return row;
}

SuiteReport balancing_suite(std::uint64_t seed, int jobs) {
  SuiteReport rep{"balancing", {}};
  rep.rows.push_back(run_rows("beck-fiala |error| <= 2Delta-1", 500, jobs, [&](Index i) {
    std::mt19937_64 rng(instance_seed(seed, i));
    const Hypergraph h = random_hypergraph(rng, 200, 10);
    const auto beta = random_fractions(rng, h.n());
    const RoundingResult r = beck_fiala_round(h, beta);
    const double bound = std::max(2.0 * static_cast<double>(h.max_degree()) - 1.0, 0.0);
    return std::pair{edge_error(h, beta, r.b), bound};
  }));
  rep.rows.push_back(run_rows("partial |error| <= walk + fallback", 100, jobs, [&](Index i) {
    std::mt19937_64 rng(instance_seed(seed ^ 0x5A5A, i));
    const Hypergraph h = random_hypergraph(rng, 120, 10);
    const auto beta = random_fractions(rng, h.n());
    const RoundingResult r = partial_coloring_round(h, beta, instance_seed(seed, i));
    const double rest = r.fallback ? std::max(2.0 * static_cast<double>(h.max_degree()) - 1.0, 0.0) : 0.0;
    return std::pair{edge_error(h, beta, r.b), r.walk_error + rest + 1e-9};
  }));
  return rep;
}

SuiteReport measures_suite(std::uint64_t seed, int jobs) {
  SuiteReport rep{"measures", {}};
  rep.rows.push_back(run_rows("mass monotone, normalized", 40, jobs, [&](Index i) {
    std::mt19937_64 rng(instance_seed(seed, i));
    const Index d = 1 + static_cast<Index>(i % 3);
    const auto mu = random_measure(rng, d);
    const ValidationReport v = validate(*mu, instance_seed(seed, i));
    return std::pair{v.passed() ? 0.0 : 1.0, 0.0};
  }));
  return rep;
}

SuiteReport discrepancy_suite(std::uint64_t seed, int jobs) {
  SuiteReport rep{"discrepancy", {}};
  rep.rows.push_back(run_rows("estimate <= exact <= upper bound", 100, jobs, [&](Index i) {
    std::mt19937_64 rng(instance_seed(seed, i));
    const Index d = 1 + static_cast<Index>(i % 2);
    const auto mu = random_measure(rng, d);
    const PointSet ps = random_points(rng, 1 + static_cast<Index>(rng() % 64), d);
    const auto exact = exact_star_discrepancy(ps, *mu);
    const auto lower = estimate_star_discrepancy(ps, *mu, 200, instance_seed(seed, i));
    const auto upper = upper_bound_star_discrepancy(ps, *mu, 16);
    const double gap = std::max(lower.value - exact.value, exact.value - upper.value);
    return std::pair{std::max(gap, 0.0), 1e-12};
  }));
  rep.rows.push_back(run_rows("witness reproduces value", 100, jobs, [&](Index i) {
    std::mt19937_64 rng(instance_seed(seed ^ 0xD15C, i));
    const Index d = 1 + static_cast<Index>(i % 2);
    const auto mu = random_measure(rng, d);
    const PointSet ps = random_points(rng, 1 + static_cast<Index>(rng() % 64), d);
    const auto exact = exact_star_discrepancy(ps, *mu);
    return std::pair{std::abs(local_discrepancy(ps, *mu, exact.witness) - exact.value), 0.0};
  }));
  return rep;
}

SuiteReport dyadic_suite(std::uint64_t seed, int jobs) {
  SuiteReport rep{"dyadic", {}};
  const std::vector<std::pair<Index, Index>> cases = {{1, 8}, {1, 16}, {1, 32}, {1, 64},
                                                      {2, 8}, {2, 16}, {2, 32}, {2, 64}};
  rep.rows.push_back(run_rows("prefix error <= per-edge x (m+1)^d", static_cast<Index>(cases.size()), jobs,
                              [&](Index i) {
                                const auto [d, n] = cases[static_cast<std::size_t>(i)];
                                std::mt19937_64 rng(instance_seed(seed, i));
                                GridArray beta(std::vector<Index>(static_cast<std::size_t>(d), n));
                                std::uniform_real_distribution<double> u(0.0, 1.0);
                                for (auto& v : beta.values) v = u(rng);
                                const RoundedArray r = round_array(beta, BalancingEngine::beck_fiala);
                                return std::pair{max_prefix_error(beta, r.b).value, r.certificate.prefix_bound};
                              }));
  return rep;
}

SuiteReport selection_suite(std::uint64_t seed, int jobs) {
  SuiteReport rep{"selection", {}};
  std::vector<PointSet> inputs;
  std::vector<Index> ns;
  for (Index i = 0; i < 20; ++i) {
    std::mt19937_64 rng(instance_seed(seed, i));
    const Index d = 1 + i % 2;
    const Index n = Index{8} << (i % 4);  // 8..64
    const Index k = std::min<Index>(4096, n * n + static_cast<Index>(rng() % 512));
    inputs.push_back(sample(*make_uniform(d), instance_seed(seed, i), k));
    ns.push_back(n);
  }
  rep.rows.push_back(run_rows("discrete discrepancy <= certificate", 20, jobs, [&](Index i) {
    const auto r = select_subset(inputs[static_cast<std::size_t>(i)], ns[static_cast<std::size_t>(i)],
                                 BalancingEngine::beck_fiala, instance_seed(seed, i));
    const double dd = discrete_discrepancy(r.selected, inputs[static_cast<std::size_t>(i)]);
    return std::pair{dd, r.certificate.measured_box_bound};
  }));
  rep.rows.push_back(run_rows("slab boundary <= 2dK/N", 20, jobs, [&](Index i) {
    const PointSet& z = inputs[static_cast<std::size_t>(i)];
    const Index n = ns[static_cast<std::size_t>(i)];
    const CellDecomposition dec = decompose(z, n);
    std::mt19937_64 rng(instance_seed(seed ^ 0x51AB, i));
    std::uniform_int_distribution<Index> pick(0, n - 1);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      std::vector<Index> j(static_cast<std::size_t>(dec.d));
      for (auto& x : j) x = pick(rng);
      worst = std::max(worst, static_cast<double>(slab_boundary_count(dec, j)));
    }
    return std::pair{worst, 2.0 * static_cast<double>(dec.d * dec.k) / static_cast<double>(n)};
  }));
  return rep;
}

}  // namespace

Hypergraph random_hypergraph(std::mt19937_64& rng, Index max_n, Index max_degree) {
  const Index n = std::uniform_int_distribution<Index>(1, max_n)(rng);
  const Index delta = std::uniform_int_distribution<Index>(1, max_degree)(rng);
  const Index m = std::uniform_int_distribution<Index>(1, std::max<Index>(1, 2 * n))(rng);
  std::vector<std::vector<Index>> edges(static_cast<std::size_t>(m));
  std::vector<Index> ids(static_cast<std::size_t>(m));
  for (Index v = 0; v < n; ++v) {
    const Index deg = std::min(m, std::uniform_int_distribution<Index>(0, delta)(rng));
    for (Index e = 0; e < m; ++e) ids[static_cast<std::size_t>(e)] = e;
    for (Index k = 0; k < deg; ++k) {
      const Index j = std::uniform_int_distribution<Index>(k, m - 1)(rng);
      std::swap(ids[static_cast<std::size_t>(k)], ids[static_cast<std::size_t>(j)]);
      edges[static_cast<std::size_t>(ids[static_cast<std::size_t>(k)])].push_back(v);
    }
  }
  return Hypergraph(n, edges);
}

std::vector<double> random_fractions(std::mt19937_64& rng, Index n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> beta(static_cast<std::size_t>(n));
  for (auto& b : beta) {
    const double r = u(rng);
    b = r < 0.05 ? 0.0 : (r < 0.1 ? 1.0 : u(rng));
  }
  return beta;
}

MeasurePtr random_measure(std::mt19937_64& rng, Index d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (rng() % 4) {
    case 0:
      return make_uniform(d);
    case 1: {
      std::vector<Cdf1d> cdfs;
      for (Index s = 0; s < d; ++s) {
        if (rng() % 2 == 0) {
          cdfs.push_back(PowerCdf{0.25 + 3.0 * u(rng)});
        } else {
          const double t = 0.1 + 0.8 * u(rng);
          cdfs.push_back(PiecewiseLinearCdf({0.0, t, 1.0}, {0.0, u(rng), 1.0}));
        }
      }
      return std::make_shared<ProductMeasure>(std::move(cdfs));
    }
    case 2: {
      std::vector<Region> boxes;
      const int count = 1 + static_cast<int>(rng() % 3);
      for (int b = 0; b < count; ++b) {
        Region r{Vector(d), Vector(d)};
        for (Index s = 0; s < d; ++s) {
          const double a = u(rng), c = u(rng);
          r.lo[s] = std::min(a, c);
          r.hi[s] = std::max(std::max(a, c), r.lo[s] + 0.05);
          if (r.hi[s] > 1.0) {
            r.hi[s] = 1.0;
            r.lo[s] = 0.95;
          }
        }
        boxes.push_back(std::move(r));
      }
      return std::make_shared<RestrictionMeasure>(std::move(boxes));
    }
    default: {
      const Index k = 8 + static_cast<Index>(rng() % 17);
      PointMatrix atoms(k, d);
      for (Index i = 0; i < k; ++i)
        for (Index s = 0; s < d; ++s) atoms(i, s) = rng() % 3 == 0 ? std::floor(u(rng) * 5.0) / 4.0 : u(rng);
      return std::make_shared<DiscreteMeasure>(PointSet(std::move(atoms)));
    }
  }
}

void parallel_for(Index count, int jobs, const std::function<void(Index)>& body) {
  const Index workers = std::clamp<Index>(jobs, 1, std::max<Index>(count, 1));
  if (workers == 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  for (Index w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (Index i = w; i < count; i += workers) body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

bool SuiteReport::passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const SuiteRow& r) { return r.violations == 0; });
}

std::vector<std::string> suite_names() { return {"balancing", "measures", "discrepancy", "dyadic", "selection"}; }

SuiteReport run_suite(const std::string& name, std::uint64_t seed, int jobs) {
  if (name == "balancing") return balancing_suite(seed, jobs);
  if (name == "measures") return measures_suite(seed, jobs);
  if (name == "discrepancy") return discrepancy_suite(seed, jobs);
  if (name == "dyadic") return dyadic_suite(seed, jobs);
  if (name == "selection") return selection_suite(seed, jobs);
  throw PreconditionError("unknown suite '" + name + "'");
}

std::string format_table(const SuiteReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-40s %10s %16s %16s %10s\n", "check", "instances", "max measured", "bound",
                "violations");
  out << "suite " << report.suite << '\n' << line;
  for (const auto& r : report.rows) {
    std::snprintf(line, sizeof(line), "%-40s %10lld %16.6g %16.6g %10lld\n", r.check.c_str(),
                  static_cast<long long>(r.instances), r.max_measured, r.bound, static_cast<long long>(r.violations));
    out << line;
  }
  out << (report.passed() ? "PASS" : "FAIL") << '\n';
  return out.str();
}

}  // namespace nuqmc
