#include "nuqmc/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>

#include "nuqmc/detail/critical_scan.hpp"

namespace nuqmc {

namespace {

detail::ScanProblem make_problem(const PointSet& ps, const BoxMeasure& mu, double budget) {
  detail::require(ps.dim() == mu.dim(), "point dimension " + std::to_string(ps.dim()) +
                                            " does not match measure dimension " + std::to_string(mu.dim()));
  detail::ScanProblem p;
  p.dim = ps.dim();
  p.positive = &ps.matrix();
  p.positive_den = static_cast<double>(ps.size());
  p.budget = budget;
  if (const PointSet* atoms = mu.atoms()) {
    p.negative = &atoms->matrix();
    p.negative_den = static_cast<double>(atoms->size());
  } else if (const auto* marginals = mu.product_marginals()) {
    p.marginals = marginals;
  } else {
    p.mass = [&mu](const Eigen::Ref<const Vector>& a, bool closed) { return mu.mass_unchecked(a, closed); };
  }
  return p;
}

DiscrepancyReport from_scan(const detail::ScanResult& r, DiscrepancyMode mode) {
  DiscrepancyReport out;
  out.value = r.value;
  out.witness = AnchoredBox{r.corner, r.closed};
  out.mode = mode;
  out.boxes_scanned = r.evaluated;
  return out;
}

Index count_in(const PointSet& ps, const AnchoredBox& box) {
  Index count = 0;
  for (Index i = 0; i < ps.size(); ++i) count += box_contains(box, ps.point(i)) ? 1 : 0;
  return count;
}

std::vector<double> axis_quantiles(const PointMatrix& pts, Index s, Index resolution) {
  std::vector<double> col(static_cast<std::size_t>(pts.rows()));
  for (Index i = 0; i < pts.rows(); ++i) col[static_cast<std::size_t>(i)] = pts(i, s);
  std::sort(col.begin(), col.end());
  std::vector<double> g{0.0};
  const auto n = static_cast<Index>(col.size());
  for (Index k = 1; k < resolution; ++k) g.push_back(col[static_cast<std::size_t>(k * n / resolution)]);
  g.push_back(1.0);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

}  // namespace

std::string to_string(DiscrepancyMode mode) {
  switch (mode) {
    case DiscrepancyMode::exact:
      return "exact";
    case DiscrepancyMode::estimate:
      return "estimate";
    case DiscrepancyMode::upper_bound:
      return "upper_bound";
  }
  return "unknown";
}

double default_budget() {
  if (const char* env = std::getenv("NUQMC_BUDGET")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0.0) return v;
  }
  return 1e8;
}

double local_discrepancy(const PointSet& ps, const BoxMeasure& mu, const AnchoredBox& box) {
  const double m = mass(mu, box);
  const Index count = count_in(ps, box);
  return std::abs(static_cast<double>(count) / static_cast<double>(ps.size()) - m);
}

DiscrepancyReport exact_star_discrepancy(const PointSet& ps, const BoxMeasure& mu, double budget) {
  return from_scan(detail::critical_scan(make_problem(ps, mu, budget)), DiscrepancyMode::exact);
}

DiscrepancyReport estimate_star_discrepancy(const PointSet& ps, const BoxMeasure& mu, std::int64_t trials,
                                            std::uint64_t seed) {
  detail::require(trials >= 1, "estimator needs trials >= 1");
  auto problem = make_problem(ps, mu, std::numeric_limits<double>::infinity());
  if (detail::scan_cost(problem) / static_cast<double>(ps.dim()) <= static_cast<double>(trials)) {
    return from_scan(detail::critical_scan(problem), DiscrepancyMode::estimate);
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<Index> pick(0, ps.size() - 1);
  const Index d = ps.dim();

  DiscrepancyReport best;
  best.value = -1.0;
  best.mode = DiscrepancyMode::estimate;
  AnchoredBox box{Vector(d), true};
  for (std::int64_t t = 0; t < trials; ++t) {
    for (Index s = 0; s < d; ++s) {
      const bool snap = unif(rng) < 0.5;
      const double u = unif(rng);
      const Index n = pick(rng);
      box.corner[s] = snap ? ps(n, s) : u;
    }
    for (bool closed : {true, false}) {
      box.closed = closed;
      const double v = local_discrepancy(ps, mu, box);
      if (v > best.value) {
        best.value = v;
        best.witness = box;
      }
      ++best.boxes_scanned;
    }
  }
  return best;
}

DiscrepancyReport upper_bound_star_discrepancy(const PointSet& ps, const BoxMeasure& mu, Index resolution) {
  detail::require(ps.dim() == mu.dim(), "point dimension does not match measure dimension");
  detail::require(resolution >= 1, "resolution must be >= 1");
  const Index d = ps.dim();
  const PointMatrix& pts = ps.matrix();

  std::vector<std::vector<double>> grid;
  std::vector<std::int64_t> sizes, strides(static_cast<std::size_t>(d));
  std::int64_t total = 1;
  for (Index s = 0; s < d; ++s) {
    grid.push_back(axis_quantiles(pts, s, resolution));
    sizes.push_back(static_cast<std::int64_t>(grid.back().size()));
  }
  for (Index s = d - 1; s >= 0; --s) {
    strides[static_cast<std::size_t>(s)] = total;
    total *= sizes[static_cast<std::size_t>(s)];
  }
  if (static_cast<double>(total) > 1e8) throw BudgetExceeded("upper-bound grid too large; lower the resolution");

  // closed_rank: first grid index k with x <= g[k]; open_rank: first k with x < g[k].
  std::vector<std::int64_t> closed_hist(static_cast<std::size_t>(total), 0);
  std::vector<std::int64_t> open_hist(static_cast<std::size_t>(total), 0);
  for (Index i = 0; i < pts.rows(); ++i) {
    std::int64_t fc = 0, fo = 0;
    bool open_inside = true;
    for (Index s = 0; s < d; ++s) {
      const auto& g = grid[static_cast<std::size_t>(s)];
      const auto kc = std::lower_bound(g.begin(), g.end(), pts(i, s)) - g.begin();
      const auto ko = std::upper_bound(g.begin(), g.end(), pts(i, s)) - g.begin();
      fc += kc * strides[static_cast<std::size_t>(s)];
      if (ko >= static_cast<std::ptrdiff_t>(g.size())) open_inside = false;
      fo += ko * strides[static_cast<std::size_t>(s)];
    }
    ++closed_hist[static_cast<std::size_t>(fc)];
    if (open_inside) ++open_hist[static_cast<std::size_t>(fo)];
  }
  for (Index s = 0; s < d; ++s) {
    const std::int64_t stride = strides[static_cast<std::size_t>(s)];
    const std::int64_t size = sizes[static_cast<std::size_t>(s)];
    for (std::int64_t j = 0; j < total; ++j) {
      if ((j / stride) % size != 0) {
        closed_hist[static_cast<std::size_t>(j)] += closed_hist[static_cast<std::size_t>(j - stride)];
        open_hist[static_cast<std::size_t>(j)] += open_hist[static_cast<std::size_t>(j - stride)];
      }
    }
  }

  std::vector<double> mass_closed(static_cast<std::size_t>(total));
  std::vector<double> mass_open(static_cast<std::size_t>(total));
  Vector corner(d);
  std::vector<std::int64_t> c(static_cast<std::size_t>(d), 0);
  for (std::int64_t j = 0; j < total; ++j) {
    for (Index s = 0; s < d; ++s) corner[s] = grid[static_cast<std::size_t>(s)][static_cast<std::size_t>(c[static_cast<std::size_t>(s)])];
    mass_closed[static_cast<std::size_t>(j)] = mu.mass_unchecked(corner, true);
    mass_open[static_cast<std::size_t>(j)] = mu.mass_unchecked(corner, false);
    for (Index s = d - 1; s >= 0; --s) {
      if (++c[static_cast<std::size_t>(s)] < sizes[static_cast<std::size_t>(s)]) break;
      c[static_cast<std::size_t>(s)] = 0;
    }
  }

  const double n = static_cast<double>(ps.size());
  std::int64_t diag = 0;
  for (auto st : strides) diag += st;
  DiscrepancyReport out;
  out.mode = DiscrepancyMode::upper_bound;
  out.value = 0.0;
  std::int64_t best_upper = total - 1;
  std::fill(c.begin(), c.end(), 0);
  for (std::int64_t l = 0; l < total; ++l) {
    bool has_cell = true;
    for (Index s = 0; s < d; ++s) has_cell = has_cell && c[static_cast<std::size_t>(s)] + 1 < sizes[static_cast<std::size_t>(s)];
    if (has_cell) {
      const std::int64_t u = l + diag;
      const double over = static_cast<double>(closed_hist[static_cast<std::size_t>(u)]) / n - mass_open[static_cast<std::size_t>(l)];
      const double under = mass_closed[static_cast<std::size_t>(u)] - static_cast<double>(open_hist[static_cast<std::size_t>(l)]) / n;
      const double v = std::max(over, under);
      if (v > out.value) {
        out.value = v;
        best_upper = u;
      }
      out.boxes_scanned += 1;
    }
    for (Index s = d - 1; s >= 0; --s) {
      if (++c[static_cast<std::size_t>(s)] < sizes[static_cast<std::size_t>(s)]) break;
      c[static_cast<std::size_t>(s)] = 0;
    }
  }
  out.value = std::min(out.value, 1.0);
  Vector w(d);
  for (Index s = 0; s < d; ++s) {
    const auto k = (best_upper / strides[static_cast<std::size_t>(s)]) % sizes[static_cast<std::size_t>(s)];
    w[s] = grid[static_cast<std::size_t>(s)][static_cast<std::size_t>(k)];
  }
  out.witness = AnchoredBox{w, true};
  return out;
}

double discrete_discrepancy(const PointSet& subset, const PointSet& full, double budget) {
  detail::require(subset.dim() == full.dim(), "subset and full set differ in dimension");
  detail::require(is_submultiset(subset, full), "subset is not contained in the full set (as multisets)");
  detail::ScanProblem p;
  p.dim = subset.dim();
  p.positive = &subset.matrix();
  p.positive_den = static_cast<double>(subset.size());
  p.negative = &full.matrix();
  p.negative_den = static_cast<double>(full.size());
  p.budget = budget;
  return static_cast<double>(subset.size()) * detail::critical_scan(p).value;
}

}  // namespace nuqmc
