#include "nuqmc/integration.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nuqmc/detail/critical_scan.hpp"

namespace nuqmc {

namespace {

// Full node/weight lists on [-1, 1] from the nonnegative half Boost stores.
template <unsigned Points>
std::pair<std::vector<double>, std::vector<double>> legendre_rule() {
  using rule = boost::math::quadrature::gauss<double, Points>;
  const auto& x = rule::abscissa();
  const auto& w = rule::weights();
  std::vector<double> nodes, weights;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] == 0.0) {
      nodes.push_back(0.0);
      weights.push_back(w[k]);
      continue;
    }
    nodes.push_back(x[k]);
    weights.push_back(w[k]);
    nodes.push_back(-x[k]);
    weights.push_back(w[k]);
  }
  return {nodes, weights};
}

}  // namespace

Integrand builtin_integrand(const std::string& name, BoxUnion omega) {
  const Index d = omega.dim();
  detail::require(d >= 1, "integrand needs a region of dimension >= 1");
  Integrand f;
  f.name = name;
  f.omega = std::move(omega);
  if (name == "const") {
    f.g = [](const Eigen::Ref<const Vector>&) { return 1.0; };
    f.sup_norm = 1.0;
  } else if (name == "linear-sum") {
    f.g = [](const Eigen::Ref<const Vector>& x) { return x.sum(); };
    f.sup_norm = static_cast<double>(d);
  } else if (name == "product") {
    f.g = [](const Eigen::Ref<const Vector>& x) { return x.prod(); };
    f.sup_norm = 1.0;
  } else if (name == "sin-sum") {
    f.g = [](const Eigen::Ref<const Vector>& x) {
      double s = 0.0;
      for (Index k = 0; k < x.size(); ++k) s += std::sin(std::numbers::pi * x[k]);
      return s;
    };
    f.sup_norm = static_cast<double>(d);
  } else {
    throw PreconditionError("unknown integrand '" + name + "' (expected const, linear-sum, product or sin-sum)");
  }
  return f;
}

std::vector<std::string> builtin_names() { return {"const", "linear-sum", "product", "sin-sum"}; }

double omega_discrepancy(const PointSet& ps, const BoxUnion& omega, double budget) {
  detail::require(ps.dim() == omega.dim(), "point dimension does not match region dimension");
  const Index d = ps.dim();
  std::vector<Index> inside;
  for (Index i = 0; i < ps.size(); ++i) {
    if (omega.contains(ps.point(i))) inside.push_back(i);
  }
  PointMatrix pos(static_cast<Index>(inside.size()), d);
  for (std::size_t k = 0; k < inside.size(); ++k) pos.row(static_cast<Index>(k)) = ps.point(inside[k]);

  detail::ScanProblem p;
  p.dim = d;
  p.positive = &pos;
  p.positive_den = static_cast<double>(ps.size());
  p.mass = [&omega](const Eigen::Ref<const Vector>& a, bool) { return omega.volume_below(a); };
  p.budget = budget;
  return std::ldexp(detail::critical_scan(p).value, static_cast<int>(d));
}

IntegrationEstimate integrate(const Integrand& f, const PointSet& ps) {
  detail::require(ps.dim() == f.omega.dim(), "point dimension does not match region dimension");
  IntegrationEstimate out;
  double sum = 0.0;
  for (Index i = 0; i < ps.size(); ++i) {
    const Vector x = ps.point(i).transpose();
    sum += f.g(x);
    if (!f.omega.contains(x)) ++out.outside;
  }
  out.value = sum / static_cast<double>(ps.size());
  return out;
}

double reference_integral(const Integrand& f, int nodes) {
  detail::require(nodes == 32 || nodes == 64, "reference quadrature supports 32 or 64 nodes per axis");
  const auto [x, w] = nodes == 32 ? legendre_rule<32>() : legendre_rule<64>();
  const Index d = f.omega.dim();
  const auto q = static_cast<Index>(x.size());
  const auto& lo = f.omega.cell_lo();
  const auto& hi = f.omega.cell_hi();

  double total = 0.0;
  Vector point(d);
  std::vector<Index> idx(static_cast<std::size_t>(d));
  for (Index c = 0; c < lo.rows(); ++c) {
    double cell_sum = 0.0;
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      double weight = 1.0;
      for (Index s = 0; s < d; ++s) {
        const double half = 0.5 * (hi(c, s) - lo(c, s));
        const auto k = static_cast<std::size_t>(idx[static_cast<std::size_t>(s)]);
        point[s] = lo(c, s) + half * (1.0 + x[k]);
        weight *= half * w[k];
      }
      cell_sum += weight * f.g(point);
      Index s = d - 1;
      for (; s >= 0; --s) {
        if (++idx[static_cast<std::size_t>(s)] < q) break;
        idx[static_cast<std::size_t>(s)] = 0;
      }
      if (s < 0) break;
    }
    total += cell_sum;
  }
  return total / f.omega.volume();
}

std::string to_string(IntegrationMethod method) {
  return method == IntegrationMethod::constructed ? "constructed" : "monte_carlo";
}

std::vector<IntegrationReport> benchmark(const Integrand& f, const std::vector<Index>& n_list,
                                         const std::vector<std::uint64_t>& seeds, const ConstructionConfig& cfg) {
  const RestrictionMeasure mu(f.omega.boxes());
  const double reference = reference_integral(f);
  std::vector<IntegrationReport> rows;
  auto report = [&](const PointSet& ps, IntegrationMethod method, std::uint64_t seed) {
    const IntegrationEstimate est = integrate(f, ps);
    IntegrationReport r;
    r.estimate = est.value;
    r.reference = reference;
    r.abs_error = std::abs(est.value - reference);
    r.n_points = ps.size();
    r.method = method;
    r.seed = seed;
    r.outside = est.outside;
    rows.push_back(r);
  };
  for (Index n : n_list) {
    report(construct_point_set(mu, n, cfg).points, IntegrationMethod::constructed, cfg.seed);
    for (auto s : seeds) report(sample(mu, s, n), IntegrationMethod::monte_carlo, s);
  }
  return rows;
}

std::string benchmark_csv(const std::vector<IntegrationReport>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "N,method,error,seed\n";
  for (const auto& r : rows) out << r.n_points << ',' << to_string(r.method) << ',' << r.abs_error << ',' << r.seed << '\n';
  return out.str();
}

double loglog_slope(const std::vector<double>& n, const std::vector<double>& err) {
  detail::require(n.size() == err.size() && n.size() >= 2, "slope needs at least two points");
  Eigen::MatrixXd a(static_cast<Index>(n.size()), 2);
  Eigen::VectorXd b(static_cast<Index>(n.size()));
  for (std::size_t k = 0; k < n.size(); ++k) {
    detail::require(n[k] > 0.0 && err[k] > 0.0, "slope needs positive values");
    a(static_cast<Index>(k), 0) = 1.0;
    a(static_cast<Index>(k), 1) = std::log(n[k]);
    b[static_cast<Index>(k)] = std::log(err[k]);
  }
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(b);
  return coef[1];
}

std::optional<Vector> point_outside(const BoxUnion& omega) {
  const Index d = omega.dim();
  std::vector<std::vector<double>> breaks(static_cast<std::size_t>(d));
  for (Index s = 0; s < d; ++s) {
    auto& br = breaks[static_cast<std::size_t>(s)];
    br = {0.0, 1.0};
    for (const auto& b : omega.boxes()) {
      br.push_back(b.lo[s]);
      br.push_back(b.hi[s]);
    }
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
  }
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  Vector mid(d);
  while (true) {
    for (Index s = 0; s < d; ++s) {
      const auto& br = breaks[static_cast<std::size_t>(s)];
      mid[s] = 0.5 * (br[idx[static_cast<std::size_t>(s)]] + br[idx[static_cast<std::size_t>(s)] + 1]);
    }
    if (!omega.contains(mid)) return mid;
    Index s = d - 1;
    for (; s >= 0; --s) {
      if (++idx[static_cast<std::size_t>(s)] + 1 < breaks[static_cast<std::size_t>(s)].size()) break;
      idx[static_cast<std::size_t>(s)] = 0;
    }
    if (s < 0) return std::nullopt;
  }
}

PointSet pad_outside(const PointSet& ps, const BoxUnion& omega) {
  const auto p = point_outside(omega);
  if (!p) return ps;
  const auto m = static_cast<Index>(std::ceil(static_cast<double>(ps.size()) / omega.volume()));
  PointMatrix out(std::max(m, ps.size()), ps.dim());
  out.topRows(ps.size()) = ps.matrix();
  for (Index r = ps.size(); r < out.rows(); ++r) out.row(r) = p->transpose();
  return PointSet(std::move(out));
}

}  // namespace nuqmc
