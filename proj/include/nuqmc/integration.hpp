#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nuqmc/pipeline.hpp"

namespace nuqmc {

using ScalarFn = std::function<double(const Eigen::Ref<const Vector>&)>;

/// g restricted to a union of boxes: the integrand is g * 1_Omega and the
/// target is (1/lambda(Omega)) int_Omega g.
struct Integrand {
  ScalarFn g;
  BoxUnion omega;
  std::optional<double> sup_norm;
  std::string name;
};

/// Built-in g on [0,1]^d:
///   const      g = 1
///   linear-sum g = x_1 + ... + x_d
///   product    g = x_1 * ... * x_d
///   sin-sum    g = sin(pi x_1) + ... + sin(pi x_d)
Integrand builtin_integrand(const std::string& name, BoxUnion omega);
std::vector<std::string> builtin_names();

/// 2^d sup over anchored boxes A of |(1/N) #{x_n in Omega cap A} - lambda(Omega cap A)|,
/// by the exact scan (budget as for exact_star_discrepancy).
double omega_discrepancy(const PointSet& ps, const BoxUnion& omega, double budget = default_budget());

struct IntegrationEstimate {
  double value = 0.0;
  Index outside = 0;  // points not in Omega (the estimate is still the plain mean)
};

/// (1/N) sum g(x_n).
IntegrationEstimate integrate(const Integrand& f, const PointSet& ps);

/// (1/lambda(Omega)) int_Omega g by tensor Gauss-Legendre on every disjoint
/// cell of Omega; `nodes` per axis is 32 or 64.
double reference_integral(const Integrand& f, int nodes = 32);

enum class IntegrationMethod { constructed, monte_carlo };
std::string to_string(IntegrationMethod method);

struct IntegrationReport {
  double estimate = 0.0;
  double reference = 0.0;
  double abs_error = 0.0;
  Index n_points = 0;
  IntegrationMethod method = IntegrationMethod::constructed;
  std::uint64_t seed = 0;
  Index outside = 0;
};

/// For every N: one constructed set (seeded with cfg.seed) and one i.i.d.
/// sample from mu_Omega per seed.
std::vector<IntegrationReport> benchmark(const Integrand& f, const std::vector<Index>& n_list,
                                         const std::vector<std::uint64_t>& seeds, const ConstructionConfig& cfg);

/// CSV with header N,method,error,seed.
std::string benchmark_csv(const std::vector<IntegrationReport>& rows);

/// Least-squares slope of log(err) against log(n).
double loglog_slope(const std::vector<double>& n, const std::vector<double>& err);

/// A point of [0,1]^d outside Omega (midpoint of an uncovered grid cell),
/// or nothing when Omega is the whole cube.
std::optional<Vector> point_outside(const BoxUnion& omega);

/// The point set padded to M = ceil(N / lambda(Omega)) points with copies of
/// a point outside Omega (unchanged when Omega covers the cube).
PointSet pad_outside(const PointSet& ps, const BoxUnion& omega);

}  // namespace nuqmc
