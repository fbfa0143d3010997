#include <doctest.h>

#include "nuqmc/measures.hpp"
#include "nuqmc/verify.hpp"
#include "oracles.hpp"

using namespace nuqmc;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Region region(std::initializer_list<double> lo, std::initializer_list<double> hi) { return {vec(lo), vec(hi)}; }

}  // namespace

TEST_CASE("mass of simple boxes") {
  CHECK(mass(*make_uniform(2), make_box(vec({0.5, 0.5}))) == doctest::Approx(0.25).epsilon(1e-15));

  ProductMeasure pu({PowerCdf{2.0}, UniformCdf{}});
  CHECK(mass(pu, make_box(vec({0.5, 1.0}))) == doctest::Approx(0.25).epsilon(1e-15));

  RestrictionMeasure half({region({0.0, 0.0}, {0.5, 1.0})});
  CHECK(mass(half, make_box(vec({0.25, 1.0}))) == doctest::Approx(0.5).epsilon(1e-15));
  const std::vector<oracle::Box> boxes = {{{0.0, 0.0}, {0.5, 1.0}}};
  CHECK(oracle::riemann_volume_below(boxes, {0.25, 1.0}) / 0.5 == doctest::Approx(0.5).epsilon(2.0 / 200));

  PointMatrix atoms(2, 1);
  atoms << 0.25, 0.75;
  DiscreteMeasure disc{PointSet(atoms)};
  CHECK(mass(disc, make_box(vec({0.25}), true)) == 0.5);
  CHECK(mass(disc, make_box(vec({0.25}), false)) == 0.0);
}

TEST_CASE("mass rejects malformed boxes") {
  CHECK_THROWS_AS(mass(*make_uniform(2), make_box(vec({0.5}))), PreconditionError);
  CHECK_THROWS_AS(mass(*make_uniform(1), make_box(vec({1.5}))), PreconditionError);
  CHECK_THROWS_AS(ProductMeasure({PowerCdf{0.0}}), PreconditionError);
}

TEST_CASE("sampling statistics") {
  const PointSet u = sample(*make_uniform(1), 7, 10000);
  CHECK(u.matrix().col(0).mean() == doctest::Approx(0.5).epsilon(0.04));

  ProductMeasure p({PowerCdf{2.0}});
  const PointSet s = sample(p, 3, 10000);
  double below = 0;
  for (Index i = 0; i < s.size(); ++i) below += s(i, 0) <= 0.5 ? 1.0 : 0.0;
  CHECK(std::abs(below / 10000.0 - 0.25) <= 0.02);

  RestrictionMeasure box({region({0.2, 0.1}, {0.4, 0.7})});
  const PointSet r = sample(box, 11, 2000);
  for (Index i = 0; i < r.size(); ++i) {
    REQUIRE(r(i, 0) >= 0.2);
    REQUIRE(r(i, 0) <= 0.4);
    REQUIRE(r(i, 1) >= 0.1);
    REQUIRE(r(i, 1) <= 0.7);
  }
}

TEST_CASE("sampling is deterministic in the seed") {
  ProductMeasure p({PowerCdf{0.5}, UniformCdf{}});
  CHECK(sample(p, 5, 100).matrix() == sample(p, 5, 100).matrix());
  CHECK(sample(p, 5, 100).matrix() != sample(p, 6, 100).matrix());
}

TEST_CASE("validate accepts valid measures and flags a decreasing cdf") {
  CHECK(validate(*make_uniform(3)).passed());
  CHECK(validate(ProductMeasure({PowerCdf{0.5}, PowerCdf{3.0}})).passed());
  ProductMeasure bad({PiecewiseLinearCdf({0.0, 0.5, 0.7, 1.0}, {0.0, 0.8, 0.3, 1.0})});
  const ValidationReport rep = validate(bad);
  CHECK_FALSE(rep.monotone);
  CHECK_FALSE(rep.passed());
}

TEST_CASE("property: random measures are monotone and normalized") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    std::mt19937_64 rng(seed);
    const Index d = 1 + static_cast<Index>(seed % 3);
    const MeasurePtr mu = random_measure(rng, d);
    CHECK(std::abs(mu->mass_unchecked(Vector::Ones(d), true) - 1.0) <= 1e-12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
      Vector a(d), b(d);
      for (Index s = 0; s < d; ++s) {
        a[s] = u(rng);
        b[s] = a[s] + (1.0 - a[s]) * u(rng);
      }
      for (bool closed : {true, false}) REQUIRE(mu->mass_unchecked(a, closed) <= mu->mass_unchecked(b, closed) + 1e-12);
    }
  }
}

TEST_CASE("property: union volume matches inclusion-exclusion and the Riemann grid") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = 1 + trial % 2;
    std::vector<Region> boxes;
    std::vector<oracle::Box> plain;
    for (int b = 0; b < 3; ++b) {
      Region r{Vector(d), Vector(d)};
      oracle::Box o;
      for (Index s = 0; s < d; ++s) {
        const double x = u(rng), y = u(rng);
        r.lo[s] = std::min(x, y);
        r.hi[s] = std::max(x, y);
        o.lo.push_back(r.lo[s]);
        o.hi.push_back(r.hi[s]);
      }
      boxes.push_back(r);
      plain.push_back(o);
    }
    const BoxUnion omega(boxes);
    const double total = oracle::union_volume_below(plain, oracle::Corner(static_cast<std::size_t>(d), 1.0));
    CHECK(omega.volume() == doctest::Approx(total).epsilon(1e-12));
    for (int t = 0; t < 20; ++t) {
      oracle::Corner a(static_cast<std::size_t>(d));
      for (auto& x : a) x = u(rng);
      const Vector av = Eigen::Map<const Vector>(a.data(), d);
      const double exact = oracle::union_volume_below(plain, a);
      CHECK(std::abs(omega.volume_below(av) - exact) <= 1e-12);
      if (total > 0.05) {
        const RestrictionMeasure mu(boxes);
        CHECK(std::abs(mu.mass_unchecked(av, true) - oracle::riemann_volume_below(plain, a) / total) <= 2.0 / 200 / total);
      }
    }
  }
}

TEST_CASE("property: empirical measure of a large sample approaches the measure") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Index d = 1 + static_cast<Index>(seed % 2);
    std::mt19937_64 rng(seed);
    const MeasurePtr mu = random_measure(rng, d);
    if (mu->kind() == "discrete") continue;
    const Index k = 10000;
    DiscreteMeasure emp(sample(*mu, seed, k));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      Vector a(d);
      for (Index s = 0; s < d; ++s) a[s] = u(rng);
      worst = std::max(worst, std::abs(emp.mass_unchecked(a, true) - mu->mass_unchecked(a, true)));
    }
    CHECK(worst <= 15.0 * std::sqrt(static_cast<double>(d) / static_cast<double>(k)));
  }
}

TEST_CASE("appending a uniform coordinate multiplies the mass") {
  auto base = std::make_shared<ProductMeasure>(std::vector<Cdf1d>{PowerCdf{2.0}});
  AppendUniformMeasure nu(base);
  CHECK(nu.dim() == 2);
  CHECK(nu.mass_unchecked(vec({0.5, 0.5}), true) == doctest::Approx(0.125));
  REQUIRE(nu.product_marginals() != nullptr);
  auto restricted = std::make_shared<RestrictionMeasure>(std::vector<Region>{region({0.0}, {0.5})});
  AppendUniformMeasure nr(restricted);
  CHECK(nr.mass_unchecked(vec({0.25, 0.5}), true) == doctest::Approx(0.25));
}
