#include <doctest.h>

#include <numeric>

#include "nuqmc/discrepancy.hpp"
#include "nuqmc/verify.hpp"
#include "oracles.hpp"

using namespace nuqmc;

namespace {

PointSet points_1d(std::initializer_list<double> xs) {
  PointMatrix m(static_cast<Index>(xs.size()), 1);
  Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return PointSet(m);
}

oracle::MassFn uniform_mass() {
  return [](const oracle::Corner& a, bool) {
    double p = 1.0;
    for (double x : a) p *= x;
    return p;
  };
}

// Builds an independent mass function for each family used by random_measure.
struct OracleMeasure {
  oracle::MassFn mass;
  const PointMatrix* atoms = nullptr;
};

}  // namespace

TEST_CASE("exact discrepancy of small sets") {
  const auto u1 = make_uniform(1);
  CHECK(exact_star_discrepancy(points_1d({0.5}), *u1).value == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(exact_star_discrepancy(points_1d({0.25, 0.75}), *u1).value == doctest::Approx(0.25).epsilon(1e-15));

  PointMatrix corner(1, 2);
  corner << 1.0, 1.0;
  const auto r = exact_star_discrepancy(PointSet(corner), *make_uniform(2));
  CHECK(r.value == 1.0);
  CHECK_FALSE(r.witness.closed);

  const auto lattice = exact_star_discrepancy(points_1d({0.125, 0.375, 0.625, 0.875}), *u1);
  CHECK(lattice.value == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("all points at the origin have discrepancy one") {
  PointMatrix m = PointMatrix::Zero(5, 2);
  CHECK(exact_star_discrepancy(PointSet(m), *make_uniform(2)).value == 1.0);
}

TEST_CASE("exact scan refuses beyond the budget") {
  const PointSet ps = sample(*make_uniform(2), 1, 200);
  CHECK_THROWS_AS(exact_star_discrepancy(ps, *make_uniform(2), 1000.0), BudgetExceeded);
}

TEST_CASE("witness reproduces the reported value") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 30; ++t) {
    const Index d = 1 + t % 3;
    const MeasurePtr mu = random_measure(rng, d);
    const PointSet ps = sample(*make_uniform(d), static_cast<std::uint64_t>(t), 20);
    const auto r = exact_star_discrepancy(ps, *mu);
    CHECK(local_discrepancy(ps, *mu, r.witness) == r.value);
  }
}

TEST_CASE("property: exact scan equals naive enumeration") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const Index d = 1 + t % 2;
    const Index n = 1 + static_cast<Index>(rng() % 40);
    PointMatrix pts(n, d);
    for (Index i = 0; i < n; ++i)
      for (Index s = 0; s < d; ++s) pts(i, s) = rng() % 4 == 0 ? std::floor(u(rng) * 5.0) / 4.0 : u(rng);
    const PointSet ps(pts);

    const int family = t % 4;
    std::shared_ptr<BoxMeasure> mu;
    OracleMeasure om;
    PointMatrix atoms;
    if (family == 0) {
      mu = make_uniform(d);
      om.mass = uniform_mass();
    } else if (family == 1) {
      std::vector<double> theta;
      std::vector<Cdf1d> cdfs;
      for (Index s = 0; s < d; ++s) {
        theta.push_back(0.3 + 3.0 * u(rng));
        cdfs.push_back(PowerCdf{theta.back()});
      }
      mu = std::make_shared<ProductMeasure>(cdfs);
      om.mass = [theta](const oracle::Corner& a, bool) {
        double p = 1.0;
        for (std::size_t s = 0; s < a.size(); ++s) p *= std::pow(a[s], theta[s]);
        return p;
      };
    } else if (family == 2) {
      std::vector<Region> boxes;
      std::vector<oracle::Box> plain;
      for (int b = 0; b < 2; ++b) {
        Region r{Vector(d), Vector(d)};
        oracle::Box o;
        for (Index s = 0; s < d; ++s) {
          r.lo[s] = 0.5 * u(rng);
          r.hi[s] = r.lo[s] + 0.1 + 0.4 * u(rng);
          o.lo.push_back(r.lo[s]);
          o.hi.push_back(r.hi[s]);
        }
        boxes.push_back(r);
        plain.push_back(o);
      }
      mu = std::make_shared<RestrictionMeasure>(boxes);
      const double total = oracle::union_volume_below(plain, oracle::Corner(static_cast<std::size_t>(d), 1.0));
      om.mass = [plain, total](const oracle::Corner& a, bool) { return oracle::union_volume_below(plain, a) / total; };
    } else {
      const Index k = 3 + static_cast<Index>(rng() % 12);
      atoms.resize(k, d);
      for (Index i = 0; i < k; ++i)
        for (Index s = 0; s < d; ++s) atoms(i, s) = rng() % 2 == 0 ? pts(static_cast<Index>(rng() % n), s) : u(rng);
      mu = std::make_shared<DiscreteMeasure>(PointSet(atoms));
      om.atoms = &atoms;
      om.mass = [&atoms](const oracle::Corner& a, bool closed) {
        return static_cast<double>(oracle::count_in(atoms, a, closed)) / static_cast<double>(atoms.rows());
      };
    }
    const double expected = oracle::star_discrepancy(pts, om.mass, om.atoms);
    const double got = exact_star_discrepancy(ps, *mu).value;
    INFO("trial " << t << " family " << family);
    CHECK(std::abs(got - expected) <= 1e-12);
  }
}

TEST_CASE("property: permuting points leaves the exact value unchanged") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const Index d = 1 + t % 3;
    const MeasurePtr mu = random_measure(rng, d);
    const PointSet ps = sample(*make_uniform(d), static_cast<std::uint64_t>(t), 25);
    std::vector<Index> perm(25);
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    CHECK(exact_star_discrepancy(ps.subset(perm), *mu).value == exact_star_discrepancy(ps, *mu).value);
  }
}

TEST_CASE("estimator") {
  const auto u1 = make_uniform(1);
  const PointSet two = points_1d({0.25, 0.75});
  CHECK(estimate_star_discrepancy(two, *u1, 10000, 3).value >= 0.2);
  CHECK(estimate_star_discrepancy(two, *u1, 1, 3).value <= 0.25);
  const auto full = estimate_star_discrepancy(two, *u1, 1000000, 0);
  CHECK(full.value == exact_star_discrepancy(two, *u1).value);
  CHECK(full.mode == DiscrepancyMode::estimate);
}

TEST_CASE("property: more estimator trials never lower the value and never pass the exact value") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 20; ++t) {
    const Index d = 1 + t % 2;
    const MeasurePtr mu = random_measure(rng, d);
    const PointSet ps = sample(*make_uniform(d), static_cast<std::uint64_t>(t) + 100, 30);
    const double exact = exact_star_discrepancy(ps, *mu).value;
    double prev = 0.0;
    for (std::int64_t trials : {1, 4, 16, 64, 256}) {
      const double v = estimate_star_discrepancy(ps, *mu, trials, 12).value;
      CHECK(v >= prev);
      CHECK(v <= exact + 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("upper bound dominates the exact value") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    const Index d = 1 + t % 2;
    const MeasurePtr mu = random_measure(rng, d);
    const PointSet ps = sample(*mu, static_cast<std::uint64_t>(t), 50);
    const auto ub = upper_bound_star_discrepancy(ps, *mu, 8);
    CHECK(ub.mode == DiscrepancyMode::upper_bound);
    CHECK(ub.value >= exact_star_discrepancy(ps, *mu).value - 1e-12);
  }
}

TEST_CASE("discrete discrepancy") {
  const PointSet full = points_1d({0.2, 0.4, 0.6, 0.8});
  CHECK(discrete_discrepancy(full, full) == 0.0);
  const PointSet sub = points_1d({0.2, 0.6});
  const double expected = oracle::discrete_discrepancy(sub.matrix(), full.matrix());
  CHECK(expected == doctest::Approx(0.5));
  CHECK(discrete_discrepancy(sub, full) == doctest::Approx(expected).epsilon(1e-15));
  CHECK_THROWS_AS(discrete_discrepancy(points_1d({0.3}), full), PreconditionError);
  CHECK_THROWS_AS(PointSet(PointMatrix(0, 1)), PreconditionError);
}

TEST_CASE("property: discrete discrepancy equals naive enumeration") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 30; ++t) {
    const Index d = 1 + t % 2;
    const Index k = 4 + static_cast<Index>(rng() % 30);
    PointMatrix full(k, d);
    for (Index i = 0; i < k; ++i)
      for (Index s = 0; s < d; ++s) full(i, s) = static_cast<double>(rng() % 7) / 6.0;
    std::vector<Index> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), Index{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(static_cast<std::size_t>(1 + static_cast<Index>(rng() % static_cast<std::uint64_t>(k))));
    const PointSet fs(full);
    const PointSet sub = fs.subset(idx);
    CHECK(std::abs(discrete_discrepancy(sub, fs) - oracle::discrete_discrepancy(sub.matrix(), full)) <= 1e-12);
  }
}
