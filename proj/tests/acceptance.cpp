// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "nuqmc/integration.hpp"
#include "nuqmc/verify.hpp"
#include "oracles.hpp"

using namespace nuqmc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::shared_ptr<ProductMeasure> power2() { return std::make_shared<ProductMeasure>(std::vector<Cdf1d>{PowerCdf{2.0}}); }

Region box(std::vector<double> lo, std::vector<double> hi) {
  return {Eigen::Map<Vector>(lo.data(), static_cast<Index>(lo.size())),
          Eigen::Map<Vector>(hi.data(), static_cast<Index>(hi.size()))};
}

Outcome beck_fiala_guarantee() {
  Index edges = 0, bad = 0;
  double worst_ratio = 0.0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    std::mt19937_64 rng(seed);
    const Hypergraph h = random_hypergraph(rng, 200, 10);
    const auto beta = random_fractions(rng, h.n());
    const RoundingResult r = beck_fiala_round(h, beta);
    const double bound = std::max(2.0 * static_cast<double>(h.max_degree()) - 1.0, 0.0);
    for (Index e = 0; e < h.m(); ++e) {
      double s = 0.0;
      for (auto v : h.edge(e)) s += beta[static_cast<std::size_t>(v)] - r.b[static_cast<std::size_t>(v)];
      ++edges;
      if (std::abs(s) > bound) ++bad;
      if (bound > 0) worst_ratio = std::max(worst_ratio, std::abs(s) / bound);
    }
  }
  std::ostringstream d;
  d << "500 hypergraphs, " << edges << " edges, " << bad << " above 2Delta-1, worst error/bound " << worst_ratio;
  return {bad == 0, d.str()};
}

Outcome exact_oracle() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Index d = 1 + t % 2;
    const Index n = 1 + static_cast<Index>(rng() % 64);
    PointMatrix pts(n, d);
    for (Index i = 0; i < n; ++i)
      for (Index s = 0; s < d; ++s) pts(i, s) = rng() % 4 == 0 ? std::floor(u(rng) * 9.0) / 8.0 : u(rng);
    MeasurePtr mu;
    oracle::MassFn mass;
    PointMatrix atoms;
    const PointMatrix* atom_ptr = nullptr;
    switch (t % 3) {
      case 0: {
        std::vector<double> theta;
        std::vector<Cdf1d> cdfs;
        for (Index s = 0; s < d; ++s) {
          theta.push_back(0.25 + 3.0 * u(rng));
          cdfs.push_back(PowerCdf{theta.back()});
        }
        mu = std::make_shared<ProductMeasure>(cdfs);
        mass = [theta](const oracle::Corner& a, bool) {
          double p = 1.0;
          for (std::size_t s = 0; s < a.size(); ++s) p *= std::pow(a[s], theta[s]);
          return p;
        };
        break;
      }
      case 1: {
        std::vector<Region> boxes;
        std::vector<oracle::Box> plain;
        for (int b = 0; b < 3; ++b) {
          oracle::Box o;
          for (Index s = 0; s < d; ++s) {
            o.lo.push_back(0.6 * u(rng));
            o.hi.push_back(o.lo.back() + 0.05 + 0.35 * u(rng));
          }
          boxes.push_back(box(o.lo, o.hi));
          plain.push_back(o);
        }
        mu = std::make_shared<RestrictionMeasure>(boxes);
        const double total = oracle::union_volume_below(plain, oracle::Corner(static_cast<std::size_t>(d), 1.0));
        mass = [plain, total](const oracle::Corner& a, bool) { return oracle::union_volume_below(plain, a) / total; };
        break;
      }
      default: {
        const Index k = 4 + static_cast<Index>(rng() % 20);
        atoms.resize(k, d);
        for (Index i = 0; i < k; ++i)
          for (Index s = 0; s < d; ++s) atoms(i, s) = rng() % 3 == 0 ? pts(static_cast<Index>(rng() % n), s) : u(rng);
        mu = std::make_shared<DiscreteMeasure>(PointSet(atoms));
        atom_ptr = &atoms;
        mass = [&atoms](const oracle::Corner& a, bool closed) {
          return static_cast<double>(oracle::count_in(atoms, a, closed)) / static_cast<double>(atoms.rows());
        };
      }
    }
    const double expected = oracle::star_discrepancy(pts, mass, atom_ptr);
    worst = std::max(worst, std::abs(exact_star_discrepancy(PointSet(pts), *mu).value - expected));
  }
  std::ostringstream d;
  d << "100 sets (product, restriction, discrete), max |exact - naive| = " << worst;
  return {worst <= 1e-12, d.str()};
}

Outcome prefix_chain() {
  bool ok = true;
  std::ostringstream d;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Index dim : {1, 2}) {
    for (Index n : {8, 16, 32, 64}) {
      GridArray beta(std::vector<Index>(static_cast<std::size_t>(dim), n));
      for (auto& v : beta.values) v = u(rng);
      const RoundedArray r = round_array(beta, BalancingEngine::beck_fiala);
      const double measured = oracle::prefix_error(beta.shape, beta.values, r.b.values);
      const double chain = r.certificate.per_edge_error * static_cast<double>(r.certificate.levels);
      ok = ok && measured <= chain;
      d << " d" << dim << "N" << n << ":" << measured << "<=" << chain << "(theory constant " << r.certificate.paper_constant
        << ")";
    }
  }
  return {ok, "measured<=per-edge*(m+1)^d:" + d.str()};
}

Outcome selection_bound() {
  Index runs_ok = 0, slab_ok = 0, slab_total = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed + 300);
    const Index d = 1 + static_cast<Index>(seed % 2);
    const Index n = Index{8} << (seed % 4);
    const Index k = std::min<Index>(4096, n * n + static_cast<Index>(rng() % 1024));
    const PointSet z = sample(*make_uniform(d), seed, k);
    const SelectionResult r = select_subset(z, n, BalancingEngine::beck_fiala, seed);
    const double dd = oracle::discrete_discrepancy_ranked(r.selected.matrix(), z.matrix());
    worst = std::max(worst, dd / r.certificate.box_bound);
    if (dd <= r.certificate.box_bound && dd <= r.certificate.measured_box_bound) ++runs_ok;
    const CellDecomposition dec = decompose(z, n);
    for (int t = 0; t < 50; ++t) {
      std::vector<Index> j(static_cast<std::size_t>(d));
      for (auto& x : j) x = static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
      // Independent count of G(J+1) \ G(J) from the slab labels.
      Index c = 0;
      for (Index p = 0; p < k; ++p) {
        bool next = true, cur = true;
        for (Index s = 0; s < d; ++s) {
          const Index slab = dec.slab[static_cast<std::size_t>(s)][static_cast<std::size_t>(p)];
          next = next && slab <= j[static_cast<std::size_t>(s)];
          cur = cur && slab < j[static_cast<std::size_t>(s)];
        }
        c += next && !cur;
      }
      ++slab_total;
      if (static_cast<double>(c) <= 2.0 * static_cast<double>(d * k) / static_cast<double>(n)) ++slab_ok;
    }
  }
  std::ostringstream d;
  d << runs_ok << "/20 runs within certificate (worst ratio " << worst << "), " << slab_ok << "/" << slab_total
    << " slab checks";
  return {runs_ok == 20 && slab_ok == slab_total, d.str()};
}

Outcome desk_scale_rate() {
  const auto mu = power2();
  std::vector<double> ns, ds;
  bool within = true, beats = true;
  std::ostringstream d;
  for (Index n : {16, 32, 64, 128, 256}) {
    ConstructionConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(n);
    const ConstructionResult r = construct_point_set(*mu, n, cfg);
    const double disc = exact_star_discrepancy(r.points, *mu).value;
    std::vector<double> iid;
    for (std::uint64_t s = 0; s < 20; ++s) iid.push_back(exact_star_discrepancy(sample(*mu, 10000 + s, n), *mu).value);
    const double med = oracle::median(iid);
    within = within && disc <= r.certificate.bound;
    beats = beats && disc < med;
    ns.push_back(static_cast<double>(n));
    ds.push_back(disc);
    d << " N" << n << ":" << disc << "/cert " << r.certificate.bound << "/iid " << med;
  }
  const double slope = loglog_slope(ns, ds);
  d << " slope " << slope;
  return {within && beats && slope <= -0.75, d.str()};
}

Outcome sequence_structure() {
  bool ok = true;
  const std::vector<std::int64_t> sizes = {1, 4, 64, 16384}, offsets = {0, 1, 5, 69};
  for (Index i = 1; i <= 4; ++i)
    ok = ok && block_size(i) == sizes[static_cast<std::size_t>(i - 1)] &&
         block_offset(i) == offsets[static_cast<std::size_t>(i - 1)];
  const auto mu = power2();
  SequenceState state(mu, {});
  double worst = 0.0;
  bool within = true;
  for (Index n = 1; n <= 69; ++n) {
    state.next_point();
    const double disc = exact_star_discrepancy(PointSet(state.emitted_points()), *mu).value;
    const double env = state.envelope(n);
    within = within && disc <= env;
    worst = std::max(worst, disc / env);
  }
  std::ostringstream d;
  d << "sizes/offsets " << (ok ? "match" : "MISMATCH") << ", 69 prefixes within envelope: " << (within ? "yes" : "no")
    << " (max D/envelope " << worst << ")";
  return {ok && within, d.str()};
}

Outcome inverse_arithmetic() {
  // eps = p / 10^q, result ceil(2^26 d 10^(2q) / p^2) in 128-bit integers.
  const std::vector<std::tuple<std::uint64_t, std::uint64_t, int>> pairs = {
      {1, 5, 1}, {2, 1, 0}, {1, 1, 1}, {3, 3, 1}, {4, 25, 2}, {5, 7, 1}, {6, 123, 3}, {7, 999, 3}, {8, 1, 2}, {1, 3, 1},
      {2, 9, 1}, {3, 17, 2}, {4, 1, 3}, {5, 4, 1}, {6, 333, 3}, {7, 2, 1}, {8, 75, 2}, {1, 1, 0}, {2, 101, 3}, {3, 6, 1}};
  Index exact = 0;
  for (const auto& [dim, p, q] : pairs) {
    std::string text = std::to_string(p);
    if (q > 0) {
      while (static_cast<int>(text.size()) <= q) text = "0" + text;
      text.insert(text.size() - static_cast<std::size_t>(q), ".");
    }
    unsigned __int128 num = (static_cast<unsigned __int128>(1) << 26) * dim;
    for (int i = 0; i < 2 * q; ++i) num *= 10;
    const unsigned __int128 den = static_cast<unsigned __int128>(p) * p;
    const auto expected = static_cast<std::uint64_t>((num + den - 1) / den);
    if (inverse_size_paper(static_cast<Index>(dim), text) == expected) ++exact;
  }
  bool thresholds = true;
  for (Index d = 1; d <= 8; ++d) {
    const double t = 8192.0 * std::sqrt(static_cast<double>(d));
    for (double scale : {1.0, 10.0, 1e4, 1e8}) {
      const auto n = static_cast<std::int64_t>(std::ceil(96.0 * 96.0 * static_cast<double>(d) * scale));
      const AlexanderBound a = alexander_bound(t, n, d);
      thresholds = thresholds && a.condition_sample && a.condition_dimension && a.probability_bound.has_value();
    }
  }
  std::ostringstream d;
  d << exact << "/20 exact, threshold check d=1..8 " << (thresholds ? "holds" : "FAILS") << "; empirical c = N eps^2/d:";
  bool shape = true;
  for (Index dim : {1, 2}) {
    for (double eps : {0.2, 0.1}) {
      const EmpiricalInverse e = inverse_size_empirical(*make_uniform(dim), eps, 50, 0.9, 1);
      const double c = static_cast<double>(e.n) * eps * eps / static_cast<double>(dim);
      shape = shape && c < std::ldexp(1.0, 26);
      d << " d" << dim << "/eps" << eps << ":N=" << e.n << ",c=" << c;
    }
  }
  return {exact == 20 && thresholds && shape, d.str()};
}

Outcome cubature_benchmark() {
  const BoxUnion lshape({box({0.0, 0.0}, {1.0, 0.5}), box({0.0, 0.0}, {0.5, 1.0})});
  const Integrand f = builtin_integrand("linear-sum", lshape);
  const RestrictionMeasure mu(lshape.boxes());
  const double ref = reference_integral(f);
  std::vector<double> ns, con, mc;
  std::ostringstream d;
  for (Index n : {16, 32, 64, 128, 256, 512, 1024}) {
    ConstructionConfig cfg;
    cfg.seed = 1;
    cfg.certify_sampling = false;
    const ConstructionResult r = construct_point_set(mu, n, cfg);
    std::vector<double> errs;
    for (std::uint64_t s = 0; s < 50; ++s) errs.push_back(std::abs(integrate(f, sample(mu, 5000 + s, n)).value - ref));
    ns.push_back(static_cast<double>(n));
    con.push_back(std::max(std::abs(integrate(f, r.points).value - ref), 1e-300));
    mc.push_back(oracle::median(errs));
    d << " N" << n << ":" << con.back() << "/" << mc.back();
  }
  const double s_con = loglog_slope(ns, con);
  const double s_mc = loglog_slope(ns, mc);
  d << " slopes " << s_con << " / " << s_mc;

  struct Fixture {
    Integrand f;
    double variation;
  };
  const std::vector<Fixture> fixtures = {
      {f, 8.0},
      {builtin_integrand("product", BoxUnion({box({0.0, 0.0}, {0.5, 0.5})})), 4.0},
      {builtin_integrand("sin-sum", BoxUnion({box({0.1}, {0.6}), box({0.7}, {0.9})})), 4.0 / std::numbers::pi + 2.0}};
  Index held = 0;
  d << "; fixtures:";
  for (const auto& fx : fixtures) {
    const Index n = 128;
    ConstructionConfig cfg;
    cfg.seed = 2;
    const PointSet ps = construct_point_set(RestrictionMeasure(fx.f.omega.boxes()), n, cfg).points;
    const double err = std::abs(integrate(fx.f, ps).value - reference_integral(fx.f));
    const double disc = omega_discrepancy(pad_outside(ps, fx.f.omega), fx.f.omega);
    const double bound = disc * fx.variation / fx.f.omega.volume() + *fx.f.sup_norm / static_cast<double>(n);
    if (err <= bound) ++held;
    d << " " << fx.f.name << ":" << err << "<=" << bound;
  }
  const bool pass = s_con <= -0.8 && std::abs(s_mc + 0.5) <= 0.15 && held == 3;
  return {pass, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 beck-fiala guarantee", beck_fiala_guarantee},
      {"2 exact scan vs naive enumeration", exact_oracle},
      {"3 dyadic prefix bound chain", prefix_chain},
      {"4 selection certificate and slab boundaries", selection_bound},
      {"5 constructed sets for power(2), d=1", desk_scale_rate},
      {"6 sequence blocks and prefix envelope", sequence_structure},
      {"7 inverse size and tail thresholds", inverse_arithmetic},
      {"8 cubature on an L-shaped region", cubature_benchmark}};
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  %-46s %7.1fs  %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
