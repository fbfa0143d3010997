#include <charconv>
#include "nuqmc/pipeline.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <regex>
#include <stdexcept>

namespace nuqmc {

namespace {

using boost::multiprecision::cpp_int;

constexpr double kMaxCoordinates = 67108864.0;  // 2^26
constexpr double kUpperBoundCells = 4194304.0;  // 2^22

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t ceil_paper_size(Index d, const cpp_int& num, const cpp_int& den) {
  detail::require(d >= 1, "inverse size needs d >= 1");
  detail::require(num > 0, "eps must be positive");
  detail::require(num <= den, "eps must be at most 1");
  const cpp_int top = (cpp_int(1) << 26) * d * den * den;
  const cpp_int bottom = num * num;
  cpp_int q = top / bottom;
  if (q * bottom != top) ++q;
  if (q > std::numeric_limits<std::uint64_t>::max()) {
    throw PreconditionError("ceil(2^26 d / eps^2) does not fit in 64 bits");
  }
  return static_cast<std::uint64_t>(q);
}

}  // namespace

KPolicy parse_k_policy(const std::string& text) {
  if (text == "paper") return KPolicy::paper();
  if (text == "scaled") return KPolicy::scaled();
  if (text.rfind("scaled:", 0) == 0) {
    const double c = std::stod(text.substr(7));
    detail::require(c >= 1.0, "scaled K policy needs c >= 1");
    return KPolicy::scaled(c);
  }
  if (text.rfind("K=", 0) == 0) {
    const long long k = std::stoll(text.substr(2));
    detail::require(k >= 1, "explicit K must be positive");
    return KPolicy::fixed(static_cast<Index>(k));
  }
  throw PreconditionError("unknown K policy '" + text + "' (expected scaled, scaled:<c>, paper or K=<int>)");
}

std::string to_string(const KPolicy& policy) {
  switch (policy.kind) {
    case KPolicy::Kind::paper:
      return "paper";
    case KPolicy::Kind::scaled:
    {
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof(buf), policy.factor);
      return "scaled:" + std::string(buf, res.ptr);
    }
    case KPolicy::Kind::explicit_k:
      return "K=" + std::to_string(policy.k);
  }
  return "unknown";
}

Index resolve_k(const KPolicy& policy, Index n, Index d) {
  detail::require(n >= 1, "N must be >= 1");
  const double nn = static_cast<double>(n);
  double k = 0.0;
  switch (policy.kind) {
    case KPolicy::Kind::paper:
      k = 67108864.0 * static_cast<double>(d) * nn * nn;
      break;
    case KPolicy::Kind::scaled:
      k = std::ceil(policy.factor * nn * nn);
      break;
    case KPolicy::Kind::explicit_k:
      k = static_cast<double>(policy.k);
      break;
  }
  detail::require(nn * nn <= k, "N > sqrt(K): selection needs N <= sqrt(K) (N = " + std::to_string(n) +
                                    ", K = " + std::to_string(static_cast<long long>(k)) + ")");
  if (k * static_cast<double>(d) > kMaxCoordinates) {
    throw BudgetExceeded("K = " + std::to_string(k) + " samples in dimension " + std::to_string(d) +
                         " exceed the sampling budget of 2^26 coordinates");
  }
  return static_cast<Index>(k);
}

ConstructionResult construct_point_set(const BoxMeasure& mu, Index n, const ConstructionConfig& cfg) {
  detail::require(n >= 1, "N must be >= 1");
  const Index d = mu.dim();
  const Index k = resolve_k(cfg.k_policy, n, d);
  const PointSet z = sample(mu, cfg.seed, k);
  SelectionResult sel = select_subset(z, n, cfg.engine, mix_seed(cfg.seed, 1));

  ConstructionResult out;
  out.points = sel.selected;
  out.indices = sel.indices;
  auto& cert = out.certificate;
  cert.n = n;
  cert.k = k;
  cert.selection = sel.certificate;
  const double nn = static_cast<double>(n);
  cert.selection_term = sel.certificate.measured_box_bound / nn;
  cert.selection_term_engine = sel.certificate.box_bound / nn;
  cert.paper_bound = 63.0 * std::sqrt(static_cast<double>(d)) *
                     std::pow(2.0 + std::log2(nn), (3.0 * static_cast<double>(d) + 1.0) / 2.0) / nn;

  if (cfg.k_policy.kind == KPolicy::Kind::paper) {
    cert.sampling_term = 1.0 / nn;
    cert.sampling_kind = "nominal";
  } else if (!cfg.certify_sampling) {
    cert.sampling_term = 0.0;
    cert.sampling_kind = "skipped";
    cert.complete = false;
  } else {
    try {
      cert.sampling_term = exact_star_discrepancy(z, mu, cfg.budget).value;
      cert.sampling_kind = "exact";
    } catch (const BudgetExceeded&) {
      const auto q = static_cast<Index>(std::floor(std::pow(kUpperBoundCells, 1.0 / static_cast<double>(d))));
      cert.sampling_term = upper_bound_star_discrepancy(z, mu, std::min(q, k)).value;
      cert.sampling_kind = "upper_bound";
    }
  }
  cert.bound = std::min(1.0, cert.selection_term + cert.sampling_term);
  return out;
}

std::int64_t block_size(Index i) {
  detail::require(i >= 1 && i <= 6, "block index must be in 1..6");
  return std::int64_t{1} << ((std::int64_t{1} << i) - 2);
}

std::int64_t block_offset(Index i) {
  detail::require(i >= 1 && i <= 6, "block index must be in 1..6");
  std::int64_t m = 0;
  for (Index l = 1; l < i; ++l) m += block_size(l);
  return m;
}

SequenceState::SequenceState(MeasurePtr mu, ConstructionConfig cfg) : mu_(std::move(mu)), cfg_(std::move(cfg)) {
  detail::require(mu_ != nullptr, "sequence needs a measure");
  nu_ = std::make_shared<AppendUniformMeasure>(mu_);
}

const SequenceState::Block& SequenceState::block(Index i) {
  detail::require(i >= 1, "block index must be >= 1");
  while (static_cast<Index>(blocks_.size()) < i) {
    const Index index = static_cast<Index>(blocks_.size()) + 1;
    const auto size = block_size(index);
    ConstructionConfig c = cfg_;
    c.seed = mix_seed(cfg_.seed, static_cast<std::uint64_t>(index) + 100);
    ConstructionResult res = construct_point_set(*nu_, static_cast<Index>(size), c);

    const Index d = mu_->dim();
    const PointMatrix& pts = res.points.matrix();
    std::vector<Index> order(static_cast<std::size_t>(pts.rows()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return pts(a, d) < pts(b, d); });

    Block blk;
    blk.lifted.resize(pts.rows(), d + 1);
    for (Index r = 0; r < pts.rows(); ++r) blk.lifted.row(r) = pts.row(order[static_cast<std::size_t>(r)]);
    // Ties in the last coordinate: the k-th tied value moves up by k * 2^-52.
    constexpr double kUlp = 2.220446049250313e-16;
    Index run = 0;
    for (Index r = 1; r < blk.lifted.rows(); ++r) {
      if (blk.lifted(r, d) <= blk.lifted(r - 1, d)) {
        ++run;
        const double shifted = blk.lifted(r, d) + static_cast<double>(run) * kUlp;
        blk.lifted(r, d) = std::max(shifted, blk.lifted(r - 1, d) + kUlp);
        if (blk.lifted(r, d) > 1.0) throw Error("tie shift pushed a coordinate above 1");
        blk.tie_shift = std::max(blk.tie_shift, static_cast<double>(run) * kUlp);
      } else {
        run = 0;
      }
    }
    blk.projected = blk.lifted.leftCols(d);
    blk.certificate = res.certificate;
    blk.bound = std::min(1.0, res.certificate.bound + blk.tie_shift);
    blocks_.push_back(std::move(blk));
  }
  return blocks_[static_cast<std::size_t>(i - 1)];
}

Index SequenceState::block_index() const {
  Index i = 1;
  while (block_offset(i + 1) <= emitted_) ++i;
  return i;
}

Vector SequenceState::next_point() {
  const Index i = block_index();
  const Block& blk = block(i);
  const Index j = emitted_ - static_cast<Index>(block_offset(i));
  Vector x = blk.projected.row(j).transpose();
  history_.insert(history_.end(), x.data(), x.data() + x.size());
  ++emitted_;
  return x;
}

PointMatrix SequenceState::emitted_points() const {
  const Index d = mu_->dim();
  PointMatrix out(emitted_, d);
  for (Index r = 0; r < emitted_; ++r) {
    for (Index s = 0; s < d; ++s) out(r, s) = history_[static_cast<std::size_t>(r * d + s)];
  }
  return out;
}

double SequenceState::envelope(Index n) {
  detail::require(n >= 1, "prefix length must be >= 1");
  Index i = 1;
  while (block_offset(i + 1) < n) ++i;
  double total = 0.0;
  for (Index l = 1; l < i; ++l) total += static_cast<double>(block_size(l)) * block(l).bound;
  total += 2.0 * static_cast<double>(block_size(i)) * block(i).bound;
  return total / static_cast<double>(n);
}

std::uint64_t inverse_size_paper(Index d, const std::string& eps) {
  static const std::regex pattern(R"(^\s*(\d*)(?:\.(\d*))?(?:[eE]([+-]?\d+))?\s*$)");
  std::smatch m;
  detail::require(std::regex_match(eps, m, pattern) && (m[1].length() + m[2].length()) > 0,
                  "eps must be a decimal number, got '" + eps + "'");
  const std::string int_part = m[1].str();
  const std::string frac_part = m[2].str();
  std::string digits = int_part + frac_part;
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));  // cpp_int reads a leading 0 as octal
  cpp_int num(digits);
  cpp_int den = boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(frac_part.size()));
  if (m[3].matched) {
    const long e = std::stol(m[3].str());
    detail::require(std::abs(e) <= 400, "eps exponent out of range");
    const cpp_int p = boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(std::abs(e)));
    if (e >= 0) {
      num *= p;
    } else {
      den *= p;
    }
  }
  return ceil_paper_size(d, num, den);
}

std::uint64_t inverse_size_paper(Index d, double eps) {
  detail::require(std::isfinite(eps) && eps > 0.0 && eps <= 1.0, "eps must lie in (0,1]");
  int e = 0;
  const double f = std::frexp(eps, &e);  // eps = f 2^e, f in [0.5, 1)
  const auto mant = static_cast<std::uint64_t>(std::ldexp(f, 53));
  // eps = mant * 2^(e-53) with e <= 1, so 1/eps = 2^(53-e) / mant.
  return ceil_paper_size(d, cpp_int(mant), cpp_int(1) << (53 - e));
}

EmpiricalInverse inverse_size_empirical(const BoxMeasure& mu, double eps, Index seeds, double quantile,
                                        std::uint64_t seed) {
  if (mu.dim() > 2) throw BudgetExceeded("empirical inverse size uses the exact scan and supports d <= 2 only");
  detail::require(eps > 0.0 && eps < 1.0, "eps must lie in (0,1)");
  detail::require(seeds >= 1, "need at least one seed");
  EmpiricalInverse out;
  for (Index n = 1; n <= (Index{1} << 16); n *= 2) {
    Index ok = 0;
    for (Index s = 0; s < seeds; ++s) {
      const PointSet ps = sample(mu, mix_seed(seed, static_cast<std::uint64_t>(n * 1000 + s)), n);
      if (exact_star_discrepancy(ps, mu, std::numeric_limits<double>::infinity()).value <= eps) ++ok;
    }
    const double rate = static_cast<double>(ok) / static_cast<double>(seeds);
    out.success_rate.emplace_back(n, rate);
    if (rate >= quantile) {
      out.n = n;
      return out;
    }
  }
  throw BudgetExceeded("empirical inverse size search exceeded N = 65536");
}

AlexanderBound alexander_bound(double t, std::int64_t n, Index d) {
  detail::require(n >= 1 && d >= 1, "alexander_bound needs N >= 1 and d >= 1");
  const double nn = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  AlexanderBound out;
  out.threshold_sample = std::pow(2.0, 16.5) * dd / std::sqrt(nn) * std::log(std::max(nn / (2.0 * dd), std::exp(1.0)));
  out.threshold_dimension = std::sqrt(33554432.0 * dd * std::log(4.0));
  out.condition_sample = t > out.threshold_sample;
  out.condition_dimension = t > out.threshold_dimension;
  if (out.condition_sample && out.condition_dimension) out.probability_bound = 16.0 * std::exp(-t * t);
  return out;
}

}  // namespace nuqmc
