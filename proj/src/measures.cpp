#include "nuqmc/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace nuqmc {

namespace {

constexpr double kMassTolerance = 1e-12;
constexpr Index kMaxCells = 1 << 22;

double uniform01(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace

// ---------------------------------------------------------------------------
// 1-d CDFs

double PowerCdf::operator()(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return std::pow(t, theta);
}

double PowerCdf::inverse(double u) const {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return std::pow(u, 1.0 / theta);
}

PiecewiseLinearCdf::PiecewiseLinearCdf(std::vector<double> knots_t, std::vector<double> knots_value)
    : t(std::move(knots_t)), value(std::move(knots_value)) {
  detail::require(t.size() >= 2 && t.size() == value.size(),
                  "piecewise CDF needs at least two knots (t, value)");
  detail::require(t.front() == 0.0 && t.back() == 1.0, "piecewise CDF knots must span [0,1]");
  detail::require(value.front() == 0.0 && value.back() == 1.0,
                  "piecewise CDF must map 0 to 0 and 1 to 1");
  for (std::size_t k = 1; k < t.size(); ++k) {
    detail::require(t[k] > t[k - 1], "piecewise CDF knot positions must be strictly increasing");
  }
}

double PiecewiseLinearCdf::operator()(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const auto it = std::upper_bound(t.begin(), t.end(), x);
  const auto j = static_cast<std::size_t>(it - t.begin()) - 1;
  if (x == t[j]) return value[j];
  const double w = (x - t[j]) / (t[j + 1] - t[j]);
  return value[j] + w * (value[j + 1] - value[j]);
}

double PiecewiseLinearCdf::inverse(double u) const {
  if (u <= 0.0) return 0.0;
  for (std::size_t j = 0; j + 1 < t.size(); ++j) {
    if (value[j + 1] > u && value[j + 1] > value[j]) {
      const double w = (u - value[j]) / (value[j + 1] - value[j]);
      return std::clamp(t[j] + w * (t[j + 1] - t[j]), t[j], t[j + 1]);
    }
  }
  return 1.0;
}

double evaluate(const Cdf1d& cdf, double t) {
  return std::visit([t](const auto& c) { return c(t); }, cdf);
}

double inverse(const Cdf1d& cdf, double u) {
  return std::visit([u](const auto& c) { return c.inverse(u); }, cdf);
}

// ---------------------------------------------------------------------------
// ProductMeasure

ProductMeasure::ProductMeasure(std::vector<Cdf1d> cdfs) : cdfs_(std::move(cdfs)) {
  detail::require(!cdfs_.empty(), "product measure needs at least one marginal");
  for (const auto& c : cdfs_) {
    if (const auto* p = std::get_if<PowerCdf>(&c)) {
      detail::require(p->theta > 0.0 && std::isfinite(p->theta), "power CDF needs theta > 0");
    }
  }
}

double ProductMeasure::mass_unchecked(const Eigen::Ref<const Vector>& corner, bool) const {
  double p = 1.0;
  for (std::size_t s = 0; s < cdfs_.size(); ++s) p *= evaluate(cdfs_[s], corner[static_cast<Index>(s)]);
  return p;
}

PointMatrix ProductMeasure::draw(std::mt19937_64& rng, Index count) const {
  PointMatrix out(count, dim());
  for (Index i = 0; i < count; ++i) {
    for (Index s = 0; s < dim(); ++s) out(i, s) = inverse(cdfs_[static_cast<std::size_t>(s)], uniform01(rng));
  }
  return out;
}

std::string ProductMeasure::kind() const {
  const bool all_uniform = std::all_of(cdfs_.begin(), cdfs_.end(), [](const Cdf1d& c) {
    return std::holds_alternative<UniformCdf>(c);
  });
  return all_uniform ? "uniform" : "product";
}

std::shared_ptr<ProductMeasure> make_uniform(Index d) {
  detail::require(d >= 1, "uniform measure needs d >= 1");
  return std::make_shared<ProductMeasure>(std::vector<Cdf1d>(static_cast<std::size_t>(d), UniformCdf{}));
}

// ---------------------------------------------------------------------------
// BoxUnion / RestrictionMeasure

BoxUnion::BoxUnion(std::vector<Region> boxes) : boxes_(std::move(boxes)) {
  detail::require(!boxes_.empty(), "region needs at least one box");
  dim_ = boxes_.front().lo.size();
  detail::require(dim_ >= 1, "region dimension must be >= 1");
  for (const auto& b : boxes_) {
    detail::require(b.lo.size() == dim_ && b.hi.size() == dim_, "region boxes differ in dimension");
    for (Index s = 0; s < dim_; ++s) {
      detail::require(0.0 <= b.lo[s] && b.lo[s] <= b.hi[s] && b.hi[s] <= 1.0,
                      "region box must satisfy 0 <= lo <= hi <= 1");
    }
  }

  std::vector<std::vector<double>> breaks(static_cast<std::size_t>(dim_));
  Index total = 1;
  for (Index s = 0; s < dim_; ++s) {
    auto& br = breaks[static_cast<std::size_t>(s)];
    for (const auto& b : boxes_) {
      br.push_back(b.lo[s]);
      br.push_back(b.hi[s]);
    }
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    total *= std::max<Index>(static_cast<Index>(br.size()) - 1, 0);
    if (total > kMaxCells) throw BudgetExceeded("region decomposes into too many grid cells");
  }

  std::vector<Vector> lo_cells;
  std::vector<Vector> hi_cells;
  if (total > 0) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(dim_), 0);
    Vector lo(dim_), hi(dim_), mid(dim_);
    for (Index c = 0; c < total; ++c) {
      for (Index s = 0; s < dim_; ++s) {
        const auto& br = breaks[static_cast<std::size_t>(s)];
        lo[s] = br[idx[static_cast<std::size_t>(s)]];
        hi[s] = br[idx[static_cast<std::size_t>(s)] + 1];
        mid[s] = 0.5 * (lo[s] + hi[s]);
      }
      if (contains(mid)) {
        lo_cells.push_back(lo);
        hi_cells.push_back(hi);
      }
      for (Index s = dim_ - 1; s >= 0; --s) {
        auto& k = idx[static_cast<std::size_t>(s)];
        if (++k + 1 < breaks[static_cast<std::size_t>(s)].size()) break;
        k = 0;
      }
    }
  }

  cell_lo_.resize(static_cast<Index>(lo_cells.size()), dim_);
  cell_hi_.resize(static_cast<Index>(hi_cells.size()), dim_);
  for (std::size_t c = 0; c < lo_cells.size(); ++c) {
    cell_lo_.row(static_cast<Index>(c)) = lo_cells[c].transpose();
    cell_hi_.row(static_cast<Index>(c)) = hi_cells[c].transpose();
  }
  volume_ = volume_below(Vector::Ones(dim_));
}

double BoxUnion::volume_below(const Eigen::Ref<const Vector>& corner) const {
  double total = 0.0;
  for (Index c = 0; c < cell_lo_.rows(); ++c) {
    double v = 1.0;
    for (Index s = 0; s < dim_; ++s) {
      const double side = std::min(corner[s], cell_hi_(c, s)) - cell_lo_(c, s);
      if (side <= 0.0) {
        v = 0.0;
        break;
      }
      v *= side;
    }
    total += v;
  }
  return total;
}

RestrictionMeasure::RestrictionMeasure(std::vector<Region> omega) : omega_(std::move(omega)) {
  detail::require(omega_.volume() > 0.0, "restriction region must have positive volume");
  const auto& lo = omega_.cell_lo();
  const auto& hi = omega_.cell_hi();
  cumulative_.reserve(static_cast<std::size_t>(lo.rows()));
  double acc = 0.0;
  for (Index c = 0; c < lo.rows(); ++c) {
    acc += (hi.row(c) - lo.row(c)).prod();
    cumulative_.push_back(acc);
  }
}

double RestrictionMeasure::mass_unchecked(const Eigen::Ref<const Vector>& corner, bool) const {
  return omega_.volume_below(corner) / omega_.volume();
}

PointMatrix RestrictionMeasure::draw(std::mt19937_64& rng, Index count) const {
  const auto& lo = omega_.cell_lo();
  const auto& hi = omega_.cell_hi();
  PointMatrix out(count, dim());
  for (Index i = 0; i < count; ++i) {
    const double u = uniform01(rng) * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    const Index c = it - cumulative_.begin();
    for (Index s = 0; s < dim(); ++s) {
      out(i, s) = std::min(lo(c, s) + (hi(c, s) - lo(c, s)) * uniform01(rng), hi(c, s));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// DiscreteMeasure

DiscreteMeasure::DiscreteMeasure(PointSet atoms) : atoms_(std::move(atoms)) {
  detail::require(!atoms_.empty(), "discrete measure needs at least one atom");
}

double DiscreteMeasure::mass_unchecked(const Eigen::Ref<const Vector>& corner, bool closed) const {
  const AnchoredBox box{corner, closed};
  Index count = 0;
  for (Index i = 0; i < atoms_.size(); ++i) count += box_contains(box, atoms_.point(i)) ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(atoms_.size());
}

PointMatrix DiscreteMeasure::draw(std::mt19937_64& rng, Index count) const {
  std::uniform_int_distribution<Index> pick(0, atoms_.size() - 1);
  PointMatrix out(count, dim());
  for (Index i = 0; i < count; ++i) out.row(i) = atoms_.point(pick(rng));
  return out;
}

// ---------------------------------------------------------------------------
// AppendUniformMeasure

AppendUniformMeasure::AppendUniformMeasure(MeasurePtr base) : base_(std::move(base)) {
  detail::require(base_ != nullptr, "base measure required");
  if (const auto* m = base_->product_marginals()) {
    joint_marginals_ = *m;
    joint_marginals_.emplace_back(UniformCdf{});
  }
}

double AppendUniformMeasure::mass_unchecked(const Eigen::Ref<const Vector>& corner, bool closed) const {
  const Index d = base_->dim();
  return base_->mass_unchecked(corner.head(d), closed) * corner[d];
}

PointMatrix AppendUniformMeasure::draw(std::mt19937_64& rng, Index count) const {
  const Index d = base_->dim();
  PointMatrix base = base_->draw(rng, count);
  PointMatrix out(count, d + 1);
  out.leftCols(d) = base;
  for (Index i = 0; i < count; ++i) out(i, d) = uniform01(rng);
  return out;
}

// ---------------------------------------------------------------------------
// Free functions

double mass(const BoxMeasure& measure, const AnchoredBox& box) {
  detail::require(box.dim() == measure.dim(), "box dimension " + std::to_string(box.dim()) +
                                                  " does not match measure dimension " +
                                                  std::to_string(measure.dim()));
  for (Index s = 0; s < box.dim(); ++s) {
    detail::require(box.corner[s] >= 0.0 && box.corner[s] <= 1.0, "box corner outside [0,1]");
  }
  return measure.mass_unchecked(box.corner, box.closed);
}

PointSet sample(const BoxMeasure& measure, std::uint64_t seed, Index count) {
  detail::require(count >= 1, "sample count must be >= 1");
  std::mt19937_64 rng(seed);
  return PointSet(measure.draw(rng, count));
}

ValidationReport validate(const BoxMeasure& measure, std::uint64_t seed) {
  ValidationReport report;
  const Index d = measure.dim();
  auto flag = [&report](const Vector& a) {
    if (report.offending_corners.size() < 16) report.offending_corners.push_back(a);
  };

  const Vector ones = Vector::Ones(d);
  if (std::abs(measure.mass_unchecked(ones, true) - 1.0) > kMassTolerance) {
    report.normalized = false;
    flag(ones);
  }

  std::mt19937_64 rng(seed);
  constexpr int kPairs = 2000;
  Vector a(d), b(d);
  for (int k = 0; k < kPairs; ++k) {
    for (Index s = 0; s < d; ++s) {
      a[s] = uniform01(rng);
      b[s] = a[s] + (1.0 - a[s]) * uniform01(rng);
    }
    for (bool closed : {true, false}) {
      if (measure.mass_unchecked(a, closed) > measure.mass_unchecked(b, closed) + kMassTolerance) {
        report.monotone = false;
        flag(a);
      }
    }
    Vector z = a;
    z[static_cast<Index>(k % d)] = 0.0;
    if (std::abs(measure.mass_unchecked(z, false)) > kMassTolerance) {
      report.zero_faces = false;
      flag(z);
    }
  }

  // Axis sweeps with the remaining coordinates at 1 expose non-monotone
  // marginals that random pairs could miss.
  constexpr int kSweep = 1024;
  for (Index s = 0; s < d; ++s) {
    Vector c = ones;
    c[s] = 0.0;
    double previous = measure.mass_unchecked(c, true);
    for (int k = 1; k <= kSweep; ++k) {
      c[s] = static_cast<double>(k) / kSweep;
      const double current = measure.mass_unchecked(c, true);
      if (current + kMassTolerance < previous) {
        report.monotone = false;
        flag(c);
      }
      previous = current;
    }
  }
  return report;
}

}  // namespace nuqmc
