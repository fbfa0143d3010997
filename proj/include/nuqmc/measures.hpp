#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "nuqmc/point_set.hpp"

namespace nuqmc {

// ---------------------------------------------------------------------------
// One-dimensional CDFs used as marginals of a ProductMeasure.

struct UniformCdf {
  double operator()(double t) const { return t; }
  double inverse(double u) const { return u; }
};

/// CDF t^theta on [0,1], theta > 0.
struct PowerCdf {
  double theta = 1.0;

  double operator()(double t) const;
  double inverse(double u) const;
};

/// Linear interpolation between knots (t_0 = 0, 0), ..., (t_k = 1, 1).
/// Knot positions must be strictly increasing; knot values are not checked
/// here (validate() reports a non-monotone CDF).
struct PiecewiseLinearCdf {
  std::vector<double> t;
  std::vector<double> value;

  PiecewiseLinearCdf() = default;
  PiecewiseLinearCdf(std::vector<double> knots_t, std::vector<double> knots_value);

  double operator()(double x) const;
  double inverse(double u) const;
};

using Cdf1d = std::variant<UniformCdf, PowerCdf, PiecewiseLinearCdf>;

double evaluate(const Cdf1d& cdf, double t);
double inverse(const Cdf1d& cdf, double u);

// ---------------------------------------------------------------------------

/// Oracle contract for a normalized Borel measure on [0,1]^d: exact mass of
/// anchored boxes plus seeded i.i.d. sampling. Measures are immutable.
///
/// Continuous measures put no mass on box faces and ignore the closed flag.
/// Purely atomic measures expose their atoms so that discrepancy scans can
/// treat them by counting.
class BoxMeasure {
 public:
  virtual ~BoxMeasure() = default;

  virtual Index dim() const = 0;

  /// Mass of [0, corner] (closed) or [0, corner) (open). No argument checks.
  virtual double mass_unchecked(const Eigen::Ref<const Vector>& corner, bool closed) const = 0;

  /// Draws `count` points using `rng`.
  virtual PointMatrix draw(std::mt19937_64& rng, Index count) const = 0;

  /// Atoms of a purely atomic measure with equal weights, otherwise nullptr.
  virtual const PointSet* atoms() const { return nullptr; }

  /// Per-axis marginals when mass is the ordered product of 1-d CDFs.
  virtual const std::vector<Cdf1d>* product_marginals() const { return nullptr; }

  virtual std::string kind() const = 0;
};

using MeasurePtr = std::shared_ptr<const BoxMeasure>;

class ProductMeasure final : public BoxMeasure {
 public:
  explicit ProductMeasure(std::vector<Cdf1d> cdfs);

  Index dim() const override { return static_cast<Index>(cdfs_.size()); }
  double mass_unchecked(const Eigen::Ref<const Vector>& corner, bool closed) const override;
  PointMatrix draw(std::mt19937_64& rng, Index count) const override;
  const std::vector<Cdf1d>* product_marginals() const override { return &cdfs_; }
  std::string kind() const override;

  const std::vector<Cdf1d>& cdfs() const { return cdfs_; }

 private:
  std::vector<Cdf1d> cdfs_;
};

/// Lebesgue measure on [0,1]^d.
std::shared_ptr<ProductMeasure> make_uniform(Index d);

/// Axis-parallel closed box [lo, hi] inside the unit cube.
struct Region {
  Vector lo;
  Vector hi;
};

/// A union of possibly overlapping boxes, stored as the disjoint cells of
/// the grid induced by every box endpoint.
class BoxUnion {
 public:
  BoxUnion() = default;
  explicit BoxUnion(std::vector<Region> boxes);

  Index dim() const { return dim_; }
  double volume() const { return volume_; }
  const std::vector<Region>& boxes() const { return boxes_; }
  const PointMatrix& cell_lo() const { return cell_lo_; }
  const PointMatrix& cell_hi() const { return cell_hi_; }

  /// lambda(Omega intersect [0, corner]).
  double volume_below(const Eigen::Ref<const Vector>& corner) const;

  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& x) const {
    for (const auto& b : boxes_) {
      bool inside = true;
      for (Index s = 0; s < dim_ && inside; ++s) inside = b.lo[s] <= x[s] && x[s] <= b.hi[s];
      if (inside) return true;
    }
    return false;
  }

 private:
  std::vector<Region> boxes_;
  Index dim_ = 0;
  PointMatrix cell_lo_;
  PointMatrix cell_hi_;
  double volume_ = 0.0;
};

/// mu(A) = lambda(Omega intersect A) / lambda(Omega).
class RestrictionMeasure final : public BoxMeasure {
 public:
  explicit RestrictionMeasure(std::vector<Region> omega);

  Index dim() const override { return omega_.dim(); }
  double mass_unchecked(const Eigen::Ref<const Vector>& corner, bool closed) const override;
  PointMatrix draw(std::mt19937_64& rng, Index count) const override;
  std::string kind() const override { return "restriction"; }

  const BoxUnion& omega() const { return omega_; }

 private:
  BoxUnion omega_;
  std::vector<double> cumulative_;  // cumulative cell volumes
};

/// Equal-weight atoms z_1..z_K.
class DiscreteMeasure final : public BoxMeasure {
 public:
  explicit DiscreteMeasure(PointSet atoms);

  Index dim() const override { return atoms_.dim(); }
  double mass_unchecked(const Eigen::Ref<const Vector>& corner, bool closed) const override;
  PointMatrix draw(std::mt19937_64& rng, Index count) const override;
  const PointSet* atoms() const override { return &atoms_; }
  std::string kind() const override { return "discrete"; }

 private:
  PointSet atoms_;
};

/// Joint measure mu x lambda on [0,1]^(d+1): the extra last coordinate is
/// uniform and independent.
class AppendUniformMeasure final : public BoxMeasure {
 public:
  explicit AppendUniformMeasure(MeasurePtr base);

  Index dim() const override { return base_->dim() + 1; }
  double mass_unchecked(const Eigen::Ref<const Vector>& corner, bool closed) const override;
  PointMatrix draw(std::mt19937_64& rng, Index count) const override;
  const std::vector<Cdf1d>* product_marginals() const override {
    return joint_marginals_.empty() ? nullptr : &joint_marginals_;
  }
  std::string kind() const override { return base_->kind() + "+uniform"; }

  const BoxMeasure& base() const { return *base_; }

 private:
  MeasurePtr base_;
  std::vector<Cdf1d> joint_marginals_;
};

// ---------------------------------------------------------------------------
// Free-function interface.

/// mu([0,a]) for a validated box; throws PreconditionError on dimension
/// mismatch or corner outside [0,1]^d.
double mass(const BoxMeasure& measure, const AnchoredBox& box);

/// `count` i.i.d. draws, deterministic given `seed`.
PointSet sample(const BoxMeasure& measure, std::uint64_t seed, Index count);

struct ValidationReport {
  bool normalized = true;
  bool monotone = true;
  bool zero_faces = true;
  std::vector<Vector> offending_corners;

  bool passed() const { return normalized && monotone && zero_faces; }
};

/// Diagnostics: normalization, monotonicity on random and axis-swept corner
/// pairs, and zero mass of open boxes with a zero coordinate.
ValidationReport validate(const BoxMeasure& measure, std::uint64_t seed = 0);

}  // namespace nuqmc
