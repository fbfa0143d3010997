#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

#include "nuqmc/errors.hpp"

namespace nuqmc {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;

/// Points stored one per row so that a point is a contiguous slice.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// The anchored box [0, a_1] x ... x [0, a_d]. When `closed` is false every
/// face at a_s is excluded, i.e. the box is [0, a_1) x ... x [0, a_d).
struct AnchoredBox {
  Vector corner;
  bool closed = true;

  Index dim() const { return corner.size(); }
};

/// Checks the AnchoredBox invariants (d >= 1, corner in [0,1]^d).
AnchoredBox make_box(Vector corner, bool closed = true);

/// True when x lies in the box, honouring the closed flag.
template <typename Derived>
bool box_contains(const AnchoredBox& box, const Eigen::DenseBase<Derived>& x) {
  for (Index s = 0; s < box.corner.size(); ++s) {
    if (box.closed ? !(x[s] <= box.corner[s]) : !(x[s] < box.corner[s])) return false;
  }
  return true;
}

/// An ordered multiset of N >= 1 points in [0,1]^d.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(PointMatrix points);

  Index size() const { return points_.rows(); }
  Index dim() const { return points_.cols(); }
  bool empty() const { return points_.rows() == 0; }

  const PointMatrix& matrix() const { return points_; }
  auto point(Index i) const { return points_.row(i); }
  double operator()(Index i, Index s) const { return points_(i, s); }

  /// Rows picked by index, in the given order (indices may repeat).
  PointSet subset(std::span<const Index> indices) const;

  /// Points sorted lexicographically; used for multiset comparisons.
  PointMatrix sorted_rows() const;

 private:
  PointMatrix points_;
};

/// True when `small` is contained in `large` as multisets.
bool is_submultiset(const PointSet& small, const PointSet& large);

}  // namespace nuqmc
