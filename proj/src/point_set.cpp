#include "nuqmc/point_set.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace nuqmc {

AnchoredBox make_box(Vector corner, bool closed) {
  detail::require(corner.size() >= 1, "anchored box needs dimension >= 1");
  for (Index s = 0; s < corner.size(); ++s) {
    detail::require(corner[s] >= 0.0 && corner[s] <= 1.0,
                    "box corner coordinate " + std::to_string(s) + " outside [0,1]");
  }
  return AnchoredBox{std::move(corner), closed};
}

PointSet::PointSet(PointMatrix points) : points_(std::move(points)) {
  detail::require(points_.rows() >= 1, "point set must contain at least one point");
  detail::require(points_.cols() >= 1, "point set dimension must be >= 1");
  for (Index i = 0; i < points_.rows(); ++i) {
    for (Index s = 0; s < points_.cols(); ++s) {
      const double x = points_(i, s);
      if (!(x >= 0.0 && x <= 1.0)) {
        throw PreconditionError("point " + std::to_string(i) + " has coordinate outside [0,1]");
      }
    }
  }
}

PointSet PointSet::subset(std::span<const Index> indices) const {
  PointMatrix out(static_cast<Index>(indices.size()), dim());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    detail::require(indices[k] >= 0 && indices[k] < size(), "subset index out of range");
    out.row(static_cast<Index>(k)) = points_.row(indices[k]);
  }
  return PointSet(std::move(out));
}

PointMatrix PointSet::sorted_rows() const {
  std::vector<Index> order(static_cast<std::size_t>(size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    for (Index s = 0; s < dim(); ++s) {
      if (points_(a, s) != points_(b, s)) return points_(a, s) < points_(b, s);
    }
    return false;
  });
  PointMatrix out(size(), dim());
  for (Index k = 0; k < size(); ++k) out.row(k) = points_.row(order[static_cast<std::size_t>(k)]);
  return out;
}

bool is_submultiset(const PointSet& small, const PointSet& large) {
  if (small.dim() != large.dim() || small.size() > large.size()) return false;
  const PointMatrix a = small.sorted_rows();
  const PointMatrix b = large.sorted_rows();
  auto less = [](const auto& x, const auto& y) {
    for (Index s = 0; s < x.size(); ++s) {
      if (x[s] != y[s]) return x[s] < y[s];
    }
    return false;
  };
  Index j = 0;
  for (Index i = 0; i < a.rows(); ++i) {
    while (j < b.rows() && less(b.row(j), a.row(i))) ++j;
    if (j == b.rows() || less(a.row(i), b.row(j))) return false;
    ++j;
  }
  return true;
}

}  // namespace nuqmc
