#include "nuqmc/detail/critical_scan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <memory>
#include <sstream>

namespace nuqmc::detail {

namespace {

std::vector<std::vector<double>> build_grid(const ScanProblem& p) {
  std::vector<std::vector<double>> grid(static_cast<std::size_t>(p.dim));
  for (Index s = 0; s < p.dim; ++s) {
    auto& g = grid[static_cast<std::size_t>(s)];
    for (Index i = 0; i < p.positive->rows(); ++i) g.push_back((*p.positive)(i, s));
    if (p.negative != nullptr) {
      for (Index i = 0; i < p.negative->rows(); ++i) g.push_back((*p.negative)(i, s));
    }
    g.push_back(1.0);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
  }
  return grid;
}

// Cumulative closed counts of one point family, one axis-0 slice at a time.
class SliceCounter {
 public:
  SliceCounter(const PointMatrix& pts, const std::vector<std::vector<double>>& grid,
               const std::vector<std::int64_t>& strides, std::int64_t inner_size)
      : strides_(strides), current_(static_cast<std::size_t>(inner_size), 0),
        previous_(static_cast<std::size_t>(inner_size), 0), slice_(static_cast<std::size_t>(inner_size), 0),
        sizes_(grid.size()) {
    for (std::size_t s = 0; s < grid.size(); ++s) sizes_[s] = static_cast<std::int64_t>(grid[s].size());
    const auto d = static_cast<Index>(grid.size());
    entries_.reserve(static_cast<std::size_t>(pts.rows()));
    for (Index i = 0; i < pts.rows(); ++i) {
      auto index_of = [&](Index s) {
        const auto& g = grid[static_cast<std::size_t>(s)];
        return static_cast<std::int64_t>(std::lower_bound(g.begin(), g.end(), pts(i, s)) - g.begin());
      };
      std::int64_t flat = 0;
      for (Index s = 1; s < d; ++s) flat += index_of(s) * strides_[static_cast<std::size_t>(s)];
      entries_.push_back({index_of(0), flat});
    }
    std::sort(entries_.begin(), entries_.end());
  }

  void advance(std::int64_t slice_index) {
    std::swap(current_, previous_);
    std::fill(slice_.begin(), slice_.end(), 0);
    while (cursor_ < entries_.size() && entries_[cursor_].first == slice_index) {
      ++slice_[static_cast<std::size_t>(entries_[cursor_].second)];
      ++cursor_;
    }
    // Inclusive prefix sums along every inner axis (row-major layout).
    const auto n = static_cast<std::int64_t>(slice_.size());
    for (std::size_t s = 1; s < sizes_.size(); ++s) {
      const std::int64_t stride = strides_[s];
      for (std::int64_t j = 0; j < n; ++j) {
        if ((j / stride) % sizes_[s] != 0) slice_[static_cast<std::size_t>(j)] += slice_[static_cast<std::size_t>(j - stride)];
      }
    }
    for (std::int64_t j = 0; j < n; ++j) {
      current_[static_cast<std::size_t>(j)] = previous_[static_cast<std::size_t>(j)] + slice_[static_cast<std::size_t>(j)];
    }
    if (slice_index == 0) std::fill(previous_.begin(), previous_.end(), 0);
  }

  std::int64_t closed(std::int64_t j) const { return current_[static_cast<std::size_t>(j)]; }
  std::int64_t previous(std::int64_t j) const { return previous_[static_cast<std::size_t>(j)]; }

 private:
  std::vector<std::pair<std::int64_t, std::int64_t>> entries_;
  std::size_t cursor_ = 0;
  const std::vector<std::int64_t>& strides_;
  std::vector<std::int64_t> current_;
  std::vector<std::int64_t> previous_;
  std::vector<std::int64_t> slice_;
  std::vector<std::int64_t> sizes_;
};

}  // namespace

double scan_cost(const ScanProblem& p) {
  const auto grid = build_grid(p);
  double cells = 1.0;
  for (const auto& g : grid) cells *= static_cast<double>(g.size());
  return cells * static_cast<double>(p.dim);
}

ScanResult critical_scan(const ScanProblem& p) {
  require(p.positive != nullptr, "scan needs a point set");
  require(p.positive->cols() == p.dim, "point dimension does not match measure dimension");
  require(p.negative == nullptr || p.negative->cols() == p.dim, "atom dimension does not match");
  require(p.negative != nullptr || p.marginals != nullptr || static_cast<bool>(p.mass),
          "scan needs a target measure");

  const auto grid = build_grid(p);
  double cells = 1.0;
  for (const auto& g : grid) cells *= static_cast<double>(g.size());
  if (cells * static_cast<double>(p.dim) > p.budget) {
    std::ostringstream msg;
    msg << "exact scan needs " << cells * static_cast<double>(p.dim) << " steps, budget is " << p.budget
        << "; use the estimator (estimate_star_discrepancy) instead";
    throw BudgetExceeded(msg.str());
  }

  const Index d = p.dim;
  std::vector<std::int64_t> strides(static_cast<std::size_t>(d), 1);
  std::int64_t inner = 1;
  for (Index s = d - 1; s >= 1; --s) {
    strides[static_cast<std::size_t>(s)] = inner;
    inner *= static_cast<std::int64_t>(grid[static_cast<std::size_t>(s)].size());
  }
  std::int64_t diag_offset = 0;
  for (Index s = 1; s < d; ++s) diag_offset += strides[static_cast<std::size_t>(s)];

  SliceCounter pos(*p.positive, grid, strides, inner);
  std::unique_ptr<SliceCounter> neg;
  if (p.negative != nullptr) neg = std::make_unique<SliceCounter>(*p.negative, grid, strides, inner);

  std::vector<std::vector<double>> cdf_values;
  if (p.negative == nullptr && p.marginals != nullptr) {
    require(static_cast<Index>(p.marginals->size()) == d, "marginal count does not match dimension");
    for (Index s = 0; s < d; ++s) {
      std::vector<double> v;
      for (double x : grid[static_cast<std::size_t>(s)]) v.push_back(evaluate((*p.marginals)[static_cast<std::size_t>(s)], x));
      cdf_values.push_back(std::move(v));
    }
  }

  ScanResult best;
  best.value = -1.0;
  std::int64_t best_slice = 0;
  std::vector<std::int64_t> best_inner(static_cast<std::size_t>(d), 0);

  Vector corner(d);
  std::vector<std::int64_t> c(static_cast<std::size_t>(d), 0);
  const auto g0 = static_cast<std::int64_t>(grid[0].size());
  for (std::int64_t i = 0; i < g0; ++i) {
    pos.advance(i);
    if (neg) neg->advance(i);
    corner[0] = grid[0][static_cast<std::size_t>(i)];
    std::fill(c.begin() + 1, c.end(), 0);
    for (std::int64_t j = 0; j < inner; ++j) {
      bool interior = i > 0;
      for (Index s = 1; s < d; ++s) {
        const auto cs = c[static_cast<std::size_t>(s)];
        corner[s] = grid[static_cast<std::size_t>(s)][static_cast<std::size_t>(cs)];
        interior = interior && cs > 0;
      }

      const double closed_emp = static_cast<double>(pos.closed(j)) / p.positive_den;
      const double open_emp = interior ? static_cast<double>(pos.previous(j - diag_offset)) / p.positive_den : 0.0;
      double closed_mass = 0.0;
      double open_mass = 0.0;
      if (neg) {
        closed_mass = static_cast<double>(neg->closed(j)) / p.negative_den;
        open_mass = interior ? static_cast<double>(neg->previous(j - diag_offset)) / p.negative_den : 0.0;
      } else if (!cdf_values.empty()) {
        double m = 1.0;
        m *= cdf_values[0][static_cast<std::size_t>(i)];
        for (Index s = 1; s < d; ++s) m *= cdf_values[static_cast<std::size_t>(s)][static_cast<std::size_t>(c[static_cast<std::size_t>(s)])];
        closed_mass = m;
        open_mass = m;
      } else {
        closed_mass = p.mass(corner, true);
        open_mass = p.mass(corner, false);
      }

      const double v_closed = std::abs(closed_emp - closed_mass);
      const double v_open = std::abs(open_emp - open_mass);
      if (v_closed > best.value) {
        best.value = v_closed;
        best.closed = true;
        best_slice = i;
        best_inner = c;
      }
      if (v_open > best.value) {
        best.value = v_open;
        best.closed = false;
        best_slice = i;
        best_inner = c;
      }
      best.evaluated += 2;

      for (Index s = d - 1; s >= 1; --s) {
        auto& cs = c[static_cast<std::size_t>(s)];
        if (++cs < static_cast<std::int64_t>(grid[static_cast<std::size_t>(s)].size())) break;
        cs = 0;
      }
    }
  }

  best.corner.resize(d);
  best.corner[0] = grid[0][static_cast<std::size_t>(best_slice)];
  for (Index s = 1; s < d; ++s) {
    best.corner[s] = grid[static_cast<std::size_t>(s)][static_cast<std::size_t>(best_inner[static_cast<std::size_t>(s)])];
  }
  return best;
}

}  // namespace nuqmc::detail
