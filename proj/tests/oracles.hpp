#pragma once

// Slow reference computations used as test oracles. They share no code with
// the library beyond the point container.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "nuqmc/point_set.hpp"

namespace oracle {

using nuqmc::Index;
using nuqmc::PointMatrix;
using Corner = std::vector<double>;
using MassFn = std::function<double(const Corner&, bool closed)>;

inline std::vector<std::vector<double>> candidate_grid(const PointMatrix& pts, const PointMatrix* extra) {
  const Index d = pts.cols();
  std::vector<std::vector<double>> grid(static_cast<std::size_t>(d));
  for (Index s = 0; s < d; ++s) {
    auto& g = grid[static_cast<std::size_t>(s)];
    for (Index i = 0; i < pts.rows(); ++i) g.push_back(pts(i, s));
    if (extra)
      for (Index i = 0; i < extra->rows(); ++i) g.push_back((*extra)(i, s));
    g.push_back(1.0);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
  }
  return grid;
}

inline Index count_in(const PointMatrix& pts, const Corner& a, bool closed) {
  Index c = 0;
  for (Index i = 0; i < pts.rows(); ++i) {
    bool in = true;
    for (Index s = 0; s < pts.cols(); ++s) in = in && (closed ? pts(i, s) <= a[static_cast<std::size_t>(s)] : pts(i, s) < a[static_cast<std::size_t>(s)]);
    c += in ? 1 : 0;
  }
  return c;
}

/// Enumerates every corner of the candidate grid (d <= 3) and both box
/// variants with direct point counting.
inline double star_discrepancy(const PointMatrix& pts, const MassFn& mass, const PointMatrix* atoms = nullptr) {
  const auto grid = candidate_grid(pts, atoms);
  const Index d = pts.cols();
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  const double n = static_cast<double>(pts.rows());
  double best = 0.0;
  Corner a(static_cast<std::size_t>(d));
  while (true) {
    for (Index s = 0; s < d; ++s) a[static_cast<std::size_t>(s)] = grid[static_cast<std::size_t>(s)][idx[static_cast<std::size_t>(s)]];
    best = std::max(best, std::abs(static_cast<double>(count_in(pts, a, true)) / n - mass(a, true)));
    best = std::max(best, std::abs(static_cast<double>(count_in(pts, a, false)) / n - mass(a, false)));
    Index s = 0;
    for (; s < d; ++s) {
      if (++idx[static_cast<std::size_t>(s)] < grid[static_cast<std::size_t>(s)].size()) break;
      idx[static_cast<std::size_t>(s)] = 0;
    }
    if (s == d) break;
  }
  return best;
}

/// max over corners of |#(sub in A) - (N/K) #(full in A)|.
inline double discrete_discrepancy(const PointMatrix& sub, const PointMatrix& full) {
  const double ratio = static_cast<double>(sub.rows()) / static_cast<double>(full.rows());
  const auto grid = candidate_grid(full, nullptr);
  const Index d = full.cols();
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  double best = 0.0;
  Corner a(static_cast<std::size_t>(d));
  while (true) {
    for (Index s = 0; s < d; ++s) a[static_cast<std::size_t>(s)] = grid[static_cast<std::size_t>(s)][idx[static_cast<std::size_t>(s)]];
    for (bool closed : {true, false}) {
      const double v = static_cast<double>(count_in(sub, a, closed)) - ratio * static_cast<double>(count_in(full, a, closed));
      best = std::max(best, std::abs(v));
    }
    Index s = 0;
    for (; s < d; ++s) {
      if (++idx[static_cast<std::size_t>(s)] < grid[static_cast<std::size_t>(s)].size()) break;
      idx[static_cast<std::size_t>(s)] = 0;
    }
    if (s == d) break;
  }
  return best;
}

/// Same value for d <= 2 via rank compression and a 2-d prefix-sum table,
/// so it stays usable for K in the thousands.
inline double discrete_discrepancy_ranked(const PointMatrix& sub, const PointMatrix& full) {
  const Index d = full.cols();
  const double ratio = static_cast<double>(sub.rows()) / static_cast<double>(full.rows());
  std::vector<std::vector<double>> axis(2);
  for (Index s = 0; s < d; ++s) {
    auto& v = axis[static_cast<std::size_t>(s)];
    for (Index i = 0; i < full.rows(); ++i) v.push_back(full(i, s));
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  if (d == 1) axis[1] = {0.0};
  const std::size_t gx = axis[0].size() + 1, gy = axis[1].size() + 1;
  std::vector<double> table(gx * gy, 0.0);
  auto add = [&](const PointMatrix& pts, double w) {
    for (Index i = 0; i < pts.rows(); ++i) {
      const auto rx = static_cast<std::size_t>(std::lower_bound(axis[0].begin(), axis[0].end(), pts(i, 0)) - axis[0].begin());
      const auto ry = d == 1 ? std::size_t{0}
                             : static_cast<std::size_t>(std::lower_bound(axis[1].begin(), axis[1].end(), pts(i, 1)) - axis[1].begin());
      table[(rx + 1) * gy + ry + 1] += w;
    }
  };
  add(sub, 1.0);
  add(full, -ratio);
  double best = 0.0;
  for (std::size_t i = 1; i < gx; ++i)
    for (std::size_t j = 1; j < gy; ++j) {
      auto& t = table[i * gy + j];
      t += table[(i - 1) * gy + j] + table[i * gy + j - 1] - table[(i - 1) * gy + j - 1];
      best = std::max(best, std::abs(t));
    }
  return best;
}

struct Box {
  std::vector<double> lo, hi;
};

/// lambda((union of boxes) cap [0,a]) by inclusion-exclusion.
inline double union_volume_below(const std::vector<Box>& boxes, const Corner& a) {
  const std::size_t k = boxes.size();
  double total = 0.0;
  for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
    double vol = 1.0;
    for (std::size_t s = 0; s < a.size(); ++s) {
      double lo = 0.0, hi = a[s];
      for (std::size_t b = 0; b < k; ++b) {
        if (mask & (1u << b)) {
          lo = std::max(lo, boxes[b].lo[s]);
          hi = std::min(hi, boxes[b].hi[s]);
        }
      }
      vol *= std::max(0.0, hi - lo);
    }
    total += (__builtin_popcount(mask) % 2 == 1 ? 1.0 : -1.0) * vol;
  }
  return total;
}

/// Midpoint-rule estimate of lambda(Omega cap [0,a]) on a res^d grid (d <= 2).
inline double riemann_volume_below(const std::vector<Box>& boxes, const Corner& a, int res = 200) {
  const std::size_t d = a.size();
  auto inside = [&](const std::vector<double>& x) {
    for (std::size_t s = 0; s < d; ++s)
      if (x[s] > a[s]) return false;
    for (const auto& b : boxes) {
      bool in = true;
      for (std::size_t s = 0; s < d; ++s) in = in && b.lo[s] <= x[s] && x[s] <= b.hi[s];
      if (in) return true;
    }
    return false;
  };
  std::vector<double> x(d);
  long hits = 0, total = 0;
  if (d == 1) {
    for (int i = 0; i < res; ++i) {
      x[0] = (i + 0.5) / res;
      hits += inside(x);
      ++total;
    }
  } else {
    for (int i = 0; i < res; ++i)
      for (int j = 0; j < res; ++j) {
        x[0] = (i + 0.5) / res;
        x[1] = (j + 0.5) / res;
        hits += inside(x);
        ++total;
      }
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

/// Optimal max edge error over all b in {0,1}^n with b_i = 0 where beta_i = 0.
inline double best_rounding_error(Index n, const std::vector<std::vector<Index>>& edges, const std::vector<double>& beta) {
  double best = INFINITY;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    bool ok = true;
    for (Index v = 0; v < n; ++v)
      if ((mask >> v) & 1u) ok = ok && beta[static_cast<std::size_t>(v)] > 0.0;
    if (!ok) continue;
    double worst = 0.0;
    for (const auto& e : edges) {
      double s = 0.0;
      for (Index v : e) s += beta[static_cast<std::size_t>(v)] - static_cast<double>((mask >> v) & 1u);
      worst = std::max(worst, std::abs(s));
    }
    best = std::min(best, worst);
  }
  return best;
}

inline double edge_error(const std::vector<std::vector<Index>>& edges, const std::vector<double>& beta,
                         const std::vector<std::int8_t>& b) {
  double worst = 0.0;
  for (const auto& e : edges) {
    double s = 0.0;
    for (Index v : e) s += beta[static_cast<std::size_t>(v)] - b[static_cast<std::size_t>(v)];
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

/// max over prefixes J of |sum_{j <= J} (b - beta)| for 1- or 2-d row-major arrays.
inline double prefix_error(const std::vector<Index>& shape, const std::vector<double>& beta, const std::vector<double>& b) {
  double best = 0.0;
  if (shape.size() == 1) {
    double s = 0.0;
    for (Index i = 0; i < shape[0]; ++i) {
      s += b[static_cast<std::size_t>(i)] - beta[static_cast<std::size_t>(i)];
      best = std::max(best, std::abs(s));
    }
    return best;
  }
  for (Index j1 = 1; j1 <= shape[0]; ++j1)
    for (Index j2 = 1; j2 <= shape[1]; ++j2) {
      double s = 0.0;
      for (Index x = 0; x < j1; ++x)
        for (Index y = 0; y < j2; ++y) {
          const auto f = static_cast<std::size_t>(x * shape[1] + y);
          s += b[f] - beta[f];
        }
      best = std::max(best, std::abs(s));
    }
  return best;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace oracle
