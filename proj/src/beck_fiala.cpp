#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "nuqmc/balancing.hpp"

namespace nuqmc {

namespace {

constexpr double kSnap = 1e-12;
constexpr double kPivot = 1e-10;
constexpr std::size_t kMinWindow = 8;

void check_beta(const Hypergraph& h, std::span<const double> beta) {
  detail::require(static_cast<Index>(beta.size()) == h.n(), "beta must have one entry per vertex");
  for (std::size_t i = 0; i < beta.size(); ++i) {
    detail::require(beta[i] >= 0.0 && beta[i] <= 1.0,
                    "beta[" + std::to_string(i) + "] outside [0,1] (values are not clamped)");
  }
}

class FloatingColors {
 public:
  FloatingColors(const Hypergraph& h, std::span<const double> beta)
      : h_(h), x_(beta.begin(), beta.end()), floating_(beta.size(), 0),
        count_(static_cast<std::size_t>(h.m()), 0), delta_(h.max_degree()) {
    for (std::size_t v = 0; v < x_.size(); ++v) {
      if (x_[v] > 0.0 && x_[v] < 1.0) {
        floating_[v] = 1;
        ++num_floating_;
        for (auto e : h_.incident(static_cast<Index>(v))) ++count_[static_cast<std::size_t>(e)];
      }
    }
  }

  void run(std::span<const Index> order) {
    std::vector<Index> pending;
    for (Index v : order) {
      if (floating_[static_cast<std::size_t>(v)]) pending.push_back(v);
    }
    std::size_t window = kMinWindow;
    while (num_floating_ > 0) {
      std::size_t pos = 0;
      while (pos < pending.size() && num_floating_ > 0) {
        // Gather the next `window` floating variables, wrapping around.
        std::vector<Index> s;
        std::size_t p = pos;
        std::size_t visited = 0;
        while (s.size() < window && visited < pending.size()) {
          const Index v = pending[p % pending.size()];
          if (floating_[static_cast<std::size_t>(v)]) s.push_back(v);
          ++p;
          ++visited;
        }
        if (s.empty()) break;

        Eigen::MatrixXd z = null_space(s);
        if (z.cols() == 0) {
          if (static_cast<Index>(s.size()) >= num_floating_) {
            throw std::logic_error("floating-colors system has no null space with all variables free");
          }
          window *= 2;
          continue;
        }
        if (static_cast<std::size_t>(z.cols()) * 2 > s.size() && window > kMinWindow) window /= 2;
        freeze_along(s, z);
        pos = std::min(p, pending.size());
      }
      pending.erase(std::remove_if(pending.begin(), pending.end(),
                                   [&](Index v) { return !floating_[static_cast<std::size_t>(v)]; }),
                    pending.end());
    }
  }

  const std::vector<double>& values() const { return x_; }

 private:
  bool active(std::int32_t e) const { return count_[static_cast<std::size_t>(e)] > delta_; }

  // Orthonormal basis of directions on `s` that keep every active edge sum.
  Eigen::MatrixXd null_space(const std::vector<Index>& s) {
    std::unordered_map<std::int32_t, std::vector<int>> rows_by_edge;
    for (std::size_t r = 0; r < s.size(); ++r) {
      for (auto e : h_.incident(s[r])) {
        if (active(e)) rows_by_edge[e].push_back(static_cast<int>(r));
      }
    }
    std::vector<std::vector<int>> rows;
    rows.reserve(rows_by_edge.size());
    for (auto& [e, members] : rows_by_edge) rows.push_back(std::move(members));
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());

    const auto t = static_cast<Index>(s.size());
    if (rows.empty()) return Eigen::MatrixXd::Identity(t, t);

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Index>(rows.size()), t);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (int r : rows[i]) a(static_cast<Index>(i), r) = 1.0;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(kPivot);
    if (lu.dimensionOfKernel() == 0) return Eigen::MatrixXd(t, 0);
    const Eigen::MatrixXd kernel = lu.kernel();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(kernel);
    return qr.householderQ() * Eigen::MatrixXd::Identity(t, kernel.cols());
  }

  void freeze(Index v, double value) {
    x_[static_cast<std::size_t>(v)] = value;
    floating_[static_cast<std::size_t>(v)] = 0;
    --num_floating_;
    for (auto e : h_.incident(v)) --count_[static_cast<std::size_t>(e)];
  }

  void freeze_along(const std::vector<Index>& s, Eigen::MatrixXd z) {
    const auto t = static_cast<Index>(s.size());
    std::vector<char> live(s.size(), 1);
    while (z.cols() > 0) {
      const Eigen::VectorXd y = z.col(0);
      double up = std::numeric_limits<double>::infinity();
      double down = std::numeric_limits<double>::infinity();
      Index up_at = -1, down_at = -1;
      for (Index r = 0; r < t; ++r) {
        if (!live[static_cast<std::size_t>(r)] || std::abs(y[r]) < 1e-13) continue;
        const double xv = x_[static_cast<std::size_t>(s[static_cast<std::size_t>(r)])];
        const double to_top = y[r] > 0 ? (1.0 - xv) / y[r] : xv / -y[r];
        const double to_bottom = y[r] > 0 ? xv / y[r] : (1.0 - xv) / -y[r];
        if (to_top < up) {
          up = to_top;
          up_at = r;
        }
        if (to_bottom < down) {
          down = to_bottom;
          down_at = r;
        }
      }
      if (up_at < 0) {
        drop_column(z, 0);
        continue;
      }
      const double step = up <= down ? up : -down;
      const Index hit = up <= down ? up_at : down_at;
      for (Index r = 0; r < t; ++r) {
        if (live[static_cast<std::size_t>(r)]) x_[static_cast<std::size_t>(s[static_cast<std::size_t>(r)])] += step * y[r];
      }
      // The variable that limited the step lands exactly on its boundary.
      const bool hit_top = (step > 0) == (y[hit] > 0);
      x_[static_cast<std::size_t>(s[static_cast<std::size_t>(hit)])] = hit_top ? 1.0 : 0.0;

      std::vector<std::pair<Index, Index>> frozen;  // (vertex, local row)
      for (Index r = 0; r < t; ++r) {
        if (!live[static_cast<std::size_t>(r)]) continue;
        const double xv = x_[static_cast<std::size_t>(s[static_cast<std::size_t>(r)])];
        if (xv <= kSnap || xv >= 1.0 - kSnap) frozen.emplace_back(s[static_cast<std::size_t>(r)], r);
      }
      std::sort(frozen.begin(), frozen.end());
      for (auto [v, r] : frozen) {
        freeze(v, x_[static_cast<std::size_t>(v)] >= 0.5 ? 1.0 : 0.0);
        live[static_cast<std::size_t>(r)] = 0;
        eliminate_row(z, r);
      }
    }
  }

  static void drop_column(Eigen::MatrixXd& z, Index j) {
    const Index last = z.cols() - 1;
    if (j != last) z.col(j) = z.col(last);
    z.conservativeResize(Eigen::NoChange, last);
  }

  // Restricts the basis to directions with zero component in row r.
  static void eliminate_row(Eigen::MatrixXd& z, Index r) {
    if (z.cols() == 0) return;
    Index pivot = 0;
    z.row(r).cwiseAbs().maxCoeff(&pivot);
    const double pv = z(r, pivot);
    if (std::abs(pv) > 1e-12) {
      for (Index c = 0; c < z.cols(); ++c) {
        if (c != pivot) z.col(c) -= (z(r, c) / pv) * z.col(pivot);
      }
      drop_column(z, pivot);
    }
    z.row(r).setZero();
    for (Index c = z.cols() - 1; c >= 0; --c) {
      const double nrm = z.col(c).norm();
      if (nrm < 1e-10) {
        drop_column(z, c);
      } else {
        z.col(c) /= nrm;
      }
    }
  }

  const Hypergraph& h_;
  std::vector<double> x_;
  std::vector<char> floating_;
  std::vector<Index> count_;
  Index delta_;
  Index num_floating_ = 0;
};

}  // namespace

RoundingResult beck_fiala_round(const Hypergraph& h, std::span<const double> beta, std::span<const Index> order) {
  check_beta(h, beta);
  std::vector<Index> identity;
  if (order.empty()) {
    identity.resize(static_cast<std::size_t>(h.n()));
    std::iota(identity.begin(), identity.end(), Index{0});
    order = identity;
  } else {
    detail::require(static_cast<Index>(order.size()) == h.n(), "order must be a permutation of the vertices");
    std::vector<char> seen(order.size(), 0);
    for (Index v : order) {
      detail::require(v >= 0 && v < h.n() && !seen[static_cast<std::size_t>(v)],
                      "order must be a permutation of the vertices");
      seen[static_cast<std::size_t>(v)] = 1;
    }
  }

  FloatingColors engine(h, beta);
  engine.run(order);

  RoundingResult out;
  out.engine = BalancingEngine::beck_fiala;
  out.b.resize(beta.size());
  for (std::size_t v = 0; v < beta.size(); ++v) out.b[v] = engine.values()[v] >= 0.5 ? 1 : 0;
  out.achieved_error = edge_error(h, beta, out.b);
  out.guaranteed_bound = static_cast<double>(std::max<Index>(2 * h.max_degree() - 1, 0));
  out.walk_error = out.achieved_error;
  out.within_guaranteed = out.achieved_error <= out.guaranteed_bound;
  return out;
}

}  // namespace nuqmc
