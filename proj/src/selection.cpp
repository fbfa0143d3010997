#include "nuqmc/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nuqmc {

CellDecomposition decompose(const PointSet& z, Index n) {
  const Index k = z.size();
  detail::require(n >= 1, "selection needs N >= 1");
  detail::require(n * n <= k, "selection needs N <= sqrt(K) (N = " + std::to_string(n) +
                                  ", K = " + std::to_string(k) + ")");
  const Index d = z.dim();

  CellDecomposition dec;
  dec.k = k;
  dec.n = n;
  dec.d = d;
  dec.slab.assign(static_cast<std::size_t>(d), std::vector<std::int32_t>(static_cast<std::size_t>(k)));
  std::vector<Index> order(static_cast<std::size_t>(k));
  for (Index s = 0; s < d; ++s) {
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return z(a, s) < z(b, s); });
    auto& slab = dec.slab[static_cast<std::size_t>(s)];
    for (Index r = 1; r <= k; ++r) {
      const Index i = (r * n + k - 1) / k;  // ceil(r N / K), 1-based slab
      slab[static_cast<std::size_t>(order[static_cast<std::size_t>(r - 1)])] = static_cast<std::int32_t>(i - 1);
    }
  }

  dec.counts = GridArray(std::vector<Index>(static_cast<std::size_t>(d), n), 0.0);
  dec.cell.resize(static_cast<std::size_t>(k));
  for (Index p = 0; p < k; ++p) {
    std::int64_t f = 0;
    for (Index s = 0; s < d; ++s) f = f * n + dec.slab[static_cast<std::size_t>(s)][static_cast<std::size_t>(p)];
    dec.cell[static_cast<std::size_t>(p)] = f;
    dec.counts.values[static_cast<std::size_t>(f)] += 1.0;
  }

  const double scale = static_cast<double>(n) / static_cast<double>(k + n);
  dec.beta = GridArray(dec.counts.shape, 0.0);
  double total = 0.0;
  for (std::size_t c = 0; c < dec.counts.values.size(); ++c) {
    total += dec.counts.values[c];
    dec.beta.values[c] = scale * dec.counts.values[c];
    if (dec.beta.values[c] > 1.0) {
      throw PreconditionError("cell occupancy exceeds (K+N)/N; scaled value would leave [0,1]");
    }
  }
  if (total != static_cast<double>(k)) throw std::logic_error("cells do not partition the points");
  return dec;
}

std::int64_t slab_boundary_count(const CellDecomposition& dec, const std::vector<Index>& j) {
  detail::require(static_cast<Index>(j.size()) == dec.d, "prefix dimension mismatch");
  std::int64_t count = 0;
  for (Index p = 0; p < dec.k; ++p) {
    bool in_next = true;
    bool in_current = true;
    for (Index s = 0; s < dec.d; ++s) {
      const Index slab1 = dec.slab[static_cast<std::size_t>(s)][static_cast<std::size_t>(p)] + 1;
      in_next = in_next && slab1 <= j[static_cast<std::size_t>(s)] + 1;
      in_current = in_current && slab1 <= j[static_cast<std::size_t>(s)];
    }
    count += (in_next && !in_current) ? 1 : 0;
  }
  return count;
}

SelectionResult select_subset(const PointSet& z, Index n, BalancingEngine engine, std::uint64_t seed) {
  const CellDecomposition dec = decompose(z, n);
  const RoundedArray rounded = round_array(dec.beta, engine, seed);

  // Lowest original index per cell.
  std::vector<Index> rep(dec.counts.values.size(), -1);
  for (Index p = dec.k - 1; p >= 0; --p) rep[static_cast<std::size_t>(dec.cell[static_cast<std::size_t>(p)])] = p;

  std::vector<Index> chosen;
  for (std::size_t c = 0; c < rep.size(); ++c) {
    if (rounded.b.values[c] == 1.0) {
      if (rep[c] < 0) throw std::logic_error("an empty cell was rounded to 1");
      chosen.push_back(rep[c]);
    }
  }
  std::sort(chosen.begin(), chosen.end());

  SelectionResult out;
  out.raw_selected_count = static_cast<Index>(chosen.size());
  if (static_cast<Index>(chosen.size()) > n) {
    chosen.resize(static_cast<std::size_t>(n));
  } else if (static_cast<Index>(chosen.size()) < n) {
    std::vector<char> used(static_cast<std::size_t>(dec.k), 0);
    for (Index p : chosen) used[static_cast<std::size_t>(p)] = 1;
    for (Index p = 0; p < dec.k && static_cast<Index>(chosen.size()) < n; ++p) {
      if (!used[static_cast<std::size_t>(p)]) chosen.push_back(p);
    }
    std::sort(chosen.begin(), chosen.end());
  }
  out.indices = chosen;
  out.selected = z.subset(out.indices);

  auto& cert = out.certificate;
  const double dd = static_cast<double>(dec.d);
  cert.dyadic = rounded.certificate;
  cert.prefix_bound = rounded.certificate.prefix_bound;
  cert.g_bound = cert.prefix_bound + 1.0;
  cert.q_bound = 2.0 * (cert.prefix_bound + 1.0);
  cert.slab_bound = 2.0 * dd * static_cast<double>(dec.k) / static_cast<double>(n);
  cert.box_bound = 6.0 * cert.prefix_bound + 4.0 * dd + 6.0;
  cert.measured_box_bound = 6.0 * rounded.certificate.measured_prefix_error + 4.0 * dd + 6.0;
  cert.paper_box_bound = 6.0 * dyadic_paper_constant(n, dec.d) + 4.0 * dd + 6.0;

  if (std::abs(static_cast<double>(out.raw_selected_count - n)) > cert.g_bound + 1e-9) {
    throw std::logic_error("raw selection size is farther from N than the certified gap");
  }
  return out;
}

}  // namespace nuqmc
