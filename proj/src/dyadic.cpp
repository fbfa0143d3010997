#include "nuqmc/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace nuqmc {

namespace {

constexpr double kMaxLattice = 16777216.0;       // 2^24
constexpr double kMaxIncidences = 134217728.0;   // 2^27

// Advances a row-major multi-index over `extent`; false after the last one.
bool next_index(std::vector<Index>& idx, const std::vector<Index>& extent) {
  for (auto s = static_cast<std::ptrdiff_t>(idx.size()) - 1; s >= 0; --s) {
    if (++idx[static_cast<std::size_t>(s)] < extent[static_cast<std::size_t>(s)]) return true;
    idx[static_cast<std::size_t>(s)] = 0;
  }
  return false;
}

std::int64_t ipow(std::int64_t base, Index e) {
  std::int64_t r = 1;
  for (Index k = 0; k < e; ++k) r *= base;
  return r;
}

}  // namespace

std::int64_t DyadicScheme::lattice_points() const { return ipow(n_hat, d); }

std::int64_t DyadicScheme::edge_count() const {
  return level_offset.empty() ? 0 : level_offset.back();
}

Index DyadicScheme::degree() const { return static_cast<Index>(ipow(m + 1, d)); }

std::int64_t DyadicScheme::edge_id(std::size_t level, const std::vector<Index>& j) const {
  const auto& lv = levels[level];
  std::int64_t id = 0;
  for (Index s = 0; s < d; ++s) id = id * (n_hat >> lv[static_cast<std::size_t>(s)]) + j[static_cast<std::size_t>(s)];
  return level_offset[level] + id;
}

DyadicBuild build_scheme(Index n, Index d) {
  detail::require(n >= 1, "dyadic scheme needs N >= 1");
  detail::require(d >= 1, "dyadic scheme needs d >= 1");
  DyadicScheme sc;
  sc.n = n;
  sc.d = d;
  sc.n_hat = 1;
  while (sc.n_hat < n) {
    sc.n_hat *= 2;
    ++sc.m;
  }
  const double lattice = std::pow(static_cast<double>(sc.n_hat), static_cast<double>(d));
  const double incid = lattice * std::pow(static_cast<double>(sc.m + 1), static_cast<double>(d));
  if (lattice > kMaxLattice) {
    throw BudgetExceeded("dyadic scheme has " + std::to_string(lattice) + " lattice points (limit 2^24)");
  }
  if (incid > kMaxIncidences) {
    throw BudgetExceeded("dyadic hypergraph has " + std::to_string(incid) + " incidences (limit 2^27)");
  }

  const std::vector<Index> level_extent(static_cast<std::size_t>(d), sc.m + 1);
  std::vector<Index> lv(static_cast<std::size_t>(d), 0);
  sc.level_offset.push_back(0);
  do {
    sc.levels.push_back(lv);
    std::int64_t cells = 1;
    for (Index s = 0; s < d; ++s) cells *= sc.n_hat >> lv[static_cast<std::size_t>(s)];
    sc.level_offset.push_back(sc.level_offset.back() + cells);
  } while (next_index(lv, level_extent));

  std::vector<std::int64_t> stride(static_cast<std::size_t>(d), 1);
  for (Index s = d - 2; s >= 0; --s) stride[static_cast<std::size_t>(s)] = stride[static_cast<std::size_t>(s) + 1] * sc.n_hat;

  const auto total_points = sc.lattice_points();
  std::vector<std::int64_t> offsets;
  offsets.reserve(static_cast<std::size_t>(sc.edge_count()) + 1);
  offsets.push_back(0);
  std::vector<std::int32_t> members;
  members.reserve(static_cast<std::size_t>(total_points * sc.degree()));

  for (const auto& level : sc.levels) {
    std::vector<Index> cell_extent(static_cast<std::size_t>(d)), side(static_cast<std::size_t>(d));
    for (Index s = 0; s < d; ++s) {
      side[static_cast<std::size_t>(s)] = Index{1} << level[static_cast<std::size_t>(s)];
      cell_extent[static_cast<std::size_t>(s)] = sc.n_hat >> level[static_cast<std::size_t>(s)];
    }
    const auto level_start = members.size();
    std::vector<Index> j(static_cast<std::size_t>(d), 0);
    do {
      std::int64_t base = 0;
      for (Index s = 0; s < d; ++s) base += j[static_cast<std::size_t>(s)] * side[static_cast<std::size_t>(s)] * stride[static_cast<std::size_t>(s)];
      std::vector<Index> k(static_cast<std::size_t>(d), 0);
      do {
        std::int64_t v = base;
        for (Index s = 0; s < d; ++s) v += k[static_cast<std::size_t>(s)] * stride[static_cast<std::size_t>(s)];
        members.push_back(static_cast<std::int32_t>(v));
      } while (next_index(k, side));
      offsets.push_back(static_cast<std::int64_t>(members.size()));
    } while (next_index(j, cell_extent));
    if (static_cast<std::int64_t>(members.size() - level_start) != total_points) {
      throw std::logic_error("dyadic level does not partition the lattice");
    }
  }

  DyadicBuild out{sc, Hypergraph::from_csr(total_points, std::move(offsets), std::move(members))};
  if (out.graph.m() != sc.edge_count()) throw std::logic_error("dyadic edge count mismatch");
  for (Index v = 0; v < out.graph.n(); ++v) {
    if (out.graph.degree(v) != sc.degree()) throw std::logic_error("dyadic vertex degree differs from (m+1)^d");
  }
  return out;
}

std::vector<std::int64_t> decompose_prefix(const DyadicScheme& sc, const std::vector<Index>& j) {
  detail::require(static_cast<Index>(j.size()) == sc.d, "prefix dimension mismatch");
  // Per axis: (level, cell index) of the binary pieces of {1..J_s}.
  std::vector<std::vector<std::pair<Index, Index>>> pieces(static_cast<std::size_t>(sc.d));
  for (Index s = 0; s < sc.d; ++s) {
    const Index js = j[static_cast<std::size_t>(s)];
    detail::require(js >= 0 && js <= sc.n_hat, "prefix index outside [0, N_hat]");
    Index start = 0;
    for (Index k = sc.m; k >= 0; --k) {
      if (js & (Index{1} << k)) {
        pieces[static_cast<std::size_t>(s)].emplace_back(k, start >> k);
        start += Index{1} << k;
      }
    }
    if (pieces[static_cast<std::size_t>(s)].empty()) return {};
  }

  std::vector<std::int64_t> edges;
  std::vector<Index> extent(static_cast<std::size_t>(sc.d)), pick(static_cast<std::size_t>(sc.d), 0);
  for (Index s = 0; s < sc.d; ++s) extent[static_cast<std::size_t>(s)] = static_cast<Index>(pieces[static_cast<std::size_t>(s)].size());
  std::vector<Index> cell(static_cast<std::size_t>(sc.d));
  do {
    std::size_t level = 0;
    for (Index s = 0; s < sc.d; ++s) {
      const auto& pc = pieces[static_cast<std::size_t>(s)][static_cast<std::size_t>(pick[static_cast<std::size_t>(s)])];
      level = level * static_cast<std::size_t>(sc.m + 1) + static_cast<std::size_t>(pc.first);
      cell[static_cast<std::size_t>(s)] = pc.second;
    }
    edges.push_back(sc.edge_id(level, cell));
  } while (next_index(pick, extent));
  return edges;
}

std::vector<Index> morton_order(const DyadicScheme& sc) {
  const auto total = sc.lattice_points();
  std::vector<std::pair<std::uint64_t, Index>> keyed(static_cast<std::size_t>(total));
  std::vector<Index> coord(static_cast<std::size_t>(sc.d));
  for (Index v = 0; v < total; ++v) {
    Index rest = v;
    for (Index s = sc.d - 1; s >= 0; --s) {
      coord[static_cast<std::size_t>(s)] = rest % sc.n_hat;
      rest /= sc.n_hat;
    }
    std::uint64_t key = 0;
    for (Index bit = sc.m - 1; bit >= 0; --bit) {
      for (Index s = 0; s < sc.d; ++s) key = (key << 1) | static_cast<std::uint64_t>((coord[static_cast<std::size_t>(s)] >> bit) & 1);
    }
    keyed[static_cast<std::size_t>(v)] = {key, v};
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<Index> order(keyed.size());
  for (std::size_t k = 0; k < keyed.size(); ++k) order[k] = keyed[k].second;
  return order;
}

GridArray::GridArray(std::vector<Index> shape_, double fill) : shape(std::move(shape_)) {
  detail::require(!shape.empty(), "array needs at least one axis");
  std::int64_t total = 1;
  for (Index s : shape) {
    detail::require(s >= 1, "array extents must be >= 1");
    total *= s;
  }
  values.assign(static_cast<std::size_t>(total), fill);
}

std::int64_t GridArray::flat(const std::vector<Index>& idx) const {
  std::int64_t f = 0;
  for (std::size_t s = 0; s < shape.size(); ++s) f = f * shape[s] + idx[s];
  return f;
}

PrefixError max_prefix_error(const GridArray& beta, const GridArray& b) {
  detail::require(beta.shape == b.shape && beta.values.size() == b.values.size(), "array shapes differ");
  const Index d = beta.dim();
  std::vector<double> c(beta.values.size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = b.values[k] - beta.values[k];
  std::int64_t stride = 1;
  for (Index s = d - 1; s >= 0; --s) {
    const Index ext = beta.shape[static_cast<std::size_t>(s)];
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(c.size()); ++k) {
      if ((k / stride) % ext != 0) c[static_cast<std::size_t>(k)] += c[static_cast<std::size_t>(k - stride)];
    }
    stride *= ext;
  }
  PrefixError out;
  out.witness.assign(static_cast<std::size_t>(d), 0);
  std::int64_t best = -1;
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(c.size()); ++k) {
    if (std::abs(c[static_cast<std::size_t>(k)]) > out.value) {
      out.value = std::abs(c[static_cast<std::size_t>(k)]);
      best = k;
    }
  }
  if (best >= 0) {
    for (Index s = d - 1; s >= 0; --s) {
      out.witness[static_cast<std::size_t>(s)] = best % beta.shape[static_cast<std::size_t>(s)] + 1;
      best /= beta.shape[static_cast<std::size_t>(s)];
    }
  }
  return out;
}

double dyadic_paper_constant(Index n, Index d) {
  const double dd = static_cast<double>(d);
  return 10.0 * std::sqrt(dd) * std::pow(2.0 + std::log2(static_cast<double>(n)), (3.0 * dd + 1.0) / 2.0);
}

RoundedArray round_array(const GridArray& beta, BalancingEngine engine, std::uint64_t seed) {
  const Index d = beta.dim();
  detail::require(d >= 1, "array needs at least one axis");
  const Index n = *std::max_element(beta.shape.begin(), beta.shape.end());
  for (double v : beta.values) detail::require(v >= 0.0 && v <= 1.0, "beta values must lie in [0,1]");

  const DyadicBuild build = build_scheme(n, d);
  const auto& sc = build.scheme;

  // Pad to N_hat per axis (row-major over the padded lattice).
  std::vector<double> padded(static_cast<std::size_t>(sc.lattice_points()), 0.0);
  std::vector<std::int64_t> map(beta.values.size());
  {
    std::vector<Index> idx(static_cast<std::size_t>(d), 0);
    std::int64_t k = 0;
    do {
      std::int64_t f = 0;
      for (Index s = 0; s < d; ++s) f = f * sc.n_hat + idx[static_cast<std::size_t>(s)];
      map[static_cast<std::size_t>(k)] = f;
      padded[static_cast<std::size_t>(f)] = beta.values[static_cast<std::size_t>(k)];
      ++k;
    } while (next_index(idx, beta.shape));
  }

  std::vector<Index> order;
  if (engine == BalancingEngine::beck_fiala) order = morton_order(sc);
  const RoundingResult rr = round_with(engine, build.graph, padded, seed, order);

  RoundedArray out;
  out.b = GridArray(beta.shape, 0.0);
  for (std::size_t k = 0; k < map.size(); ++k) out.b.values[k] = static_cast<double>(rr.b[static_cast<std::size_t>(map[k])]);

  auto& cert = out.certificate;
  cert.engine = engine;
  cert.fallback = rr.fallback;
  cert.n = n;
  cert.d = d;
  cert.levels = sc.degree();
  cert.per_edge_error = rr.achieved_error;
  cert.engine_bound = rr.guaranteed_bound;
  cert.prefix_bound = rr.achieved_error * static_cast<double>(cert.levels);
  cert.guaranteed_prefix_bound = rr.guaranteed_bound * static_cast<double>(cert.levels);
  const PrefixError pe = max_prefix_error(beta, out.b);
  cert.measured_prefix_error = pe.value;
  cert.witness = pe.witness;
  cert.paper_constant = dyadic_paper_constant(n, d);

  const double slack = 1e-9 * std::max(1.0, cert.prefix_bound);
  if (cert.measured_prefix_error > cert.prefix_bound + slack) {
    throw std::logic_error("measured prefix error exceeds per-edge error times (m+1)^d");
  }
  if (engine == BalancingEngine::beck_fiala && cert.per_edge_error > cert.engine_bound + 1e-9) {
    throw std::logic_error("Beck-Fiala per-edge error exceeds 2*Delta-1");
  }
  return out;
}

void write_array(const std::string& path, const GridArray& a) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(a.values.data()), static_cast<std::streamsize>(a.values.size() * sizeof(double)));
}

GridArray read_array(const std::string& path, std::vector<Index> shape) {
  GridArray a(std::move(shape));
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path);
  f.read(reinterpret_cast<char*>(a.values.data()), static_cast<std::streamsize>(a.values.size() * sizeof(double)));
  if (f.gcount() != static_cast<std::streamsize>(a.values.size() * sizeof(double))) {
    throw PreconditionError(path + " is shorter than the requested shape");
  }
  return a;
}

}  // namespace nuqmc
