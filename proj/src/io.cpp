#include "nuqmc/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace nuqmc {

namespace fs = std::filesystem;

namespace {

double parse_number(std::string_view text, const std::string& where) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw PreconditionError("not a decimal number: '" + std::string(text) + "' (" + where + ")");
  }
  return v;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Json corner_json(const Vector& v) {
  Json out = Json::array();
  for (Index s = 0; s < v.size(); ++s) out.push_back(v[s]);
  return out;
}

Json index_json(const std::vector<Index>& v) {
  Json out = Json::array();
  for (Index x : v) out.push_back(x);
  return out;
}

Cdf1d cdf_from_json(const Json& c) {
  const std::string type = c.value("type", "");
  if (type == "uniform") return UniformCdf{};
  if (type == "power") {
    detail::require(c.contains("theta"), "power cdf needs \"theta\"");
    return PowerCdf{parse_decimal(c.at("theta"))};
  }
  if (type == "piecewise") {
    detail::require(c.contains("knots") && c.at("knots").is_array(), "piecewise cdf needs \"knots\"");
    std::vector<double> t, v;
    for (const auto& k : c.at("knots")) {
      detail::require(k.is_array() && k.size() == 2, "each knot is [t, F(t)]");
      t.push_back(parse_decimal(k[0]));
      v.push_back(parse_decimal(k[1]));
    }
    return PiecewiseLinearCdf(std::move(t), std::move(v));
  }
  throw PreconditionError("unknown cdf type '" + type + "' (expected uniform, power or piecewise)");
}

}  // namespace

std::string points_csv(const PointSet& ps, bool header) {
  std::string out;
  if (header) {
    for (Index s = 0; s < ps.dim(); ++s) out += (s ? ",x" : "x") + std::to_string(s + 1);
    out += '\n';
  }
  for (Index i = 0; i < ps.size(); ++i) {
    for (Index s = 0; s < ps.dim(); ++s) {
      if (s) out += ',';
      out += format_double(ps(i, s));
    }
    out += '\n';
  }
  return out;
}

void write_points_csv(const fs::path& path, const PointSet& ps, bool header) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw PreconditionError("cannot write " + path.string());
  f << points_csv(ps, header);
}

PointSet read_points_csv(const fs::path& path, bool header) {
  std::ifstream f(path);
  if (!f) throw PreconditionError("cannot read " + path.string());
  std::vector<double> values;
  Index cols = -1;
  std::string line;
  Index line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (header && line_no == 1) continue;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Index count = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string where = path.string() + ":" + std::to_string(line_no);
      values.push_back(parse_number(std::string_view(line).substr(start, comma - start), where));
      ++count;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cols < 0) cols = count;
    detail::require(count == cols, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                       std::to_string(cols) + " columns");
  }
  detail::require(cols > 0, path.string() + " contains no points");
  PointMatrix m(static_cast<Index>(values.size()) / cols, cols);
  std::copy(values.begin(), values.end(), m.data());
  return PointSet(std::move(m));
}

double parse_decimal(const Json& value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) return parse_number(value.get<std::string>(), "json");
  throw PreconditionError("expected a number or decimal string, got " + value.dump());
}

std::vector<Region> regions_from_json(const Json& cfg) {
  const Json& boxes = cfg.is_array() ? cfg : cfg.at("boxes");
  detail::require(boxes.is_array() && !boxes.empty(), "region needs a non-empty \"boxes\" array");
  std::vector<Region> out;
  for (const auto& b : boxes) {
    detail::require(b.is_array() && b.size() == 2 && b[0].is_array() && b[1].is_array() && b[0].size() == b[1].size(),
                    "each box is [[lo_1..lo_d], [hi_1..hi_d]]");
    Region r{Vector(static_cast<Index>(b[0].size())), Vector(static_cast<Index>(b[1].size()))};
    for (std::size_t s = 0; s < b[0].size(); ++s) {
      r.lo[static_cast<Index>(s)] = parse_decimal(b[0][s]);
      r.hi[static_cast<Index>(s)] = parse_decimal(b[1][s]);
    }
    out.push_back(std::move(r));
  }
  return out;
}

MeasurePtr measure_from_json(const Json& cfg, const fs::path& base_dir) {
  detail::require(cfg.is_object() && cfg.contains("type"), "measure config needs a \"type\"");
  const std::string type = cfg.at("type").get<std::string>();
  if (type == "uniform") {
    detail::require(cfg.contains("dim"), "uniform measure needs \"dim\"");
    return make_uniform(cfg.at("dim").get<Index>());
  }
  if (type == "product") {
    detail::require(cfg.contains("cdfs") && cfg.at("cdfs").is_array(), "product measure needs \"cdfs\"");
    std::vector<Cdf1d> cdfs;
    for (const auto& c : cfg.at("cdfs")) cdfs.push_back(cdf_from_json(c));
    return std::make_shared<ProductMeasure>(std::move(cdfs));
  }
  if (type == "restriction") return std::make_shared<RestrictionMeasure>(regions_from_json(cfg));
  if (type == "discrete") {
    detail::require(cfg.contains("points"), "discrete measure needs \"points\" (CSV path)");
    fs::path p = cfg.at("points").get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    return std::make_shared<DiscreteMeasure>(read_points_csv(p, cfg.value("header", false)));
  }
  throw PreconditionError("unknown measure type '" + type + "' (expected uniform, product, restriction or discrete)");
}

MeasurePtr load_measure(const fs::path& path) { return measure_from_json(read_json(path), path.parent_path()); }

BoxUnion load_region(const fs::path& path) { return BoxUnion(regions_from_json(read_json(path))); }

Json read_json(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw PreconditionError("cannot read " + path.string());
  try {
    return Json::parse(f);
  } catch (const Json::exception& e) {
    throw PreconditionError(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const Json& value) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw PreconditionError("cannot write " + path.string());
  f << value.dump(2) << '\n';
}

Json to_json(const DiscrepancyReport& report) {
  return {{"value", report.value},
          {"witness_corner", corner_json(report.witness.corner)},
          {"witness_closed", report.witness.closed},
          {"mode", to_string(report.mode)},
          {"boxes_scanned", report.boxes_scanned}};
}

Json to_json(const Hypergraph& h) {
  Json edges = Json::array();
  for (Index e = 0; e < h.m(); ++e) {
    Json edge = Json::array();
    for (auto v : h.edge(e)) edge.push_back(v);
    edges.push_back(std::move(edge));
  }
  return {{"n", h.n()}, {"edges", std::move(edges)}};
}

Hypergraph hypergraph_from_json(const Json& value) {
  detail::require(value.contains("n") && value.contains("edges"), "hypergraph JSON needs \"n\" and \"edges\"");
  std::vector<std::vector<Index>> edges;
  for (const auto& e : value.at("edges")) edges.push_back(e.get<std::vector<Index>>());
  return Hypergraph(value.at("n").get<Index>(), edges);
}

Json to_json(const RoundingResult& r) {
  Json b = Json::array();
  for (auto x : r.b) b.push_back(static_cast<int>(x));
  Json out = {{"b", std::move(b)},
              {"achieved_error", r.achieved_error},
              {"guaranteed_bound", r.guaranteed_bound},
              {"engine", to_string(r.engine)},
              {"fallback", r.fallback}};
  if (r.engine == BalancingEngine::partial_coloring) {
    out["lemma_bound"] = r.lemma_bound;
    out["walk_error"] = r.walk_error;
    out["within_guaranteed"] = r.within_guaranteed;
    out["within_lemma"] = r.within_lemma;
  }
  return out;
}

Json to_json(const DyadicCertificate& c) {
  return {{"engine", to_string(c.engine)},
          {"fallback", c.fallback},
          {"n", c.n},
          {"d", c.d},
          {"levels", c.levels},
          {"per_edge_error", c.per_edge_error},
          {"engine_bound", c.engine_bound},
          {"prefix_bound", c.prefix_bound},
          {"guaranteed_prefix_bound", c.guaranteed_prefix_bound},
          {"measured_prefix_error", c.measured_prefix_error},
          {"witness", index_json(c.witness)},
          {"paper_constant", c.paper_constant}};
}

Json to_json(const SelectionCertificate& c) {
  return {{"prefix_bound", c.prefix_bound},
          {"g_bound", c.g_bound},
          {"q_bound", c.q_bound},
          {"slab_bound", c.slab_bound},
          {"box_bound", c.box_bound},
          {"measured_box_bound", c.measured_box_bound},
          {"paper_box_bound", c.paper_box_bound},
          {"dyadic", to_json(c.dyadic)}};
}

Json to_json(const SelectionResult& r) {
  return {{"indices", index_json(r.indices)},
          {"raw_selected_count", r.raw_selected_count},
          {"certificate", to_json(r.certificate)}};
}

Json to_json(const ConstructionCertificate& c) {
  return {{"n", c.n},
          {"k", c.k},
          {"selection_term", c.selection_term},
          {"selection_term_engine", c.selection_term_engine},
          {"sampling_term", c.sampling_term},
          {"sampling_kind", c.sampling_kind},
          {"bound", c.bound},
          {"paper_bound", c.paper_bound},
          {"complete", c.complete},
          {"selection", to_json(c.selection)}};
}

Json to_json(const IntegrationReport& r) {
  return {{"estimate", r.estimate},
          {"reference", r.reference},
          {"abs_error", r.abs_error},
          {"n_points", r.n_points},
          {"method", to_string(r.method)},
          {"seed", r.seed},
          {"outside", r.outside}};
}

}  // namespace nuqmc
