#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "nuqmc/integration.hpp"

namespace nuqmc {

using Json = nlohmann::ordered_json;

/// Point-set CSV: one row per point, d decimal columns. With `header` the
/// first line is skipped on read and "x1,...,xd" is written.
PointSet read_points_csv(const std::filesystem::path& path, bool header = false);
void write_points_csv(const std::filesystem::path& path, const PointSet& ps, bool header = false);
std::string points_csv(const PointSet& ps, bool header = false);

/// Decimal string or JSON number, rounded once to the nearest double.
double parse_decimal(const Json& value);

/// {"type": "uniform", "dim": d}
/// {"type": "product", "cdfs": [{"type": "power", "theta": 2}, {"type": "piecewise",
///   "knots": [[0,0],[0.5,0.8],[1,1]]}, {"type": "uniform"}]}
/// {"type": "restriction", "boxes": [[[lo...],[hi...]], ...]}
/// {"type": "discrete", "points": "atoms.csv"}  (relative to base_dir)
MeasurePtr measure_from_json(const Json& cfg, const std::filesystem::path& base_dir = {});
MeasurePtr load_measure(const std::filesystem::path& path);

/// Boxes of a restriction config (the "boxes" member, or the whole value
/// when it is an array).
std::vector<Region> regions_from_json(const Json& cfg);
BoxUnion load_region(const std::filesystem::path& path);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& value);

Json to_json(const DiscrepancyReport& report);
Json to_json(const Hypergraph& h);
Hypergraph hypergraph_from_json(const Json& value);
Json to_json(const RoundingResult& r);
Json to_json(const DyadicCertificate& c);
Json to_json(const SelectionCertificate& c);
Json to_json(const SelectionResult& r);
Json to_json(const ConstructionCertificate& c);
Json to_json(const IntegrationReport& r);

}  // namespace nuqmc
