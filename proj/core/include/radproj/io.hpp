#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "radproj/energy.hpp"
#include "radproj/identity.hpp"
#include "radproj/measure.hpp"
#include "radproj/projections.hpp"
#include "radproj/scanner.hpp"
#include "radproj/sphere.hpp"

namespace radproj::io {

/// Serializers emit compact, key-sorted JSON with round-trip doubles, so equal
/// inputs give byte-identical output.

std::string measure_json(const DiscreteMeasure& mu);
std::string grid_json(const GridDensity& mu);
std::string sphere_grid_json(const SphereGrid& grid);
std::string sphere_density_json(const SphereDensity& f);
std::string direction_density_json(const DirectionDensity& f);
std::string energy_json(const EnergyReport& r);
std::string lemma1_json(const std::vector<Lemma1Report>& reports);
std::string mollification_json(const MollificationStudy& study);
std::string scan_json(const ScanReport& r);
std::string dimension_json(const DimensionEstimate& d);

using AnyMeasure = std::variant<DiscreteMeasure, GridDensity>;

/// Parses {dim, points, weights} or {dim, origin, spacing, shape, values}.
AnyMeasure parse_measure_json(const std::string& text);
/// One point per line, last column the weight; a non-numeric first line is a header.
DiscreteMeasure parse_measure_csv(const std::string& text, int dim);
/// Dispatches on extension (.json / .csv). Missing files raise ErrorCode::io naming the path.
AnyMeasure read_measure(const std::filesystem::path& path, int dim_hint = 2);

/// Plain point list (x,y[,z]); used for bad sets and box counting.
std::string points_csv(const std::vector<Point>& points, int dim);
std::vector<Point> parse_points_csv(const std::string& text, int dim);

std::string sphere_density_csv(const SphereDensity& f);
std::string direction_density_csv(const DirectionDensity& f);
/// x, y[, z], norm at each resolution, bad flag.
std::string scan_csv(const ScanReport& r);
/// ASCII PGM of log norms at the finest resolution over the centre lattice
/// (d = 2 only; masked centres are black).
std::string scan_pgm(const ScanReport& r);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace radproj::io
