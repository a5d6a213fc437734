#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "radproj/geometry.hpp"
#include "radproj/measure.hpp"
#include "radproj/projections.hpp"

namespace radproj {

/// Largest admissible L^p exponent, min{2 - t/(d-1), t/(2(d-1) - s)}.
/// Requires d-1 < s < d and 2(d-1) - s < t < d-1.
double admissible_p(int d, double s, double t);

struct ScanParams {
    int d = 2;
    double s = 1.5;
    double t = 0.8;
    double p = 1.2;
    double q = 6.0;
    /// (p - 1)(2(d-1) - s): how far the dimension bound moves above 2(d-1) - s at this p.
    double delta_p = 0.0;

    /// Validates the exponent ranges and p in (1, admissible_p].
    static ScanParams make(int d, double s, double t, double p);
    double bound() const { return 2.0 * (d - 1) - s; }
};

struct ScanOptions {
    double p = 2.0;
    double margin = 0.1;
    /// Sphere resolutions, each the double of the previous.
    std::vector<std::size_t> resolutions{360, 720, 1440, 2880};
    RadialOptions radial{};
};

struct ScanReport {
    int dim = 2;
    Box region;
    double step = 0.0;
    std::array<std::size_t, 3> shape{1, 1, 1};  // centre lattice over the region
    double p = 2.0;
    double margin = 0.0;
    std::vector<std::size_t> resolutions;
    /// Scanned centres (outside the margin) and their flat lattice index.
    std::vector<Point> centres;
    std::vector<std::size_t> lattice_index;
    std::size_t masked = 0;
    /// norms[c][r] = sum over bins of f^p * area at resolutions[r].
    std::vector<std::vector<double>> norms;
    double threshold = 1.5;
    std::vector<char> bad;
    std::vector<Point> bad_set;
    double dim_estimate = 0.0;
    double dim_band = 0.0;
    double bound = 0.0;
    std::vector<std::string> warnings;
};

ScanReport scan_centres(const DiscreteMeasure& mu, const Box& region, double step, const ScanOptions& options);
ScanReport scan_centres(const GridDensity& mu, const Box& region, double step, const ScanOptions& options);

struct BadSet {
    std::vector<std::size_t> indices;  // into report.centres
    std::vector<Point> points;
    std::vector<double> growth;        // per-doubling growth factor for every centre
    std::vector<std::string> warnings;
};

/// Centres whose norm grows by at least `threshold` per resolution doubling,
/// measured as (finest / coarsest)^{1/doublings}.
BadSet extract_bad_set(const ScanReport& report, double threshold);

/// Stores the bad set in the report (bad flags, points, threshold).
void apply_bad_set(ScanReport& report, double threshold);

struct DimensionEstimate {
    double dimension = 0.0;
    double band = 0.0;        // 2 standard errors of the slope
    double standard_error = 0.0;
    std::vector<double> scales;
    std::vector<std::size_t> counts;
};

/// Slope of log N(r) against log(1/r), N(r) = occupied boxes of side r.
DimensionEstimate box_dimension(std::span<const Point> points, int dim, std::span<const double> scales);

/// `count` dyadic scales from base * 2^{count-1} down to base.
std::vector<double> dyadic_scales(double base, std::size_t count);

}  // namespace radproj
