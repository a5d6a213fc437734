#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "radproj/geometry.hpp"

namespace radproj {

/// Bin in parameter space. d = 2: angle in [a0, a1). d = 3: z in [b0, b1),
/// longitude in [a0, a1); on S^2 the area element is dz dphi.
struct BinExtent {
    double a0 = 0.0, a1 = 0.0;
    double b0 = 0.0, b1 = 0.0;
};

/// Equal-area partition of S^{d-1}. d = 2 uses uniform arcs; d = 3 uses the
/// recursive zonal construction (polar caps plus collars of equal-area cells).
class SphereGrid {
public:
    static SphereGrid make(int dim, std::size_t resolution);

    int dim() const { return dim_; }
    std::size_t size() const { return centers_.size(); }
    const Point& center(std::size_t bin) const { return centers_[bin]; }
    std::span<const Point> centers() const { return centers_; }
    double area(std::size_t) const { return bin_area_; }
    double bin_area() const { return bin_area_; }
    double total_area() const { return dim_ == 2 ? 2.0 * kPi : 4.0 * kPi; }
    BinExtent extent(std::size_t bin) const;

    /// Bin containing the unit vector e. Intervals are half-open, [lower, upper).
    std::size_t locate(const Point& e) const;
    /// Same, from the planar angle in radians (d = 2 only).
    std::size_t locate_angle(double theta) const;

    static Point direction(int dim, double a, double b);

private:
    struct Zone {
        double z_hi, z_lo;
        std::size_t first, count;
    };

    int dim_ = 2;
    double bin_area_ = 0.0;
    std::vector<Point> centers_;
    std::vector<Zone> zones_;  // d = 3 only, north to south
};

/// Density (mass per unit H^{d-1}) per bin of a shared grid.
class SphereDensity {
public:
    SphereDensity(std::shared_ptr<const SphereGrid> grid, std::vector<double> values);

    const SphereGrid& grid() const { return *grid_; }
    std::shared_ptr<const SphereGrid> grid_ptr() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double value(std::size_t bin) const { return values_[bin]; }
    double mass() const;
    double max_value() const;

private:
    std::shared_ptr<const SphereGrid> grid_;
    std::vector<double> values_;
};

/// (sum value^p * area)^{1/p}.
double lp_norm_sphere(const SphereDensity& f, double p);

/// Great-circle distance between unit vectors.
inline double geodesic_distance(const Point& a, const Point& b) {
    const double c = dot(a, b);
    const double s = norm(cross(a, b));
    return std::atan2(s, c);
}

}  // namespace radproj
