#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "radproj/geometry.hpp"
#include "radproj/measure.hpp"
#include "radproj/sphere.hpp"

namespace radproj {

/// Unit vector e in R^d together with an orthonormal frame of e^perp.
class Direction {
public:
    /// Normalizes v; rejects zero or non-finite input.
    Direction(int dim, const Point& v);

    int dim() const { return dim_; }
    const Point& vector() const { return e_; }
    /// Frame of e^perp; only the first dim - 1 vectors are meaningful.
    const std::array<Point, 2>& frame() const { return frame_; }
    /// Frame coordinates of the orthogonal projection of y onto e^perp.
    std::array<double, 2> coords(const Point& y) const { return {dot(frame_[0], y), dim_ == 3 ? dot(frame_[1], y) : 0.0}; }

private:
    int dim_;
    Point e_;
    std::array<Point, 2> frame_;
};

/// Requested histogram on e^perp: `bins` per axis, centred on the projected
/// support. half_width <= 0 selects the bounding-ball radius plus two bins.
struct HistogramSpec {
    std::size_t bins = 512;
    double half_width = 0.0;
};

/// Concrete bin layout on e^perp (bin i of axis k is centred at origin[k] + i * spacing).
struct HistogramLayout {
    std::array<double, 2> origin{0.0, 0.0};
    double spacing = 1.0;
    std::array<std::size_t, 2> shape{1, 1};

    std::size_t size() const { return shape[0] * shape[1]; }
    bool operator==(const HistogramLayout&) const = default;
};

HistogramLayout make_layout(const Direction& e, const Box& support, const HistogramSpec& spec);

/// Binned density of a pushforward onto e^perp.
class DirectionDensity {
public:
    DirectionDensity(Direction direction, HistogramLayout layout, std::vector<double> values);

    const Direction& direction() const { return direction_; }
    const HistogramLayout& layout() const { return layout_; }
    std::span<const double> values() const { return values_; }
    int dim() const { return direction_.dim(); }
    /// spacing^{d-1}
    double bin_measure() const;
    double mass() const;
    /// Frame coordinates of a bin centre.
    std::array<double, 2> bin_center(std::size_t flat) const;
    /// Multilinear interpolation between bin centres; zero outside the histogram.
    double value_at(const std::array<double, 2>& coords) const;

private:
    Direction direction_;
    HistogramLayout layout_;
    std::vector<double> values_;
};

/// Pushforward under y -> y - (y.e)e. Atoms go to the bin containing their image.
DirectionDensity orth_project(const DiscreteMeasure& mu, const Direction& e, const HistogramLayout& layout);
/// Cells carry uniform density. In the plane each cell's trapezoidal shadow is
/// integrated over the bins exactly; in R^3 cells are split into subsamples^3
/// pieces whose masses are shared between neighbouring bins by linear weights.
DirectionDensity orth_project(const GridDensity& mu, const Direction& e, const HistogramLayout& layout,
                              int subsamples = 2);
DirectionDensity orth_project(const DiscreteMeasure& mu, const Direction& e, const HistogramSpec& spec = {});
DirectionDensity orth_project(const GridDensity& mu, const Direction& e, const HistogramSpec& spec = {},
                              int subsamples = 2);

/// sum over bins of f^p times the w-mass of the bin. f and w must share a layout.
double lp_norm_weighted(const DirectionDensity& f, double p, const DirectionDensity& w);

/// How the Riesz-weighted measure is pushed to the sphere.
///  half_line: c_d = 1, plain pushforward under y -> (y - x)/|y - x|; its density
///             at e is the integral of mu(x + r e) over r > 0.
///  full_line: c_d = 2, pushforward symmetrized under e -> -e; its density at e
///             is the integral of mu(x + r e) over the whole line.
enum class FiberConvention { half_line, full_line };

double riesz_constant(FiberConvention convention);

/// mu_x = c_d |x - y|^{1-d} dmu(y). Non-owning: the base measure must outlive it.
class WeightedMeasure {
public:
    using Base = std::variant<const DiscreteMeasure*, const GridDensity*>;

    WeightedMeasure(Base base, const Point& center, FiberConvention convention, double total_mass)
        : base_(base), center_(center), convention_(convention), total_mass_(total_mass) {}

    const Base& base() const { return base_; }
    const Point& center() const { return center_; }
    FiberConvention convention() const { return convention_; }
    double c_d() const { return riesz_constant(convention_); }
    double total_mass() const { return total_mass_; }
    int dim() const;

private:
    Base base_;
    Point center_;
    FiberConvention convention_;
    double total_mass_;
};

WeightedMeasure weight_riesz(const DiscreteMeasure& mu, const Point& x,
                             FiberConvention convention = FiberConvention::half_line);
WeightedMeasure weight_riesz(const GridDensity& mu, const Point& x,
                             FiberConvention convention = FiberConvention::half_line);

/// Stratified jitter for grid densities: subsamples^d points per cell. The
/// jitter stream depends on (seed, cell) only, so translating measure and centre
/// together reproduces the same samples.
struct RadialOptions {
    int subsamples = 2;
    std::uint64_t seed = 0x5EEDULL;
};

using GridPtr = std::shared_ptr<const SphereGrid>;

SphereDensity radial_project(const DiscreteMeasure& mu, const Point& x, const GridPtr& grid);
SphereDensity radial_project(const GridDensity& mu, const Point& x, const GridPtr& grid, const RadialOptions& options = {});
SphereDensity radial_project(const WeightedMeasure& mu_x, const GridPtr& grid, const RadialOptions& options = {});

/// One pass over the samples, binned onto several grids at once.
std::vector<SphereDensity> radial_project_multi(const DiscreteMeasure& mu, const Point& x, std::span<const GridPtr> grids);
std::vector<SphereDensity> radial_project_multi(const GridDensity& mu, const Point& x, std::span<const GridPtr> grids,
                                                const RadialOptions& options = {});

/// Projected density of mu on e^perp evaluated at the projection of x, i.e. the
/// integral of mu along the line x + R e.
double density_formula_rhs(const GridDensity& mu, const Point& x, const Direction& e, const HistogramSpec& spec = {},
                           int subsamples = 2);
/// Same, from an already projected density.
double density_formula_rhs(const DirectionDensity& projected, const Point& x);

}  // namespace radproj
