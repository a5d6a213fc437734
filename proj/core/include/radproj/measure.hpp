#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "radproj/geometry.hpp"

namespace radproj {

/// Weighted point cloud in R^d, d in {2, 3}. Immutable once built.
class DiscreteMeasure {
public:
    /// Normalizes the weights to total mass 1.
    static DiscreteMeasure from_points(int dim, std::vector<Point> points, std::vector<double> weights);
    /// Keeps the weights as given (they may all be zero). Used for weighted or empty measures.
    static DiscreteMeasure unnormalized(int dim, std::vector<Point> points, std::vector<double> weights);

    int dim() const { return dim_; }
    std::size_t size() const { return points_.size(); }
    std::span<const Point> points() const { return points_; }
    std::span<const double> weights() const { return weights_; }
    const Point& point(std::size_t i) const { return points_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }
    double total_mass() const { return total_mass_; }
    const Box& bounding_box() const { return box_; }

    DiscreteMeasure translated(const Point& v) const;
    DiscreteMeasure scaled(double factor) const;
    /// Applies the linear map given by rows of `m` to every point.
    DiscreteMeasure linear_image(const std::array<Point, 3>& m) const;

private:
    DiscreteMeasure(int dim, std::vector<Point> points, std::vector<double> weights);

    int dim_ = 2;
    std::vector<Point> points_;
    std::vector<double> weights_;
    double total_mass_ = 0.0;
    Box box_;
};

/// x -> A x + b with A given by rows.
struct AffineMap {
    std::array<Point, 3> linear{Point{1, 0, 0}, Point{0, 1, 0}, Point{0, 0, 1}};
    Point offset{0, 0, 0};

    Point apply(const Point& x) const {
        return {dot(linear[0], x) + offset[0], dot(linear[1], x) + offset[1], dot(linear[2], x) + offset[2]};
    }
    /// Operator 2-norm of the linear part restricted to the first `dim` coordinates.
    double contraction_ratio(int dim) const;

    static AffineMap similarity(int dim, double ratio, const Point& fixed_point);
};

/// Chaos-game samples from the attractor of an iterated function system.
/// Maps are chosen uniformly; the result has n atoms of weight 1/n.
DiscreteMeasure ifs_sample(int dim, std::span<const AffineMap> maps, std::size_t n, std::uint64_t seed);

/// Regular lattice: node i sits at origin + i * spacing and stands for the cell
/// of side `spacing` centred on it.
struct LatticeSpec {
    int dim = 2;
    Point origin{0, 0, 0};
    double spacing = 1.0;
    std::array<std::size_t, 3> shape{1, 1, 1};

    std::size_t cell_count() const { return shape[0] * shape[1] * shape[2]; }
    Point node(std::size_t i, std::size_t j, std::size_t k = 0) const {
        return {origin[0] + static_cast<double>(i) * spacing, origin[1] + static_cast<double>(j) * spacing,
                dim == 3 ? origin[2] + static_cast<double>(k) * spacing : 0.0};
    }
    /// Box spanned by the cells (node +- spacing/2).
    Box extent() const;
    /// Box spanned by interior cells, i.e. excluding the outer layer.
    Box interior_extent() const;

    /// Lattice over `box` inflated by `pad` with `cells_longest` cells along the
    /// longest axis and one spare layer on every side.
    static LatticeSpec covering(int dim, const Box& box, double pad, std::size_t cells_longest);
};

/// Nonnegative density sampled on a lattice; mass = h^d * sum(values).
class GridDensity {
public:
    /// Validates nonnegativity and the zero boundary layer, then rescales to mass 1.
    static GridDensity from_values(const LatticeSpec& lattice, std::vector<double> values);

    int dim() const { return lattice_.dim; }
    const LatticeSpec& lattice() const { return lattice_; }
    double spacing() const { return lattice_.spacing; }
    std::span<const double> values() const { return values_; }
    double cell_volume() const;
    double mass() const { return mass_; }
    std::size_t flat_index(std::size_t i, std::size_t j, std::size_t k = 0) const {
        return (i * lattice_.shape[1] + j) * lattice_.shape[2] + k;
    }
    std::array<std::size_t, 3> unflatten(std::size_t flat) const;
    Point cell_center(std::size_t flat) const;

    /// Flat indices of cells with positive density, ascending.
    std::span<const std::uint32_t> support_cells() const { return support_; }
    /// Support cells that have at least one non-support neighbour (including diagonals).
    std::span<const std::uint32_t> frontier_cells() const { return frontier_; }
    /// Union of the closed support cells.
    const Box& support_box() const { return support_box_; }

    GridDensity translated(const Point& v) const;

private:
    GridDensity(const LatticeSpec& lattice, std::vector<double> values);

    LatticeSpec lattice_;
    std::vector<double> values_;
    double mass_ = 0.0;
    std::vector<std::uint32_t> support_;
    std::vector<std::uint32_t> frontier_;
    Box support_box_;
};

enum class MollifierProfile {
    bump,        // exp(-1/(1-|u|^2)), the standard C-infinity bump
    polynomial,  // (1-|u|^2)^3, a C^2 alternative
};

/// psi_eps(y) = eps^{-d} profile(|y|/eps), normalized to mass 1.
struct Mollifier {
    double scale = 0.1;
    MollifierProfile profile = MollifierProfile::bump;

    /// Unnormalized profile value at |u| = r (zero for r >= 1).
    double shape(double r) const;
    /// Normalization constant c with c * integral of shape(|u|) over the unit ball = 1.
    double normalization(int dim) const;
};

GridDensity mollify(const DiscreteMeasure& mu, const Mollifier& mollifier, const LatticeSpec& lattice);
/// Convolves on the existing lattice; the support may not reach the boundary layer.
GridDensity mollify(const GridDensity& mu, const Mollifier& mollifier);

/// Exact distance from x to the support (atoms, or closed cells with positive density).
double support_distance(const DiscreteMeasure& mu, const Point& x);
double support_distance(const GridDensity& mu, const Point& x);

}  // namespace radproj
