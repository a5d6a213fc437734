#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "radproj/geometry.hpp"
#include "radproj/measure.hpp"

namespace radproj {

/// Analytic, compactly supported test densities. Each can be rasterized onto a
/// lattice or sampled into atoms, which lets tests compare the two routes.

/// Mixture of isotropic Gaussians, each truncated at `cutoff` standard deviations.
struct GaussianMixture {
    int dim = 2;
    std::vector<Point> centres;
    std::vector<double> sigmas;
    std::vector<double> weights;
    double cutoff = 4.5;

    double density(const Point& y) const;  // unnormalized after truncation
    Box bounding_box() const;
    DiscreteMeasure sample(std::size_t n, std::uint64_t seed) const;
};

/// Smooth annulus: density bump((|y - centre| - radius) / half_width).
struct Annulus {
    int dim = 2;
    Point centre{0, 0, 0};
    double radius = 1.0;
    double half_width = 0.25;

    double density(const Point& y) const;
    Box bounding_box() const;
    DiscreteMeasure sample(std::size_t n, std::uint64_t seed) const;
};

/// Uniform density on an axis-aligned box.
struct UniformBox {
    int dim = 2;
    Box box;

    double density(const Point& y) const;
    Box bounding_box() const { return box; }
    DiscreteMeasure sample(std::size_t n, std::uint64_t seed) const;
};

/// Evaluates `density` at lattice nodes and normalizes. The lattice must leave
/// the boundary layer outside the support.
template <class Density>
GridDensity rasterize(const Density& density, const LatticeSpec& lattice) {
    std::vector<double> values(lattice.cell_count(), 0.0);
    const auto& s = lattice.shape;
    for (std::size_t i = 0; i < s[0]; ++i)
        for (std::size_t j = 0; j < s[1]; ++j)
            for (std::size_t k = 0; k < s[2]; ++k) values[(i * s[1] + j) * s[2] + k] = density.density(lattice.node(i, j, k));
    return GridDensity::from_values(lattice, std::move(values));
}

/// n atoms of mass 1/n on the segment [a, b]; iid uniform when `stratified` is false,
/// otherwise at the midpoints of n equal pieces.
DiscreteMeasure segment_measure(int dim, const Point& a, const Point& b, std::size_t n, bool stratified, std::uint64_t seed);

DiscreteMeasure dirac(int dim, const Point& at);

}  // namespace radproj
