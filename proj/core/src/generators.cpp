#include "radproj/generators.hpp"

#include <algorithm>
#include <cmath>

#include "radproj/error.hpp"
#include "radproj/rng.hpp"

namespace radproj {

namespace {

double smooth_bump(double u) {
    if (std::abs(u) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - u * u));
}

template <class Density>
DiscreteMeasure rejection_sample(const Density& d, int dim, const Box& box, double peak, std::size_t n, Rng& rng) {
    std::vector<Point> pts;
    pts.reserve(n);
    while (pts.size() < n) {
        Point y{rng.uniform(box.lo[0], box.hi[0]), rng.uniform(box.lo[1], box.hi[1]), 0.0};
        if (dim == 3) y[2] = rng.uniform(box.lo[2], box.hi[2]);
        if (rng.uniform() * peak < d.density(y)) pts.push_back(y);
    }
    return DiscreteMeasure::from_points(dim, std::move(pts), std::vector<double>(n, 1.0));
}

}  // namespace

double GaussianMixture::density(const Point& y) const {
    double acc = 0.0;
    for (std::size_t c = 0; c < centres.size(); ++c) {
        const double r2 = norm2(y - centres[c]) / (sigmas[c] * sigmas[c]);
        if (r2 >= cutoff * cutoff) continue;
        const double norm_const = dim == 2 ? 1.0 / (2.0 * kPi * sigmas[c] * sigmas[c])
                                           : std::pow(2.0 * kPi * sigmas[c] * sigmas[c], -1.5);
        acc += weights[c] * norm_const * std::exp(-0.5 * r2);
    }
    return acc;
}

Box GaussianMixture::bounding_box() const {
    if (centres.empty() || centres.size() != sigmas.size() || centres.size() != weights.size())
        throw Error(ErrorCode::invalid_input, "Gaussian mixture needs matching centres, sigmas and weights");
    Box b;
    b.lo = b.hi = centres[0];
    for (std::size_t c = 0; c < centres.size(); ++c)
        for (int k = 0; k < dim; ++k) {
            b.lo[k] = std::min(b.lo[k], centres[c][k] - cutoff * sigmas[c]);
            b.hi[k] = std::max(b.hi[k], centres[c][k] + cutoff * sigmas[c]);
        }
    return b;
}

DiscreteMeasure GaussianMixture::sample(std::size_t n, std::uint64_t seed) const {
    (void)bounding_box();
    Rng rng(substream(seed, "gaussian-mixture"));
    double total_w = 0.0;
    for (const double w : weights) total_w += w;
    std::vector<Point> pts;
    pts.reserve(n);
    while (pts.size() < n) {
        double u = rng.uniform() * total_w;
        std::size_t c = 0;
        while (c + 1 < weights.size() && u >= weights[c]) u -= weights[c++];
        Point z{rng.normal(), rng.normal(), dim == 3 ? rng.normal() : 0.0};
        if (norm2(z) >= cutoff * cutoff) continue;
        pts.push_back(centres[c] + sigmas[c] * z);
    }
    return DiscreteMeasure::from_points(dim, std::move(pts), std::vector<double>(n, 1.0));
}

double Annulus::density(const Point& y) const { return smooth_bump((norm(y - centre) - radius) / half_width); }

Box Annulus::bounding_box() const {
    Box b;
    const double r = radius + half_width;
    for (int k = 0; k < dim; ++k) {
        b.lo[k] = centre[k] - r;
        b.hi[k] = centre[k] + r;
    }
    return b;
}

DiscreteMeasure Annulus::sample(std::size_t n, std::uint64_t seed) const {
    Rng rng(substream(seed, "annulus"));
    return rejection_sample(*this, dim, bounding_box(), std::exp(-1.0), n, rng);
}

double UniformBox::density(const Point& y) const {
    for (int k = 0; k < dim; ++k)
        if (y[k] < box.lo[k] || y[k] > box.hi[k]) return 0.0;
    return 1.0;
}

DiscreteMeasure UniformBox::sample(std::size_t n, std::uint64_t seed) const {
    Rng rng(substream(seed, "uniform-box"));
    return rejection_sample(*this, dim, box, 1.0, n, rng);
}

DiscreteMeasure segment_measure(int dim, const Point& a, const Point& b, std::size_t n, bool stratified, std::uint64_t seed) {
    if (n == 0) throw Error(ErrorCode::invalid_input, "sample count must be >= 1");
    Rng rng(substream(seed, "segment"));
    std::vector<Point> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = stratified ? (static_cast<double>(i) + 0.5) / static_cast<double>(n) : rng.uniform();
        pts[i] = a + t * (b - a);
    }
    return DiscreteMeasure::from_points(dim, std::move(pts), std::vector<double>(n, 1.0));
}

DiscreteMeasure dirac(int dim, const Point& at) { return DiscreteMeasure::from_points(dim, {at}, {1.0}); }

}  // namespace radproj
