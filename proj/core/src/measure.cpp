#include "radproj/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "radproj/error.hpp"
#include "radproj/rng.hpp"
#include "radproj/summation.hpp"

namespace radproj {

namespace {

void check_dim(int dim) {
    if (dim != 2 && dim != 3) throw Error(ErrorCode::invalid_input, "dimension must be 2 or 3, got " + std::to_string(dim));
}

std::string format_box(const Box& b, int dim) {
    std::ostringstream os;
    os.precision(6);
    os << '[';
    for (int k = 0; k < dim; ++k) os << (k ? "," : "") << b.lo[k];
    os << "]x[";
    for (int k = 0; k < dim; ++k) os << (k ? "," : "") << b.hi[k];
    os << ']';
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// DiscreteMeasure

DiscreteMeasure::DiscreteMeasure(int dim, std::vector<Point> points, std::vector<double> weights)
    : dim_(dim), points_(std::move(points)), weights_(std::move(weights)) {
    check_dim(dim_);
    if (points_.empty()) throw Error(ErrorCode::invalid_input, "empty point list");
    if (points_.size() != weights_.size())
        throw Error(ErrorCode::invalid_input, "points and weights differ in length (" + std::to_string(points_.size()) +
                                                  " vs " + std::to_string(weights_.size()) + ")");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (dim_ == 2) points_[i][2] = 0.0;
        for (int k = 0; k < dim_; ++k)
            if (!std::isfinite(points_[i][k]))
                throw Error(ErrorCode::invalid_input, "non-finite coordinate at index " + std::to_string(i));
        if (!std::isfinite(weights_[i])) throw Error(ErrorCode::invalid_input, "non-finite weight at index " + std::to_string(i));
        if (weights_[i] < 0.0) throw Error(ErrorCode::invalid_input, "negative weight at index " + std::to_string(i));
    }
    total_mass_ = pairwise_sum(weights_);
    box_.lo = box_.hi = points_[0];
    for (const auto& p : points_)
        for (int k = 0; k < dim_; ++k) {
            box_.lo[k] = std::min(box_.lo[k], p[k]);
            box_.hi[k] = std::max(box_.hi[k], p[k]);
        }
}

DiscreteMeasure DiscreteMeasure::from_points(int dim, std::vector<Point> points, std::vector<double> weights) {
    DiscreteMeasure m(dim, std::move(points), std::move(weights));
    if (!(m.total_mass_ > 0.0)) throw Error(ErrorCode::invalid_input, "all weights are zero");
    // Already normalized input is kept bit-for-bit, so serialized measures round-trip.
    if (std::abs(m.total_mass_ - 1.0) <= 1e-12) return m;
    const double inv = 1.0 / m.total_mass_;
    for (auto& w : m.weights_) w *= inv;
    m.total_mass_ = pairwise_sum(m.weights_);
    return m;
}

DiscreteMeasure DiscreteMeasure::unnormalized(int dim, std::vector<Point> points, std::vector<double> weights) {
    return DiscreteMeasure(dim, std::move(points), std::move(weights));
}

DiscreteMeasure DiscreteMeasure::translated(const Point& v) const {
    std::vector<Point> pts(points_);
    for (auto& p : pts) p = p + v;
    return DiscreteMeasure(dim_, std::move(pts), weights_);
}

DiscreteMeasure DiscreteMeasure::scaled(double factor) const {
    std::vector<Point> pts(points_);
    for (auto& p : pts) p = factor * p;
    return DiscreteMeasure(dim_, std::move(pts), weights_);
}

DiscreteMeasure DiscreteMeasure::linear_image(const std::array<Point, 3>& m) const {
    std::vector<Point> pts(points_);
    for (auto& p : pts) p = Point{dot(m[0], p), dot(m[1], p), dot(m[2], p)};
    return DiscreteMeasure(dim_, std::move(pts), weights_);
}

// ---------------------------------------------------------------------------
// Iterated function systems

double AffineMap::contraction_ratio(int dim) const {
    // Power iteration on A^T A.
    Point v{1.0, 0.61803398875, 0.41421356237};
    if (dim == 2) v[2] = 0.0;
    double sigma2 = 0.0;
    for (int it = 0; it < 500; ++it) {
        Point av{};
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) av[r] += linear[r][c] * v[c];
        Point atav{};
        for (int c = 0; c < dim; ++c)
            for (int r = 0; r < dim; ++r) atav[c] += linear[r][c] * av[r];
        const double n = norm(atav);
        if (n == 0.0) return 0.0;
        const double next = dot(v, atav) / dot(v, v);
        v = (1.0 / n) * atav;
        if (it > 10 && std::abs(next - sigma2) <= 1e-15 * next) {
            sigma2 = next;
            break;
        }
        sigma2 = next;
    }
    return std::sqrt(sigma2);
}

AffineMap AffineMap::similarity(int dim, double ratio, const Point& fixed_point) {
    AffineMap m;
    for (int k = 0; k < 3; ++k) m.linear[k][k] = (k < dim) ? ratio : 0.0;
    for (int k = 0; k < dim; ++k) m.offset[k] = (1.0 - ratio) * fixed_point[k];
    return m;
}

DiscreteMeasure ifs_sample(int dim, std::span<const AffineMap> maps, std::size_t n, std::uint64_t seed) {
    check_dim(dim);
    if (maps.empty()) throw Error(ErrorCode::invalid_input, "IFS needs at least one map");
    if (n == 0) throw Error(ErrorCode::invalid_input, "sample count must be >= 1");
    for (std::size_t m = 0; m < maps.size(); ++m) {
        const double r = maps[m].contraction_ratio(dim);
        if (!(r > 0.0 && r < 1.0)) {
            std::ostringstream os;
            os << "map " << m << " is not contracting (ratio " << r << ")";
            throw Error(ErrorCode::invalid_input, os.str());
        }
    }
    Rng rng(substream(seed, "ifs"));
    Point x = maps[0].offset;
    for (int it = 0; it < 128; ++it) x = maps[rng.below(maps.size())].apply(x);
    std::vector<Point> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        x = maps[rng.below(maps.size())].apply(x);
        if (dim == 2) x[2] = 0.0;
        pts[i] = x;
    }
    return DiscreteMeasure::from_points(dim, std::move(pts), std::vector<double>(n, 1.0));
}

// ---------------------------------------------------------------------------
// Lattices and grid densities

Box LatticeSpec::extent() const {
    Box b;
    for (int k = 0; k < dim; ++k) {
        b.lo[k] = origin[k] - 0.5 * spacing;
        b.hi[k] = origin[k] + (static_cast<double>(shape[k]) - 0.5) * spacing;
    }
    return b;
}

Box LatticeSpec::interior_extent() const {
    Box b;
    for (int k = 0; k < dim; ++k) {
        b.lo[k] = origin[k] + 0.5 * spacing;
        b.hi[k] = origin[k] + (static_cast<double>(shape[k]) - 1.5) * spacing;
    }
    return b;
}

LatticeSpec LatticeSpec::covering(int dim, const Box& box, double pad, std::size_t cells_longest) {
    check_dim(dim);
    if (cells_longest < 2) throw Error(ErrorCode::invalid_input, "lattice needs at least 2 cells along the longest axis");
    const Box b = box.inflated(pad, dim);
    double longest = 0.0;
    for (int k = 0; k < dim; ++k) longest = std::max(longest, b.hi[k] - b.lo[k]);
    if (!(longest > 0.0)) throw Error(ErrorCode::invalid_input, "cannot cover a degenerate box without padding");
    LatticeSpec spec;
    spec.dim = dim;
    spec.spacing = longest / static_cast<double>(cells_longest);
    for (int k = 0; k < dim; ++k) {
        const double side = b.hi[k] - b.lo[k];
        const auto inner = static_cast<std::size_t>(std::max(1.0, std::ceil(side / spec.spacing - 1e-9)));
        spec.shape[k] = inner + 2;
        const double c = 0.5 * (b.lo[k] + b.hi[k]);
        spec.origin[k] = c - 0.5 * static_cast<double>(inner - 1) * spec.spacing - spec.spacing;
    }
    if (dim == 2) {
        spec.shape[2] = 1;
        spec.origin[2] = 0.0;
    }
    return spec;
}

GridDensity::GridDensity(const LatticeSpec& lattice, std::vector<double> values)
    : lattice_(lattice), values_(std::move(values)) {
    check_dim(lattice_.dim);
    if (lattice_.dim == 2) lattice_.shape[2] = 1;
    if (!(lattice_.spacing > 0.0)) throw Error(ErrorCode::invalid_input, "lattice spacing must be positive");
    if (values_.size() != lattice_.cell_count())
        throw Error(ErrorCode::invalid_input, "value count does not match lattice shape");
    if (lattice_.cell_count() >= std::numeric_limits<std::uint32_t>::max())
        throw Error(ErrorCode::invalid_input, "lattice too large");
    for (int k = 0; k < lattice_.dim; ++k)
        if (lattice_.shape[k] < 3) throw Error(ErrorCode::grid_too_small, "lattice needs >= 3 nodes per axis");

    const auto& s = lattice_.shape;
    for (std::size_t f = 0; f < values_.size(); ++f) {
        const double v = values_[f];
        if (!std::isfinite(v) || v < 0.0)
            throw Error(ErrorCode::invalid_input, "density must be finite and nonnegative (index " + std::to_string(f) + ")");
        if (v == 0.0) continue;
        const auto idx = unflatten(f);
        bool boundary = idx[0] == 0 || idx[1] == 0 || idx[0] + 1 == s[0] || idx[1] + 1 == s[1];
        if (lattice_.dim == 3) boundary = boundary || idx[2] == 0 || idx[2] + 1 == s[2];
        if (boundary)
            throw Error(ErrorCode::grid_too_small,
                        "density is nonzero on the lattice boundary layer; enlarge the lattice beyond " +
                            format_box(lattice_.interior_extent(), lattice_.dim));
        support_.push_back(static_cast<std::uint32_t>(f));
    }
    mass_ = pairwise_sum(values_) * cell_volume();

    // Frontier: support cells with a zero neighbour in the 3^d stencil.
    const int dz = lattice_.dim == 3 ? 1 : 0;
    for (const auto f : support_) {
        const auto idx = unflatten(f);
        bool frontier = false;
        for (int a = -1; a <= 1 && !frontier; ++a)
            for (int b = -1; b <= 1 && !frontier; ++b)
                for (int c = -dz; c <= dz && !frontier; ++c) {
                    const std::size_t g = flat_index(idx[0] + a, idx[1] + b, idx[2] + c);
                    if (values_[g] == 0.0) frontier = true;
                }
        if (frontier) frontier_.push_back(f);
    }
    if (!support_.empty()) {
        const double h = lattice_.spacing;
        support_box_.lo = support_box_.hi = cell_center(support_.front());
        for (const auto f : support_) {
            const Point c = cell_center(f);
            for (int k = 0; k < lattice_.dim; ++k) {
                support_box_.lo[k] = std::min(support_box_.lo[k], c[k] - 0.5 * h);
                support_box_.hi[k] = std::max(support_box_.hi[k], c[k] + 0.5 * h);
            }
        }
    }
}

GridDensity GridDensity::from_values(const LatticeSpec& lattice, std::vector<double> values) {
    GridDensity g(lattice, std::move(values));
    if (!(g.mass_ > 0.0)) throw Error(ErrorCode::invalid_input, "density has zero mass");
    if (std::abs(g.mass_ - 1.0) <= 1e-12) return g;
    const double inv = 1.0 / g.mass_;
    for (auto& v : g.values_) v *= inv;
    g.mass_ = pairwise_sum(g.values_) * g.cell_volume();
    return g;
}

double GridDensity::cell_volume() const {
    const double h = lattice_.spacing;
    return lattice_.dim == 2 ? h * h : h * h * h;
}

std::array<std::size_t, 3> GridDensity::unflatten(std::size_t flat) const {
    const auto& s = lattice_.shape;
    const std::size_t k = flat % s[2];
    const std::size_t rest = flat / s[2];
    return {rest / s[1], rest % s[1], k};
}

Point GridDensity::cell_center(std::size_t flat) const {
    const auto idx = unflatten(flat);
    return lattice_.node(idx[0], idx[1], idx[2]);
}

GridDensity GridDensity::translated(const Point& v) const {
    GridDensity g = *this;
    for (int k = 0; k < lattice_.dim; ++k) {
        g.lattice_.origin[k] += v[k];
        g.support_box_.lo[k] += v[k];
        g.support_box_.hi[k] += v[k];
    }
    return g;
}

// ---------------------------------------------------------------------------
// Mollification

double Mollifier::shape(double r) const {
    if (r >= 1.0) return 0.0;
    const double t = 1.0 - r * r;
    switch (profile) {
        case MollifierProfile::bump: return std::exp(-1.0 / t);
        case MollifierProfile::polynomial: return t * t * t;
    }
    return 0.0;
}

double Mollifier::normalization(int dim) const {
    check_dim(dim);
    auto radial = [&](double r) { return shape(r) * (dim == 2 ? r : r * r); };
    const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(radial, 0.0, 1.0, 8, 1e-14);
    const double sphere_area = dim == 2 ? 2.0 * kPi : 4.0 * kPi;
    return 1.0 / (sphere_area * integral);
}

namespace {

void require_inside(const LatticeSpec& lattice, const Box& needed) {
    // the longest axis of a covering lattice fits exactly, up to rounding
    const Box interior = lattice.interior_extent().inflated(1e-9 * lattice.spacing, lattice.dim);
    if (!interior.contains(needed, lattice.dim))
        throw Error(ErrorCode::grid_too_small,
                    "lattice interior " + format_box(interior, lattice.dim) + " does not cover required box " +
                        format_box(needed, lattice.dim));
}

}  // namespace

GridDensity mollify(const DiscreteMeasure& mu, const Mollifier& mollifier, const LatticeSpec& lattice) {
    if (mu.dim() != lattice.dim) throw Error(ErrorCode::invalid_input, "measure and lattice dimensions differ");
    if (!(mollifier.scale > 0.0)) throw Error(ErrorCode::invalid_input, "mollifier scale must be positive");
    require_inside(lattice, mu.bounding_box().inflated(mollifier.scale, mu.dim()));

    const int dim = lattice.dim;
    const double h = lattice.spacing;
    const double eps = mollifier.scale;
    const auto& shape = lattice.shape;
    std::vector<double> values(lattice.cell_count(), 0.0);
    std::vector<std::pair<std::size_t, double>> stencil;
    const double cell_volume = dim == 2 ? h * h : h * h * h;

    for (std::size_t a = 0; a < mu.size(); ++a) {
        const Point& y = mu.point(a);
        std::array<std::size_t, 3> lo{0, 0, 0}, hi{0, 0, 0};
        for (int k = 0; k < dim; ++k) {
            const double l = std::ceil((y[k] - eps - lattice.origin[k]) / h);
            const double u = std::floor((y[k] + eps - lattice.origin[k]) / h);
            lo[k] = static_cast<std::size_t>(std::max(0.0, l));
            hi[k] = static_cast<std::size_t>(std::min(static_cast<double>(shape[k] - 1), u));
        }
        stencil.clear();
        double total = 0.0;
        for (std::size_t i = lo[0]; i <= hi[0]; ++i)
            for (std::size_t j = lo[1]; j <= hi[1]; ++j)
                for (std::size_t k = lo[2]; k <= hi[2]; ++k) {
                    const Point node = lattice.node(i, j, k);
                    const double w = mollifier.shape(norm(node - y) / eps);
                    if (w > 0.0) {
                        stencil.emplace_back((i * shape[1] + j) * shape[2] + k, w);
                        total += w;
                    }
                }
        if (total == 0.0) {
            // Scale below lattice resolution: the atom lands on its nearest node.
            std::size_t idx[3] = {0, 0, 0};
            for (int k = 0; k < dim; ++k)
                idx[k] = static_cast<std::size_t>(std::lround((y[k] - lattice.origin[k]) / h));
            stencil.emplace_back((idx[0] * shape[1] + idx[1]) * shape[2] + idx[2], 1.0);
            total = 1.0;
        }
        const double scale = mu.weight(a) / (total * cell_volume);
        for (const auto& [f, w] : stencil) values[f] += w * scale;
    }
    return GridDensity::from_values(lattice, std::move(values));
}

GridDensity mollify(const GridDensity& mu, const Mollifier& mollifier) {
    if (!(mollifier.scale > 0.0)) throw Error(ErrorCode::invalid_input, "mollifier scale must be positive");
    const LatticeSpec& lattice = mu.lattice();
    const int dim = lattice.dim;
    const double h = lattice.spacing;
    const auto radius = static_cast<long>(std::floor(mollifier.scale / h));
    require_inside(lattice, mu.support_box().inflated(static_cast<double>(radius) * h, dim));

    struct Tap {
        long di, dj, dk;
        double w;
    };
    std::vector<Tap> taps;
    double total = 0.0;
    const long rz = dim == 3 ? radius : 0;
    for (long i = -radius; i <= radius; ++i)
        for (long j = -radius; j <= radius; ++j)
            for (long k = -rz; k <= rz; ++k) {
                const double r = h * std::sqrt(static_cast<double>(i * i + j * j + k * k));
                const double w = mollifier.shape(r / mollifier.scale);
                if (w > 0.0) {
                    taps.push_back({i, j, k, w});
                    total += w;
                }
            }
    if (taps.empty()) return mu;
    for (auto& t : taps) t.w /= total;

    std::vector<double> out(lattice.cell_count(), 0.0);
    const auto src = mu.values();
    for (const auto f : mu.support_cells()) {
        const auto idx = mu.unflatten(f);
        const double v = src[f];
        for (const auto& t : taps) {
            const std::size_t g = mu.flat_index(static_cast<std::size_t>(static_cast<long>(idx[0]) + t.di),
                                                static_cast<std::size_t>(static_cast<long>(idx[1]) + t.dj),
                                                static_cast<std::size_t>(static_cast<long>(idx[2]) + t.dk));
            out[g] += v * t.w;
        }
    }
    return GridDensity::from_values(lattice, std::move(out));
}

// ---------------------------------------------------------------------------
// Support distance

double support_distance(const DiscreteMeasure& mu, const Point& x) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (mu.weight(i) <= 0.0) continue;
        best = std::min(best, norm2(mu.point(i) - x));
    }
    return std::sqrt(best);
}

double support_distance(const GridDensity& mu, const Point& x) {
    const LatticeSpec& lat = mu.lattice();
    const double h = lat.spacing;
    const auto values = mu.values();

    // Inside a support cell?
    bool inside_lattice = true;
    std::size_t idx[3] = {0, 0, 0};
    for (int k = 0; k < lat.dim; ++k) {
        const double u = std::round((x[k] - lat.origin[k]) / h);
        if (u < 0.0 || u >= static_cast<double>(lat.shape[k])) {
            inside_lattice = false;
            break;
        }
        idx[k] = static_cast<std::size_t>(u);
    }
    if (inside_lattice && values[mu.flat_index(idx[0], idx[1], idx[2])] > 0.0) return 0.0;

    double best = std::numeric_limits<double>::infinity();
    for (const auto f : mu.frontier_cells()) {
        const Point c = mu.cell_center(f);
        Box cell;
        for (int k = 0; k < lat.dim; ++k) {
            cell.lo[k] = c[k] - 0.5 * h;
            cell.hi[k] = c[k] + 0.5 * h;
        }
        best = std::min(best, distance_to_box(x, cell));
    }
    return best;
}

}  // namespace radproj
