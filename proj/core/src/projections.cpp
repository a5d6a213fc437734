#include "radproj/projections.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "radproj/error.hpp"
#include "radproj/rng.hpp"
#include "radproj/summation.hpp"

namespace radproj {

// ---------------------------------------------------------------------------
// Directions and histograms

Direction::Direction(int dim, const Point& v) : dim_(dim) {
    if (dim != 2 && dim != 3) throw Error(ErrorCode::invalid_input, "direction dimension must be 2 or 3");
    Point w = v;
    if (dim == 2) w[2] = 0.0;
    const double n = norm(w);
    if (!(n > 0.0) || !std::isfinite(n)) throw Error(ErrorCode::invalid_input, "direction must be a finite nonzero vector");
    e_ = (1.0 / n) * w;
    if (dim == 2) {
        frame_[0] = {-e_[1], e_[0], 0.0};
        frame_[1] = {0.0, 0.0, 0.0};
    } else {
        const double sign = std::copysign(1.0, e_[2]);
        const double a = -1.0 / (sign + e_[2]);
        const double b = e_[0] * e_[1] * a;
        frame_[0] = {1.0 + sign * e_[0] * e_[0] * a, sign * b, -sign * e_[0]};
        frame_[1] = {b, sign + e_[1] * e_[1] * a, -e_[1]};
    }
}

HistogramLayout make_layout(const Direction& e, const Box& support, const HistogramSpec& spec) {
    if (spec.bins < 2) throw Error(ErrorCode::invalid_input, "histogram needs at least 2 bins per axis");
    const auto c = e.coords(support.center());
    const auto nb = static_cast<double>(spec.bins);
    double half = spec.half_width;
    if (!(half > 0.0)) {
        const double r = std::max(support.radius(), 1e-12);
        // r + 2 bins of width 2*half/nb.
        half = r / (1.0 - 4.0 / nb);
    }
    HistogramLayout layout;
    layout.spacing = 2.0 * half / nb;
    layout.shape = {spec.bins, e.dim() == 3 ? spec.bins : 1};
    layout.origin = {c[0] - half + 0.5 * layout.spacing, e.dim() == 3 ? c[1] - half + 0.5 * layout.spacing : 0.0};
    return layout;
}

DirectionDensity::DirectionDensity(Direction direction, HistogramLayout layout, std::vector<double> values)
    : direction_(direction), layout_(layout), values_(std::move(values)) {
    if (values_.size() != layout_.size()) throw Error(ErrorCode::invalid_input, "direction density size mismatch");
}

double DirectionDensity::bin_measure() const { return dim() == 2 ? layout_.spacing : layout_.spacing * layout_.spacing; }

double DirectionDensity::mass() const { return pairwise_sum(values_) * bin_measure(); }

std::array<double, 2> DirectionDensity::bin_center(std::size_t flat) const {
    const std::size_t i = flat / layout_.shape[1];
    const std::size_t j = flat % layout_.shape[1];
    return {layout_.origin[0] + static_cast<double>(i) * layout_.spacing,
            dim() == 3 ? layout_.origin[1] + static_cast<double>(j) * layout_.spacing : 0.0};
}

double DirectionDensity::value_at(const std::array<double, 2>& coords) const {
    const int axes = dim() - 1;
    std::array<long, 2> base{0, 0};
    std::array<double, 2> frac{0.0, 0.0};
    for (int k = 0; k < axes; ++k) {
        const double u = (coords[k] - layout_.origin[k]) / layout_.spacing;
        const double fl = std::floor(u);
        base[k] = static_cast<long>(fl);
        frac[k] = u - fl;
    }
    auto at = [&](long i, long j) -> double {
        if (i < 0 || j < 0 || i >= static_cast<long>(layout_.shape[0]) || j >= static_cast<long>(layout_.shape[1]))
            return 0.0;
        return values_[static_cast<std::size_t>(i) * layout_.shape[1] + static_cast<std::size_t>(j)];
    };
    if (axes == 1) return (1.0 - frac[0]) * at(base[0], 0) + frac[0] * at(base[0] + 1, 0);
    return (1.0 - frac[0]) * ((1.0 - frac[1]) * at(base[0], base[1]) + frac[1] * at(base[0], base[1] + 1)) +
           frac[0] * ((1.0 - frac[1]) * at(base[0] + 1, base[1]) + frac[1] * at(base[0] + 1, base[1] + 1));
}

namespace {

[[noreturn]] void histogram_overflow() {
    throw Error(ErrorCode::grid_too_small, "histogram bins too small for the projected support");
}

}  // namespace

DirectionDensity orth_project(const DiscreteMeasure& mu, const Direction& e, const HistogramLayout& layout) {
    if (mu.dim() != e.dim()) throw Error(ErrorCode::invalid_input, "measure and direction dimensions differ");
    std::vector<double> mass(layout.size(), 0.0);
    const int axes = e.dim() - 1;
    for (std::size_t a = 0; a < mu.size(); ++a) {
        const auto c = e.coords(mu.point(a));
        std::array<std::size_t, 2> idx{0, 0};
        for (int k = 0; k < axes; ++k) {
            const double u = std::floor((c[k] - layout.origin[k]) / layout.spacing + 0.5);
            if (u < 0.0 || u >= static_cast<double>(layout.shape[k])) histogram_overflow();
            idx[k] = static_cast<std::size_t>(u);
        }
        mass[idx[0] * layout.shape[1] + idx[1]] += mu.weight(a);
    }
    const double inv = 1.0 / (axes == 1 ? layout.spacing : layout.spacing * layout.spacing);
    for (auto& m : mass) m *= inv;
    return DirectionDensity(e, layout, std::move(mass));
}

namespace {

/// Mass of U[-a,a] + U[-b,b] (a >= b >= 0) below x.
double trapezoid_cdf(double x, double a, double b) {
    const double t = std::abs(x);
    double half;
    if (t >= a + b) half = 0.5;
    else if (t <= a - b) half = t / (2.0 * a);
    else {
        const double k = a - b;
        half = k / (2.0 * a) + ((a + b) * (t - k) - 0.5 * (t * t - k * k)) / (4.0 * a * b);
    }
    return x < 0.0 ? 0.5 - half : 0.5 + half;
}

/// In the plane a uniform cell projects to a trapezoid, so bin masses are exact
/// integrals of the cell-wise constant density. Point subsamples would alias
/// against the bins when e is close to a lattice axis.
DirectionDensity orth_project_planar(const GridDensity& mu, const Direction& e, const HistogramLayout& layout) {
    const double h = mu.spacing();
    const Point& f = e.frame()[0];
    double a = 0.5 * h * std::abs(f[0]), b = 0.5 * h * std::abs(f[1]);
    if (a < b) std::swap(a, b);
    const auto values = mu.values();
    const double w = layout.spacing;
    const auto n0 = static_cast<long>(layout.shape[0]);
    std::vector<double> mass(layout.size(), 0.0);
    for (const auto cell : mu.support_cells()) {
        const double m = values[cell] * mu.cell_volume();
        const double c = (e.coords(mu.cell_center(cell))[0] - layout.origin[0]) / w;
        // bin i covers [i - 1/2, i + 1/2) in units of w
        const auto first = static_cast<long>(std::floor(c - (a + b) / w + 0.5));
        const auto last = static_cast<long>(std::floor(c + (a + b) / w + 0.5));
        if (first < 0 || last >= n0) histogram_overflow();
        double below = 0.0;
        for (long i = first; i <= last; ++i) {
            const double edge = i == last ? 1.0 : trapezoid_cdf((static_cast<double>(i) + 0.5 - c) * w, a, b);
            mass[static_cast<std::size_t>(i)] += m * (edge - below);
            below = edge;
        }
    }
    for (auto& v : mass) v /= w;
    return DirectionDensity(e, layout, std::move(mass));
}

}  // namespace

DirectionDensity orth_project(const GridDensity& mu, const Direction& e, const HistogramLayout& layout, int subsamples) {
    if (mu.dim() != e.dim()) throw Error(ErrorCode::invalid_input, "measure and direction dimensions differ");
    if (subsamples < 1) throw Error(ErrorCode::invalid_input, "subsamples must be >= 1");
    if (mu.dim() == 2) return orth_project_planar(mu, e, layout);
    const int dim = mu.dim();
    const int axes = dim - 1;
    const double h = mu.spacing();
    const auto values = mu.values();
    const double sub_mass_factor = mu.cell_volume() / std::pow(static_cast<double>(subsamples), dim);

    // Frame coordinates of the subsample offsets inside a cell.
    std::vector<std::array<double, 2>> offsets;
    const int sz = dim == 3 ? subsamples : 1;
    for (int a = 0; a < subsamples; ++a)
        for (int b = 0; b < subsamples; ++b)
            for (int c = 0; c < sz; ++c) {
                auto off = [&](int s) { return h * ((static_cast<double>(s) + 0.5) / subsamples - 0.5); };
                const Point o{off(a), off(b), dim == 3 ? off(c) : 0.0};
                offsets.push_back(e.coords(o));
            }

    std::vector<double> mass(layout.size(), 0.0);
    const double inv_w = 1.0 / layout.spacing;
    const auto n0 = static_cast<long>(layout.shape[0]);
    const auto n1 = static_cast<long>(layout.shape[1]);
    for (const auto f : mu.support_cells()) {
        const auto cc = e.coords(mu.cell_center(f));
        const double m = values[f] * sub_mass_factor;
        for (const auto& off : offsets) {
            const double u = (cc[0] + off[0] - layout.origin[0]) * inv_w;
            const double fu = std::floor(u);
            const auto i = static_cast<long>(fu);
            const double tu = u - fu;
            if (i < 0 || i + 1 >= n0) histogram_overflow();
            if (axes == 1) {
                mass[static_cast<std::size_t>(i)] += m * (1.0 - tu);
                mass[static_cast<std::size_t>(i + 1)] += m * tu;
            } else {
                const double v = (cc[1] + off[1] - layout.origin[1]) * inv_w;
                const double fv = std::floor(v);
                const auto j = static_cast<long>(fv);
                const double tv = v - fv;
                if (j < 0 || j + 1 >= n1) histogram_overflow();
                const auto base = static_cast<std::size_t>(i * n1 + j);
                const auto stride = static_cast<std::size_t>(n1);
                mass[base] += m * (1.0 - tu) * (1.0 - tv);
                mass[base + 1] += m * (1.0 - tu) * tv;
                mass[base + stride] += m * tu * (1.0 - tv);
                mass[base + stride + 1] += m * tu * tv;
            }
        }
    }
    const double inv = 1.0 / (axes == 1 ? layout.spacing : layout.spacing * layout.spacing);
    for (auto& v : mass) v *= inv;
    return DirectionDensity(e, layout, std::move(mass));
}

DirectionDensity orth_project(const DiscreteMeasure& mu, const Direction& e, const HistogramSpec& spec) {
    return orth_project(mu, e, make_layout(e, mu.bounding_box(), spec));
}

DirectionDensity orth_project(const GridDensity& mu, const Direction& e, const HistogramSpec& spec, int subsamples) {
    return orth_project(mu, e, make_layout(e, mu.support_box(), spec), subsamples);
}

double lp_norm_weighted(const DirectionDensity& f, double p, const DirectionDensity& w) {
    if (!(f.layout() == w.layout()) || norm(f.direction().vector() - w.direction().vector()) > 1e-12)
        throw Error(ErrorCode::invalid_input, "densities are binned on different grids");
    if (!(p > 0.0)) throw Error(ErrorCode::invalid_input, "exponent must be positive");
    const auto fv = f.values();
    const auto wv = w.values();
    std::vector<double> terms(fv.size(), 0.0);
    for (std::size_t i = 0; i < fv.size(); ++i)
        if (wv[i] != 0.0) terms[i] = (p == 1.0 ? fv[i] : std::pow(fv[i], p)) * wv[i];
    return pairwise_sum(terms) * w.bin_measure();
}

// ---------------------------------------------------------------------------
// Radial projections

double riesz_constant(FiberConvention convention) { return convention == FiberConvention::full_line ? 2.0 : 1.0; }

int WeightedMeasure::dim() const {
    return std::visit([](const auto* m) { return m->dim(); }, base_);
}

namespace {

[[noreturn]] void centre_in_support(double distance) {
    std::ostringstream os;
    os << "centre is not outside the support (support_distance = " << distance << ")";
    throw Error(ErrorCode::support_overlap, os.str());
}

template <class M>
void require_outside(const M& mu, const Point& x) {
    const double d = support_distance(mu, x);
    if (!(d > 0.0)) centre_in_support(d);
}

/// Calls f(rel, mass) with rel = y - x for every atom.
template <class F>
void visit_samples(const DiscreteMeasure& mu, const Point& x, F&& f) {
    for (std::size_t a = 0; a < mu.size(); ++a) {
        if (mu.weight(a) == 0.0) continue;
        f(mu.point(a) - x, mu.weight(a));
    }
}

template <class F>
void visit_samples(const GridDensity& mu, const Point& x, const RadialOptions& opt, F&& f) {
    if (opt.subsamples < 1) throw Error(ErrorCode::invalid_input, "subsamples must be >= 1");
    const LatticeSpec& lat = mu.lattice();
    const int dim = lat.dim;
    const double h = lat.spacing;
    const int s = opt.subsamples;
    const double inv_s = 1.0 / s;
    const double share = mu.cell_volume() / std::pow(static_cast<double>(s), dim);
    const Point base = lat.origin - x;
    const auto values = mu.values();
    const int sz = dim == 3 ? s : 1;
    for (const auto cell : mu.support_cells()) {
        const auto idx = mu.unflatten(cell);
        const Point corner{base[0] + (static_cast<double>(idx[0]) - 0.5) * h, base[1] + (static_cast<double>(idx[1]) - 0.5) * h,
                           dim == 3 ? base[2] + (static_cast<double>(idx[2]) - 0.5) * h : 0.0};
        std::uint64_t state = substream(opt.seed, "radial-jitter", {cell});
        const double m = values[cell] * share;
        for (int a = 0; a < s; ++a)
            for (int b = 0; b < s; ++b)
                for (int c = 0; c < sz; ++c) {
                    const double ja = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
                    const double jb = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
                    const double jc = dim == 3 ? static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53 : 0.0;
                    const Point rel{corner[0] + h * (a + ja) * inv_s, corner[1] + h * (b + jb) * inv_s,
                                    dim == 3 ? corner[2] + h * (c + jc) * inv_s : 0.0};
                    f(rel, m);
                }
    }
}

/// Accumulates sample masses into several grids.
class RadialBinner {
public:
    RadialBinner(std::span<const GridPtr> grids, int dim) : grids_(grids.begin(), grids.end()), dim_(dim) {
        for (const auto& g : grids_) {
            if (!g) throw Error(ErrorCode::invalid_input, "null sphere grid");
            if (g->dim() != dim) throw Error(ErrorCode::invalid_input, "sphere grid and measure dimensions differ");
            mass_.emplace_back(g->size(), 0.0);
        }
    }

    void add(const Point& rel, double m, bool symmetric) {
        if (dim_ == 2) {
            const double theta = std::atan2(rel[1], rel[0]);
            for (std::size_t g = 0; g < grids_.size(); ++g) {
                if (symmetric) {
                    mass_[g][grids_[g]->locate_angle(theta)] += 0.5 * m;
                    mass_[g][grids_[g]->locate_angle(theta > 0.0 ? theta - kPi : theta + kPi)] += 0.5 * m;
                } else {
                    mass_[g][grids_[g]->locate_angle(theta)] += m;
                }
            }
            return;
        }
        const Point e = (1.0 / norm(rel)) * rel;
        for (std::size_t g = 0; g < grids_.size(); ++g) {
            if (symmetric) {
                mass_[g][grids_[g]->locate(e)] += 0.5 * m;
                mass_[g][grids_[g]->locate(-e)] += 0.5 * m;
            } else {
                mass_[g][grids_[g]->locate(e)] += m;
            }
        }
    }

    std::vector<SphereDensity> finish() {
        std::vector<SphereDensity> out;
        for (std::size_t g = 0; g < grids_.size(); ++g) {
            const double inv = 1.0 / grids_[g]->bin_area();
            for (auto& v : mass_[g]) v *= inv;
            out.emplace_back(grids_[g], std::move(mass_[g]));
        }
        return out;
    }

private:
    std::vector<GridPtr> grids_;
    int dim_;
    std::vector<std::vector<double>> mass_;
};

}  // namespace

std::vector<SphereDensity> radial_project_multi(const DiscreteMeasure& mu, const Point& x, std::span<const GridPtr> grids) {
    require_outside(mu, x);
    RadialBinner binner(grids, mu.dim());
    visit_samples(mu, x, [&](const Point& rel, double m) { binner.add(rel, m, false); });
    return binner.finish();
}

std::vector<SphereDensity> radial_project_multi(const GridDensity& mu, const Point& x, std::span<const GridPtr> grids,
                                                const RadialOptions& options) {
    require_outside(mu, x);
    RadialBinner binner(grids, mu.dim());
    visit_samples(mu, x, options, [&](const Point& rel, double m) { binner.add(rel, m, false); });
    return binner.finish();
}

SphereDensity radial_project(const DiscreteMeasure& mu, const Point& x, const GridPtr& grid) {
    return std::move(radial_project_multi(mu, x, std::span<const GridPtr>(&grid, 1)).front());
}

SphereDensity radial_project(const GridDensity& mu, const Point& x, const GridPtr& grid, const RadialOptions& options) {
    return std::move(radial_project_multi(mu, x, std::span<const GridPtr>(&grid, 1), options).front());
}

SphereDensity radial_project(const WeightedMeasure& mu_x, const GridPtr& grid, const RadialOptions& options) {
    const int dim = mu_x.dim();
    const double cd = mu_x.c_d();
    const bool symmetric = mu_x.convention() == FiberConvention::full_line;
    RadialBinner binner(std::span<const GridPtr>(&grid, 1), dim);
    auto deposit = [&](const Point& rel, double m) {
        const double r = norm(rel);
        binner.add(rel, cd * m * riesz_codim1_kernel(r, dim), symmetric);
    };
    std::visit(
        [&](const auto* base) {
            using T = std::decay_t<decltype(*base)>;
            if constexpr (std::is_same_v<T, DiscreteMeasure>) visit_samples(*base, mu_x.center(), deposit);
            else visit_samples(*base, mu_x.center(), options, deposit);
        },
        mu_x.base());
    return std::move(binner.finish().front());
}

WeightedMeasure weight_riesz(const DiscreteMeasure& mu, const Point& x, FiberConvention convention) {
    require_outside(mu, x);
    std::vector<double> terms(mu.size());
    for (std::size_t a = 0; a < mu.size(); ++a)
        terms[a] = mu.weight(a) * riesz_codim1_kernel(norm(mu.point(a) - x), mu.dim());
    return WeightedMeasure(&mu, x, convention, riesz_constant(convention) * pairwise_sum(terms));
}

WeightedMeasure weight_riesz(const GridDensity& mu, const Point& x, FiberConvention convention) {
    require_outside(mu, x);
    const auto cells = mu.support_cells();
    const auto values = mu.values();
    std::vector<double> terms(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i)
        terms[i] = values[cells[i]] * riesz_codim1_kernel(norm(mu.cell_center(cells[i]) - x), mu.dim());
    return WeightedMeasure(&mu, x, convention, riesz_constant(convention) * pairwise_sum(terms) * mu.cell_volume());
}

double density_formula_rhs(const DirectionDensity& projected, const Point& x) {
    return projected.value_at(projected.direction().coords(x));
}

double density_formula_rhs(const GridDensity& mu, const Point& x, const Direction& e, const HistogramSpec& spec,
                           int subsamples) {
    require_outside(mu, x);
    return density_formula_rhs(orth_project(mu, e, spec, subsamples), x);
}

}  // namespace radproj
