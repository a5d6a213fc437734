#include "radproj/identity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "radproj/error.hpp"
#include "radproj/parallel.hpp"
#include "radproj/rng.hpp"
#include "radproj/summation.hpp"

namespace radproj {

namespace {

void check_exponents(std::span<const double> ps) {
    if (ps.empty()) throw Error(ErrorCode::invalid_input, "no exponents given");
    for (const double p : ps)
        if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorCode::invalid_input, "exponent p must be >= 1");
}

void require_disjoint(const GridDensity& mu, const DiscreteMeasure& nu) {
    if (mu.dim() != nu.dim()) throw Error(ErrorCode::invalid_input, "mu and nu dimensions differ");
    for (std::size_t a = 0; a < nu.size(); ++a) {
        if (nu.weight(a) == 0.0) continue;
        const double d = support_distance(mu, nu.point(a));
        if (!(d > 0.0)) {
            const Point& x = nu.point(a);
            std::ostringstream os;
            os << "supports overlap: nu atom " << a << " at (" << x[0] << ", " << x[1];
            if (nu.dim() == 3) os << ", " << x[2];
            os << ") lies in the support of mu";
            throw Error(ErrorCode::support_overlap, os.str());
        }
    }
}

/// sum over bins of value^p * area
double lp_power(const SphereDensity& f, double p) {
    std::vector<double> t(f.values().begin(), f.values().end());
    if (p != 1.0)
        for (auto& v : t) v = std::pow(v, p);
    return pairwise_sum(t) * f.grid().bin_area();
}

std::vector<double> reduce_columns(const std::vector<std::vector<double>>& rows, std::size_t cols) {
    std::vector<double> out(cols), col(rows.size());
    for (std::size_t k = 0; k < cols; ++k) {
        for (std::size_t i = 0; i < rows.size(); ++i) col[i] = rows[i][k];
        out[k] = pairwise_sum(col);
    }
    return out;
}

std::string grid_shape(const GridDensity& mu) {
    std::ostringstream os;
    const auto& s = mu.lattice().shape;
    os << s[0] << "x" << s[1];
    if (mu.dim() == 3) os << "x" << s[2];
    return os.str();
}

}  // namespace

double relative_gap(double a, double b) {
    const double m = std::max({std::abs(a), std::abs(b), std::numeric_limits<double>::min()});
    return std::abs(a - b) / m;
}

std::vector<double> lemma1_lhs(const GridDensity& mu, const DiscreteMeasure& nu, std::span<const double> ps,
                               const GridPtr& sphere, const Lemma1Options& options, Lemma1Intermediates* dump) {
    check_exponents(ps);
    if (!sphere || sphere->dim() != mu.dim()) throw Error(ErrorCode::invalid_input, "sphere grid dimension mismatch");
    require_disjoint(mu, nu);

    const std::size_t n = nu.size();
    std::vector<std::vector<double>> rows(n, std::vector<double>(ps.size(), 0.0));
    std::vector<std::optional<SphereDensity>> kept(dump ? n : 0);
    parallel_for(n, [&](std::size_t a) {
        const double w = nu.weight(a);
        if (w == 0.0) return;
        const auto mu_x = weight_riesz(mu, nu.point(a), options.convention);
        SphereDensity f = radial_project(mu_x, sphere, options.radial);
        for (std::size_t k = 0; k < ps.size(); ++k) rows[a][k] = w * lp_power(f, ps[k]);
        if (dump) kept[a].emplace(std::move(f));
    });
    if (dump)
        for (std::size_t a = 0; a < n; ++a)
            if (kept[a]) {
                dump->atoms.push_back(nu.point(a));
                dump->radial.push_back(std::move(*kept[a]));
            }
    return reduce_columns(rows, ps.size());
}

double lemma1_lhs(const GridDensity& mu, const DiscreteMeasure& nu, double p, const GridPtr& sphere,
                  const Lemma1Options& options) {
    return lemma1_lhs(mu, nu, std::span<const double>(&p, 1), sphere, options).front();
}

std::vector<double> lemma1_rhs(const GridDensity& mu, const DiscreteMeasure& nu, std::span<const double> ps,
                               const GridPtr& directions, const HistogramSpec& bins, const Lemma1Options& options,
                               Lemma1Intermediates* dump) {
    check_exponents(ps);
    if (!directions || directions->dim() != mu.dim())
        throw Error(ErrorCode::invalid_input, "direction grid dimension mismatch");
    require_disjoint(mu, nu);

    const int dim = mu.dim();
    const Box box = nu.size() ? merge(mu.support_box(), nu.bounding_box()) : mu.support_box();
    const std::size_t total = directions->size();
    const bool half = dim == 2 && total % 2 == 0 && options.use_antipodal_symmetry;
    const std::size_t count = half ? total / 2 : total;
    const double weight = directions->bin_area() * (half ? 2.0 : 1.0);

    std::vector<std::vector<double>> rows(count, std::vector<double>(ps.size(), 0.0));
    std::vector<std::optional<DirectionDensity>> kept_mu(dump ? count : 0), kept_nu(dump ? count : 0);
    parallel_for(count, [&](std::size_t b) {
        const Direction e(dim, directions->center(b));
        const HistogramLayout layout = make_layout(e, box, bins);
        DirectionDensity f = orth_project(mu, e, layout, options.orth_subsamples);
        DirectionDensity w = orth_project(nu, e, layout);
        for (std::size_t k = 0; k < ps.size(); ++k) rows[b][k] = weight * lp_norm_weighted(f, ps[k], w);
        if (dump) {
            kept_mu[b].emplace(std::move(f));
            kept_nu[b].emplace(std::move(w));
        }
    });
    if (dump)
        for (std::size_t b = 0; b < count; ++b) {
            dump->direction_bins.push_back(b);
            dump->projected_mu.push_back(std::move(*kept_mu[b]));
            dump->projected_nu.push_back(std::move(*kept_nu[b]));
        }
    return reduce_columns(rows, ps.size());
}

double lemma1_rhs(const GridDensity& mu, const DiscreteMeasure& nu, double p, const GridPtr& directions,
                  const HistogramSpec& bins, const Lemma1Options& options) {
    return lemma1_rhs(mu, nu, std::span<const double>(&p, 1), directions, bins, options).front();
}

std::vector<Lemma1Report> lemma1(const GridDensity& mu, const DiscreteMeasure& nu, std::span<const double> ps,
                                 const Lemma1Resolution& resolution, const Lemma1Options& options,
                                 Lemma1Intermediates* dump) {
    const auto sphere = std::make_shared<const SphereGrid>(SphereGrid::make(mu.dim(), resolution.sphere));
    const auto dirs = resolution.directions == resolution.sphere
                          ? sphere
                          : std::make_shared<const SphereGrid>(SphereGrid::make(mu.dim(), resolution.directions));
    const auto lhs = lemma1_lhs(mu, nu, ps, sphere, options, dump);
    const auto rhs = lemma1_rhs(mu, nu, ps, dirs, resolution.histogram, options, dump);

    std::ostringstream res;
    res << "grid=" << grid_shape(mu) << ",sphere=" << resolution.sphere << ",directions=" << resolution.directions
        << ",bins=" << resolution.histogram.bins;
    std::vector<Lemma1Report> out;
    for (std::size_t k = 0; k < ps.size(); ++k) out.push_back({ps[k], lhs[k], rhs[k], relative_gap(lhs[k], rhs[k]), res.str()});
    return out;
}

double mutual_codim1_energy(const GridDensity& mu, const DiscreteMeasure& nu) {
    require_disjoint(mu, nu);
    const auto cells = mu.support_cells();
    const auto values = mu.values();
    std::vector<double> rows(nu.size(), 0.0);
    parallel_for(nu.size(), [&](std::size_t a) {
        if (nu.weight(a) == 0.0) return;
        std::vector<double> t(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i)
            t[i] = values[cells[i]] * riesz_codim1_kernel(norm(mu.cell_center(cells[i]) - nu.point(a)), mu.dim());
        rows[a] = nu.weight(a) * pairwise_sum(t) * mu.cell_volume();
    });
    return 2.0 * pairwise_sum(rows);
}

double mutual_codim1_energy(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    std::vector<double> rows(nu.size(), 0.0);
    parallel_for(nu.size(), [&](std::size_t a) {
        std::vector<double> t(mu.size());
        for (std::size_t i = 0; i < mu.size(); ++i) {
            const double r = norm(mu.point(i) - nu.point(a));
            if (r == 0.0 && mu.weight(i) > 0.0 && nu.weight(a) > 0.0)
                throw Error(ErrorCode::support_overlap, "supports overlap: shared atom at index " + std::to_string(i));
            t[i] = r == 0.0 ? 0.0 : mu.weight(i) * riesz_codim1_kernel(r, mu.dim());
        }
        rows[a] = nu.weight(a) * pairwise_sum(t);
    });
    return 2.0 * pairwise_sum(rows);
}

MollificationStudy mollification_limit_study(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                                             std::span<const double> scales, const MollificationOptions& options) {
    if (scales.empty()) throw Error(ErrorCode::invalid_input, "no mollifier scales given");
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (!(scales[i] > 0.0)) throw Error(ErrorCode::invalid_input, "mollifier scales must be positive");
        if (i && !(scales[i] < scales[i - 1])) throw Error(ErrorCode::invalid_input, "mollifier scales must be strictly decreasing");
    }
    check_exponents(std::span<const double>(&p, 1));
    const double largest = scales.front();
    for (std::size_t a = 0; a < nu.size(); ++a) {
        if (nu.weight(a) == 0.0) continue;
        const double d = support_distance(mu, nu.point(a));
        if (!(d > largest)) {
            std::ostringstream os;
            os << "support margin violated: nu atom " << a << " is at distance " << d << " from spt mu, need > scale "
               << largest;
            throw Error(ErrorCode::support_overlap, os.str());
        }
    }

    MollificationStudy study;
    study.scales.assign(scales.begin(), scales.end());
    const int dim = mu.dim();
    const Box& box = mu.bounding_box();
    for (const double eps : scales) {
        double longest = 0.0;
        for (int k = 0; k < dim; ++k) longest = std::max(longest, box.hi[k] - box.lo[k] + 2.0 * eps);
        const auto wanted = static_cast<std::size_t>(std::ceil(longest * options.cells_per_scale / eps));
        const std::size_t cells = std::clamp<std::size_t>(wanted, 16, options.max_cells);
        if (wanted > options.max_cells)
            study.notes.push_back("scale " + std::to_string(eps) + ": lattice capped at " + std::to_string(cells) + " cells");
        const LatticeSpec lattice = LatticeSpec::covering(dim, box, eps, cells);
        const GridDensity smooth = mollify(mu, Mollifier{eps, options.profile}, lattice);
        auto reports = lemma1(smooth, nu, std::span<const double>(&p, 1), options.resolution, options.lemma);
        study.reports.push_back(reports.front());
    }

    study.gaps_nonincreasing = true;
    for (std::size_t i = 1; i < study.reports.size(); ++i)
        if (study.reports[i].gap > study.reports[i - 1].gap && study.reports[i].gap > 0.01) study.gaps_nonincreasing = false;
    if (study.reports.size() >= 2) {
        const auto& a = study.reports[study.reports.size() - 2];
        const auto& b = study.reports.back();
        study.cauchy_last = relative_gap(a.lhs, b.lhs);
    }
    const double tol = options.tolerance;
    if (p == 1.0) {
        // |.|^{1-d} is subharmonic away from 0, so ball averages around atoms only raise it.
        study.limit = mutual_codim1_energy(mu, nu);
        study.fatou_ok = std::all_of(study.reports.begin(), study.reports.end(),
                                     [&](const Lemma1Report& r) { return r.lhs >= study.limit * (1.0 - tol); });
    } else {
        study.limit = std::numeric_limits<double>::quiet_NaN();
        study.fatou_ok = true;
        for (std::size_t i = 1; i < study.reports.size(); ++i)
            if (study.reports[i].lhs < study.reports[i - 1].lhs * (1.0 - tol)) study.fatou_ok = false;
        study.notes.push_back("p > 1: no closed-form limit; checked that lhs does not drop as the scale shrinks");
    }
    return study;
}

UniformBound uniform_bound_diagnostic(const GridDensity& mu, std::span<const Point> centres, const GridPtr& sphere,
                                      const GridPtr& directions, const HistogramSpec& bins, const RadialOptions& radial) {
    if (centres.empty()) throw Error(ErrorCode::invalid_input, "no centres given");
    std::vector<double> rad(centres.size(), 0.0), orth(directions->size(), 0.0);
    parallel_for(centres.size(), [&](std::size_t i) {
        const auto mu_x = weight_riesz(mu, centres[i], FiberConvention::full_line);
        rad[i] = radial_project(mu_x, sphere, radial).max_value();
    });
    parallel_for(directions->size(), [&](std::size_t b) {
        const Direction e(mu.dim(), directions->center(b));
        const auto f = orth_project(mu, e, make_layout(e, mu.support_box(), bins));
        orth[b] = *std::max_element(f.values().begin(), f.values().end());
    });
    UniformBound out;
    out.max_radial = *std::max_element(rad.begin(), rad.end());
    out.max_orthogonal = *std::max_element(orth.begin(), orth.end());
    out.ratio = out.max_orthogonal > 0.0 ? out.max_radial / out.max_orthogonal : std::numeric_limits<double>::infinity();
    out.ok = out.max_radial <= 1.05 * out.max_orthogonal;
    return out;
}

std::vector<Form1Sample> form1_check(const GridDensity& mu, const Form1Options& options) {
    const int dim = mu.dim();
    const auto sphere = std::make_shared<const SphereGrid>(SphereGrid::make(dim, options.sphere_resolution));
    const auto cells = mu.support_cells();
    const auto values = mu.values();
    if (cells.empty()) throw Error(ErrorCode::invalid_input, "empty density");

    // Cumulative mass over support cells, to aim directions at mass.
    std::vector<double> cumulative(cells.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) cumulative[i] = acc += values[cells[i]];

    const Box draw_box = mu.support_box().inflated(options.min_distance + 2.0, dim);
    std::vector<Form1Sample> samples(options.samples);
    Rng rng(substream(options.seed, "form1-draw"));
    for (auto& s : samples) {
        for (int attempt = 0;; ++attempt) {
            if (attempt > 100000) throw Error(ErrorCode::invalid_input, "could not place centres at the requested distance");
            Point x{};
            for (int k = 0; k < dim; ++k) x[k] = rng.uniform(draw_box.lo[k], draw_box.hi[k]);
            if (support_distance(mu, x) >= options.min_distance) {
                s.x = x;
                break;
            }
        }
        const double u = rng.uniform() * acc;
        const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
        const std::size_t cell = cells[std::min<std::size_t>(it - cumulative.begin(), cells.size() - 1)];
        Point y = mu.cell_center(cell);
        for (int k = 0; k < dim; ++k) y[k] += (rng.uniform() - 0.5) * mu.spacing();
        const Point v = y - s.x;
        s.e = (1.0 / norm(v)) * v;
    }

    const int per_axis_a = dim == 2 ? options.bin_directions
                                    : std::max(2, static_cast<int>(std::lround(std::sqrt(options.bin_directions))));
    const int per_axis_b = dim == 2 ? 1 : per_axis_a;
    parallel_for(samples.size(), [&](std::size_t i) {
        auto& s = samples[i];
        const auto mu_x = weight_riesz(mu, s.x, FiberConvention::full_line);
        const auto f = radial_project(mu_x, sphere, options.radial);
        const std::size_t bin = sphere->locate(s.e);
        s.radial = f.value(bin);
        const BinExtent ext = sphere->extent(bin);
        std::vector<double> vals;
        for (int a = 0; a < per_axis_a; ++a)
            for (int b = 0; b < per_axis_b; ++b) {
                const double pa = ext.a0 + (a + 0.5) * (ext.a1 - ext.a0) / per_axis_a;
                const double pb = ext.b0 + (b + 0.5) * (ext.b1 - ext.b0) / per_axis_b;
                const Direction e(dim, SphereGrid::direction(dim, pa, pb));
                vals.push_back(density_formula_rhs(mu, s.x, e, options.histogram));
            }
        s.formula = pairwise_sum(vals) / static_cast<double>(vals.size());
    });
    double top = 0.0;
    for (const auto& s : samples) top = std::max(top, s.formula);
    for (auto& s : samples) {
        s.exempt = s.formula < 1e-6 * top;
        s.relative_error = s.formula > 0.0 ? std::abs(s.radial - s.formula) / s.formula
                                           : (s.radial > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    }
    return samples;
}

}  // namespace radproj
