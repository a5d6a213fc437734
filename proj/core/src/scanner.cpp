#include "radproj/scanner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "radproj/error.hpp"
#include "radproj/parallel.hpp"
#include "radproj/summation.hpp"

namespace radproj {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void check_exponents(int d, double s, double t) {
    if (d != 2 && d != 3) throw Error(ErrorCode::invalid_input, "dimension must be 2 or 3");
    if (!(s > d - 1 && s < d))
        throw Error(ErrorCode::constraint, "s = " + fmt(s) + " violates d-1 < s < d (d = " + std::to_string(d) + ")");
    const double lo = 2.0 * (d - 1) - s;
    if (!(t > lo && t < d - 1))
        throw Error(ErrorCode::constraint, "t = " + fmt(t) + " violates 2(d-1) - s < t < d-1, i.e. " + fmt(lo) + " < t < " +
                                               std::to_string(d - 1));
}

double lp_power(const SphereDensity& f, double p) {
    std::vector<double> t(f.values().begin(), f.values().end());
    if (p != 1.0)
        for (auto& v : t) v = std::pow(v, p);
    return pairwise_sum(t) * f.grid().bin_area();
}

template <class M, class Project>
ScanReport scan_impl(const M& mu, const Box& region, double step, const ScanOptions& opt, Project&& project) {
    const int dim = mu.dim();
    if (!(opt.margin > 0.0)) throw Error(ErrorCode::invalid_input, "scan margin must be positive");
    if (!(opt.p >= 1.0)) throw Error(ErrorCode::invalid_input, "scan exponent p must be >= 1");
    if (!(step > 0.0)) throw Error(ErrorCode::invalid_input, "scan step must be positive");
    if (opt.resolutions.empty()) throw Error(ErrorCode::invalid_input, "no sphere resolutions given");

    ScanReport rep;
    rep.dim = dim;
    rep.region = region;
    rep.step = step;
    rep.p = opt.p;
    rep.margin = opt.margin;
    rep.resolutions = opt.resolutions;
    for (int k = 0; k < 3; ++k) {
        if (k >= dim) {
            rep.shape[k] = 1;
            continue;
        }
        const double span = region.hi[k] - region.lo[k];
        if (!(span >= 0.0)) throw Error(ErrorCode::invalid_input, "scan region is empty");
        rep.shape[k] = static_cast<std::size_t>(std::floor(span / step + 1e-9)) + 1;
    }

    const std::size_t total = rep.shape[0] * rep.shape[1] * rep.shape[2];
    for (std::size_t flat = 0; flat < total; ++flat) {
        const std::size_t i = flat / (rep.shape[1] * rep.shape[2]);
        const std::size_t j = (flat / rep.shape[2]) % rep.shape[1];
        const std::size_t k = flat % rep.shape[2];
        const Point x{region.lo[0] + static_cast<double>(i) * step, region.lo[1] + static_cast<double>(j) * step,
                      dim == 3 ? region.lo[2] + static_cast<double>(k) * step : 0.0};
        if (support_distance(mu, x) > opt.margin) {
            rep.centres.push_back(x);
            rep.lattice_index.push_back(flat);
        } else {
            ++rep.masked;
        }
    }
    if (rep.centres.empty()) throw Error(ErrorCode::invalid_input, "scan region is empty after masking the support margin");

    std::vector<GridPtr> grids;
    for (const auto r : opt.resolutions) grids.push_back(std::make_shared<const SphereGrid>(SphereGrid::make(dim, r)));
    rep.norms.assign(rep.centres.size(), std::vector<double>(grids.size(), 0.0));
    parallel_for(rep.centres.size(), [&](std::size_t c) {
        const auto dens = project(rep.centres[c], std::span<const GridPtr>(grids));
        for (std::size_t r = 0; r < dens.size(); ++r) rep.norms[c][r] = lp_power(dens[r], opt.p);
    });
    rep.bad.assign(rep.centres.size(), 0);
    return rep;
}

}  // namespace

double admissible_p(int d, double s, double t) {
    check_exponents(d, s, t);
    return std::min(2.0 - t / (d - 1), t / (2.0 * (d - 1) - s));
}

ScanParams ScanParams::make(int d, double s, double t, double p) {
    const double pmax = admissible_p(d, s, t);
    if (!(p > 1.0 && p <= pmax))
        throw Error(ErrorCode::constraint, "p = " + fmt(p) + " violates 1 < p <= min{2 - t/(d-1), t/(2(d-1) - s)} = " + fmt(pmax));
    ScanParams out;
    out.d = d;
    out.s = s;
    out.t = t;
    out.p = p;
    out.q = p / (p - 1.0);
    out.delta_p = std::max(0.0, (p - 1.0) * (2.0 * (d - 1) - s));
    return out;
}

ScanReport scan_centres(const DiscreteMeasure& mu, const Box& region, double step, const ScanOptions& options) {
    return scan_impl(mu, region, step, options,
                     [&](const Point& x, std::span<const GridPtr> g) { return radial_project_multi(mu, x, g); });
}

ScanReport scan_centres(const GridDensity& mu, const Box& region, double step, const ScanOptions& options) {
    return scan_impl(mu, region, step, options, [&](const Point& x, std::span<const GridPtr> g) {
        return radial_project_multi(mu, x, g, options.radial);
    });
}

BadSet extract_bad_set(const ScanReport& report, double threshold) {
    if (report.resolutions.size() < 2) throw Error(ErrorCode::invalid_input, "bad-set extraction needs at least 2 sphere resolutions");
    const double doublings = std::log2(static_cast<double>(report.resolutions.back()) /
                                       static_cast<double>(report.resolutions.front()));
    if (!(doublings > 0.0)) throw Error(ErrorCode::invalid_input, "sphere resolutions must increase");
    BadSet out;
    if (threshold >= std::pow(2.0, report.p - 1.0))
        out.warnings.push_back("threshold >= 2^(p-1): even a point mass would not be flagged at this p");
    out.growth.resize(report.centres.size());
    for (std::size_t c = 0; c < report.centres.size(); ++c) {
        const double lo = report.norms[c].front(), hi = report.norms[c].back();
        const double g = lo > 0.0 ? std::pow(hi / lo, 1.0 / doublings) : 1.0;
        out.growth[c] = g;
        if (g >= threshold || threshold <= 1.0) {
            out.indices.push_back(c);
            out.points.push_back(report.centres[c]);
        }
    }
    return out;
}

void apply_bad_set(ScanReport& report, double threshold) {
    auto bad = extract_bad_set(report, threshold);
    report.threshold = threshold;
    report.bad.assign(report.centres.size(), 0);
    for (const auto i : bad.indices) report.bad[i] = 1;
    report.bad_set = std::move(bad.points);
    report.warnings.insert(report.warnings.end(), bad.warnings.begin(), bad.warnings.end());
}

std::vector<double> dyadic_scales(double base, std::size_t count) {
    std::vector<double> out;
    for (std::size_t k = count; k-- > 0;) out.push_back(std::ldexp(base, static_cast<int>(k)));
    return out;
}

DimensionEstimate box_dimension(std::span<const Point> points, int dim, std::span<const double> scales) {
    DimensionEstimate est;
    est.scales.assign(scales.begin(), scales.end());
    const bool single =
        !points.empty() && std::all_of(points.begin(), points.end(), [&](const Point& p) { return p == points.front(); });
    if (single) {
        est.counts.assign(scales.size(), 1);
        return est;
    }
    if (scales.size() < 4) throw Error(ErrorCode::invalid_input, "box dimension needs at least 4 scales");
    if (points.size() < 10) throw Error(ErrorCode::invalid_input, "box dimension needs at least 10 points");
    for (const double r : scales)
        if (!(r > 0.0)) throw Error(ErrorCode::invalid_input, "box scales must be positive");

    Point lo = points.front();
    for (const auto& p : points)
        for (int k = 0; k < dim; ++k) lo[k] = std::min(lo[k], p[k]);

    std::vector<double> xs, ys;
    for (const double r : scales) {
        std::unordered_set<std::uint64_t> boxes;
        for (const auto& p : points) {
            std::uint64_t key = 0;
            for (int k = 0; k < dim; ++k) {
                const auto c = static_cast<std::uint64_t>(std::floor((p[k] - lo[k]) / r + 1e-9));
                key = key * 0x1000003ULL + c;
            }
            boxes.insert(key);
        }
        est.counts.push_back(boxes.size());
        xs.push_back(std::log(1.0 / r));
        ys.push_back(std::log(static_cast<double>(boxes.size())));
    }
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw Error(ErrorCode::invalid_input, "box scales must be distinct");
    est.dimension = sxy / sxx;
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (my + est.dimension * (xs[i] - mx));
        ss += r * r;
    }
    est.standard_error = std::sqrt(ss / (n - 2.0) / sxx);
    est.band = 2.0 * est.standard_error;
    return est;
}

}  // namespace radproj
