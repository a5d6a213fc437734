#include "radproj/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "radproj/error.hpp"
#include "radproj/summation.hpp"

namespace radproj {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

std::size_t angle_bin(double theta, std::size_t n) {
    if (theta < 0.0) theta += kTwoPi;
    const auto k = static_cast<std::size_t>(theta * static_cast<double>(n) / kTwoPi);
    return std::min(k, n - 1);
}

}  // namespace

Point SphereGrid::direction(int dim, double a, double b) {
    if (dim == 2) return {std::cos(a), std::sin(a), 0.0};
    const double rho = std::sqrt(std::max(0.0, 1.0 - b * b));
    return {rho * std::cos(a), rho * std::sin(a), b};
}

SphereGrid SphereGrid::make(int dim, std::size_t resolution) {
    if (dim != 2 && dim != 3) throw Error(ErrorCode::invalid_input, "sphere grid dimension must be 2 or 3");
    if (resolution < 2) throw Error(ErrorCode::invalid_input, "sphere resolution must be >= 2");
    SphereGrid g;
    g.dim_ = dim;
    const auto n = resolution;
    if (dim == 2) {
        g.bin_area_ = kTwoPi / static_cast<double>(n);
        g.centers_.resize(n);
        for (std::size_t k = 0; k < n; ++k)
            g.centers_[k] = direction(2, (static_cast<double>(k) + 0.5) * g.bin_area_, 0.0);
        return g;
    }

    g.bin_area_ = 4.0 * kPi / static_cast<double>(n);
    std::vector<std::size_t> counts;  // cells per zone, north to south
    if (n == 2) {
        counts = {1, 1};
    } else {
        const double cap_polar = std::acos(1.0 - 2.0 / static_cast<double>(n));
        const double ideal_side = std::sqrt(g.bin_area_);
        const auto collars =
            static_cast<std::size_t>(std::max(1.0, std::round((kPi - 2.0 * cap_polar) / ideal_side)));
        const double fitting = (kPi - 2.0 * cap_polar) / static_cast<double>(collars);
        counts.push_back(1);
        double carry = 0.0;
        std::size_t assigned = 1;
        for (std::size_t c = 0; c < collars; ++c) {
            const double t0 = cap_polar + static_cast<double>(c) * fitting;
            const double t1 = t0 + fitting;
            const double ideal = kTwoPi * (std::cos(t0) - std::cos(t1)) / g.bin_area_;
            auto m = static_cast<long>(std::llround(ideal + carry));
            if (c + 1 == collars) m = static_cast<long>(n) - 1 - static_cast<long>(assigned);
            m = std::max<long>(m, 1);
            carry += ideal - static_cast<double>(m);
            counts.push_back(static_cast<std::size_t>(m));
            assigned += static_cast<std::size_t>(m);
        }
        counts.push_back(1);
        if (assigned + 1 != n) throw Error(ErrorCode::invalid_input, "sphere resolution too small for zonal partition");
    }

    std::size_t cumulative = 0;
    for (const auto m : counts) {
        Zone z;
        z.z_hi = 1.0 - 2.0 * static_cast<double>(cumulative) / static_cast<double>(n);
        cumulative += m;
        z.z_lo = 1.0 - 2.0 * static_cast<double>(cumulative) / static_cast<double>(n);
        z.first = g.centers_.size();
        z.count = m;
        g.zones_.push_back(z);
        const double zc = 0.5 * (z.z_hi + z.z_lo);
        for (std::size_t j = 0; j < m; ++j) {
            if (m == 1 && (z.z_hi == 1.0 || cumulative == n)) {
                g.centers_.push_back({0.0, 0.0, z.z_hi == 1.0 ? 1.0 : -1.0});
            } else {
                g.centers_.push_back(direction(3, (static_cast<double>(j) + 0.5) * kTwoPi / static_cast<double>(m), zc));
            }
        }
    }
    g.zones_.front().z_hi = 1.0;
    g.zones_.back().z_lo = -1.0;
    return g;
}

BinExtent SphereGrid::extent(std::size_t bin) const {
    if (dim_ == 2) {
        const double w = bin_area_;
        return {static_cast<double>(bin) * w, static_cast<double>(bin + 1) * w, 0.0, 0.0};
    }
    const auto it = std::upper_bound(zones_.begin(), zones_.end(), bin,
                                     [](std::size_t b, const Zone& z) { return b < z.first; });
    const Zone& z = *(it - 1);
    const std::size_t j = bin - z.first;
    const double w = kTwoPi / static_cast<double>(z.count);
    return {static_cast<double>(j) * w, static_cast<double>(j + 1) * w, z.z_lo, z.z_hi};
}

std::size_t SphereGrid::locate_angle(double theta) const { return angle_bin(theta, centers_.size()); }

std::size_t SphereGrid::locate(const Point& e) const {
    if (dim_ == 2) return angle_bin(std::atan2(e[1], e[0]), centers_.size());
    const double z = std::clamp(e[2], -1.0, 1.0);
    // First zone whose lower edge lies at or below z; zones are sorted by descending z.
    std::size_t lo = 0, hi = zones_.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (z >= zones_[mid].z_lo) hi = mid;
        else lo = mid + 1;
    }
    const Zone& zone = zones_[lo];
    if (zone.count == 1) return zone.first;
    return zone.first + angle_bin(std::atan2(e[1], e[0]), zone.count);
}

SphereDensity::SphereDensity(std::shared_ptr<const SphereGrid> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw Error(ErrorCode::invalid_input, "sphere density needs a grid");
    if (values_.size() != grid_->size()) throw Error(ErrorCode::invalid_input, "sphere density size mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (!(values_[i] >= 0.0) || !std::isfinite(values_[i]))
            throw Error(ErrorCode::invalid_input, "sphere density must be finite and nonnegative (bin " + std::to_string(i) + ")");
}

double SphereDensity::mass() const { return pairwise_sum(values_) * grid_->bin_area(); }

double SphereDensity::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

double lp_norm_sphere(const SphereDensity& f, double p) {
    if (!(p >= 1.0)) throw Error(ErrorCode::invalid_input, "L^p norm needs p >= 1");
    std::vector<double> terms(f.values().begin(), f.values().end());
    if (p != 1.0)
        for (auto& t : terms) t = std::pow(t, p);
    return std::pow(pairwise_sum(terms) * f.grid().bin_area(), 1.0 / p);
}

}  // namespace radproj
