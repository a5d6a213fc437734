#include "radproj/energy.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <fftw3.h>

#include "radproj/error.hpp"
#include "radproj/parallel.hpp"
#include "radproj/summation.hpp"

namespace radproj {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

/// Smallest 2^a 3^b 5^c >= n.
std::size_t good_fft_size(std::size_t n) {
    for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
        std::size_t r = m;
        for (const std::size_t f : {2u, 3u, 5u})
            while (r % f == 0) r /= f;
        if (r == 1) return m;
    }
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n) : ptr(static_cast<double*>(fftw_malloc(sizeof(double) * n))), size(n) {
        if (!ptr) throw std::bad_alloc();
        std::fill(ptr, ptr + n, 0.0);
    }
    ~FftwBuffer() { fftw_free(ptr); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    double* ptr;
    std::size_t size;
};

struct FftwComplexBuffer {
    explicit FftwComplexBuffer(std::size_t n) : ptr(fftw_alloc_complex(n)), size(n) {
        if (!ptr) throw std::bad_alloc();
        std::fill(reinterpret_cast<double*>(ptr), reinterpret_cast<double*>(ptr) + 2 * n, 0.0);
    }
    ~FftwComplexBuffer() { fftw_free(ptr); }
    FftwComplexBuffer(const FftwComplexBuffer&) = delete;
    FftwComplexBuffer& operator=(const FftwComplexBuffer&) = delete;
    fftw_complex* ptr;
    std::size_t size;
};

/// Forward real-to-complex transform of a rank-1..3 array (row-major).
void fft_r2c(const std::vector<int>& dims, double* in, fftw_complex* out) {
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_r2c(static_cast<int>(dims.size()), dims.data(), in, out, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
}

void fft_c2r(const std::vector<int>& dims, fftw_complex* in, double* out) {
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_c2r(static_cast<int>(dims.size()), dims.data(), in, out, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
}

/// Dirichlet beta for s > 1 via Cohen-Villegas-Zagier acceleration.
double dirichlet_beta(double s) {
    const int n = 48;
    double d = std::pow(3.0 + std::sqrt(8.0), n);
    d = 0.5 * (d + 1.0 / d);
    double b = -1.0, c = -d, sum = 0.0;
    for (int k = 0; k < n; ++k) {
        c = b - c;
        sum += c * std::pow(2.0 * k + 1.0, -s);
        b = (static_cast<double>(k) + n) * (static_cast<double>(k) - n) * b / ((k + 0.5) * (k + 1.0));
    }
    return sum / d;
}

/// Analytic continuation of the punctured lattice sum over Z^2 of |m|^{alpha}.
double square_lattice_zeta(double alpha) {
    // sum' |m|^{-2w} = 4 zeta(w) beta(w) with w = -alpha/2; beta via its functional equation.
    const double w = -0.5 * alpha;
    const double sp = 1.0 - w;  // > 1
    const double beta_w = std::pow(2.0 / kPi, sp) * std::sin(kPi * sp / 2.0) * std::tgamma(sp) * dirichlet_beta(sp);
    return 4.0 * boost::math::zeta(w) * beta_w;
}

std::string shape_string(const std::vector<std::size_t>& n) {
    std::ostringstream os;
    for (std::size_t k = 0; k < n.size(); ++k) os << (k ? "x" : "") << n[k];
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Pairwise Riesz energy of atoms

EnergyReport riesz_energy(const DiscreteMeasure& mu, double s) {
    if (!(s > 0.0)) throw Error(ErrorCode::invalid_input, "energy exponent must be positive");
    const std::size_t n = mu.size();
    const auto pts = mu.points();
    const auto w = mu.weights();
    const double hs = 0.5 * s;

    std::vector<double> rows(n, 0.0), rows_half(n, 0.0);
    std::vector<char> coincident(n, 0);
    parallel_for(n, [&](std::size_t i) {
        if (w[i] == 0.0) return;
        double acc = 0.0, acc_half = 0.0;
        const Point& yi = pts[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            if (w[j] == 0.0) continue;
            const double r2 = norm2(yi - pts[j]);
            if (r2 == 0.0) {
                coincident[i] = 1;
                continue;
            }
            const double term = w[j] * std::pow(r2, -hs);
            acc += term;
            if (j % 2 == 0) acc_half += term;
        }
        rows[i] = w[i] * acc;
        if (i % 2 == 0) rows_half[i] = w[i] * acc_half;
    });

    EnergyReport rep;
    rep.exponent = s;
    rep.method = "spatial-pairwise";
    rep.resolution = "atoms=" + std::to_string(n);
    if (std::any_of(coincident.begin(), coincident.end(), [](char c) { return c != 0; })) {
        rep.divergent = true;
        rep.value = std::numeric_limits<double>::infinity();
        rep.error_estimate = std::numeric_limits<double>::infinity();
        rep.warnings.push_back("coincident distinct atoms: energy diverges");
        return rep;
    }
    rep.value = 2.0 * pairwise_sum(rows);
    // Self-convergence: the same estimator on the even-indexed atoms alone.
    if (n >= 4) {
        std::vector<double> even;
        for (std::size_t i = 0; i < n; i += 2) even.push_back(w[i]);
        const double w_half = pairwise_sum(even);
        if (w_half > 0.0) {
            const double e_half = 2.0 * pairwise_sum(rows_half) / (w_half * w_half);
            rep.error_estimate = std::abs(rep.value / (mu.total_mass() * mu.total_mass()) - e_half) *
                                 mu.total_mass() * mu.total_mass();
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Exact cell-pair integrals

double cell_pair_kernel(int dim, double s, const std::array<long, 3>& offset) {
    if (dim != 2 && dim != 3) throw Error(ErrorCode::invalid_input, "dimension must be 2 or 3");
    if (!(s >= 0.0 && s < dim)) throw Error(ErrorCode::invalid_input, "cell-pair kernel needs 0 <= s < d");
    using Gauss = boost::math::quadrature::gauss<double, 24>;
    using Gauss16 = boost::math::quadrature::gauss<double, 16>;

    double total = 0.0;
    // Sub-cubes of u in [-1,1]^d on which prod(1 - |u_k|) is a product of linear factors.
    for (int mask = 0; mask < (1 << dim); ++mask) {
        std::array<int, 3> tau{1, 1, 1};     // sign of u_k on this sub-cube
        std::array<double, 3> lo{}, hi{};    // range of w = offset + u
        bool corner = true;
        std::array<int, 3> sigma{1, 1, 1};   // w_k runs from 0 towards sigma_k
        for (int k = 0; k < dim; ++k) {
            tau[k] = (mask >> k) & 1 ? 1 : -1;
            const double ulo = tau[k] > 0 ? 0.0 : -1.0;
            lo[k] = static_cast<double>(offset[k]) + ulo;
            hi[k] = lo[k] + 1.0;
            if (lo[k] == 0.0) sigma[k] = 1;
            else if (hi[k] == 0.0) sigma[k] = -1;
            else corner = false;
        }
        auto weight = [&](int k, double wk) { return 1.0 - tau[k] * (wk - static_cast<double>(offset[k])); };

        if (!corner) {
            // Smooth integrand: tensor Gauss-Legendre.
            if (dim == 2) {
                total += Gauss16::integrate(
                    [&](double w0) {
                        return Gauss16::integrate(
                            [&](double w1) { return weight(0, w0) * weight(1, w1) * std::pow(w0 * w0 + w1 * w1, -0.5 * s); },
                            lo[1], hi[1]);
                    },
                    lo[0], hi[0]);
            } else {
                total += Gauss16::integrate(
                    [&](double w0) {
                        return Gauss16::integrate(
                            [&](double w1) {
                                return Gauss16::integrate(
                                    [&](double w2) {
                                        return weight(0, w0) * weight(1, w1) * weight(2, w2) *
                                               std::pow(w0 * w0 + w1 * w1 + w2 * w2, -0.5 * s);
                                    },
                                    lo[2], hi[2]);
                            },
                            lo[1], hi[1]);
                    },
                    lo[0], hi[0]);
            }
            continue;
        }

        // Singular corner at w = 0: split into d pyramids by the dominant axis and
        // integrate the radial variable in closed form.
        for (int m = 0; m < dim; ++m) {
            auto pyramid = [&](const std::array<double, 3>& beta) {
                // Coefficients of prod_k (a_k + b_k rho).
                std::array<double, 4> poly{1.0, 0.0, 0.0, 0.0};
                double omega2 = 0.0;
                int bi = 0;
                for (int k = 0; k < dim; ++k) {
                    const double omega = (k == m) ? 1.0 : beta[bi++];
                    omega2 += omega * omega;
                    // w_k = sigma_k omega_k rho
                    const double a = 1.0 + tau[k] * static_cast<double>(offset[k]);
                    const double b = -tau[k] * sigma[k] * omega;
                    for (int j = dim; j >= 1; --j) poly[j] = poly[j] * a + poly[j - 1] * b;
                    poly[0] *= a;
                }
                double radial = 0.0;
                for (int j = 0; j <= dim; ++j) radial += poly[j] / (dim - s + j);
                return radial * std::pow(omega2, -0.5 * s);
            };
            if (dim == 2) {
                total += Gauss::integrate([&](double b0) { return pyramid({b0, 0.0, 0.0}); }, 0.0, 1.0);
            } else {
                total += Gauss::integrate(
                    [&](double b0) { return Gauss::integrate([&](double b1) { return pyramid({b0, b1, 0.0}); }, 0.0, 1.0); },
                    0.0, 1.0);
            }
        }
    }
    return total;
}

// ---------------------------------------------------------------------------
// Grid Riesz energy

EnergyReport riesz_energy_grid(const GridDensity& mu, double s) {
    if (!(s > 0.0)) throw Error(ErrorCode::invalid_input, "energy exponent must be positive");
    const int dim = mu.dim();
    const double h = mu.spacing();
    EnergyReport rep;
    rep.exponent = s;
    rep.method = "spatial-pairwise";

    // Crop to the index box of the support.
    std::array<std::size_t, 3> lo{~std::size_t{0}, ~std::size_t{0}, ~std::size_t{0}}, hi{0, 0, 0};
    for (const auto f : mu.support_cells()) {
        const auto idx = mu.unflatten(f);
        for (int k = 0; k < 3; ++k) {
            lo[k] = std::min(lo[k], idx[k]);
            hi[k] = std::max(hi[k], idx[k]);
        }
    }
    std::vector<std::size_t> n(dim);
    for (int k = 0; k < dim; ++k) n[k] = hi[k] - lo[k] + 1;
    {
        std::vector<std::size_t> full(dim);
        for (int k = 0; k < dim; ++k) full[k] = mu.lattice().shape[k];
        std::ostringstream os;
        os << "grid=" << shape_string(full) << ",support=" << shape_string(n) << ",h=" << h;
        rep.resolution = os.str();
    }
    if (s >= dim) {
        rep.divergent = true;
        rep.value = std::numeric_limits<double>::infinity();
        rep.error_estimate = std::numeric_limits<double>::infinity();
        rep.warnings.push_back("s >= d: the self-energy of a piecewise-constant density diverges");
        return rep;
    }

    std::vector<int> padded(dim);
    std::size_t total = 1;
    for (int k = 0; k < dim; ++k) {
        padded[k] = static_cast<int>(good_fft_size(2 * n[k] - 1));
        total *= static_cast<std::size_t>(padded[k]);
    }
    const std::size_t last_complex = static_cast<std::size_t>(padded[dim - 1]) / 2 + 1;
    const std::size_t complex_total = total / static_cast<std::size_t>(padded[dim - 1]) * last_complex;

    FftwBuffer mass(total);
    const double cell_volume = mu.cell_volume();
    const auto values = mu.values();
    for (const auto f : mu.support_cells()) {
        const auto idx = mu.unflatten(f);
        std::size_t flat = 0;
        for (int k = 0; k < dim; ++k) flat = flat * static_cast<std::size_t>(padded[k]) + (idx[k] - lo[k]);
        mass.ptr[flat] = values[f] * cell_volume;
    }
    FftwComplexBuffer spectrum(complex_total);
    fft_r2c(padded, mass.ptr, spectrum.ptr);
    for (std::size_t i = 0; i < complex_total; ++i) {
        const double re = spectrum.ptr[i][0], im = spectrum.ptr[i][1];
        spectrum.ptr[i][0] = re * re + im * im;
        spectrum.ptr[i][1] = 0.0;
    }
    FftwBuffer autocorr(total);
    fft_c2r(padded, spectrum.ptr, autocorr.ptr);
    const double inv_total = 1.0 / static_cast<double>(total);

    // Kernel per offset: exact cell-pair integrals in the near field, midpoint beyond.
    const long near = dim == 2 ? 4 : 2;
    std::map<std::array<long, 3>, double> exact;
    auto canonical = [&](std::array<long, 3> d) {
        for (auto& c : d) c = std::labs(c);
        std::sort(d.begin(), d.begin() + dim);
        return d;
    };
    auto near_kernel = [&](const std::array<long, 3>& d) {
        const auto key = canonical(d);
        auto it = exact.find(key);
        if (it == exact.end()) it = exact.emplace(key, cell_pair_kernel(dim, s, key)).first;
        return it->second;
    };
    const double hs = std::pow(h, -s);
    std::vector<double> terms(total, 0.0);
    std::vector<double> ring_terms;
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::array<long, 3> d{0, 0, 0};
        std::size_t rest = flat;
        bool inside = true;
        long cheb = 0;
        for (int k = dim - 1; k >= 0; --k) {
            const auto p = static_cast<std::size_t>(padded[k]);
            const auto i = static_cast<long>(rest % p);
            rest /= p;
            d[k] = i < static_cast<long>(n[k]) ? i : i - static_cast<long>(p);
            if (std::labs(d[k]) >= static_cast<long>(n[k])) inside = false;
            cheb = std::max(cheb, std::labs(d[k]));
        }
        if (!inside) continue;
        const double a = autocorr.ptr[flat] * inv_total;
        double kern;
        if (cheb <= near) {
            kern = near_kernel(d);
            if (cheb == near) {
                const double mid = std::pow(static_cast<double>(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]), -0.5 * s);
                ring_terms.push_back(a * hs * (kern - mid));
            }
        } else {
            kern = std::pow(static_cast<double>(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]), -0.5 * s);
        }
        terms[flat] = a * hs * kern;
    }
    rep.value = pairwise_sum(terms);
    rep.error_estimate = std::abs(pairwise_sum(ring_terms));
    return rep;
}

// ---------------------------------------------------------------------------
// Fourier-side Sobolev energy

EnergyReport fourier_sobolev(const DirectionDensity& f, double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw Error(ErrorCode::invalid_input, "Sobolev exponent alpha must lie in (0, 2)");
    const int axes = f.dim() - 1;
    const auto& layout = f.layout();
    const double h = layout.spacing;
    const auto values = f.values();

    EnergyReport rep;
    rep.exponent = alpha;
    rep.method = "fourier";

    if (axes == 1) {
        const std::size_t n = layout.shape[0];
        const std::size_t m = good_fft_size(8 * n);
        FftwBuffer in(m);
        std::copy(values.begin(), values.end(), in.ptr);
        FftwComplexBuffer out(m / 2 + 1);
        fft_r2c({static_cast<int>(m)}, in.ptr, out.ptr);
        const double dxi = 1.0 / (static_cast<double>(m) * h);
        auto g = [&](std::size_t k) {
            const double re = out.ptr[k][0] * h, im = out.ptr[k][1] * h;
            return re * re + im * im;
        };
        const std::size_t top = m / 2;
        const std::size_t tail_start = (3 * top) / 4;
        std::vector<double> terms(top + 1, 0.0), tail;
        for (std::size_t k = 1; k <= top; ++k) {
            const double mult = (k == top && m % 2 == 0) ? 1.0 : 2.0;
            terms[k] = mult * g(k) * std::pow(static_cast<double>(k) * dxi, alpha) * dxi;
            if (k > tail_start) tail.push_back(terms[k]);
        }
        const double g0 = g(0);
        const double g2 = 2.0 * (g(1) - g0) / (dxi * dxi);
        const double correction = 2.0 * boost::math::zeta(-alpha) * g0 * std::pow(dxi, 1.0 + alpha) +
                                  boost::math::zeta(-alpha - 2.0) * g2 * std::pow(dxi, alpha + 3.0);
        rep.value = pairwise_sum(terms) - correction;
        rep.error_estimate = pairwise_sum(tail);
        rep.resolution = "bins=" + std::to_string(n) + ",fft=" + std::to_string(m);
    } else {
        const std::size_t n0 = layout.shape[0], n1 = layout.shape[1];
        const std::size_t pad = std::max(n0, n1) <= 512 ? 4 : 2;
        const std::size_t m0 = good_fft_size(pad * n0), m1 = good_fft_size(pad * n1);
        FftwBuffer in(m0 * m1);
        for (std::size_t i = 0; i < n0; ++i)
            for (std::size_t j = 0; j < n1; ++j) in.ptr[i * m1 + j] = values[i * n1 + j];
        const std::size_t c1 = m1 / 2 + 1;
        FftwComplexBuffer out(m0 * c1);
        fft_r2c({static_cast<int>(m0), static_cast<int>(m1)}, in.ptr, out.ptr);
        const double d0 = 1.0 / (static_cast<double>(m0) * h), d1 = 1.0 / (static_cast<double>(m1) * h);
        const double h2 = h * h;
        const double nyq = 0.5 / h;
        std::vector<double> terms(m0 * c1, 0.0), tail;
        for (std::size_t i = 0; i < m0; ++i) {
            const double xi0 = (i <= m0 / 2 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(m0)) * d0;
            for (std::size_t j = 0; j < c1; ++j) {
                if (i == 0 && j == 0) continue;
                const double xi1 = static_cast<double>(j) * d1;
                const double re = out.ptr[i * c1 + j][0] * h2, im = out.ptr[i * c1 + j][1] * h2;
                // Half-spectrum: interior columns stand for two conjugate frequencies.
                const double mult = (j == 0 || (j == m1 / 2 && m1 % 2 == 0)) ? 1.0 : 2.0;
                const double r = std::sqrt(xi0 * xi0 + xi1 * xi1);
                const double term = mult * (re * re + im * im) * std::pow(r, alpha) * d0 * d1;
                terms[i * c1 + j] = term;
                if (std::max(std::abs(xi0), xi1) > 0.75 * nyq) tail.push_back(term);
            }
        }
        const double g0 = (out.ptr[0][0] * h2) * (out.ptr[0][0] * h2) + (out.ptr[0][1] * h2) * (out.ptr[0][1] * h2);
        // Lattice-sum endpoint correction for the |xi|^alpha cusp (square lattice when d0 == d1).
        const double dxi = std::sqrt(d0 * d1);
        const double correction = square_lattice_zeta(alpha) * g0 * std::pow(dxi, 2.0 + alpha);
        rep.value = pairwise_sum(terms) - correction;
        rep.error_estimate = pairwise_sum(tail);
        rep.resolution = "bins=" + std::to_string(n0) + "x" + std::to_string(n1) + ",fft=" + std::to_string(m0) + "x" +
                         std::to_string(m1);
    }
    if (rep.value > 0.0 && rep.error_estimate > 0.01 * rep.value)
        rep.warnings.push_back("aliasing: top-quartile spectral mass exceeds 1%; density not well resolved");
    if (rep.value < 0.0) rep.value = 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// Frostman exponents

namespace {

void check_radii(std::span<const double> radii) {
    if (radii.size() < 3) throw Error(ErrorCode::invalid_input, "Frostman fit needs at least 3 radii");
    const auto [mn, mx] = std::minmax_element(radii.begin(), radii.end());
    if (!(*mn > 0.0)) throw Error(ErrorCode::invalid_input, "radii must be positive");
    if (*mx < 10.0 * *mn) throw Error(ErrorCode::invalid_input, "radii must span at least one decade");
}

FrostmanEstimate fit_frostman(std::span<const double> radii, std::vector<double> sup_mass, bool degenerate) {
    FrostmanEstimate est;
    est.sup_masses = std::move(sup_mass);
    if (degenerate) {
        est.exponent = 0.0;
        est.intercept = std::log(est.sup_masses.back());
        est.warnings.push_back("degenerate single-atom measure: exponent 0");
        return est;
    }
    const std::size_t k = radii.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        mx += std::log(radii[i]);
        my += std::log(est.sup_masses[i]);
    }
    mx /= static_cast<double>(k);
    my /= static_cast<double>(k);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double dx = std::log(radii[i]) - mx;
        sxy += dx * (std::log(est.sup_masses[i]) - my);
        sxx += dx * dx;
    }
    est.exponent = sxy / sxx;
    est.intercept = my - est.exponent * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double r = std::log(est.sup_masses[i]) - (est.intercept + est.exponent * std::log(radii[i]));
        ss += r * r;
    }
    est.residual = std::sqrt(ss / static_cast<double>(k));
    return est;
}

template <class Dist>
std::vector<double> sup_ball_masses(std::span<const Point> centers, std::span<const double> masses,
                                    std::span<const double> radii, Dist&& dist) {
    const std::size_t n = centers.size();
    std::vector<std::vector<double>> per_center(n, std::vector<double>(radii.size(), 0.0));
    parallel_for(n, [&](std::size_t i) {
        auto& row = per_center[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double d = dist(centers[i], centers[j]);
            for (std::size_t r = 0; r < radii.size(); ++r)
                if (d <= radii[r]) row[r] += masses[j];
        }
    });
    std::vector<double> sup(radii.size(), 0.0);
    for (const auto& row : per_center)
        for (std::size_t r = 0; r < radii.size(); ++r) sup[r] = std::max(sup[r], row[r]);
    return sup;
}

}  // namespace

FrostmanEstimate frostman_exponent(const DiscreteMeasure& mu, std::span<const double> radii) {
    check_radii(radii);
    std::vector<Point> centers;
    std::vector<double> masses;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (mu.weight(i) > 0.0) {
            centers.push_back(mu.point(i));
            masses.push_back(mu.weight(i));
        }
    const Box& b = mu.bounding_box();
    const bool degenerate = centers.size() <= 1 || norm(b.hi - b.lo) == 0.0;
    auto sup = sup_ball_masses(centers, masses, radii, [](const Point& a, const Point& c) { return norm(a - c); });
    return fit_frostman(radii, std::move(sup), degenerate);
}

FrostmanEstimate frostman_exponent(const SphereDensity& sigma, std::span<const double> radii) {
    check_radii(radii);
    std::vector<Point> centers;
    std::vector<double> masses;
    const auto& grid = sigma.grid();
    for (std::size_t b = 0; b < grid.size(); ++b)
        if (sigma.value(b) > 0.0) {
            centers.push_back(grid.center(b));
            masses.push_back(sigma.value(b) * grid.bin_area());
        }
    const bool degenerate = centers.size() <= 1;
    auto sup = sup_ball_masses(centers, masses, radii, [](const Point& a, const Point& c) { return geodesic_distance(a, c); });
    return fit_frostman(radii, std::move(sup), degenerate);
}

SphereDensity normalize_lq(const SphereDensity& f, double q) {
    const double n = lp_norm_sphere(f, q);
    if (!(n > 0.0)) throw Error(ErrorCode::invalid_input, "cannot normalize a zero density");
    std::vector<double> v(f.values().begin(), f.values().end());
    for (auto& x : v) x /= n;
    return SphereDensity(f.grid_ptr(), std::move(v));
}

HolderCheck frostman_holder_check(const SphereDensity& f, double p, double r) {
    if (!(p > 1.0 && p < 2.0)) throw Error(ErrorCode::invalid_input, "Holder check needs p in (1, 2)");
    if (!(r > 0.0)) throw Error(ErrorCode::invalid_input, "ball radius must be positive");
    const double q = p / (p - 1.0);
    const double nq = lp_norm_sphere(f, q);
    if (std::abs(nq - 1.0) > 1e-9) throw Error(ErrorCode::invalid_input, "density must have unit L^q norm (use normalize_lq)");

    const auto& grid = f.grid();
    const std::size_t n = grid.size();
    const double a = grid.bin_area();
    std::vector<double> fp(n), fq(n);
    for (std::size_t b = 0; b < n; ++b) {
        fp[b] = std::pow(f.value(b), p);
        fq[b] = std::pow(f.value(b), q);
    }
    const double lq_total = pairwise_sum(fq) * a;

    HolderCheck out;
    out.lhs.assign(n, 0.0);
    out.rhs.assign(n, 0.0);
    parallel_for(n, [&](std::size_t c) {
        std::vector<double> in_ball;
        std::size_t count = 0;
        for (std::size_t b = 0; b < n; ++b)
            if (geodesic_distance(grid.center(c), grid.center(b)) <= r) {
                in_ball.push_back(fp[b]);
                ++count;
            }
        const double ball_area = static_cast<double>(count) * a;
        out.lhs[c] = pairwise_sum(in_ball) * a;
        out.rhs[c] = std::pow(ball_area, 2.0 - p) * std::pow(lq_total, p - 1.0);
    });
    for (std::size_t c = 0; c < n; ++c) {
        if (out.rhs[c] > 0.0) out.max_ratio = std::max(out.max_ratio, out.lhs[c] / out.rhs[c]);
        if (out.lhs[c] > out.rhs[c] * (1.0 + 1e-9)) ++out.violations;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Kaufman sphere integral

namespace {

struct Cell {
    double a0, a1, b0, b1;
};

class KaufmanQuadrature {
public:
    KaufmanQuadrature(int dim, const Point& v, double t) : dim_(dim), v_(v), t_(t), vnorm_(norm(v)) {
        const Point u = (1.0 / vnorm_) * v;
        for (int s = 0; s < 2; ++s) {
            const Point w = s == 0 ? u : -u;
            double phi = std::atan2(w[1], w[0]);
            if (phi < 0.0) phi += kTwoPi;
            singular_[s] = {phi, w[2]};
        }
    }

    /// Returns the integral of the kernel over the cell; accumulates an error bound.
    double integrate(const Cell& c, int depth) {
        if (contains_singularity(c)) {
            const int limit = dim_ == 2 ? 12 : 20;
            if (depth >= limit) return singular_leaf(c);
            double sum = 0.0;
            for (const auto& child : children(c)) sum += integrate(child, depth + 1);
            return sum;
        }
        const double coarse = area(c) * kernel(mid(c));
        double fine = 0.0;
        const auto kids = children(c);
        for (const auto& child : kids) fine += area(child) * kernel(mid(child));
        if (std::abs(fine - coarse) <= 1e-3 * std::abs(fine) || depth >= 10) {
            error_ += std::abs(fine - coarse) / 8.0;
            return fine;
        }
        double sum = 0.0;
        for (const auto& child : kids) sum += integrate(child, depth + 1);
        return sum;
    }

    double error() const { return error_; }

private:
    double kernel(const Point& e) const {
        const double d = norm(cross(v_, e));
        if (t_ == 0.0) return 1.0;
        return std::pow(d, -t_);
    }
    Point mid(const Cell& c) const { return SphereGrid::direction(dim_, 0.5 * (c.a0 + c.a1), 0.5 * (c.b0 + c.b1)); }
    double area(const Cell& c) const { return dim_ == 2 ? c.a1 - c.a0 : (c.a1 - c.a0) * (c.b1 - c.b0); }

    std::vector<Cell> children(const Cell& c) const {
        std::vector<Cell> out;
        out.reserve(8);
        if (dim_ == 2) {
            const double w = (c.a1 - c.a0) / 8.0;
            for (int i = 0; i < 8; ++i) out.push_back({c.a0 + i * w, i == 7 ? c.a1 : c.a0 + (i + 1) * w, 0.0, 0.0});
        } else {
            const double wa = (c.a1 - c.a0) / 4.0, wb = (c.b1 - c.b0) / 2.0;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 2; ++j)
                    out.push_back({c.a0 + i * wa, i == 3 ? c.a1 : c.a0 + (i + 1) * wa, c.b0 + j * wb,
                                   j == 1 ? c.b1 : c.b0 + (j + 1) * wb});
        }
        return out;
    }

    bool contains_singularity(const Cell& c) const {
        for (const auto& s : singular_) {
            if (dim_ == 2) {
                if (s[0] >= c.a0 && s[0] <= c.a1) return true;
            } else if (s[1] >= c.b0 && s[1] <= c.b1) {
                if (std::abs(s[1]) == 1.0 || (s[0] >= c.a0 && s[0] <= c.a1)) return true;
            }
        }
        return false;
    }

    /// Tiny cell around a singular direction, where |pi_e(v)| ~ |v| * angle.
    double singular_leaf(const Cell& c) {
        double value;
        if (dim_ == 2) {
            double s = singular_[0][0];
            if (!(s >= c.a0 && s <= c.a1)) s = singular_[1][0];
            const double left = s - c.a0, right = c.a1 - s;
            value = std::pow(vnorm_, -t_) * (std::pow(left, 1.0 - t_) + std::pow(right, 1.0 - t_)) / (1.0 - t_);
        } else {
            const double radius = std::sqrt(area(c) / kPi);
            value = std::pow(vnorm_, -t_) * kTwoPi * std::pow(radius, 2.0 - t_) / (2.0 - t_);
            error_ += 0.1 * value;
        }
        return value;
    }

    int dim_;
    Point v_;
    double t_;
    double vnorm_;
    std::array<std::array<double, 2>, 2> singular_{};
    double error_ = 0.0;
};

}  // namespace

KaufmanResult kaufman_integral(const Point& x, const Point& y, double t, const SphereDensity& sigma) {
    const auto& grid = sigma.grid();
    const int dim = grid.dim();
    if (!(t >= 0.0 && t < dim - 1)) throw Error(ErrorCode::invalid_input, "Kaufman integral needs 0 <= t < d - 1");
    Point v = x - y;
    if (dim == 2) v[2] = 0.0;
    if (norm(v) == 0.0) throw Error(ErrorCode::invalid_input, "Kaufman integral needs x != y");

    KaufmanQuadrature quad(dim, v, t);
    std::vector<double> terms(grid.size(), 0.0);
    for (std::size_t b = 0; b < grid.size(); ++b) {
        const double density = sigma.value(b);
        if (density == 0.0) continue;
        const BinExtent ext = grid.extent(b);
        terms[b] = density * quad.integrate({ext.a0, ext.a1, ext.b0, ext.b1}, 0);
    }
    return {pairwise_sum(terms), quad.error() * sigma.max_value()};
}

double kaufman_energy(const DiscreteMeasure& nu, double t, const SphereDensity& sigma) {
    const std::size_t n = nu.size();
    std::vector<double> rows(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || nu.weight(j) == 0.0) continue;
            acc += nu.weight(j) * kaufman_integral(nu.point(i), nu.point(j), t, sigma).value;
        }
        rows[i] = nu.weight(i) * acc;
    });
    return pairwise_sum(rows);
}

}  // namespace radproj
