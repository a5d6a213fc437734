#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "radproj/geometry.hpp"
#include "radproj/measure.hpp"
#include "radproj/projections.hpp"
#include "radproj/sphere.hpp"

namespace radproj {

struct EnergyReport {
    double exponent = 0.0;
    double value = 0.0;
    std::string method;      // "spatial-pairwise" or "fourier"
    std::string resolution;  // free-form, e.g. "atoms=2000" or "grid=512x512"
    double error_estimate = 0.0;
    bool divergent = false;
    std::vector<std::string> warnings;
};

/// Off-diagonal sum of w_i w_j |y_i - y_j|^{-s}. Coincident distinct atoms flag divergence.
EnergyReport riesz_energy(const DiscreteMeasure& mu, double s);

/// Cell-midpoint quadrature of the double integral of |x - y|^{-s}, with the
/// singular near field (self cell and a small stencil of neighbours) replaced
/// by exact cell-pair integrals. Evaluated as an FFT convolution.
EnergyReport riesz_energy_grid(const GridDensity& mu, double s);

/// Integral over the unit cell pair offset by `offset` cells:
/// the integral over [-1,1]^d of prod(1 - |u_k|) |offset + u|^{-s} du.
double cell_pair_kernel(int dim, double s, const std::array<long, 3>& offset);

/// Integral of |f^(xi)|^2 |xi|^alpha over the frequency space of e^perp, with
/// f^(xi) = integral f(x) exp(-2 pi i x.xi) dx. The error estimate is the share
/// of the sum coming from the top quartile of frequencies.
EnergyReport fourier_sobolev(const DirectionDensity& f, double alpha);

struct FrostmanEstimate {
    double exponent = 0.0;
    double intercept = 0.0;  // log C in mu(B(x,r)) ~ C r^a
    double residual = 0.0;   // rms of the log-log fit
    std::vector<double> sup_masses;
    std::vector<std::string> warnings;
};

/// Least-squares slope of log sup_x mu(B(x, r)) against log r; balls are centred on atoms.
FrostmanEstimate frostman_exponent(const DiscreteMeasure& mu, std::span<const double> radii);
/// Bins act as atoms of mass value * area; distances are geodesic.
FrostmanEstimate frostman_exponent(const SphereDensity& sigma, std::span<const double> radii);

/// Rescales f so that its L^q norm is 1.
SphereDensity normalize_lq(const SphereDensity& f, double q);

struct HolderCheck {
    std::vector<double> lhs;  // integral of f^p over B(e, r), one per ball centre
    std::vector<double> rhs;  // H(B(e,r))^{2-p} (integral of f^q)^{p-1}
    double max_ratio = 0.0;   // max lhs / rhs
    std::size_t violations = 0;  // balls with lhs > rhs (1 + 1e-9)
};

/// Ball inequality of the Frostman step for sigma = f^p dH^{d-1}, with balls of
/// geodesic radius r centred at every bin centre. Requires ||f||_q = 1, q = p/(p-1).
HolderCheck frostman_holder_check(const SphereDensity& f, double p, double r);

struct KaufmanResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

/// Integral over the sphere of |pi_e(x) - pi_e(y)|^{-t} dsigma(e), with singular
/// bins refined by 8-fold subdivision until each bin contribution settles to 0.1%.
KaufmanResult kaufman_integral(const Point& x, const Point& y, double t, const SphereDensity& sigma);

/// Double sum over distinct atoms of kaufman_integral, i.e. the sigma-average of
/// the projected t-energies of nu.
double kaufman_energy(const DiscreteMeasure& nu, double t, const SphereDensity& sigma);

}  // namespace radproj
