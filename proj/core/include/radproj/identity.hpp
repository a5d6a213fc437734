#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "radproj/measure.hpp"
#include "radproj/projections.hpp"
#include "radproj/sphere.hpp"

namespace radproj {

struct Lemma1Report {
    double p = 1.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double gap = 0.0;  // |lhs - rhs| / max(lhs, rhs, eps)
    std::string resolutions;
};

double relative_gap(double a, double b);

/// Knobs shared by both sides. The identity holds exactly for the full-line
/// convention; half_line is kept for comparison runs.
struct Lemma1Options {
    FiberConvention convention = FiberConvention::full_line;
    RadialOptions radial{};
    int orth_subsamples = 2;
    /// d = 2 with an even direction count: e and -e give mirrored histograms,
    /// so only half of the directions are projected.
    bool use_antipodal_symmetry = true;
};

/// Per-atom sphere densities and per-direction histograms, for auditing.
struct Lemma1Intermediates {
    std::vector<Point> atoms;
    std::vector<SphereDensity> radial;
    std::vector<std::size_t> direction_bins;
    std::vector<DirectionDensity> projected_mu;
    std::vector<DirectionDensity> projected_nu;
};

/// sum_x nu(x) ||pi_x# mu_x||_p^p, one value per entry of ps.
std::vector<double> lemma1_lhs(const GridDensity& mu, const DiscreteMeasure& nu, std::span<const double> ps,
                               const GridPtr& sphere, const Lemma1Options& options = {},
                               Lemma1Intermediates* dump = nullptr);
double lemma1_lhs(const GridDensity& mu, const DiscreteMeasure& nu, double p, const GridPtr& sphere,
                  const Lemma1Options& options = {});

/// Sphere quadrature over directions of ||pi_e# mu||^p in L^p(pi_e# nu).
std::vector<double> lemma1_rhs(const GridDensity& mu, const DiscreteMeasure& nu, std::span<const double> ps,
                               const GridPtr& directions, const HistogramSpec& bins,
                               const Lemma1Options& options = {}, Lemma1Intermediates* dump = nullptr);
double lemma1_rhs(const GridDensity& mu, const DiscreteMeasure& nu, double p, const GridPtr& directions,
                  const HistogramSpec& bins, const Lemma1Options& options = {});

struct Lemma1Resolution {
    std::size_t sphere = 720;
    std::size_t directions = 720;
    HistogramSpec histogram{512, 0.0};
};

/// Both sides for several exponents, sharing one pass per side.
std::vector<Lemma1Report> lemma1(const GridDensity& mu, const DiscreteMeasure& nu, std::span<const double> ps,
                                 const Lemma1Resolution& resolution, const Lemma1Options& options = {},
                                 Lemma1Intermediates* dump = nullptr);

/// 2 * sum_x nu(x) * integral |x - y|^{1-d} dmu(y), by midpoint quadrature on mu's cells.
double mutual_codim1_energy(const GridDensity& mu, const DiscreteMeasure& nu);
/// Same for atomic mu (exact).
double mutual_codim1_energy(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

struct MollificationOptions {
    MollifierProfile profile = MollifierProfile::bump;
    /// Lattice spacing is the scale divided by this, capped by max_cells.
    double cells_per_scale = 12.0;
    std::size_t max_cells = 1024;
    Lemma1Resolution resolution{};
    Lemma1Options lemma{};
    double tolerance = 0.03;
};

struct MollificationStudy {
    std::vector<double> scales;
    std::vector<Lemma1Report> reports;
    bool gaps_nonincreasing = false;
    /// |lhs_last - lhs_prev| / max: small when the sequence has settled.
    double cauchy_last = 0.0;
    /// Value the sequence should approach from above (p = 1: exact mutual energy; otherwise NaN).
    double limit = 0.0;
    /// p = 1: every lhs >= limit (1 - tol). p > 1: lhs non-decreasing within tol as the scale shrinks.
    bool fatou_ok = false;
    std::vector<std::string> notes;
};

MollificationStudy mollification_limit_study(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                                             std::span<const double> scales, const MollificationOptions& options = {});

struct UniformBound {
    double max_radial = 0.0;      // max over centres and bins of the full-line density of pi_x# mu_x
    double max_orthogonal = 0.0;  // max over directions and bins of pi_e# mu
    double ratio = 0.0;
    bool ok = false;              // max_radial <= 1.05 max_orthogonal
};

UniformBound uniform_bound_diagnostic(const GridDensity& mu, std::span<const Point> centres, const GridPtr& sphere,
                                      const GridPtr& directions, const HistogramSpec& bins,
                                      const RadialOptions& radial = {});

struct Form1Sample {
    Point x{};
    Point e{};
    double radial = 0.0;   // binned density of pi_x# mu_x at the bin containing e
    double formula = 0.0;  // pi_e# mu (pi_e x), averaged over directions spanning that bin
    double relative_error = 0.0;
    bool exempt = false;   // formula below 1e-6 of the largest formula value
};

struct Form1Options {
    std::size_t samples = 100;
    double min_distance = 1.0;
    std::size_t sphere_resolution = 720;
    HistogramSpec histogram{512, 0.0};
    /// Directions per bin axis used to average the projected density.
    int bin_directions = 16;
    std::uint64_t seed = 1;
    RadialOptions radial{};
};

/// Random (x, e) pairs with e aimed at the support of mu so that the line hits it.
std::vector<Form1Sample> form1_check(const GridDensity& mu, const Form1Options& options = {});

}  // namespace radproj
