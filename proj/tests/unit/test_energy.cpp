#include <doctest.h>

#include <cmath>
#include <memory>

#include <radproj/energy.hpp>
#include <radproj/error.hpp>
#include <radproj/generators.hpp>
#include <radproj/rng.hpp>

#include "oracles.hpp"

using namespace radproj;

TEST_CASE("segment energy from iid atoms") {
    auto seg = segment_measure(2, {0, 0, 0}, {1, 0, 0}, 2000, false, 1);
    auto r = riesz_energy(seg, 0.5);
    CHECK(r.value == doctest::Approx(oracle::segment_energy(0.5)).epsilon(0.02));
    CHECK(r.method == "spatial-pairwise");
    CHECK_FALSE(r.divergent);
}

TEST_CASE("coincident atoms make the energy divergent") {
    auto mu = DiscreteMeasure::from_points(2, {{0, 0, 0}, {0, 0, 0}, {1, 0, 0}}, {1, 1, 1});
    CHECK(riesz_energy(mu, 0.5).divergent);
}

TEST_CASE("cell pair kernel") {
    CHECK(cell_pair_kernel(2, 0.0, {0, 0, 0}) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(cell_pair_kernel(3, 0.0, {1, 2, 0}) == doctest::Approx(1.0).epsilon(1e-10));
    // s = 1, self pair in the plane: 4 ln(1 + sqrt 2) - (4/3)(sqrt 2 - 1)
    const double exact = 4 * std::log(1 + std::sqrt(2.0)) - 4.0 / 3 * (std::sqrt(2.0) - 1);
    CHECK(cell_pair_kernel(2, 1.0, {0, 0, 0}) == doctest::Approx(exact).epsilon(1e-6));
    CHECK(cell_pair_kernel(2, 1.0, {7, 0, 0}) == doctest::Approx(1.0 / 7).epsilon(1e-3));
}

TEST_CASE("grid energy of a Gaussian matches the closed form") {
    GaussianMixture gm{2, {{0.1, 0.2, 0}}, {0.3}, {1}, 6.0};
    auto g = rasterize(gm, LatticeSpec::covering(2, gm.bounding_box(), 0.0, 256));
    for (double s : {0.5, 1.2, 1.5}) {
        auto r = riesz_energy_grid(g, s);
        CHECK(r.value == doctest::Approx(oracle::gaussian_riesz_energy(2, 0.3, s)).epsilon(0.005));
    }
    CHECK(riesz_energy_grid(g, 2.0).divergent);
}

TEST_CASE("grid and sampled energies agree") {
    GaussianMixture gm{2, {{0, 0, 0}, {1.2, 0.3, 0}}, {0.3, 0.2}, {0.6, 0.4}};
    auto g = rasterize(gm, LatticeSpec::covering(2, gm.bounding_box(), 0.0, 256));
    auto atoms = gm.sample(4000, 7);
    for (double s : {0.5, 1.2, 1.5}) {
        const double a = riesz_energy_grid(g, s).value, b = riesz_energy(atoms, s).value;
        CHECK(std::abs(a - b) / a < 0.03);
    }
}

TEST_CASE("Fourier energy of projected Gaussians") {
    GaussianMixture gm{2, {{0.1, 0.2, 0}}, {0.3}, {1}, 6.0};
    auto g = rasterize(gm, LatticeSpec::covering(2, gm.bounding_box(), 0.0, 512));
    Direction e(2, {0, 1, 0});
    auto f = orth_project(g, e, HistogramSpec{512, 0});
    for (double a : {0.2, 0.5}) {
        auto r = fourier_sobolev(f, a);
        CHECK(r.method == "fourier");
        CHECK(r.value == doctest::Approx(oracle::gaussian_sobolev_1d(0.3, a)).epsilon(0.01));
    }

    GaussianMixture g3{3, {{0, 0, 0}}, {0.4}, {1}, 5.0};
    auto grid3 = rasterize(g3, LatticeSpec::covering(3, g3.bounding_box(), 0.0, 64));
    auto f3 = orth_project(grid3, Direction(3, {0, 0, 1}), HistogramSpec{128, 0});
    CHECK(fourier_sobolev(f3, 0.5).value == doctest::Approx(oracle::gaussian_sobolev_2d(0.4, 0.5)).epsilon(0.01));
}

TEST_CASE("Fourier energy: translation invariance and scaling") {
    GaussianMixture gm{2, {{0, 0, 0}}, {0.25}, {1}, 6.0};
    GaussianMixture moved{2, {{0.37, -0.61, 0}}, {0.25}, {1}, 6.0};
    GaussianMixture wide{2, {{0, 0, 0}}, {0.5}, {1}, 6.0};
    Direction e(2, {1, 1, 0});
    auto energy = [&](const GaussianMixture& m, double a) {
        auto g = rasterize(m, LatticeSpec::covering(2, m.bounding_box(), 0.0, 384));
        return fourier_sobolev(orth_project(g, e, HistogramSpec{512, 0}), a).value;
    };
    const double base = energy(gm, 0.5);
    CHECK(energy(moved, 0.5) == doctest::Approx(base).epsilon(0.005));
    // f_lambda(u) = f(u/lambda)/lambda scales the energy by lambda^{-(alpha+1)}
    const double exponent = -std::log2(energy(wide, 0.5) / base);
    CHECK(exponent == doctest::Approx(1.5).epsilon(0.02));
}

TEST_CASE("Kaufman integral against the Beta closed form") {
    auto grid = std::make_shared<const SphereGrid>(SphereGrid::make(2, 720));
    SphereDensity uniform(grid, std::vector<double>(720, 1.0 / (2 * kPi)));
    const Point x{0, 0, 0}, y{1, 0.3, 0};
    for (double t : {0.3, 0.5, 0.7}) {
        const double exact = oracle::circle_sine_average_beta(t) * std::pow(norm(y - x), -t);
        CHECK(oracle::circle_sine_average(t) == doctest::Approx(oracle::circle_sine_average_beta(t)).epsilon(1e-4));
        const auto k = kaufman_integral(x, y, t, uniform);
        CHECK(k.value == doctest::Approx(exact).epsilon(0.002));
        const auto half = kaufman_integral(x, 0.5 * y, t, uniform);
        CHECK(half.value / k.value == doctest::Approx(std::pow(2.0, t)).epsilon(0.01));
    }
    auto g3 = std::make_shared<const SphereGrid>(SphereGrid::make(3, 400));
    SphereDensity u3(g3, std::vector<double>(400, 1.0 / (4 * kPi)));
    const Point v{0.3, 0.2, 0.9};
    CHECK(kaufman_integral({0, 0, 0}, v, 0.5, u3).value ==
          doctest::Approx(oracle::sphere_sine_average(0.5) * std::pow(norm(v), -0.5)).epsilon(0.005));
}

TEST_CASE("Kaufman energy sums over distinct pairs") {
    auto grid = std::make_shared<const SphereGrid>(SphereGrid::make(2, 360));
    SphereDensity uniform(grid, std::vector<double>(360, 1.0 / (2 * kPi)));
    auto nu = DiscreteMeasure::from_points(2, {{0, 0, 0}, {1, 0, 0}}, {1, 1});
    const double pair = kaufman_integral(nu.point(0), nu.point(1), 0.5, uniform).value;
    CHECK(kaufman_energy(nu, 0.5, uniform) == doctest::Approx(2 * 0.25 * pair));
}

TEST_CASE("Frostman exponents of a segment and a Cantor set") {
    auto seg = segment_measure(2, {0, 0, 0}, {1, 0, 0}, 4096, true, 0);
    std::vector<double> radii{0.005, 0.01, 0.02, 0.05};
    CHECK(frostman_exponent(seg, radii).exponent == doctest::Approx(1.0).epsilon(0.05));

    std::vector<AffineMap> maps{AffineMap::similarity(2, 1.0 / 3, {0, 0, 0}), AffineMap::similarity(2, 1.0 / 3, {1, 0, 0})};
    auto cantor = ifs_sample(2, maps, 20000, 5);
    std::vector<double> cr{1.0 / 243, 1.0 / 81, 1.0 / 27, 1.0 / 9};
    CHECK(frostman_exponent(cantor, cr).exponent == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(0.08));

    auto grid = std::make_shared<const SphereGrid>(SphereGrid::make(2, 720));
    SphereDensity uniform(grid, std::vector<double>(720, 1.0 / (2 * kPi)));
    std::vector<double> sr{0.03, 0.06, 0.12, 0.3};
    CHECK(frostman_exponent(uniform, sr).exponent == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("Holder ball inequality has no violations on random densities") {
    Rng rng(17);
    for (int dim : {2, 3}) {
        auto grid = std::make_shared<const SphereGrid>(SphereGrid::make(dim, dim == 2 ? 360 : 400));
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<double> v(grid->size());
            for (auto& x : v) x = std::pow(rng.uniform(), 4.0) * (rng.uniform() < 0.2 ? 50.0 : 1.0);
            const double p = 1.0 + 0.9 * rng.uniform();
            const double q = p / (p - 1);
            auto f = normalize_lq(SphereDensity(grid, v), q);
            CHECK(lp_norm_sphere(f, q) == doctest::Approx(1.0));
            for (double r : {0.05, 0.2, 1.0}) CHECK(frostman_holder_check(f, p, r).violations == 0);
        }
    }
}
