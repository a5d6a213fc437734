#include <doctest.h>

#include <cmath>
#include <memory>

#include <radproj/error.hpp>
#include <radproj/rng.hpp>
#include <radproj/sphere.hpp>

using namespace radproj;

TEST_CASE("circle grid: equal arcs, centres located in their own bin") {
    auto g = SphereGrid::make(2, 360);
    CHECK(g.size() == 360);
    CHECK(g.bin_area() * 360 == doctest::Approx(2 * kPi));
    for (std::size_t b = 0; b < g.size(); ++b) CHECK(g.locate(g.center(b)) == b);
    // half-open intervals: the lower edge belongs to the bin
    CHECK(g.locate_angle(0.0) == 0);
    CHECK(g.locate_angle(g.bin_area()) == 1);
    CHECK(g.locate_angle(-1e-12) == 359);
}

TEST_CASE("sphere grid: zonal partition is equal area and consistent") {
    for (std::size_t n : {2u, 12u, 100u, 720u, 2880u}) {
        auto g = SphereGrid::make(3, n);
        REQUIRE(g.size() == n);
        double total = 0.0;
        for (std::size_t b = 0; b < n; ++b) {
            const auto ex = g.extent(b);
            const double area = (ex.a1 - ex.a0) * (ex.b1 - ex.b0);
            CHECK(area == doctest::Approx(4 * kPi / n).epsilon(1e-9));
            total += area;
            CHECK(g.locate(g.center(b)) == b);
        }
        CHECK(total == doctest::Approx(4 * kPi));
    }
}

TEST_CASE("random directions land in the bin whose extent contains them") {
    auto g = SphereGrid::make(3, 720);
    Rng rng(3);
    for (int i = 0; i < 2000; ++i) {
        const double z = rng.uniform(-1, 1), phi = rng.uniform(0, 2 * kPi);
        const Point e = SphereGrid::direction(3, phi, z);
        const auto ex = g.extent(g.locate(e));
        CHECK(z >= ex.b0);
        CHECK(z <= ex.b1);
        if (ex.a1 - ex.a0 < 2 * kPi - 1e-12) {
            CHECK(phi >= ex.a0 - 1e-12);
            CHECK(phi < ex.a1 + 1e-12);
        }
    }
}

TEST_CASE("uniform counts per bin for uniform directions") {
    auto g = SphereGrid::make(3, 48);
    std::vector<int> counts(48, 0);
    Rng rng(9);
    const int n = 96000;
    for (int i = 0; i < n; ++i) counts[g.locate(SphereGrid::direction(3, rng.uniform(0, 2 * kPi), rng.uniform(-1, 1)))]++;
    for (int c : counts) CHECK(std::abs(c - 2000) < 5 * std::sqrt(2000.0));
}

TEST_CASE("sphere density norms") {
    auto g = std::make_shared<const SphereGrid>(SphereGrid::make(2, 100));
    SphereDensity f(g, std::vector<double>(100, 1.0 / (2 * kPi)));
    CHECK(f.mass() == doctest::Approx(1.0));
    CHECK(lp_norm_sphere(f, 2.0) == doctest::Approx(std::sqrt(1.0 / (2 * kPi))));
    CHECK_THROWS_AS(lp_norm_sphere(f, 0.5), Error);
    CHECK_THROWS_AS(SphereDensity(g, std::vector<double>(99, 1.0)), Error);
    CHECK_THROWS_AS(SphereGrid::make(3, 1), Error);
}

TEST_CASE("geodesic distance") {
    CHECK(geodesic_distance({1, 0, 0}, {0, 1, 0}) == doctest::Approx(kPi / 2));
    CHECK(geodesic_distance({1, 0, 0}, {-1, 0, 0}) == doctest::Approx(kPi));
    CHECK(geodesic_distance({0, 0, 1}, {0, 0, 1}) == doctest::Approx(0.0));
}
