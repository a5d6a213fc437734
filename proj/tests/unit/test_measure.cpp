#include <doctest.h>

#include <cmath>
#include <numeric>

#include <radproj/error.hpp>
#include <radproj/generators.hpp>
#include <radproj/measure.hpp>
#include <radproj/parallel.hpp>
#include <radproj/rng.hpp>
#include <radproj/summation.hpp>

#include "oracles.hpp"

using namespace radproj;

TEST_CASE("discrete measure normalizes and keeps an exact unit mass untouched") {
    auto mu = DiscreteMeasure::from_points(2, {{0, 0, 0}, {1, 0, 0}, {0, 2, 0}}, {1, 2, 1});
    CHECK(mu.total_mass() == doctest::Approx(1.0));
    CHECK(mu.weight(1) == doctest::Approx(0.5));
    CHECK(mu.bounding_box().hi[1] == 2.0);

    auto nu = DiscreteMeasure::from_points(2, {{0, 0, 0}, {1, 0, 0}}, {0.25, 0.75});
    CHECK(nu.weight(0) == 0.25);
    CHECK(nu.weight(1) == 0.75);
}

TEST_CASE("discrete measure rejects bad input") {
    CHECK_THROWS_AS(DiscreteMeasure::from_points(2, {{0, 0, 0}}, {-1}), Error);
    CHECK_THROWS_AS(DiscreteMeasure::from_points(2, {{0, 0, 0}}, {0}), Error);
    CHECK_THROWS_AS(DiscreteMeasure::from_points(4, {{0, 0, 0}}, {1}), Error);
    CHECK_THROWS_AS(DiscreteMeasure::from_points(2, {{0, 0, 0}}, {1, 1}), Error);
    auto zero = DiscreteMeasure::unnormalized(2, {{0, 0, 0}}, {0});
    CHECK(zero.total_mass() == 0.0);
}

TEST_CASE("translation, scaling and linear images move points only") {
    auto mu = DiscreteMeasure::from_points(2, {{1, 0, 0}, {0, 1, 0}}, {1, 3});
    auto t = mu.translated({2, -1, 0});
    CHECK(t.point(0)[0] == 3.0);
    CHECK(t.point(1)[1] == 0.0);
    CHECK(t.weight(1) == doctest::Approx(0.75));
    auto s = mu.scaled(2.0);
    CHECK(s.point(1)[1] == 2.0);
    auto r = mu.linear_image({Point{0, -1, 0}, Point{1, 0, 0}, Point{0, 0, 1}});
    CHECK(r.point(0)[1] == doctest::Approx(1.0));
    CHECK(r.point(1)[0] == doctest::Approx(-1.0));
}

TEST_CASE("lattice covering leaves a spare layer and contains the box") {
    Box b{{-1, -0.5, 0}, {1, 0.5, 0}};
    auto lat = LatticeSpec::covering(2, b, 0.0, 64);
    CHECK(lat.interior_extent().contains(b, 2));
    CHECK(lat.extent().contains(lat.interior_extent(), 2));
    CHECK(lat.spacing == doctest::Approx(2.0 / 64).epsilon(0.1));
}

TEST_CASE("grid density validates boundary layer and normalizes") {
    LatticeSpec lat{2, {0, 0, 0}, 0.5, {4, 4, 1}};
    std::vector<double> v(16, 0.0);
    v[5] = 1.0;
    v[6] = 3.0;
    auto g = GridDensity::from_values(lat, v);
    CHECK(g.mass() == doctest::Approx(1.0));
    CHECK(g.values()[6] == doctest::Approx(3.0 * g.values()[5]));
    CHECK(g.support_cells().size() == 2);
    CHECK(g.frontier_cells().size() == 2);
    CHECK(g.support_box().lo[0] == doctest::Approx(0.25));
    CHECK(g.support_box().hi[1] == doctest::Approx(1.25));

    v[0] = 1.0;
    CHECK_THROWS_AS(GridDensity::from_values(lat, v), Error);
    v[0] = 0.0;
    v[5] = -1.0;
    CHECK_THROWS_AS(GridDensity::from_values(lat, v), Error);
}

TEST_CASE("mollifier normalization matches closed forms") {
    Mollifier poly{0.1, MollifierProfile::polynomial};
    CHECK(poly.normalization(2) == doctest::Approx(4.0 / oracle::pi).epsilon(1e-8));
    CHECK(poly.normalization(3) == doctest::Approx(315.0 / (64.0 * oracle::pi)).epsilon(1e-8));
    Mollifier bump{0.1, MollifierProfile::bump};
    CHECK(bump.shape(1.0) == 0.0);
    CHECK(bump.shape(0.0) == doctest::Approx(std::exp(-1.0)));
    // independent polar quadrature of the bump profile
    boost::math::quadrature::tanh_sinh<double> ts;
    const double radial = ts.integrate([&](double r) { return bump.shape(r) * r; }, 0.0, 1.0);
    CHECK(bump.normalization(2) * 2.0 * oracle::pi * radial == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("mollified dirac has mass one and the right spread") {
    auto d = dirac(2, {0.3, -0.2, 0});
    Box b{{-0.5, -1, 0}, {1, 1, 0}};
    auto lat = LatticeSpec::covering(2, b, 0.0, 200);
    auto g = mollify(d, Mollifier{0.2, MollifierProfile::polynomial}, lat);
    CHECK(g.mass() == doctest::Approx(1.0));
    double mx = 0.0, r2 = 0.0;
    for (std::size_t c = 0; c < g.values().size(); ++c) {
        const Point x = g.cell_center(c);
        const double w = g.values()[c] * g.cell_volume();
        mx += w * x[0];
        r2 += w * norm2(x - d.point(0));
    }
    CHECK(mx == doctest::Approx(0.3).epsilon(1e-6));
    // E|u|^2 for (1-|u|^2)^3 on the unit disk is 1/5, scaled by eps^2
    CHECK(r2 == doctest::Approx(0.04 / 5.0).epsilon(0.02));
}

TEST_CASE("support distance") {
    auto mu = DiscreteMeasure::from_points(2, {{0, 0, 0}, {3, 0, 0}}, {1, 1});
    CHECK(support_distance(mu, {1, 0, 0}) == doctest::Approx(1.0));
    UniformBox box{2, {{0, 0, 0}, {1, 1, 0}}};
    auto g = rasterize(box, LatticeSpec::covering(2, box.box, 0.0, 32));
    CHECK(support_distance(g, {2.0, 0.5, 0}) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(support_distance(g, {0.5, 0.5, 0}) == 0.0);
}

TEST_CASE("gaussian mixture sampling and rasterization agree on moments") {
    GaussianMixture gm{2, {{0, 0, 0}, {1, 0.5, 0}}, {0.2, 0.3}, {0.5, 0.5}, 4.5};
    auto atoms = gm.sample(20000, 7);
    auto grid = rasterize(gm, LatticeSpec::covering(2, gm.bounding_box(), 0.0, 256));
    double ma = 0.0, mg = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) ma += atoms.weight(i) * atoms.point(i)[0];
    for (std::size_t c = 0; c < grid.values().size(); ++c) mg += grid.values()[c] * grid.cell_volume() * grid.cell_center(c)[0];
    CHECK(mg == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(ma == doctest::Approx(0.5).epsilon(0.02));
    CHECK(gm.sample(100, 7).point(42) == atoms.point(42));
}

TEST_CASE("segment measures and ifs samples") {
    auto seg = segment_measure(2, {0, 0, 0}, {1, 0, 0}, 10, true, 0);
    CHECK(seg.point(0)[0] == doctest::Approx(0.05));
    CHECK(seg.point(9)[0] == doctest::Approx(0.95));
    auto iid = segment_measure(2, {0, 0, 0}, {1, 0, 0}, 1000, false, 3);
    for (const auto& p : iid.points()) {
        CHECK(p[0] >= 0.0);
        CHECK(p[0] <= 1.0);
    }
    std::vector<AffineMap> maps{AffineMap::similarity(2, 1.0 / 3, {0, 0, 0}), AffineMap::similarity(2, 1.0 / 3, {1, 0, 0})};
    CHECK(maps[0].contraction_ratio(2) == doctest::Approx(1.0 / 3));
    auto cantor = ifs_sample(2, maps, 5000, 11);
    CHECK(cantor.size() == 5000);
    for (const auto& p : cantor.points()) {
        const bool in_gap = p[0] > 1.0 / 3 + 1e-9 && p[0] < 2.0 / 3 - 1e-9;
        CHECK_FALSE(in_gap);
    }
}

TEST_CASE("pairwise sum is schedule independent and accurate") {
    std::vector<double> v(100000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / static_cast<double>(i + 1);
    const double ref = std::accumulate(v.rbegin(), v.rend(), 0.0);
    CHECK(pairwise_sum(v) == doctest::Approx(ref).epsilon(1e-14));
}

TEST_CASE("substreams are stable and distinct") {
    CHECK(substream(1, "mu") == substream(1, "mu"));
    CHECK(substream(1, "mu") != substream(1, "nu"));
    CHECK(substream(1, "mu", {0}) != substream(1, "mu", {1}));
    Rng r(5);
    double mean = 0.0;
    for (int i = 0; i < 10000; ++i) mean += r.uniform() / 10000.0;
    CHECK(mean == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("parallel_for propagates exceptions") {
    set_thread_count(4);
    CHECK_THROWS_AS(parallel_for(100, [](std::size_t i) {
                        if (i == 37) throw Error(ErrorCode::invalid_input, "boom");
                    }),
                    Error);
    set_thread_count(0);
}
