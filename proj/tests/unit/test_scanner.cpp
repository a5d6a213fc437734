#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include <radproj/error.hpp>
#include <radproj/generators.hpp>
#include <radproj/parallel.hpp>
#include <radproj/rng.hpp>
#include <radproj/scanner.hpp>

using namespace radproj;

TEST_CASE("admissible p at known points") {
    CHECK(admissible_p(2, 1.5, 0.8) == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(admissible_p(2, 1.5, 0.75) == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(admissible_p(3, 2.5, 1.8) == doctest::Approx(std::min(2 - 0.9, 1.8 / 1.5)));
}

TEST_CASE("admissible p sweep stays in (1, 2) and agrees with the min formula") {
    Rng rng(42);
    for (int i = 0; i < 1000; ++i) {
        const int d = rng.uniform() < 0.5 ? 2 : 3;
        const double s = (d - 1) + 0.02 + 0.96 * rng.uniform();
        const double lo = 2.0 * (d - 1) - s, hi = d - 1.0;
        const double t = lo + (hi - lo) * (0.01 + 0.98 * rng.uniform());
        const double p = admissible_p(d, s, t);
        const double a = 2.0 - t / (d - 1), b = t / lo;
        CHECK(p == doctest::Approx(a < b ? a : b).epsilon(1e-12));
        CHECK(p > 1.0);
        CHECK(p < 2.0);
    }
}

TEST_CASE("constraint violations name the inequality") {
    try {
        admissible_p(2, 1.5, 0.3);
        FAIL("expected a constraint error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::constraint);
        CHECK(std::string(e.what()).find("2(d-1) - s < t < d-1") != std::string::npos);
    }
    CHECK_THROWS_AS(admissible_p(2, 2.5, 0.8), Error);
    CHECK_THROWS_AS(ScanParams::make(2, 1.5, 0.8, 1.3), Error);
    auto sp = ScanParams::make(2, 1.5, 0.8, 1.2);
    CHECK(sp.q == doctest::Approx(6.0));
    CHECK(sp.delta_p == doctest::Approx(0.1));
    CHECK(sp.bound() == doctest::Approx(0.5));
}

TEST_CASE("centres near the support are masked") {
    auto mu = dirac(2, {0, 0, 0});
    ScanOptions opt;
    opt.resolutions = {36, 72};
    opt.margin = 0.25;
    auto rep = scan_centres(mu, Box{{-1, -1, 0}, {1, 1, 0}}, 0.1, opt);
    CHECK(rep.shape[0] == 21);
    CHECK(rep.masked + rep.centres.size() == 21 * 21);
    for (const auto& c : rep.centres) CHECK(norm(c) > 0.25);
    CHECK(rep.masked == 21);  // lattice points within 0.25 of the origin
}

TEST_CASE("a point mass makes every centre bad") {
    auto mu = dirac(2, {0.5, 0.5, 0});
    ScanOptions opt;
    opt.resolutions = {90, 180, 360};
    auto rep = scan_centres(mu, Box{{-1, -1, 0}, {2, 2, 0}}, 0.25, opt);
    auto bad = extract_bad_set(rep, 1.5);
    CHECK(bad.indices.size() == rep.centres.size());
    for (double g : bad.growth) CHECK(g == doctest::Approx(2.0));
    // growth 2^{p-1} is below the threshold when p < log2(3)
    opt.p = 1.5;
    auto low = scan_centres(mu, Box{{-1, -1, 0}, {2, 2, 0}}, 0.25, opt);
    auto lb = extract_bad_set(low, 1.5);
    CHECK(lb.indices.empty());
    CHECK(!lb.warnings.empty());
}

TEST_CASE("threshold one flags everything and one resolution is refused") {
    UniformBox ub{2, Box{{0, 0, 0}, {1, 1, 0}}};
    auto sq = rasterize(ub, LatticeSpec::covering(2, ub.box, 0.0, 32));
    ScanOptions opt;
    opt.resolutions = {90, 180};
    auto rep = scan_centres(sq, Box{{-1, -1, 0}, {2, 2, 0}}, 0.5, opt);
    CHECK(extract_bad_set(rep, 1.0).indices.size() == rep.centres.size());
    CHECK(extract_bad_set(rep, 1.5).indices.empty());
    apply_bad_set(rep, 1.0);
    CHECK(rep.bad_set.size() == rep.centres.size());
    CHECK(rep.threshold == 1.0);

    opt.resolutions = {90};
    auto one = scan_centres(sq, Box{{-1, -1, 0}, {2, 2, 0}}, 0.5, opt);
    CHECK_THROWS_AS(extract_bad_set(one, 1.5), Error);
}

TEST_CASE("growth is monotone in p") {
    auto seg = segment_measure(2, {0, 0.5, 0}, {1, 0.5, 0}, 5000, true, 1);
    ScanOptions opt;
    opt.resolutions = {180, 360, 720};
    const Box region{{-1, -1, 0}, {2, 2, 0}};
    opt.p = 1.5;
    auto a = extract_bad_set(scan_centres(seg, region, 0.25, opt), 1.5);
    opt.p = 2.0;
    auto b = extract_bad_set(scan_centres(seg, region, 0.25, opt), 1.5);
    REQUIRE(a.growth.size() == b.growth.size());
    for (std::size_t i = 0; i < a.growth.size(); ++i) CHECK(b.growth[i] >= a.growth[i] * (1 - 1e-12));
    CHECK(b.indices.size() >= a.indices.size());
}

TEST_CASE("box dimension of simple sets") {
    std::vector<Point> line, square, single(20, Point{0.3, 0.3, 0});
    for (int i = 0; i < 4096; ++i) line.push_back({i / 4096.0, 0.5, 0});
    for (int i = 0; i < 128; ++i)
        for (int j = 0; j < 128; ++j) square.push_back({i / 128.0, j / 128.0, 0});
    auto scales = dyadic_scales(1.0 / 64, 5);
    CHECK(scales.front() == doctest::Approx(0.25));
    CHECK(scales.back() == doctest::Approx(1.0 / 64));
    CHECK(box_dimension(line, 2, scales).dimension == doctest::Approx(1.0).epsilon(0.05));
    CHECK(box_dimension(square, 2, scales).dimension == doctest::Approx(2.0).epsilon(0.05));
    CHECK(box_dimension(single, 2, scales).dimension == 0.0);
    std::vector<Point> few(line.begin(), line.begin() + 5);
    CHECK_THROWS_AS(box_dimension(few, 2, scales), Error);
}

TEST_CASE("scan results do not depend on the thread count") {
    auto seg = segment_measure(2, {0, 0.5, 0}, {1, 0.5, 0}, 3000, true, 1);
    ScanOptions opt;
    opt.resolutions = {90, 180};
    const Box region{{-1, -1, 0}, {2, 2, 0}};
    set_thread_count(1);
    auto a = scan_centres(seg, region, 0.2, opt);
    set_thread_count(8);
    auto b = scan_centres(seg, region, 0.2, opt);
    set_thread_count(0);
    CHECK(a.centres == b.centres);
    CHECK(a.norms == b.norms);
}
