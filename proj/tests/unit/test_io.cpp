#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <limits>
#include <string>

#include <json.hpp>

#include <radproj/energy.hpp>
#include <radproj/error.hpp>
#include <radproj/generators.hpp>
#include <radproj/io.hpp>

using namespace radproj;
namespace fs = std::filesystem;

TEST_CASE("atomic measures round-trip through JSON byte for byte") {
    auto mu = GaussianMixture{2, {{0, 0, 0}}, {0.3}, {1}, 4.0}.sample(50, 4);
    const std::string text = io::measure_json(mu);
    auto back = std::get<DiscreteMeasure>(io::parse_measure_json(text));
    CHECK(io::measure_json(back) == text);
    CHECK(riesz_energy(back, 0.5).value == riesz_energy(mu, 0.5).value);
}

TEST_CASE("grid densities round-trip through JSON") {
    UniformBox ub{2, Box{{0, 0, 0}, {1, 2, 0}}};
    auto g = rasterize(ub, LatticeSpec::covering(2, ub.box, 0.0, 16));
    const std::string text = io::grid_json(g);
    auto back = std::get<GridDensity>(io::parse_measure_json(text));
    CHECK(io::grid_json(back) == text);
}

TEST_CASE("measure CSV accepts a header and takes the weight from the last column") {
    auto mu = io::parse_measure_csv("x,y,w\n0,0,1\n1,0,3\n", 2);
    REQUIRE(mu.size() == 2);
    CHECK(mu.weight(1) == doctest::Approx(0.75));
    CHECK_THROWS_AS(io::parse_measure_csv("0,0\n", 2), Error);
}

TEST_CASE("missing files raise an io error naming the path") {
    const fs::path p = "/nonexistent/dir/measure.json";
    try {
        io::read_measure(p);
        FAIL("expected an io error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::io);
        CHECK(std::string(e.what()).find(p.string()) != std::string::npos);
    }
}

TEST_CASE("malformed JSON is an input error") {
    CHECK_THROWS_AS(io::parse_measure_json("{\"dim\": 2, \"points\": [[0,0]]"), Error);
    CHECK_THROWS_AS(io::parse_measure_json("{\"dim\": 5, \"points\": [], \"weights\": []}"), Error);
}

TEST_CASE("energy JSON writes null for divergent values") {
    EnergyReport r;
    r.divergent = true;
    r.value = std::numeric_limits<double>::infinity();
    auto j = nlohmann::json::parse(io::energy_json(r));
    CHECK(j["value"].is_null());
    CHECK(j["divergent"] == true);
}

TEST_CASE("points CSV round-trip and files are written with parents") {
    std::vector<Point> pts{{0.1, 0.2, 0}, {1.0 / 3, -2, 0}};
    auto back = io::parse_points_csv(io::points_csv(pts, 2), 2);
    CHECK(back == pts);
    const fs::path dir = fs::temp_directory_path() / "radproj_io_test" / "nested";
    fs::remove_all(dir.parent_path());
    io::write_text(dir / "a.txt", "hello");
    CHECK(io::read_text(dir / "a.txt") == "hello");
    fs::remove_all(dir.parent_path());
}

TEST_CASE("scan outputs") {
    auto mu = dirac(2, {0, 0, 0});
    ScanOptions opt;
    opt.resolutions = {36, 72};
    auto rep = scan_centres(mu, Box{{-1, -1, 0}, {1, 1, 0}}, 0.5, opt);
    apply_bad_set(rep, 1.5);
    auto j = nlohmann::json::parse(io::scan_json(rep));
    CHECK(j["scanned"] == rep.centres.size());
    CHECK(j["bad_count"] == rep.centres.size());
    const std::string pgm = io::scan_pgm(rep);
    CHECK(pgm.rfind("P2", 0) == 0);
    const std::string csv = io::scan_csv(rep);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(rep.centres.size()) + 1);
}
