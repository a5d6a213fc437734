// radproj: command-line driver for the radial/orthogonal projection lab.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/version.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <radproj/energy.hpp>
#include <radproj/error.hpp>
#include <radproj/generators.hpp>
#include <radproj/identity.hpp>
#include <radproj/io.hpp>
#include <radproj/parallel.hpp>
#include <radproj/rng.hpp>
#include <radproj/scanner.hpp>

#include "config.hpp"

namespace fs = std::filesystem;
using namespace radproj;
using radproj::cli::Config;

namespace {

constexpr const char* kVersion = "0.1.0";

/// Numerical acceptance failure (exit status 1).
struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

class Run {
public:
    Run(std::string command, Config config, fs::path out, bool dump)
        : command_(std::move(command)), config_(std::move(config)), out_(std::move(out)), dump_(dump) {}

    const Config& config() const { return config_; }
    bool dump() const { return dump_; }
    std::uint64_t seed() const { return config_.u64("run.seed", 1); }

    void emit(const std::string& name, const std::string& text) {
        io::write_text(out_ / name, text);
        artifacts_.push_back({name, sha256_hex(text), text.size()});
    }

    void write_manifest() const {
        nlohmann::json arts = nlohmann::json::array();
        for (const auto& a : artifacts_) arts.push_back({{"path", a.path}, {"sha256", a.hash}, {"bytes", a.bytes}});
        nlohmann::json m{{"command", command_},
                         {"config_hash", sha256_hex(config_.canonical())},
                         {"config", config_.values()},
                         {"versions", {{"radproj", kVersion}, {"boost", BOOST_LIB_VERSION}}},
                         {"artifacts", arts}};
        io::write_text(out_ / "manifest.json", m.dump(2) + "\n");
    }

private:
    struct Artifact {
        std::string path, hash;
        std::size_t bytes;
    };
    std::string command_;
    Config config_;
    fs::path out_;
    bool dump_;
    std::vector<Artifact> artifacts_;
};

// ---------------------------------------------------------------------------
// Measures from config sections

io::AnyMeasure build_measure(const Config& c, const std::string& sec, std::uint64_t seed) {
    const std::string kind = c.str(sec + ".kind");
    const int dim = static_cast<int>(c.count(sec + ".dim", 2));
    if (dim != 2 && dim != 3) throw Error(ErrorCode::invalid_input, sec + ".dim must be 2 or 3");
    const std::size_t samples = c.count(sec + ".samples", 2000);
    const std::size_t cells = c.count(sec + ".grid", c.count("resolution.grid", 512));
    const std::uint64_t stream = substream(seed, sec);

    auto finish = [&](const auto& density, const std::string& fallback_repr) -> io::AnyMeasure {
        const std::string repr = c.str(sec + ".representation", fallback_repr);
        if (repr == "atoms") return density.sample(samples, stream);
        if (repr != "grid") throw Error(ErrorCode::invalid_input, sec + ".representation must be grid or atoms");
        return rasterize(density, LatticeSpec::covering(dim, density.bounding_box(), 0.0, cells));
    };

    io::AnyMeasure out = [&]() -> io::AnyMeasure {
        if (kind == "gaussian_mixture") {
            GaussianMixture g;
            g.dim = dim;
            g.centres = c.points(sec + ".centres", dim);
            g.sigmas = c.list(sec + ".sigmas");
            g.weights = c.list(sec + ".weights", std::vector<double>(g.centres.size(), 1.0));
            g.cutoff = c.num(sec + ".cutoff", 4.5);
            if (g.sigmas.size() != g.centres.size() || g.weights.size() != g.centres.size())
                throw Error(ErrorCode::invalid_input, sec + ": centres, sigmas and weights must have equal length");
            return finish(g, "grid");
        }
        if (kind == "annulus") {
            Annulus a;
            a.dim = dim;
            a.centre = c.point(sec + ".centre", dim, Point{0, 0, 0});
            a.radius = c.num(sec + ".radius", 1.0);
            a.half_width = c.num(sec + ".half_width", 0.25);
            return finish(a, "grid");
        }
        if (kind == "uniform_box") {
            UniformBox u;
            u.dim = dim;
            u.box = Box{c.point(sec + ".lo", dim), c.point(sec + ".hi", dim)};
            return finish(u, "grid");
        }
        if (kind == "segment")
            return segment_measure(dim, c.point(sec + ".a", dim), c.point(sec + ".b", dim), samples,
                                   c.flag(sec + ".stratified", false), stream);
        if (kind == "dirac") return dirac(dim, c.point(sec + ".at", dim));
        if (kind == "ifs") {
            std::vector<AffineMap> maps;
            const double ratio = c.num(sec + ".ratio", 0.5);
            for (const auto& p : c.points(sec + ".fixed_points", dim)) maps.push_back(AffineMap::similarity(dim, ratio, p));
            return ifs_sample(dim, maps, samples, stream);
        }
        if (kind == "file") return io::read_measure(c.path(sec + ".path"), dim);
        throw Error(ErrorCode::invalid_input, sec + ".kind '" + kind + "' is not one of gaussian_mixture, annulus, "
                                                  "uniform_box, segment, dirac, ifs, file");
    }();

    // Optional smoothing of atoms onto a lattice.
    if (c.has(sec + ".mollify")) {
        if (const auto* atoms = std::get_if<DiscreteMeasure>(&out)) {
            const double eps = c.num(sec + ".mollify");
            const auto lattice = LatticeSpec::covering(dim, atoms->bounding_box(), eps, cells);
            out = mollify(*atoms, Mollifier{eps, MollifierProfile::bump}, lattice);
        }
    }
    return out;
}

const GridDensity& require_grid(const io::AnyMeasure& m, const std::string& what) {
    if (const auto* g = std::get_if<GridDensity>(&m)) return *g;
    throw Error(ErrorCode::invalid_input, what + " must be a grid density (set representation = grid or mollify)");
}

DiscreteMeasure require_atoms(const io::AnyMeasure& m, const std::string& what) {
    if (const auto* a = std::get_if<DiscreteMeasure>(&m)) return *a;
    throw Error(ErrorCode::invalid_input, what + " must be atomic (set representation = atoms)");
}

int measure_dim(const io::AnyMeasure& m) {
    return std::visit([](const auto& x) { return x.dim(); }, m);
}

Point direction_from(const Config& c, const std::string& key, int dim) {
    return c.point(key, dim, dim == 2 ? Point{0, 1, 0} : Point{0, 0, 1});
}

/// Exponent constraints of the scanner types, checked before dispatch when s and t are both given.
void validate_exponents(const Config& c, int dim) {
    if (c.has("exponents.s") && c.has("exponents.t")) {
        const double pmax = admissible_p(dim, c.num("exponents.s"), c.num("exponents.t"));
        if (c.flag("exponents.enforce_admissible", false))
            (void)ScanParams::make(dim, c.num("exponents.s"), c.num("exponents.t"), c.list("exponents.p", {pmax}).front());
    }
}

// ---------------------------------------------------------------------------
// Subcommands

void cmd_gen(Run& run) {
    const auto m = build_measure(run.config(), "measure", run.seed());
    if (const auto* a = std::get_if<DiscreteMeasure>(&m)) {
        run.emit("measure.json", io::measure_json(*a));
        std::vector<Point> pts(a->points().begin(), a->points().end());
        std::string csv = a->dim() == 2 ? "x,y,weight\n" : "x,y,z,weight\n";
        std::ostringstream os;
        os.precision(17);
        for (std::size_t i = 0; i < a->size(); ++i) {
            for (int k = 0; k < a->dim(); ++k) os << a->point(i)[k] << ",";
            os << a->weight(i) << "\n";
        }
        run.emit("measure.csv", csv + os.str());
    } else {
        run.emit("measure.json", io::grid_json(std::get<GridDensity>(m)));
    }
}

void cmd_energy(Run& run) {
    const Config& c = run.config();
    const auto m = build_measure(c, "measure", run.seed());
    const int dim = measure_dim(m);
    validate_exponents(c, dim);
    const double s = c.num("exponents.s");
    std::string method = c.str("energy.method", "auto");
    std::vector<EnergyReport> reports;
    if (method == "auto") method = std::holds_alternative<DiscreteMeasure>(m) ? "pairwise" : "grid";
    if (method == "pairwise" || method == "all") {
        if (const auto* a = std::get_if<DiscreteMeasure>(&m)) reports.push_back(riesz_energy(*a, s));
        else if (method == "pairwise") throw Error(ErrorCode::invalid_input, "pairwise energy needs an atomic measure");
    }
    if (method == "grid" || method == "all") {
        if (const auto* g = std::get_if<GridDensity>(&m)) reports.push_back(riesz_energy_grid(*g, s));
        else if (method == "grid") throw Error(ErrorCode::invalid_input, "grid energy needs a grid density");
    }
    if (method == "fourier" || method == "all") {
        const auto& g = require_grid(m, "measure");
        const Direction e(dim, direction_from(c, "energy.direction", dim));
        const auto f = orth_project(g, e, HistogramSpec{c.count("resolution.histogram", 512), 0.0});
        reports.push_back(fourier_sobolev(f, s - (dim - 1)));
    }
    if (reports.empty()) throw Error(ErrorCode::invalid_input, "energy.method must be auto, pairwise, grid, fourier or all");
    if (reports.size() == 1) {
        run.emit("energy.json", io::energy_json(reports.front()));
    } else {
        std::string all = "[\n";
        for (std::size_t i = 0; i < reports.size(); ++i) all += (i ? ",\n" : "") + io::energy_json(reports[i]);
        run.emit("energy.json", all + "]\n");
    }
}

void cmd_project(Run& run) {
    const Config& c = run.config();
    const auto m = build_measure(c, "measure", run.seed());
    const int dim = measure_dim(m);
    const Direction e(dim, direction_from(c, "project.direction", dim));
    const HistogramSpec spec{c.count("resolution.histogram", 512), c.num("project.half_width", 0.0)};
    const auto f = std::visit([&](const auto& mu) { return orth_project(mu, e, spec); }, m);
    run.emit("projection.json", io::direction_density_json(f));
    run.emit("projection.csv", io::direction_density_csv(f));
}

void cmd_radial(Run& run) {
    const Config& c = run.config();
    const auto m = build_measure(c, "measure", run.seed());
    const int dim = measure_dim(m);
    const Point x = c.point("radial.centre", dim);
    const auto grid = std::make_shared<const SphereGrid>(SphereGrid::make(dim, c.count("resolution.sphere", 720)));
    const RadialOptions opt{static_cast<int>(c.count("radial.subsamples", 2)), substream(run.seed(), "radial")};
    const bool weighted = c.flag("radial.weighted", false);
    const auto f = std::visit(
        [&](const auto& mu) {
            if (weighted) return radial_project(weight_riesz(mu, x, FiberConvention::full_line), grid, opt);
            using T = std::decay_t<decltype(mu)>;
            if constexpr (std::is_same_v<T, GridDensity>) return radial_project(mu, x, grid, opt);
            else return radial_project(mu, x, grid);
        },
        m);
    run.emit("radial.json", io::sphere_density_json(f));
    run.emit("radial.csv", io::sphere_density_csv(f));
}

void cmd_lemma1(Run& run) {
    const Config& c = run.config();
    const auto mu_any = build_measure(c, "measure", run.seed());
    const auto nu = require_atoms(build_measure(c, "nu", run.seed()), "nu");
    const int dim = measure_dim(mu_any);
    validate_exponents(c, dim);
    const auto ps = c.list("exponents.p", {1.0, 1.2, 2.0});
    Lemma1Resolution res;
    res.sphere = c.count("resolution.sphere", 720);
    res.directions = c.count("resolution.directions", res.sphere);
    res.histogram = HistogramSpec{c.count("resolution.histogram", 512), 0.0};
    Lemma1Options opt;
    opt.radial.seed = substream(run.seed(), "radial");
    const double tolerance = c.num("lemma1.tolerance", 0.05);
    bool failed = false;

    if (const auto* atoms = std::get_if<DiscreteMeasure>(&mu_any)) {
        // Atomic mu: study the mollification limit.
        const auto scales = c.list("mollifier.scales", {0.2, 0.1, 0.05});
        MollificationOptions mo;
        mo.resolution = res;
        mo.lemma = opt;
        mo.max_cells = c.count("mollifier.max_cells", 1024);
        const auto study = mollification_limit_study(*atoms, nu, ps.front(), scales, mo);
        run.emit("mollification.json", io::mollification_json(study));
        for (const auto& r : study.reports) failed = failed || r.gap > tolerance;
    } else {
        const auto& mu = std::get<GridDensity>(mu_any);
        Lemma1Intermediates inter;
        const auto reports = lemma1(mu, nu, ps, res, opt, run.dump() ? &inter : nullptr);
        run.emit("lemma1.json", io::lemma1_json(reports));
        for (const auto& r : reports) failed = failed || r.gap > tolerance;
        if (run.dump()) {
            for (std::size_t i = 0; i < inter.radial.size(); ++i)
                run.emit("intermediates/radial_" + std::to_string(i) + ".csv", io::sphere_density_csv(inter.radial[i]));
            for (std::size_t i = 0; i < inter.projected_mu.size(); ++i) {
                const auto b = std::to_string(inter.direction_bins[i]);
                run.emit("intermediates/orth_mu_" + b + ".csv", io::direction_density_csv(inter.projected_mu[i]));
                run.emit("intermediates/orth_nu_" + b + ".csv", io::direction_density_csv(inter.projected_nu[i]));
            }
        }
    }
    if (failed) throw NumericalFailure("relative gap above tolerance " + std::to_string(tolerance));
}

void cmd_scan(Run& run) {
    const Config& c = run.config();
    const auto m = build_measure(c, "measure", run.seed());
    const int dim = measure_dim(m);
    validate_exponents(c, dim);
    ScanOptions opt;
    opt.p = c.list("exponents.p", {2.0}).front();
    opt.margin = c.num("scan.margin", 0.1);
    opt.radial = RadialOptions{static_cast<int>(c.count("radial.subsamples", 2)), substream(run.seed(), "radial")};
    if (c.has("scan.resolutions")) {
        opt.resolutions.clear();
        for (const double r : c.list("scan.resolutions")) opt.resolutions.push_back(static_cast<std::size_t>(r));
    }
    const auto region_pts = c.points("scan.region", dim);
    if (region_pts.size() != 2) throw Error(ErrorCode::invalid_input, "scan.region expects two corners 'lo; hi'");
    const Box region{region_pts[0], region_pts[1]};
    const double step = c.num("scan.step", 0.05);

    ScanReport rep = std::visit([&](const auto& mu) { return scan_centres(mu, region, step, opt); }, m);
    apply_bad_set(rep, c.num("scan.threshold", 1.5));
    rep.bound = c.has("exponents.s") ? 2.0 * (dim - 1) - c.num("exponents.s") : std::numeric_limits<double>::quiet_NaN();
    if (c.has("exponents.s") && c.has("exponents.t") && opt.p > admissible_p(dim, c.num("exponents.s"), c.num("exponents.t")))
        rep.warnings.push_back("p exceeds the admissible range for the given s and t");
    if (rep.bad_set.size() >= 10) {
        const auto scales = c.list("scan.box_scales", dyadic_scales(step, 4));
        const auto d = box_dimension(rep.bad_set, dim, scales);
        rep.dim_estimate = d.dimension;
        rep.dim_band = d.band;
    } else if (!rep.bad_set.empty()) {
        rep.warnings.push_back("bad set too small for a box-counting estimate");
    }
    run.emit("scan.json", io::scan_json(rep));
    run.emit("scan.csv", io::scan_csv(rep));
    run.emit("bad_set.csv", io::points_csv(rep.bad_set, dim));
    if (dim == 2) run.emit("scan.pgm", io::scan_pgm(rep));
}

void cmd_boxdim(Run& run) {
    const Config& c = run.config();
    const int dim = static_cast<int>(c.count("boxdim.dim", 2));
    const auto pts = io::parse_points_csv(io::read_text(c.path("boxdim.points")), dim);
    std::vector<double> scales = c.list("boxdim.scales");
    if (scales.empty()) scales = dyadic_scales(c.num("boxdim.base", 0.01), c.count("boxdim.count", 5));
    run.emit("dimension.json", io::dimension_json(box_dimension(pts, dim, scales)));
}

std::string quote_message(std::string m) {
    for (auto& ch : m)
        if (ch == '"' || ch == '\n') ch = '\'';
    return m;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"radial and orthogonal projections of measures"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    struct Common {
        std::string config;
        std::string out = "out";
        unsigned threads = 0;
        std::string seed;
        bool dump = false;
        std::vector<std::string> exps;  // s, t, p aliases
    };
    Common common;
    common.exps.resize(3);

    const std::vector<std::pair<std::string, std::string>> subs = {
        {"gen", "build and serialize a measure"},
        {"energy", "Riesz or Fourier energy reports"},
        {"project", "orthogonal projection onto e-perp"},
        {"radial", "radial projection from a centre"},
        {"lemma1", "both sides of the projection identity, or the mollification study"},
        {"scan", "centre scan, bad set and its box dimension"},
        {"boxdim", "box-counting dimension of a point file"}};
    for (const auto& [name, help] : subs) {
        auto* sub = app.add_subcommand(name, help);
        sub->allow_extras();
        sub->add_option("--config", common.config, "TOML-style config file");
        sub->add_option("--out", common.out, "output directory");
        sub->add_option("--threads", common.threads, "worker thread cap");
        sub->add_option("--seed", common.seed, "overrides run.seed");
        sub->add_flag("--dump-intermediates", common.dump, "write per-atom and per-direction densities as CSV");
        sub->add_option("--s", common.exps[0], "overrides exponents.s");
        sub->add_option("--t", common.exps[1], "overrides exponents.t");
        sub->add_option("--p", common.exps[2], "overrides exponents.p");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error code=invalid_input message=\"" << quote_message(e.what()) << "\"\n";
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        Config config = common.config.empty() ? Config{} : Config::load(common.config);
        // Remaining arguments: --section.key value
        const auto extras = sub->remaining();
        for (std::size_t i = 0; i < extras.size(); ++i) {
            std::string key = extras[i];
            if (key.rfind("--", 0) != 0 || key.find('.') == std::string::npos)
                throw Error(ErrorCode::invalid_input, "unexpected argument '" + key + "' (overrides look like --section.key value)");
            key = key.substr(2);
            std::string value;
            if (const auto eq = key.find('='); eq != std::string::npos) {
                value = key.substr(eq + 1);
                key = key.substr(0, eq);
            } else {
                if (i + 1 >= extras.size()) throw Error(ErrorCode::invalid_input, "override --" + key + " needs a value");
                value = extras[++i];
            }
            config.set(key, value);
        }
        const char* names[] = {"exponents.s", "exponents.t", "exponents.p"};
        for (int k = 0; k < 3; ++k)
            if (!common.exps[k].empty()) config.set(names[k], common.exps[k]);
        if (!common.seed.empty()) config.set("run.seed", common.seed);
        if (common.threads) set_thread_count(common.threads);
        if (sub->count("--out")) config.set("run.out", common.out);
        const fs::path out = config.str("run.out", common.out);

        Run run(sub->get_name(), config, out, common.dump);
        const std::string& name = sub->get_name();
        if (name == "gen") cmd_gen(run);
        else if (name == "energy") cmd_energy(run);
        else if (name == "project") cmd_project(run);
        else if (name == "radial") cmd_radial(run);
        else if (name == "lemma1") {
            try {
                cmd_lemma1(run);
            } catch (const NumericalFailure& f) {
                run.write_manifest();
                throw;
            }
        } else if (name == "scan") cmd_scan(run);
        else if (name == "boxdim") cmd_boxdim(run);
        run.write_manifest();
    } catch (const NumericalFailure& e) {
        std::cerr << "error code=numerical_failure message=\"" << quote_message(e.what()) << "\"\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error code=" << to_string(e.code()) << " message=\"" << quote_message(e.what()) << "\"\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error code=internal message=\"" << quote_message(e.what()) << "\"\n";
        return 2;
    }
    return 0;
}
