#include "radproj/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "radproj/error.hpp"

namespace radproj::io {

using nlohmann::json;

namespace {

json point_json(const Point& p, int dim) {
    json a = json::array();
    for (int k = 0; k < dim; ++k) a.push_back(p[k]);
    return a;
}

Point parse_point(const json& a, int dim) {
    if (!a.is_array() || static_cast<int>(a.size()) != dim)
        throw Error(ErrorCode::invalid_input, "point must be an array of " + std::to_string(dim) + " numbers");
    Point p{0, 0, 0};
    for (int k = 0; k < dim; ++k) p[k] = a.at(k).get<double>();
    return p;
}

json box_json(const Box& b, int dim) { return json{{"lo", point_json(b.lo, dim)}, {"hi", point_json(b.hi, dim)}}; }

json warnings_json(const std::vector<std::string>& w) { return json(w); }

// Shortest round-trip representation, independent of locale.
std::string num(double v) {
    if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::vector<std::vector<double>> parse_numeric_rows(const std::string& text, std::size_t min_cols) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ls, cell, ',')) {
            const auto b = cell.find_first_not_of(" \t");
            const auto e = cell.find_last_not_of(" \t");
            if (b == std::string::npos) {
                numeric = false;
                break;
            }
            double v = 0.0;
            const char* first = cell.data() + b;
            const char* last = cell.data() + e + 1;
            const auto r = std::from_chars(first, last, v);
            if (r.ec != std::errc() || r.ptr != last) {
                numeric = false;
                break;
            }
            row.push_back(v);
        }
        if (!numeric) {
            if (rows.empty() && line_no == 1) continue;  // header
            throw Error(ErrorCode::invalid_input, "CSV line " + std::to_string(line_no) + " is not numeric");
        }
        if (row.size() < min_cols)
            throw Error(ErrorCode::invalid_input, "CSV line " + std::to_string(line_no) + " has too few columns");
        rows.push_back(std::move(row));
    }
    return rows;
}

json parse_or_throw(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::invalid_input, std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace

std::string measure_json(const DiscreteMeasure& mu) {
    json pts = json::array();
    for (const auto& p : mu.points()) pts.push_back(point_json(p, mu.dim()));
    json j{{"dim", mu.dim()}, {"points", pts}, {"weights", std::vector<double>(mu.weights().begin(), mu.weights().end())}};
    return j.dump() + "\n";
}

std::string grid_json(const GridDensity& mu) {
    const auto& lat = mu.lattice();
    json shape = json::array();
    for (int k = 0; k < lat.dim; ++k) shape.push_back(lat.shape[k]);
    json j{{"dim", lat.dim},
           {"origin", point_json(lat.origin, lat.dim)},
           {"spacing", lat.spacing},
           {"shape", shape},
           {"values", std::vector<double>(mu.values().begin(), mu.values().end())}};
    return j.dump() + "\n";
}

std::string sphere_grid_json(const SphereGrid& grid) {
    json centers = json::array();
    for (const auto& c : grid.centers()) centers.push_back(point_json(c, grid.dim()));
    json j{{"dim", grid.dim()}, {"centers", centers}, {"areas", std::vector<double>(grid.size(), grid.bin_area())}};
    return j.dump() + "\n";
}

std::string sphere_density_json(const SphereDensity& f) {
    json centers = json::array();
    for (const auto& c : f.grid().centers()) centers.push_back(point_json(c, f.grid().dim()));
    json j{{"dim", f.grid().dim()},
           {"resolution", f.grid().size()},
           {"bin_area", f.grid().bin_area()},
           {"centers", centers},
           {"values", std::vector<double>(f.values().begin(), f.values().end())},
           {"mass", f.mass()}};
    return j.dump() + "\n";
}

std::string direction_density_json(const DirectionDensity& f) {
    const auto& l = f.layout();
    json frame = json::array();
    for (int k = 0; k < f.dim() - 1; ++k) frame.push_back(point_json(f.direction().frame()[k], f.dim()));
    json j{{"dim", f.dim()},
           {"direction", point_json(f.direction().vector(), f.dim())},
           {"frame", frame},
           {"origin", std::vector<double>(l.origin.begin(), l.origin.begin() + (f.dim() - 1))},
           {"spacing", l.spacing},
           {"shape", std::vector<std::size_t>(l.shape.begin(), l.shape.begin() + (f.dim() - 1))},
           {"values", std::vector<double>(f.values().begin(), f.values().end())},
           {"mass", f.mass()}};
    return j.dump() + "\n";
}

std::string energy_json(const EnergyReport& r) {
    json j{{"exponent", r.exponent},
           {"value", r.divergent ? json(nullptr) : json(r.value)},
           {"method", r.method},
           {"resolution", r.resolution},
           {"error_estimate", std::isfinite(r.error_estimate) ? json(r.error_estimate) : json(nullptr)},
           {"divergent", r.divergent},
           {"warnings", warnings_json(r.warnings)}};
    return j.dump(2) + "\n";
}

namespace {
json lemma1_entry(const Lemma1Report& r) {
    return json{{"p", r.p}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"gap", r.gap}, {"resolutions", r.resolutions}};
}
}  // namespace

std::string lemma1_json(const std::vector<Lemma1Report>& reports) {
    json a = json::array();
    for (const auto& r : reports) a.push_back(lemma1_entry(r));
    return json{{"reports", a}}.dump(2) + "\n";
}

std::string mollification_json(const MollificationStudy& s) {
    json a = json::array();
    for (const auto& r : s.reports) a.push_back(lemma1_entry(r));
    json j{{"scales", s.scales},
           {"reports", a},
           {"gaps_nonincreasing", s.gaps_nonincreasing},
           {"cauchy_last", s.cauchy_last},
           {"limit", std::isfinite(s.limit) ? json(s.limit) : json(nullptr)},
           {"fatou_ok", s.fatou_ok},
           {"notes", s.notes}};
    return j.dump(2) + "\n";
}

std::string scan_json(const ScanReport& r) {
    json bad = json::array();
    for (const auto& p : r.bad_set) bad.push_back(point_json(p, r.dim));
    std::size_t bad_count = 0;
    for (const char b : r.bad) bad_count += b ? 1 : 0;
    json j{{"dim", r.dim},
           {"region", box_json(r.region, r.dim)},
           {"step", r.step},
           {"shape", std::vector<std::size_t>(r.shape.begin(), r.shape.begin() + r.dim)},
           {"p", r.p},
           {"margin", r.margin},
           {"resolutions", r.resolutions},
           {"scanned", r.centres.size()},
           {"masked", r.masked},
           {"threshold", r.threshold},
           {"bad_count", bad_count},
           {"bad_set", bad},
           {"dim_estimate", r.dim_estimate},
           {"dim_band", r.dim_band},
           {"bound", r.bound},
           {"warnings", warnings_json(r.warnings)}};
    return j.dump(2) + "\n";
}

std::string dimension_json(const DimensionEstimate& d) {
    json j{{"dimension", d.dimension},
           {"band", d.band},
           {"standard_error", d.standard_error},
           {"scales", d.scales},
           {"counts", d.counts}};
    return j.dump(2) + "\n";
}

AnyMeasure parse_measure_json(const std::string& text) {
    const json j = parse_or_throw(text);
    try {
        const int dim = j.at("dim").get<int>();
        if (dim != 2 && dim != 3) throw Error(ErrorCode::invalid_input, "dim must be 2 or 3");
        if (j.contains("points")) {
            std::vector<Point> pts;
            for (const auto& p : j.at("points")) pts.push_back(parse_point(p, dim));
            auto w = j.at("weights").get<std::vector<double>>();
            return DiscreteMeasure::from_points(dim, std::move(pts), std::move(w));
        }
        LatticeSpec lat;
        lat.dim = dim;
        lat.origin = parse_point(j.at("origin"), dim);
        lat.spacing = j.at("spacing").get<double>();
        const auto shape = j.at("shape").get<std::vector<std::size_t>>();
        if (static_cast<int>(shape.size()) != dim) throw Error(ErrorCode::invalid_input, "grid shape must have dim entries");
        lat.shape = {1, 1, 1};
        for (int k = 0; k < dim; ++k) lat.shape[k] = shape[k];
        auto values = j.at("values").get<std::vector<double>>();
        if (values.size() != lat.cell_count()) throw Error(ErrorCode::invalid_input, "grid values do not match shape");
        return GridDensity::from_values(lat, std::move(values));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::invalid_input, std::string("bad measure JSON: ") + e.what());
    }
}

DiscreteMeasure parse_measure_csv(const std::string& text, int dim) {
    const auto rows = parse_numeric_rows(text, static_cast<std::size_t>(dim) + 1);
    std::vector<Point> pts;
    std::vector<double> w;
    for (const auto& r : rows) {
        if (r.size() != static_cast<std::size_t>(dim) + 1)
            throw Error(ErrorCode::invalid_input, "measure CSV rows need " + std::to_string(dim) + " coordinates and a weight");
        Point p{0, 0, 0};
        for (int k = 0; k < dim; ++k) p[k] = r[k];
        pts.push_back(p);
        w.push_back(r.back());
    }
    return DiscreteMeasure::from_points(dim, std::move(pts), std::move(w));
}

AnyMeasure read_measure(const std::filesystem::path& path, int dim_hint) {
    const std::string text = read_text(path);
    if (path.extension() == ".csv") return parse_measure_csv(text, dim_hint);
    return parse_measure_json(text);
}

std::string points_csv(const std::vector<Point>& points, int dim) {
    std::string out = dim == 2 ? "x,y\n" : "x,y,z\n";
    for (const auto& p : points) {
        for (int k = 0; k < dim; ++k) out += (k ? "," : "") + num(p[k]);
        out += "\n";
    }
    return out;
}

std::vector<Point> parse_points_csv(const std::string& text, int dim) {
    std::vector<Point> out;
    for (const auto& r : parse_numeric_rows(text, static_cast<std::size_t>(dim))) {
        Point p{0, 0, 0};
        for (int k = 0; k < dim; ++k) p[k] = r[k];
        out.push_back(p);
    }
    return out;
}

std::string sphere_density_csv(const SphereDensity& f) {
    const int dim = f.grid().dim();
    std::string out = dim == 2 ? "bin,ex,ey,value\n" : "bin,ex,ey,ez,value\n";
    for (std::size_t b = 0; b < f.grid().size(); ++b) {
        out += std::to_string(b);
        for (int k = 0; k < dim; ++k) out += "," + num(f.grid().center(b)[k]);
        out += "," + num(f.value(b)) + "\n";
    }
    return out;
}

std::string direction_density_csv(const DirectionDensity& f) {
    const bool planar = f.dim() == 3;
    std::string out = planar ? "i,j,u,v,value\n" : "i,u,value\n";
    const auto& l = f.layout();
    for (std::size_t flat = 0; flat < l.size(); ++flat) {
        const auto c = f.bin_center(flat);
        if (planar) {
            out += std::to_string(flat / l.shape[1]) + "," + std::to_string(flat % l.shape[1]) + "," + num(c[0]) + "," +
                   num(c[1]);
        } else {
            out += std::to_string(flat) + "," + num(c[0]);
        }
        out += "," + num(f.values()[flat]) + "\n";
    }
    return out;
}

std::string scan_csv(const ScanReport& r) {
    std::string out = r.dim == 2 ? "x,y" : "x,y,z";
    for (const auto res : r.resolutions) out += ",norm_" + std::to_string(res);
    out += ",bad\n";
    for (std::size_t c = 0; c < r.centres.size(); ++c) {
        for (int k = 0; k < r.dim; ++k) out += (k ? "," : "") + num(r.centres[c][k]);
        for (const double v : r.norms[c]) out += "," + num(v);
        out += std::string(",") + (c < r.bad.size() && r.bad[c] ? "1" : "0") + "\n";
    }
    return out;
}

std::string scan_pgm(const ScanReport& r) {
    if (r.dim != 2) throw Error(ErrorCode::invalid_input, "heatmap is only available in d = 2");
    const std::size_t w = r.shape[0], h = r.shape[1];
    std::vector<double> logs(w * h, std::numeric_limits<double>::quiet_NaN());
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t c = 0; c < r.centres.size(); ++c) {
        const double v = r.norms[c].back();
        if (!(v > 0.0)) continue;
        const double l = std::log(v);
        logs[r.lattice_index[c]] = l;
        lo = std::min(lo, l);
        hi = std::max(hi, l);
    }
    std::ostringstream os;
    os << "P2\n" << w << " " << h << "\n255\n";
    // Rows top to bottom = decreasing y; lattice index is i * h + j with x along i.
    for (std::size_t row = 0; row < h; ++row) {
        const std::size_t j = h - 1 - row;
        for (std::size_t i = 0; i < w; ++i) {
            const double l = logs[i * h + j];
            int level = 0;
            if (std::isfinite(l)) level = hi > lo ? 1 + static_cast<int>(std::lround(254.0 * (l - lo) / (hi - lo))) : 128;
            os << level << (i + 1 == w ? '\n' : ' ');
        }
    }
    return os.str();
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io, "cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::io, "cannot write file: " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::io, "write failed: " + path.string());
}

}  // namespace radproj::io
