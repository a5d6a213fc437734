#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <radproj/error.hpp>

namespace radproj::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string unquote(std::string s) {
    s = trim(s);
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) s = s.substr(1, s.size() - 2);
    return s;
}

/// TOML-style trailing comments are not understood by the INI reader.
std::string strip_comments(const std::string& text) {
    std::istringstream in(text);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        bool quoted = false;
        char quote = 0;
        std::size_t cut = line.size();
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == quote) quoted = false;
            } else if (c == '"' || c == '\'') {
                quoted = true;
                quote = c;
            } else if (c == '#' || c == ';') {
                cut = i;
                break;
            }
        }
        out << line.substr(0, cut) << "\n";
    }
    return out.str();
}

double parse_double(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw Error(ErrorCode::invalid_input, "config key " + key + " expects a number, got '" + raw + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        if (!trim(cur).empty()) out.push_back(trim(cur));
    return out;
}

}  // namespace

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot open config file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    Config c = from_string(ss.str());
    c.base_dir_ = path.parent_path();
    return c;
}

std::filesystem::path Config::path(const std::string& key) const {
    const std::filesystem::path p = str(key);
    return p.is_relative() && !base_dir_.empty() ? base_dir_ / p : p;
}

Config Config::from_string(const std::string& text) {
    boost::property_tree::ptree tree;
    std::istringstream in(strip_comments(text));
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw Error(ErrorCode::invalid_input, std::string("config parse error: ") + e.message() + " at line " +
                                                  std::to_string(e.line()));
    }
    Config c;
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            c.values_[section] = unquote(body.data());
            continue;
        }
        for (const auto& [key, leaf] : body) c.values_[section + "." + key] = unquote(leaf.data());
    }
    return c;
}

std::string Config::str(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::string Config::str(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw Error(ErrorCode::invalid_input, "missing config key " + key);
    return it->second;
}

double Config::num(const std::string& key, double fallback) const {
    return has(key) ? parse_double(key, str(key)) : fallback;
}

double Config::num(const std::string& key) const { return parse_double(key, str(key)); }

std::size_t Config::count(const std::string& key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    const double v = num(key);
    if (!(v >= 0.0) || v != static_cast<double>(static_cast<std::size_t>(v)))
        throw Error(ErrorCode::invalid_input, "config key " + key + " expects a nonnegative integer");
    return static_cast<std::size_t>(v);
}

std::uint64_t Config::u64(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string s = trim(str(key));
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw Error(ErrorCode::invalid_input, "config key " + key + " expects an unsigned integer");
    return v;
}

bool Config::flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string v = trim(str(key));
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw Error(ErrorCode::invalid_input, "config key " + key + " expects true/false");
}

std::vector<double> Config::list(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    std::vector<double> out;
    for (const auto& item : split(str(key), ',')) out.push_back(parse_double(key, item));
    return out;
}

std::vector<Point> Config::points(const std::string& key, int dim) const {
    std::vector<Point> out;
    for (const auto& chunk : split(str(key), ';')) {
        const auto coords = split(chunk, ',');
        if (static_cast<int>(coords.size()) != dim)
            throw Error(ErrorCode::invalid_input, "config key " + key + " expects points with " + std::to_string(dim) +
                                                      " coordinates separated by ';'");
        Point p{0, 0, 0};
        for (int k = 0; k < dim; ++k) p[k] = parse_double(key, coords[k]);
        out.push_back(p);
    }
    return out;
}

Point Config::point(const std::string& key, int dim) const {
    const auto pts = points(key, dim);
    if (pts.size() != 1) throw Error(ErrorCode::invalid_input, "config key " + key + " expects a single point");
    return pts.front();
}

Point Config::point(const std::string& key, int dim, const Point& fallback) const {
    return has(key) ? point(key, dim) : fallback;
}

std::string Config::canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
    return out;
}

}  // namespace radproj::cli
