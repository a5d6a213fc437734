#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <radproj/geometry.hpp>

namespace radproj::cli {

/// Flat view of a TOML-style config: "section.key" -> raw string value.
class Config {
public:
    static Config load(const std::filesystem::path& path);
    static Config from_string(const std::string& text);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string str(const std::string& key, const std::string& fallback) const;
    std::string str(const std::string& key) const;  // required
    double num(const std::string& key, double fallback) const;
    double num(const std::string& key) const;
    std::size_t count(const std::string& key, std::size_t fallback) const;
    bool flag(const std::string& key, bool fallback) const;
    std::uint64_t u64(const std::string& key, std::uint64_t fallback) const;

    /// "a, b, c"
    std::vector<double> list(const std::string& key, std::vector<double> fallback = {}) const;
    /// "x,y; x,y" with `dim` coordinates each
    std::vector<Point> points(const std::string& key, int dim) const;
    Point point(const std::string& key, int dim) const;
    Point point(const std::string& key, int dim, const Point& fallback) const;

    /// File path; relative values resolve against the config file's directory.
    std::filesystem::path path(const std::string& key) const;

    /// key=value lines in key order; hashed into the manifest.
    std::string canonical() const;
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
    std::filesystem::path base_dir_;
};

}  // namespace radproj::cli
