#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace radproj {

/// Points live in R^3; planar data keeps z = 0 so the same arithmetic serves d = 2 and d = 3.
using Point = std::array<double, 3>;

inline constexpr double kPi = 3.14159265358979323846;

inline Point operator+(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Point operator-(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Point operator*(double s, const Point& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline Point operator-(const Point& a) { return {-a[0], -a[1], -a[2]}; }

inline double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm2(const Point& a) { return dot(a, a); }
inline double norm(const Point& a) { return std::sqrt(norm2(a)); }

inline Point cross(const Point& a, const Point& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

/// Axis-aligned box; lo/hi beyond the ambient dimension are zero.
struct Box {
    Point lo{0.0, 0.0, 0.0};
    Point hi{0.0, 0.0, 0.0};

    Point center() const { return 0.5 * (lo + hi); }
    double radius() const { return 0.5 * norm(hi - lo); }
    Box inflated(double pad, int dim) const {
        Box b = *this;
        for (int k = 0; k < dim; ++k) {
            b.lo[k] -= pad;
            b.hi[k] += pad;
        }
        return b;
    }
    bool contains(const Box& other, int dim) const {
        for (int k = 0; k < dim; ++k)
            if (other.lo[k] < lo[k] || other.hi[k] > hi[k]) return false;
        return true;
    }
};

inline Box merge(const Box& a, const Box& b) {
    Box out;
    for (int k = 0; k < 3; ++k) {
        out.lo[k] = std::fmin(a.lo[k], b.lo[k]);
        out.hi[k] = std::fmax(a.hi[k], b.hi[k]);
    }
    return out;
}

/// Euclidean distance from x to the closed box.
inline double distance_to_box(const Point& x, const Box& b) {
    double acc = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double excess = std::fmax(std::fmax(b.lo[k] - x[k], 0.0), x[k] - b.hi[k]);
        acc += excess * excess;
    }
    return std::sqrt(acc);
}

/// |v|^{1-d} computed without pow so that power-of-two rescalings are exact.
inline double riesz_codim1_kernel(double r, int dim) { return dim == 2 ? 1.0 / r : 1.0 / (r * r); }

}  // namespace radproj
