#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hyp {

// Error type carrying a machine-readable kind next to the human message.
// Kinds are stable strings ("domain_error", "no_intersection", ...) that the
// CLI maps to exit codes and tests match on.
class error : public std::runtime_error {
public:
    error(std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline vec2 operator+(vec2 a, vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline vec2 operator-(vec2 a, vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline vec2 operator*(double t, vec2 a) { return {t * a.x, t * a.y}; }
inline double dot(vec2 a, vec2 b) { return a.x * b.x + a.y * b.y; }

// Max norm throughout: distances, cones, rectangle diameters all use it.
inline double norm_max(vec2 a) { return std::max(std::abs(a.x), std::abs(a.y)); }
inline double norm2(vec2 a) { return std::sqrt(dot(a, a)); }

inline vec2 normalize2(vec2 a) {
    double n = norm2(a);
    if (n == 0.0) throw error("degenerate_error", "cannot normalize zero vector");
    return {a.x / n, a.y / n};
}

// Row-major 2x2 matrix.
struct mat2 {
    double a00 = 1.0, a01 = 0.0;
    double a10 = 0.0, a11 = 1.0;
};

inline vec2 operator*(const mat2& m, vec2 v) {
    return {m.a00 * v.x + m.a01 * v.y, m.a10 * v.x + m.a11 * v.y};
}

inline mat2 operator*(const mat2& a, const mat2& b) {
    return {a.a00 * b.a00 + a.a01 * b.a10, a.a00 * b.a01 + a.a01 * b.a11,
            a.a10 * b.a00 + a.a11 * b.a10, a.a10 * b.a01 + a.a11 * b.a11};
}

inline double det(const mat2& m) { return m.a00 * m.a11 - m.a01 * m.a10; }

inline mat2 inverse(const mat2& m) {
    double d = det(m);
    if (std::abs(d) < 1e-300) throw error("degenerate_error", "singular 2x2 matrix");
    return {m.a11 / d, -m.a01 / d, -m.a10 / d, m.a00 / d};
}

enum class space_kind : std::uint8_t { plane, torus };

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    space_kind space = space_kind::plane;
};

inline double wrap_unit(double v) {
    double w = v - std::floor(v);
    // floor can land exactly on 1.0 for tiny negative v
    return (w >= 1.0) ? w - 1.0 : w;
}

// Signed coordinate difference; wrapped to [-1/2, 1/2) per axis on the torus.
inline double coord_diff(double a, double b, space_kind sp) {
    double d = a - b;
    if (sp == space_kind::torus) {
        d -= std::round(d);
    }
    return d;
}

inline vec2 point_diff(const Point2& a, const Point2& b) {
    if (a.space != b.space) throw error("domain_error", "points live in different spaces");
    return {coord_diff(a.x, b.x, a.space), coord_diff(a.y, b.y, a.space)};
}

inline double distance(const Point2& a, const Point2& b) { return norm_max(point_diff(a, b)); }

inline Point2 translate(const Point2& p, vec2 d) {
    Point2 q{p.x + d.x, p.y + d.y, p.space};
    if (p.space == space_kind::torus) {
        q.x = wrap_unit(q.x);
        q.y = wrap_unit(q.y);
    }
    return q;
}

} // namespace hyp
