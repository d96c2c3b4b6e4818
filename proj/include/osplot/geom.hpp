#pragma once

// Planar and spatial points, cubic Bezier segments, polylines, and the
// point-list CSV format.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "osplot/error.hpp"

namespace osplot {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator-(Point2 a) { return {-a.x, -a.y}; }
    friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
    friend Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
    friend Point2 operator/(Point2 a, double s) { return {a.x / s, a.y / s}; }
    friend bool operator==(Point2, Point2) = default;
};

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Point3 operator+(Point3 a, Point3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Point3 operator-(Point3 a, Point3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Point3 operator*(double s, Point3 a) { return {s * a.x, s * a.y, s * a.z}; }
    friend Point3 operator*(Point3 a, double s) { return {s * a.x, s * a.y, s * a.z}; }
    friend bool operator==(Point3, Point3) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }
inline Point2 lerp(Point2 a, Point2 b, double t) { return a + t * (b - a); }
inline Point2 midpoint(Point2 a, Point2 b) { return 0.5 * (a + b); }
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

inline double dot(Point3 a, Point3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Point3 cross(Point3 a, Point3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Point3 a) { return std::sqrt(dot(a, a)); }
inline double distance(Point3 a, Point3 b) { return norm(b - a); }
inline Point3 lerp(Point3 a, Point3 b, double t) { return a + t * (b - a); }
inline bool is_finite(Point3 p) { return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z); }

/// Axis-aligned rectangle.
struct Rect {
    double xmin = std::numeric_limits<double>::infinity();
    double ymin = std::numeric_limits<double>::infinity();
    double xmax = -std::numeric_limits<double>::infinity();
    double ymax = -std::numeric_limits<double>::infinity();

    bool empty() const { return xmin > xmax || ymin > ymax; }
    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double diagonal() const { return std::hypot(width(), height()); }
    Point2 center() const { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }

    void include(Point2 p) {
        xmin = std::min(xmin, p.x);
        ymin = std::min(ymin, p.y);
        xmax = std::max(xmax, p.x);
        ymax = std::max(ymax, p.y);
    }

    Rect inflated(double pad) const { return {xmin - pad, ymin - pad, xmax + pad, ymax + pad}; }

    bool contains(Point2 p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }

    bool overlaps(const Rect& o) const {
        return xmin <= o.xmax && o.xmin <= xmax && ymin <= o.ymax && o.ymin <= ymax;
    }
};

inline Rect bounds(std::span<const Point2> pts) {
    Rect r;
    for (Point2 p : pts) r.include(p);
    return r;
}

// ---------------------------------------------------------------------------
// Cubic Bezier

/// One cubic segment: endpoint, two control points, endpoint.
struct CubicBezier {
    Point2 p0, c0, c1, p1;

    friend bool operator==(const CubicBezier&, const CubicBezier&) = default;
};

/// de Casteljau evaluation without range checking.
inline Point2 point_at(const CubicBezier& b, double t) {
    const Point2 a = lerp(b.p0, b.c0, t);
    const Point2 m = lerp(b.c0, b.c1, t);
    const Point2 c = lerp(b.c1, b.p1, t);
    const Point2 ab = lerp(a, m, t);
    const Point2 bc = lerp(m, c, t);
    return lerp(ab, bc, t);
}

inline Point2 bezier_eval(const CubicBezier& b, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw RangeError("bezier parameter outside [0,1]");
    return point_at(b, t);
}

/// dP/dt, evaluated as the quadratic hodograph.
inline Point2 derivative_at(const CubicBezier& b, double t) {
    const Point2 d0 = 3.0 * (b.c0 - b.p0);
    const Point2 d1 = 3.0 * (b.c1 - b.c0);
    const Point2 d2 = 3.0 * (b.p1 - b.c1);
    return lerp(lerp(d0, d1, t), lerp(d1, d2, t), t);
}

namespace detail {

inline std::pair<CubicBezier, CubicBezier> split(const CubicBezier& b, double t) {
    const Point2 a = lerp(b.p0, b.c0, t);
    const Point2 m = lerp(b.c0, b.c1, t);
    const Point2 c = lerp(b.c1, b.p1, t);
    const Point2 ab = lerp(a, m, t);
    const Point2 bc = lerp(m, c, t);
    const Point2 j = lerp(ab, bc, t);
    return {CubicBezier{b.p0, a, ab, j}, CubicBezier{j, bc, c, b.p1}};
}

} // namespace detail

/// Splits at interior parameter `t`; left.p1 == right.p0 exactly.
inline std::pair<CubicBezier, CubicBezier> bezier_subdivide(const CubicBezier& b, double t) {
    if (!(t > 0.0 && t < 1.0)) throw RangeError("subdivision parameter must lie strictly inside (0,1)");
    return detail::split(b, t);
}

/// The portion of `b` over [t0, t1] (t0 < t1 within [0,1]), reparameterized to [0,1].
inline CubicBezier bezier_segment(const CubicBezier& b, double t0, double t1) {
    CubicBezier out = b;
    if (t1 < 1.0) out = detail::split(out, t1).first;
    if (t0 > 0.0) out = detail::split(out, t0 / t1).second;
    return out;
}

inline CubicBezier reversed(const CubicBezier& b) { return {b.p1, b.c1, b.c0, b.p0}; }

/// Bounding box of the control polygon, which contains the curve.
inline Rect bezier_bbox(const CubicBezier& b) {
    Rect r;
    r.include(b.p0);
    r.include(b.c0);
    r.include(b.c1);
    r.include(b.p1);
    return r;
}

// ---------------------------------------------------------------------------
// Polylines and spline chains

/// Ordered 2D vertices. Optional per-vertex annotations carry the 3D preimage
/// and the surface parameters (u, v) of each vertex; both are empty for plain
/// planar use, otherwise they match `points` in length.
struct Polyline {
    std::vector<Point2> points;
    std::vector<Point3> space;
    std::vector<Point2> params;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    const Point2& operator[](std::size_t i) const { return points[i]; }
    bool has_space() const { return !space.empty(); }
    bool has_params() const { return !params.empty(); }
};

/// Builds a validated polyline, dropping consecutive duplicate vertices.
inline Polyline make_polyline(std::span<const Point2> pts) {
    Polyline out;
    for (Point2 p : pts) {
        if (!is_finite(p)) throw DegenerateError("polyline vertex is not finite");
        if (out.points.empty() || out.points.back() != p) out.points.push_back(p);
    }
    if (out.points.size() < 2) throw DegenerateError("polyline needs at least two distinct vertices");
    return out;
}

inline Polyline make_polyline(std::initializer_list<Point2> pts) {
    return make_polyline(std::span<const Point2>(pts.begin(), pts.size()));
}

inline double length(std::span<const Point2> pts) {
    double s = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) s += distance(pts[i - 1], pts[i]);
    return s;
}

/// Position along a polyline: segment index plus fraction in [0,1].
/// As a scalar, `index + fraction` is monotone along the polyline.
struct PolylineParam {
    std::size_t index = 0;
    double fraction = 0.0;

    double scalar() const { return static_cast<double>(index) + fraction; }
};

inline Point2 closest_point_on_segment(Point2 a, Point2 b, Point2 q, double* t_out = nullptr) {
    const Point2 d = b - a;
    const double len2 = dot(d, d);
    double t = len2 > 0.0 ? std::clamp(dot(q - a, d) / len2, 0.0, 1.0) : 0.0;
    if (t_out) *t_out = t;
    return a + t * d;
}

/// Nearest location on the polyline to `q`.
inline PolylineParam project_onto(std::span<const Point2> pts, Point2 q) {
    PolylineParam best;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double t = 0.0;
        const double d = distance(closest_point_on_segment(pts[i], pts[i + 1], q, &t), q);
        if (d < best_d) {
            best_d = d;
            best = {i, t};
        }
    }
    return best;
}

inline double distance_to_polyline(std::span<const Point2> pts, Point2 q) {
    if (pts.size() == 1) return distance(pts[0], q);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        best = std::min(best, distance(closest_point_on_segment(pts[i], pts[i + 1], q), q));
    return best;
}

inline Point2 point_at(std::span<const Point2> pts, PolylineParam s) {
    if (s.index + 1 >= pts.size()) return pts.back();
    return lerp(pts[s.index], pts[s.index + 1], s.fraction);
}

inline PolylineParam param_from_scalar(std::size_t n_points, double s) {
    const double last = static_cast<double>(n_points - 1);
    s = std::clamp(s, 0.0, last);
    auto i = static_cast<std::size_t>(std::floor(s));
    if (i + 1 >= n_points) return {n_points - 2, 1.0};
    return {i, s - static_cast<double>(i)};
}

struct ClosestApproach {
    std::size_t index_a = 0;
    std::size_t index_b = 0;
    double distance = 0.0;
};

/// Vertex pair minimizing Euclidean distance; ties go to the lowest (a, b) pair.
/// Sweeps `b` sorted by x and prunes by horizontal gap.
inline ClosestApproach closest_approach(std::span<const Point2> a, std::span<const Point2> b) {
    if (a.empty() || b.empty()) throw DegenerateError("closest_approach needs non-empty polylines");
    std::vector<std::size_t> order(b.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return b[i].x < b[j].x || (b[i].x == b[j].x && i < j);
    });

    ClosestApproach best{0, 0, std::numeric_limits<double>::infinity()};
    auto consider = [&](std::size_t ia, std::size_t ib) {
        const double d = distance(a[ia], b[ib]);
        if (d < best.distance || (d == best.distance && (ia < best.index_a ||
                                                         (ia == best.index_a && ib < best.index_b))))
            best = {ia, ib, d};
    };

    for (std::size_t ia = 0; ia < a.size(); ++ia) {
        const Point2 q = a[ia];
        auto mid = std::lower_bound(order.begin(), order.end(), q.x,
                                    [&](std::size_t j, double x) { return b[j].x < x; });
        for (auto it = mid; it != order.end(); ++it) {
            if (b[*it].x - q.x > best.distance) break;
            consider(ia, *it);
        }
        for (auto it = mid; it != order.begin();) {
            --it;
            if (q.x - b[*it].x > best.distance) break;
            consider(ia, *it);
        }
    }
    return best;
}

inline ClosestApproach closest_approach(const Polyline& a, const Polyline& b) {
    return closest_approach(std::span<const Point2>(a.points), std::span<const Point2>(b.points));
}

/// G1 chain of cubic segments. Consecutive segments share endpoints exactly;
/// a closed chain also returns to its first point.
struct SplineCurve {
    std::vector<CubicBezier> segments;
    bool closed = false;
};

/// `per_segment` samples per segment at t = k/per_segment; shared joints appear once.
inline std::vector<Point2> sample(const SplineCurve& c, std::size_t per_segment) {
    std::vector<Point2> out;
    if (c.segments.empty() || per_segment == 0) return out;
    out.reserve(c.segments.size() * per_segment + 1);
    out.push_back(c.segments.front().p0);
    for (const CubicBezier& b : c.segments) {
        for (std::size_t k = 1; k < per_segment; ++k)
            out.push_back(point_at(b, static_cast<double>(k) / static_cast<double>(per_segment)));
        out.push_back(b.p1);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Point-list CSV: one "x,y" per line, '#' starts a comment, blank lines ignored.

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline double parse_double(std::string_view s, std::size_t line) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw Error("line " + std::to_string(line) + ": malformed number '" + std::string(s) + "'");
    return v;
}

} // namespace detail

inline std::vector<Point2> read_points_csv(std::istream& in) {
    std::vector<Point2> pts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view s(line);
        if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = detail::trim(s);
        if (s.empty()) continue;
        const auto comma = s.find(',');
        if (comma == std::string_view::npos)
            throw Error("line " + std::to_string(lineno) + ": expected 'x,y'");
        pts.push_back({detail::parse_double(s.substr(0, comma), lineno),
                       detail::parse_double(s.substr(comma + 1), lineno)});
        if (!is_finite(pts.back())) throw Error("line " + std::to_string(lineno) + ": non-finite value");
    }
    return pts;
}

inline void write_points_csv(std::ostream& out, std::span<const Point2> pts) {
    char buf[80];
    for (Point2 p : pts) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.x, p.y);
        out << buf;
    }
}

} // namespace osplot
