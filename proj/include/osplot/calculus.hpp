#pragma once

// Quadrature, differentiation and areas for sampled data, computed on the
// spline fitted through the samples.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "osplot/error.hpp"
#include "osplot/expr.hpp"
#include "osplot/geom.hpp"
#include "osplot/spline.hpp"

namespace osplot {

/// Exact value of the integral over t in [0,1] of y(t) x'(t) for one cubic
/// segment, i.e. the signed area under it swept in x.
inline double segment_integral(const CubicBezier& b) {
    const double x1 = b.p0.x, x2 = b.c0.x, x3 = b.c1.x, x4 = b.p1.x;
    const double y1 = b.p0.y, y2 = b.c0.y, y3 = b.c1.y, y4 = b.p1.y;
    return ((10 * x4 - 6 * x3 - 3 * x2 - x1) * y4 + (6 * x4 - 3 * x2 - 3 * x1) * y3 +
            (3 * x4 + 3 * x3 - 6 * x1) * y2 + (x4 + 3 * x3 + 6 * x2 - 10 * x1) * y1) /
           20.0;
}

struct IntegrationRequest {
    std::vector<Point2> data;
    double a = 0.0;
    double b = 0.0;
    SplineMethod method = SplineMethod::Oshima;
};

namespace detail {

/// Solves x(t) = target on [0,1] by bisection. The segment must bracket the target.
inline double solve_x(const CubicBezier& b, double target) {
    const double tol = 1e-12 * (1.0 + std::fabs(target));
    double lo = 0.0, hi = 1.0;
    double flo = b.p0.x - target;
    const double fhi = b.p1.x - target;
    if (std::fabs(flo) <= tol) return 0.0;
    if (std::fabs(fhi) <= tol) return 1.0;
    if ((flo < 0.0) == (fhi < 0.0))
        throw BracketError("x(t) does not cross " + std::to_string(target) + " on the segment");
    double mid = 0.5;
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double f = point_at(b, mid).x - target;
        if (std::fabs(f) <= tol) return mid;
        if ((f < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = f;
        } else {
            hi = mid;
        }
    }
    return mid;
}

/// Integral of y dx over the part of `b` whose x lies in [lo, hi], signed by
/// the direction the segment travels.
inline double clipped_integral(const CubicBezier& b, double lo, double hi) {
    const double xs = b.p0.x, xe = b.p1.x;
    const double smin = std::min(xs, xe), smax = std::max(xs, xe);
    if (smax <= lo || smin >= hi) return 0.0;
    if (smin >= lo && smax <= hi) return segment_integral(b);

    double t0 = 0.0, t1 = 1.0;
    if (xe > xs) {
        if (xs < lo) t0 = solve_x(b, lo);
        if (xe > hi) t1 = solve_x(b, hi);
    } else {
        if (xs > hi) t0 = solve_x(b, hi);
        if (xe < lo) t1 = solve_x(b, lo);
    }
    if (t1 <= t0) return 0.0;
    return segment_integral(bezier_segment(b, t0, t1));
}

inline Rect data_bounds(std::span<const Point2> data) {
    if (data.empty()) throw DegenerateError("no data points");
    return bounds(data);
}

inline void check_x_range(std::span<const Point2> data, double lo, double hi) {
    const Rect r = data_bounds(data);
    const double slack = 1e-9 * (1.0 + std::max(std::fabs(r.xmin), std::fabs(r.xmax)));
    if (lo < r.xmin - slack || hi > r.xmax + slack)
        throw RangeError("interval [" + std::to_string(lo) + ", " + std::to_string(hi) +
                         "] outside the data range [" + std::to_string(r.xmin) + ", " +
                         std::to_string(r.xmax) + "]");
}

} // namespace detail

/// Integral of y dx over [a, b] on an already fitted spline. Segments are
/// clipped to the interval; the sign follows the travel direction of the
/// chain from its first to its last point.
inline double integrate_spline(const SplineCurve& curve, double a, double b) {
    if (curve.segments.empty()) return 0.0;
    if (a == b) return 0.0;
    if (a > b) return -integrate_spline(curve, b, a);
    double sum = 0.0;
    for (const CubicBezier& seg : curve.segments) sum += detail::clipped_integral(seg, a, b);
    const bool decreasing = curve.segments.back().p1.x < curve.segments.front().p0.x;
    return decreasing ? -sum : sum;
}

/// Integral of y dx from a to b over the spline through `data`.
/// Data may be ordered by increasing or decreasing x.
inline double integrate(std::span<const Point2> data, double a, double b,
                        SplineMethod method = SplineMethod::Oshima) {
    if (a == b) {
        detail::check_x_range(data, a, a);
        return 0.0;
    }
    detail::check_x_range(data, std::min(a, b), std::max(a, b));
    return integrate_spline(build_spline(data, method, Closure::Open), a, b);
}

inline double integrate(const IntegrationRequest& req) {
    return integrate(std::span<const Point2>(req.data), req.a, req.b, req.method);
}

/// Signed area enclosed by the closed spline through `points`, counter-clockwise positive.
inline double closed_area(std::span<const Point2> points, SplineMethod method = SplineMethod::Oshima) {
    if (points.size() < 3) throw DegenerateError("closed area needs at least three points");
    const SplineCurve curve = build_spline(points, method, Closure::Closed);
    double sum = 0.0;
    for (const CubicBezier& seg : curve.segments) sum += segment_integral(seg);
    return -sum;
}

// ---------------------------------------------------------------------------
// Differentiation

/// A point on the fitted spline located by its x coordinate.
struct SplineLocation {
    std::size_t segment = 0;
    double t = 0.0;
    Point2 point;
    Point2 velocity; // dP/dt
};

/// Finds where the spline passes x = x0. With `y_hint`, the crossing nearest
/// to that height wins; otherwise the first crossing along the chain.
inline SplineLocation locate_x(const SplineCurve& curve, double x0, std::optional<double> y_hint = {}) {
    std::optional<SplineLocation> best;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < curve.segments.size(); ++i) {
        const CubicBezier& seg = curve.segments[i];
        const double lo = std::min(seg.p0.x, seg.p1.x);
        const double hi = std::max(seg.p0.x, seg.p1.x);
        if (x0 < lo || x0 > hi) continue;
        double t = 0.0;
        try {
            t = detail::solve_x(seg, x0);
        } catch (const BracketError&) {
            continue;
        }
        SplineLocation loc{i, t, point_at(seg, t), derivative_at(seg, t)};
        if (!y_hint) return loc;
        const double score = std::fabs(loc.point.y - *y_hint);
        if (score < best_score) {
            best_score = score;
            best = loc;
        }
    }
    if (!best) throw RangeError("x = " + std::to_string(x0) + " is not reached by the data");
    return *best;
}

/// dy/dx of the spline through `data` at x = x0.
inline double derivative_at(std::span<const Point2> data, double x0,
                            SplineMethod method = SplineMethod::Oshima,
                            std::optional<double> y_hint = {}) {
    detail::check_x_range(data, x0, x0);
    const SplineLocation loc = locate_x(build_spline(data, method), x0, y_hint);
    if (std::fabs(loc.velocity.x) < 1e-12) throw VerticalTangent("infinite slope at x = " + std::to_string(x0));
    return loc.velocity.y / loc.velocity.x;
}

/// Tangent line through `point`. `slope` is empty for a vertical tangent.
struct TangentLine {
    Point2 point;
    std::optional<double> slope;
    Point2 direction; // unit vector along the line

    bool vertical() const { return !slope.has_value(); }
};

inline TangentLine tangent_line(std::span<const Point2> data, double x0,
                                SplineMethod method = SplineMethod::Oshima,
                                std::optional<double> y_hint = {}) {
    detail::check_x_range(data, x0, x0);
    const SplineLocation loc = locate_x(build_spline(data, method), x0, y_hint);
    TangentLine line;
    line.point = loc.point;
    const double speed = norm(loc.velocity);
    if (speed == 0.0) throw DegenerateError("spline is stationary at x = " + std::to_string(x0));
    line.direction = loc.velocity / speed;
    if (std::fabs(loc.velocity.x) >= 1e-12) line.slope = loc.velocity.y / loc.velocity.x;
    else line.direction = {0.0, 1.0};
    return line;
}

// ---------------------------------------------------------------------------
// Sampling user functions. `intervals` subintervals give intervals+1 points.

inline std::vector<Point2> sample_graph(const Expr& f, const std::string& var, double lo, double hi,
                                        std::size_t intervals) {
    if (intervals == 0) throw RangeError("need at least one subinterval");
    const CompiledExpr fn = compile(f, {var});
    std::vector<Point2> pts;
    pts.reserve(intervals + 1);
    for (std::size_t k = 0; k <= intervals; ++k) {
        const double x = k == intervals ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(intervals);
        auto y = fn.try_eval(x);
        if (!y) throw DomainError("function undefined at x = " + std::to_string(x));
        pts.push_back({x, *y});
    }
    return pts;
}

inline std::vector<Point2> sample_curve(const Expr& fx, const Expr& fy, const std::string& var, double lo,
                                        double hi, std::size_t intervals) {
    if (intervals == 0) throw RangeError("need at least one subinterval");
    const CompiledExpr cx = compile(fx, {var});
    const CompiledExpr cy = compile(fy, {var});
    std::vector<Point2> pts;
    pts.reserve(intervals + 1);
    for (std::size_t k = 0; k <= intervals; ++k) {
        const double t = k == intervals ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(intervals);
        auto x = cx.try_eval(t);
        auto y = cy.try_eval(t);
        if (!x || !y) throw DomainError("curve undefined at parameter " + std::to_string(t));
        pts.push_back({*x, *y});
    }
    return pts;
}

} // namespace osplot
