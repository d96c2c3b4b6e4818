#pragma once

// Interpolating cubic splines through ordered points. Each interval
// P[j] -> P[j+1] becomes one Bezier segment whose inner control points are
//   Q = P[j]   + c * (P[j+1] - P[j-1])
//   R = P[j+1] + c * (P[j]   - P[j+2])
// Catmull-Rom uses c = 1/6. The Oshima rule picks c per interval from the
// chord lengths and the angle between the two neighbour chords, which keeps
// samples of conics close to the true curve.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "osplot/error.hpp"
#include "osplot/geom.hpp"

namespace osplot {

enum class SplineMethod { CatmullRom, Oshima };

inline std::string_view to_string(SplineMethod m) {
    return m == SplineMethod::CatmullRom ? "catmull-rom" : "oshima";
}

inline std::optional<SplineMethod> spline_method_from_string(std::string_view s) {
    if (s == "oshima" || s == "o") return SplineMethod::Oshima;
    if (s == "catmull-rom" || s == "cr" || s == "catmullrom") return SplineMethod::CatmullRom;
    return std::nullopt;
}

struct ControlPoints {
    Point2 q;
    Point2 r;
};

inline ControlPoints control_points_cr(Point2 pm1, Point2 pj, Point2 pjp1, Point2 pjp2) {
    return {pj + (pjp1 - pm1) / 6.0, pjp1 + (pj - pjp2) / 6.0};
}

/// Oshima's interval coefficient. The chord "ratio" is taken as a ratio of
/// Euclidean lengths; theta is the angle between P[j-1]P[j+1] and P[j]P[j+2].
/// If one chord vanishes theta is taken as 0. Both vanishing is an error.
inline double oshima_coefficient(Point2 pm1, Point2 pj, Point2 pjp1, Point2 pjp2) {
    const Point2 chord_a = pjp1 - pm1;
    const Point2 chord_b = pjp2 - pj;
    const double la = norm(chord_a);
    const double lb = norm(chord_b);
    if (la + lb == 0.0) throw DegenerateError("both neighbour chords have zero length");

    double cos_theta = 1.0;
    if (la > 0.0 && lb > 0.0)
        cos_theta = std::clamp(std::cos(std::atan2(cross(chord_a, chord_b), dot(chord_a, chord_b))),
                               -1.0, 1.0);

    const double ratio = 4.0 * norm(pjp1 - pj) / (3.0 * (la + lb));
    return ratio / (1.0 + std::sqrt(0.5 * (1.0 + cos_theta)));
}

inline ControlPoints control_points_oshima(Point2 pm1, Point2 pj, Point2 pjp1, Point2 pjp2) {
    const bool zero_chords = pjp1 == pm1 && pjp2 == pj;
    if (zero_chords && pj == pjp1) return {pj, pjp1};
    const double c = oshima_coefficient(pm1, pj, pjp1, pjp2);
    return {pj + c * (pjp1 - pm1), pjp1 + c * (pj - pjp2)};
}

inline ControlPoints control_points(SplineMethod m, Point2 pm1, Point2 pj, Point2 pjp1, Point2 pjp2) {
    return m == SplineMethod::Oshima ? control_points_oshima(pm1, pj, pjp1, pjp2)
                                     : control_points_cr(pm1, pj, pjp1, pjp2);
}

/// Whether the input describes a closed curve.
///  Auto   - closed iff the first and last points coincide within 1e-9.
///  Open   - never wrap.
///  Closed - wrap; a repeated first point at the end is dropped.
enum class Closure { Auto, Open, Closed };

inline constexpr double closure_tolerance = 1e-9;

/// One Bezier segment per consecutive pair of points. Open ends repeat the
/// end point as its own missing neighbour: P[-1] = P[0], P[n] = P[n-1].
inline SplineCurve build_spline(std::span<const Point2> input, SplineMethod method,
                                Closure closure = Closure::Auto) {
    std::vector<Point2> pts;
    pts.reserve(input.size());
    for (Point2 p : input) {
        if (!is_finite(p)) throw DegenerateError("spline input point is not finite");
        if (pts.empty() || pts.back() != p) pts.push_back(p);
    }
    if (pts.size() < 2) throw DegenerateError("spline needs at least two distinct points");

    const bool ends_meet = pts.size() > 2 && distance(pts.front(), pts.back()) <= closure_tolerance;
    bool closed = closure == Closure::Closed || (closure == Closure::Auto && ends_meet);
    if (closed && ends_meet) pts.pop_back();
    if (closed && pts.size() < 3) throw DegenerateError("closed spline needs at least three points");

    const std::size_t n = pts.size();
    SplineCurve curve;
    curve.closed = closed;

    auto at = [&](std::ptrdiff_t i) -> Point2 {
        const auto sn = static_cast<std::ptrdiff_t>(n);
        if (closed) return pts[static_cast<std::size_t>(((i % sn) + sn) % sn)];
        if (i < 0) return pts[0];
        if (i >= sn) return pts[n - 1];
        return pts[static_cast<std::size_t>(i)];
    };

    const std::size_t count = closed ? n : n - 1;
    curve.segments.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        const auto sj = static_cast<std::ptrdiff_t>(j);
        const Point2 pm1 = at(sj - 1);
        const Point2 pj = at(sj);
        const Point2 pjp1 = at(sj + 1);
        const Point2 pjp2 = at(sj + 2);
        const ControlPoints cp = control_points(method, pm1, pj, pjp1, pjp2);
        curve.segments.push_back({pj, cp.q, cp.r, pjp1});
    }
    return curve;
}

inline SplineCurve build_spline(const std::vector<Point2>& input, SplineMethod method,
                                Closure closure = Closure::Auto) {
    return build_spline(std::span<const Point2>(input), method, closure);
}

} // namespace osplot
