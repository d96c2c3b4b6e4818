#pragma once

// Hidden-line drawing of parametric surfaces under an orthographic camera.
//
// Pipeline: silhouette lines are the zero set of the projected Jacobian
// J(u,v) = X_u Y_v - X_v Y_u traced in the parameter rectangle; boundary
// edges and iso-parameter wires are sampled directly. Every curve is
// projected, cut where it meets the outline (silhouettes and boundaries),
// with near-tangential meetings refined on local Oshima splines, and each
// piece is tested for occlusion at its midpoint.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "osplot/error.hpp"
#include "osplot/expr.hpp"
#include "osplot/geom.hpp"
#include "osplot/implicit.hpp"
#include "osplot/render.hpp"
#include "osplot/spline.hpp"

namespace osplot {

struct ParamRange {
    double lo = 0.0;
    double hi = 1.0;

    double width() const { return hi - lo; }
    bool contains(double t, double slack = 0.0) const { return t >= lo - slack && t <= hi + slack; }
};

struct ParametricSurface {
    Expr x, y, z;
    ParamRange u, v;
    std::string u_name = "u";
    std::string v_name = "v";
};

inline double degrees(double deg) { return deg * std::numbers::pi / 180.0; }

/// Orthographic camera. Azimuth turns about z, elevation lifts the eye above
/// the xy-plane. Depth grows toward the eye.
struct Projection {
    double azimuth = degrees(60.0);
    double elevation = degrees(20.0);

    Point3 right() const { return {-std::sin(azimuth), std::cos(azimuth), 0.0}; }
    Point3 up() const {
        return {-std::cos(azimuth) * std::sin(elevation), -std::sin(azimuth) * std::sin(elevation),
                std::cos(elevation)};
    }
    Point3 toward_eye() const {
        return {std::cos(azimuth) * std::cos(elevation), std::sin(azimuth) * std::cos(elevation),
                std::sin(elevation)};
    }

    void validate() const {
        if (!(std::fabs(elevation) < std::numbers::pi / 2))
            throw RangeError("elevation must lie strictly between -90 and 90 degrees");
    }
};

struct ProjectedPoint {
    Point2 point;
    double depth = 0.0;
};

inline ProjectedPoint project(const Projection& proj, Point3 p) {
    return {{dot(proj.right(), p), dot(proj.up(), p)}, dot(proj.toward_eye(), p)};
}

/// Sampled space curve. `params` holds the (u, v) preimage of each point for
/// curves lying on a surface and is empty otherwise.
struct SpaceCurve {
    std::vector<Point3> points;
    std::vector<Point2> params;
};

/// Projects a space curve, keeping 3D and parameter annotations per vertex.
/// Consecutive points with identical projections are merged.
inline Polyline project_curve(const SpaceCurve& c, const Projection& proj) {
    Polyline out;
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        const Point2 p = project(proj, c.points[i]).point;
        if (!out.points.empty() && out.points.back() == p) continue;
        out.points.push_back(p);
        out.space.push_back(c.points[i]);
        if (!c.params.empty()) out.params.push_back(c.params[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Surface evaluation

/// Compiled surface with symbolic first partials.
class SurfaceEvaluator {
public:
    explicit SurfaceEvaluator(const ParametricSurface& s) : surface_(s) {
        const std::vector<std::string> vars{s.u_name, s.v_name};
        for (const Expr* e : {&s.x, &s.y, &s.z})
            for (const auto& name : free_variables(*e))
                if (name != s.u_name && name != s.v_name) throw UnboundVariable(name);
        coords_ = {compile(s.x, vars), compile(s.y, vars), compile(s.z, vars)};
        try {
            du_ = {compile(diff(s.x, s.u_name), vars), compile(diff(s.y, s.u_name), vars),
                   compile(diff(s.z, s.u_name), vars)};
            dv_ = {compile(diff(s.x, s.v_name), vars), compile(diff(s.y, s.v_name), vars),
                   compile(diff(s.z, s.v_name), vars)};
            symbolic_ = true;
        } catch (const Error&) {
            symbolic_ = false;
        }
    }

    const ParametricSurface& surface() const { return surface_; }

    std::optional<Point3> point(double u, double v) const {
        const std::array<double, 2> a{u, v};
        auto x = coords_[0].try_eval(a);
        auto y = coords_[1].try_eval(a);
        auto z = coords_[2].try_eval(a);
        if (!x || !y || !z) return std::nullopt;
        return Point3{*x, *y, *z};
    }

    /// First partials; central differences when no symbolic form exists.
    bool partials(double u, double v, Point3& su, Point3& sv) const {
        if (symbolic_) {
            const std::array<double, 2> a{u, v};
            std::array<double, 6> d{};
            for (std::size_t k = 0; k < 3; ++k) {
                auto pu = du_[k].try_eval(a);
                auto pv = dv_[k].try_eval(a);
                if (!pu || !pv) return finite_difference(u, v, su, sv);
                d[k] = *pu;
                d[3 + k] = *pv;
            }
            su = {d[0], d[1], d[2]};
            sv = {d[3], d[4], d[5]};
            return true;
        }
        return finite_difference(u, v, su, sv);
    }

private:
    bool finite_difference(double u, double v, Point3& su, Point3& sv) const {
        const double hu = 1e-6 * surface_.u.width();
        const double hv = 1e-6 * surface_.v.width();
        auto pu0 = point(u - hu, v), pu1 = point(u + hu, v);
        auto pv0 = point(u, v - hv), pv1 = point(u, v + hv);
        if (!pu0 || !pu1 || !pv0 || !pv1) return false;
        su = (1.0 / (2.0 * hu)) * (*pu1 - *pu0);
        sv = (1.0 / (2.0 * hv)) * (*pv1 - *pv0);
        return true;
    }

    ParametricSurface surface_;
    std::array<CompiledExpr, 3> coords_;
    std::array<CompiledExpr, 3> du_;
    std::array<CompiledExpr, 3> dv_;
    bool symbolic_ = false;
};

/// The projected Jacobian X_u Y_v - X_v Y_u as an expression in (u, v).
inline Expr silhouette_jacobian(const ParametricSurface& s, const Projection& proj) {
    const Point3 r = proj.right();
    const Point3 up = proj.up();
    auto along = [](Point3 dir, const Expr& dx, const Expr& dy, const Expr& dz) {
        return constant(dir.x) * dx + constant(dir.y) * dy + constant(dir.z) * dz;
    };
    const Expr xu = diff(s.x, s.u_name), yu = diff(s.y, s.u_name), zu = diff(s.z, s.u_name);
    const Expr xv = diff(s.x, s.v_name), yv = diff(s.y, s.v_name), zv = diff(s.z, s.v_name);
    const Expr Xu = along(r, xu, yu, zu), Xv = along(r, xv, yv, zv);
    const Expr Yu = along(up, xu, yu, zu), Yv = along(up, xv, yv, zv);
    return Xu * Yv - Xv * Yu;
}

namespace detail {

inline double curve_extent(std::span<const Point3> pts) {
    double e = 0.0;
    for (Point3 p : pts) e = std::max(e, distance(p, pts.front()));
    return e;
}

inline double surface_scale(const SurfaceEvaluator& ev, std::size_t n = 16) {
    const auto& s = ev.surface();
    double scale = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t j = 0; j <= n; ++j) {
            const double u = s.u.lo + s.u.width() * static_cast<double>(i) / static_cast<double>(n);
            const double v = s.v.lo + s.v.width() * static_cast<double>(j) / static_cast<double>(n);
            if (auto p = ev.point(u, v)) scale = std::max(scale, norm(*p));
        }
    return std::max(scale, 1e-12);
}

} // namespace detail

/// Silhouette lines: J(u,v) = 0 traced over the parameter rectangle on a
/// `grid` x `grid` mesh, mapped back to space. Components that collapse to a
/// single space point (degenerate parameter edges) are dropped.
inline std::vector<SpaceCurve> silhouette(const ParametricSurface& s, const Projection& proj,
                                          std::size_t grid = 200) {
    proj.validate();
    const SurfaceEvaluator ev(s);
    TraceConfig cfg;
    cfg.xmin = s.u.lo;
    cfg.xmax = s.u.hi;
    cfg.ymin = s.v.lo;
    cfg.ymax = s.v.hi;
    cfg.grid = grid;

    TraceResult traced;
    std::optional<CompiledExpr> jac;
    try {
        jac = compile(silhouette_jacobian(s, proj), {s.u_name, s.v_name});
    } catch (const Error&) {
        jac.reset();
    }
    if (jac) {
        traced = trace_field([&](double u, double v) { return jac->try_eval(u, v); }, cfg);
    } else {
        const Point3 r = proj.right(), up = proj.up();
        traced = trace_field(
            [&](double u, double v) -> std::optional<double> {
                Point3 su, sv;
                if (!ev.partials(u, v, su, sv)) return std::nullopt;
                return dot(r, su) * dot(up, sv) - dot(r, sv) * dot(up, su);
            },
            cfg);
    }

    const double scale = detail::surface_scale(ev);
    std::vector<SpaceCurve> out;
    for (const Polyline& pl : traced.curves) {
        SpaceCurve c;
        for (Point2 uv : pl.points) {
            if (auto p = ev.point(uv.x, uv.y)) {
                c.points.push_back(*p);
                c.params.push_back(uv);
            }
        }
        if (c.points.size() < 2 || detail::curve_extent(c.points) <= 1e-9 * scale) continue;
        out.push_back(std::move(c));
    }
    return out;
}

namespace detail {

inline SpaceCurve iso_curve(const SurfaceEvaluator& ev, bool fix_u, double fixed, std::size_t samples) {
    const auto& s = ev.surface();
    const ParamRange range = fix_u ? s.v : s.u;
    SpaceCurve c;
    for (std::size_t k = 0; k < samples; ++k) {
        const double t = k + 1 == samples
                             ? range.hi
                             : range.lo + range.width() * static_cast<double>(k) / static_cast<double>(samples - 1);
        const Point2 uv = fix_u ? Point2{fixed, t} : Point2{t, fixed};
        if (auto p = ev.point(uv.x, uv.y)) {
            c.points.push_back(*p);
            c.params.push_back(uv);
        }
    }
    return c;
}

inline bool coincide(const SpaceCurve& a, const SpaceCurve& b, double tol, bool reverse) {
    if (a.points.size() != b.points.size()) return false;
    const std::size_t n = a.points.size();
    for (std::size_t k = 0; k < n; ++k)
        if (distance(a.points[k], b.points[reverse ? n - 1 - k : k]) > tol) return false;
    return true;
}

} // namespace detail

/// The four parameter-rectangle edges, sampled at `samples` points each.
/// Edges that collapse to a point are dropped, and so are opposite edges that
/// coincide in space (a seam, possibly reversed as on a Mobius band).
/// Order: u = lo, u = hi, v = lo, v = hi.
inline std::vector<SpaceCurve> boundary_curves(const ParametricSurface& s, std::size_t samples = 100) {
    if (samples < 2) throw RangeError("boundary needs at least two samples per edge");
    const SurfaceEvaluator ev(s);
    const double tol = 1e-9 * detail::surface_scale(ev);
    std::array<SpaceCurve, 4> edges{
        detail::iso_curve(ev, true, s.u.lo, samples), detail::iso_curve(ev, true, s.u.hi, samples),
        detail::iso_curve(ev, false, s.v.lo, samples), detail::iso_curve(ev, false, s.v.hi, samples)};
    std::array<bool, 4> keep{};
    for (std::size_t k = 0; k < 4; ++k)
        keep[k] = edges[k].points.size() >= 2 && detail::curve_extent(edges[k].points) > tol;
    for (std::size_t k : {std::size_t{0}, std::size_t{2}}) {
        if (keep[k] && keep[k + 1] &&
            (detail::coincide(edges[k], edges[k + 1], tol, false) ||
             detail::coincide(edges[k], edges[k + 1], tol, true)))
            keep[k] = keep[k + 1] = false;
    }
    std::vector<SpaceCurve> out;
    for (std::size_t k = 0; k < 4; ++k)
        if (keep[k]) out.push_back(std::move(edges[k]));
    return out;
}

/// Iso-parameter curves: u held at each of `fixed_u`, then v at each of `fixed_v`.
inline std::vector<SpaceCurve> wires(const ParametricSurface& s, std::span<const double> fixed_u,
                                     std::span<const double> fixed_v, std::size_t samples = 100) {
    if (samples < 2) throw RangeError("wires need at least two samples");
    const double slack_u = 1e-12 * (1.0 + std::fabs(s.u.lo) + std::fabs(s.u.hi));
    const double slack_v = 1e-12 * (1.0 + std::fabs(s.v.lo) + std::fabs(s.v.hi));
    for (double u : fixed_u)
        if (!s.u.contains(u, slack_u)) throw RangeError("wire value " + std::to_string(u) + " outside the u range");
    for (double v : fixed_v)
        if (!s.v.contains(v, slack_v)) throw RangeError("wire value " + std::to_string(v) + " outside the v range");
    const SurfaceEvaluator ev(s);
    std::vector<SpaceCurve> out;
    for (double u : fixed_u) out.push_back(detail::iso_curve(ev, true, u, samples));
    for (double v : fixed_v) out.push_back(detail::iso_curve(ev, false, v, samples));
    return out;
}

// ---------------------------------------------------------------------------
// Intersections of projected curves

enum class CrossingKind { Transversal, Contact };

/// A meeting point of two polylines. `index_a`/`index_b` name the segment
/// (transversal) or the nearest vertex (contact) on each polyline.
struct Crossing {
    Point2 point;
    std::size_t index_a = 0;
    std::size_t index_b = 0;
    CrossingKind kind = CrossingKind::Transversal;
};

namespace detail {

// Proper or touching intersection of segments [p0,p1] and [q0,q1]; parallel
// and collinear pairs are not reported.
inline std::optional<Point2> segment_intersection(Point2 p0, Point2 p1, Point2 q0, Point2 q1) {
    const Point2 r = p1 - p0;
    const Point2 s = q1 - q0;
    const double denom = cross(r, s);
    const double scale = norm(r) * norm(s);
    if (scale == 0.0 || std::fabs(denom) <= 1e-14 * scale) return std::nullopt;
    const Point2 qp = q0 - p0;
    const double t = cross(qp, s) / denom;
    const double u = cross(qp, r) / denom;
    if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
    return p0 + t * r;
}

struct SegmentBox {
    Rect box;
    std::size_t index;
};

inline std::vector<SegmentBox> sorted_segments(std::span<const Point2> pts) {
    std::vector<SegmentBox> out;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        Rect r;
        r.include(pts[i]);
        r.include(pts[i + 1]);
        out.push_back({r, i});
    }
    std::sort(out.begin(), out.end(), [](const SegmentBox& a, const SegmentBox& b) {
        return a.box.xmin < b.box.xmin || (a.box.xmin == b.box.xmin && a.index < b.index);
    });
    return out;
}

} // namespace detail

/// All transversal segment crossings, ordered by (index_a, index_b) and with
/// points closer than `dedup_tol` to an earlier one removed.
inline std::vector<Crossing> segment_crossings(std::span<const Point2> a, std::span<const Point2> b,
                                               double dedup_tol = 1e-12) {
    std::vector<Crossing> raw;
    if (a.size() < 2 || b.size() < 2) return raw;
    const auto sb = detail::sorted_segments(b);
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        Rect ra;
        ra.include(a[i]);
        ra.include(a[i + 1]);
        for (const auto& seg : sb) {
            if (seg.box.xmin > ra.xmax) break;
            if (!seg.box.overlaps(ra)) continue;
            const std::size_t j = seg.index;
            if (auto p = detail::segment_intersection(a[i], a[i + 1], b[j], b[j + 1]))
                raw.push_back({*p, i, j, CrossingKind::Transversal});
        }
    }
    std::sort(raw.begin(), raw.end(), [](const Crossing& x, const Crossing& y) {
        return x.index_a < y.index_a || (x.index_a == y.index_a && x.index_b < y.index_b);
    });
    std::vector<Crossing> out;
    for (const Crossing& c : raw) {
        const bool dup = std::any_of(out.begin(), out.end(),
                                     [&](const Crossing& o) { return distance(o.point, c.point) <= dedup_tol; });
        if (!dup) out.push_back(c);
    }
    return out;
}

/// Transversal crossings plus contact clusters. A cluster is a maximal run of
/// vertices of `a` lying within `tol` of `b`; it is reported as one Contact
/// at its closest approach when it holds no crossing, or when more than three
/// crossings fall inside a five-vertex window (those crossings are absorbed).
inline std::vector<Crossing> intersect_projected(const Polyline& a, const Polyline& b, double tol) {
    std::vector<Crossing> crossings = segment_crossings(a.points, b.points, tol);
    if (a.size() < 2 || b.size() < 2) return crossings;

    const std::size_t n = a.size();
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) dist[i] = distance_to_polyline(b.points, a[i]);

    std::vector<char> absorbed(crossings.size(), 0);
    std::vector<Crossing> contacts;
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    std::size_t i = 0;
    while (i < n) {
        if (dist[i] >= tol) {
            ++i;
            continue;
        }
        std::size_t first = i;
        while (i < n && dist[i] < tol) ++i;
        const std::size_t last = i - 1;

        // crossings on segments touching the run
        std::vector<std::size_t> inside;
        for (std::size_t k = 0; k < crossings.size(); ++k) {
            const std::size_t s = crossings[k].index_a;
            if (s + 1 >= first && s <= last) inside.push_back(k);
        }
        bool dense = false;
        for (std::size_t p = 0; p < inside.size() && !dense; ++p) {
            std::size_t count = 0;
            for (std::size_t q = p; q < inside.size(); ++q)
                if (crossings[inside[q]].index_a < crossings[inside[p]].index_a + 5) ++count;
            dense = count > 3;
        }
        if (!inside.empty() && !dense) continue;

        std::size_t best = first;
        for (std::size_t k = first; k <= last; ++k)
            if (dist[k] < dist[best]) best = k;
        const PolylineParam on_b = project_onto(b.points, a[best]);
        const Point2 foot = point_at(b.points, on_b);
        const std::size_t vb = on_b.fraction < 0.5 ? on_b.index : on_b.index + 1;
        contacts.push_back({midpoint(a[best], foot), best, vb, CrossingKind::Contact});
        runs.push_back({first, last});
        for (std::size_t k : inside) absorbed[k] = 1;
    }
    // On a closed polyline a cluster through the seam shows up as two runs.
    if (contacts.size() >= 2 && distance(a.points.front(), a.points.back()) <= closure_tolerance &&
        runs.front().first == 0 && runs.back().second == n - 1) {
        const bool keep_front = dist[contacts.front().index_a] <= dist[contacts.back().index_a];
        contacts.erase(keep_front ? contacts.end() - 1 : contacts.begin());
    }

    std::vector<Crossing> out;
    for (std::size_t k = 0; k < crossings.size(); ++k)
        if (!absorbed[k]) out.push_back(crossings[k]);
    out.insert(out.end(), contacts.begin(), contacts.end());
    std::sort(out.begin(), out.end(), [](const Crossing& x, const Crossing& y) {
        return x.index_a < y.index_a || (x.index_a == y.index_a && x.index_b < y.index_b);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Contact refinement

struct ContactRefinement {
    Point2 point;
    bool crossing = false;       // false: the local splines do not meet; point is their closest approach
    std::size_t candidates = 0;  // accepted box pairs before clustering
    SplineCurve spline_a;
    SplineCurve spline_b;
};

namespace detail {

inline SplineCurve local_spline(std::span<const Point2> pts, std::size_t center, std::size_t window) {
    const std::size_t lo = center >= window ? center - window : 0;
    const std::size_t hi = std::min(pts.size() - 1, center + window);
    std::vector<Point2> local(pts.begin() + static_cast<std::ptrdiff_t>(lo),
                              pts.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    return build_spline(local, SplineMethod::Oshima, Closure::Open);
}

struct NearestOnSpline {
    Point2 point;
    std::size_t segment = 0;
    double t = 0.0;
    double distance = std::numeric_limits<double>::infinity();
};

/// Nearest point of a spline chain to q: dense sampling, then Newton on the
/// squared distance within the best segment.
inline NearestOnSpline nearest_on_spline(const SplineCurve& c, Point2 q, std::size_t samples = 64) {
    NearestOnSpline best;
    for (std::size_t s = 0; s < c.segments.size(); ++s)
        for (std::size_t k = 0; k <= samples; ++k) {
            const double t = static_cast<double>(k) / static_cast<double>(samples);
            const double d = distance(point_at(c.segments[s], t), q);
            if (d < best.distance) best = {point_at(c.segments[s], t), s, t, d};
        }
    if (c.segments.empty()) return best;
    const CubicBezier& b = c.segments[best.segment];
    double t = best.t;
    for (int it = 0; it < 20; ++it) {
        const Point2 p = point_at(b, t);
        const Point2 d1 = derivative_at(b, t);
        const Point2 d2 = 6.0 * lerp(b.c1 - 2.0 * b.c0 + b.p0, b.p1 - 2.0 * b.c1 + b.c0, t);
        const double g = dot(p - q, d1);
        const double h = dot(d1, d1) + dot(p - q, d2);
        if (h <= 0.0) break;
        const double nt = std::clamp(t - g / h, 0.0, 1.0);
        if (std::fabs(nt - t) < 1e-15) break;
        t = nt;
    }
    const Point2 p = point_at(b, t);
    if (distance(p, q) < best.distance) best = {p, best.segment, t, distance(p, q)};
    return best;
}

/// Closest pair of points between two spline chains.
inline std::pair<Point2, Point2> closest_between(const SplineCurve& a, const SplineCurve& b) {
    std::pair<Point2, Point2> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (const CubicBezier& seg : a.segments)
        for (std::size_t k = 0; k <= 64; ++k) {
            const Point2 p = point_at(seg, static_cast<double>(k) / 64.0);
            const auto nb = nearest_on_spline(b, p, 16);
            if (nb.distance < best_d) {
                best_d = nb.distance;
                best = {p, nb.point};
            }
        }
    // alternate projections
    for (int it = 0; it < 50; ++it) {
        const Point2 pa = nearest_on_spline(a, best.second, 16).point;
        const Point2 pb = nearest_on_spline(b, pa, 16).point;
        if (distance(pa, pb) >= best_d) break;
        best_d = distance(pa, pb);
        best = {pa, pb};
    }
    return best;
}

} // namespace detail

/// Refines a meeting of `a` and `b` near vertices `center_a`, `center_b`.
/// Oshima splines are fitted to up to `window` points on each side of the
/// centres and intersected by recursive bounding-box subdivision until both
/// boxes are smaller than `tol`. Accepted points are merged within 10*tol;
/// the merged point nearest the original closest approach wins. When the
/// splines do not meet, the midpoint of their closest approach is returned
/// with `crossing == false`.
inline ContactRefinement refine_contact(const Polyline& a, const Polyline& b, std::size_t center_a,
                                        std::size_t center_b, std::size_t window = 6, double tol = 1e-7) {
    if (a.size() < 2 || b.size() < 2) throw DegenerateError("refine_contact needs polylines of two or more points");
    center_a = std::min(center_a, a.size() - 1);
    center_b = std::min(center_b, b.size() - 1);

    ContactRefinement out;
    out.spline_a = detail::local_spline(a.points, center_a, window);
    out.spline_b = detail::local_spline(b.points, center_b, window);
    const Point2 reference = midpoint(a[center_a], b[center_b]);

    struct Job {
        CubicBezier p, q;
        int depth;
    };
    std::vector<Job> stack;
    for (const auto& sa : out.spline_a.segments)
        for (const auto& sb : out.spline_b.segments) stack.push_back({sa, sb, 0});

    std::vector<Point2> accepted;
    std::size_t work = 0;
    constexpr std::size_t work_limit = 4'000'000;
    constexpr std::size_t accept_limit = 20'000;
    while (!stack.empty() && work < work_limit && accepted.size() < accept_limit) {
        Job job = stack.back();
        stack.pop_back();
        ++work;
        const Rect ba = bezier_bbox(job.p);
        const Rect bb = bezier_bbox(job.q);
        if (!ba.overlaps(bb)) continue;
        if ((ba.diagonal() < tol && bb.diagonal() < tol) || job.depth >= 60) {
            accepted.push_back(midpoint(ba.center(), bb.center()));
            continue;
        }
        const auto [pl, pr] = detail::split(job.p, 0.5);
        const auto [ql, qr] = detail::split(job.q, 0.5);
        stack.push_back({pr, qr, job.depth + 1});
        stack.push_back({pr, ql, job.depth + 1});
        stack.push_back({pl, qr, job.depth + 1});
        stack.push_back({pl, ql, job.depth + 1});
    }
    out.candidates = accepted.size();

    if (accepted.empty()) {
        const auto [pa, pb] = detail::closest_between(out.spline_a, out.spline_b);
        out.point = midpoint(pa, pb);
        out.crossing = false;
        return out;
    }

    // Greedy clustering within 10*tol, in discovery order.
    std::sort(accepted.begin(), accepted.end(),
              [](Point2 p, Point2 q) { return p.x < q.x || (p.x == q.x && p.y < q.y); });
    std::vector<std::pair<Point2, std::size_t>> clusters;  // running sum, count
    std::vector<Point2> centres;
    for (Point2 p : accepted) {
        bool merged = false;
        for (std::size_t k = 0; k < clusters.size(); ++k) {
            if (distance(centres[k], p) <= 10.0 * tol) {
                clusters[k].first = clusters[k].first + p;
                ++clusters[k].second;
                centres[k] = clusters[k].first / static_cast<double>(clusters[k].second);
                merged = true;
                break;
            }
        }
        if (!merged) {
            clusters.push_back({p, 1});
            centres.push_back(p);
        }
    }
    std::size_t pick = 0;
    for (std::size_t k = 1; k < centres.size(); ++k)
        if (distance(centres[k], reference) < distance(centres[pick], reference)) pick = k;
    out.point = centres[pick];
    out.crossing = true;
    return out;
}

// ---------------------------------------------------------------------------
// Occlusion

enum class Visibility { Visible, Hidden };

/// Decides whether a surface point lies in front of a query point. Seeds a
/// damped Newton solve of Proj(S(u,v)) = q from a grid of parameter cells
/// whose projections contain q.
class Occluder {
public:
    enum class Result { Visible, Hidden, Unresolved };

    Occluder(const ParametricSurface& s, const Projection& proj, std::size_t seeds = 32)
        : ev_(s), proj_(proj), n_(seeds) {
        proj.validate();
        const auto& surf = ev_.surface();
        nodes_.resize((n_ + 1) * (n_ + 1));
        Rect scene;
        for (std::size_t j = 0; j <= n_; ++j)
            for (std::size_t i = 0; i <= n_; ++i) {
                Node& nd = nodes_[j * (n_ + 1) + i];
                nd.uv = {surf.u.lo + surf.u.width() * static_cast<double>(i) / static_cast<double>(n_),
                         surf.v.lo + surf.v.width() * static_cast<double>(j) / static_cast<double>(n_)};
                if (auto p = ev_.point(nd.uv.x, nd.uv.y)) {
                    nd.defined = true;
                    nd.screen = project(proj_, *p).point;
                    scene.include(nd.screen);
                    min_depth_ = std::min(min_depth_, project(proj_, *p).depth);
                    max_depth_ = std::max(max_depth_, project(proj_, *p).depth);
                }
            }
        const double diameter = std::hypot(scene.diagonal(), max_depth_ - min_depth_);
        diameter_ = std::isfinite(diameter) && diameter > 0.0 ? diameter : 1.0;
        epsilon_ = 1e-6 * diameter_;

        cells_.reserve(n_ * n_);
        for (std::size_t j = 0; j < n_; ++j)
            for (std::size_t i = 0; i < n_; ++i) {
                Cell c;
                c.center = {0.5 * (node(i, j).uv.x + node(i + 1, j + 1).uv.x),
                            0.5 * (node(i, j).uv.y + node(i + 1, j + 1).uv.y)};
                for (const Node* nd : {&node(i, j), &node(i + 1, j), &node(i, j + 1), &node(i + 1, j + 1)})
                    if (nd->defined) c.box.include(nd->screen);
                if (auto p = ev_.point(c.center.x, c.center.y)) c.box.include(project(proj_, *p).point);
                if (c.box.empty()) continue;
                const double pad = 0.25 * std::max(c.box.width(), c.box.height()) + 1e-9 * diameter_;
                c.box = c.box.inflated(pad);
                cells_.push_back(c);
            }
    }

    double epsilon() const { return epsilon_; }
    double depth_of(Point3 p) const { return project(proj_, p).depth; }
    std::optional<Point3> surface_point(Point2 uv) const { return ev_.point(uv.x, uv.y); }

    /// Screen point, depth and preimage of a polyline location. On-surface
    /// curves are re-evaluated at the interpolated parameters so that chords
    /// of convex surfaces do not dip below them.
    struct Probe {
        Point2 q;
        double depth = 0.0;
        std::optional<Point2> uv;
    };
    Probe probe(const Polyline& pl, double s) const {
        const PolylineParam p = param_from_scalar(pl.size(), s);
        const std::size_t i = p.index, j = std::min(p.index + 1, pl.size() - 1);
        Point3 p3 = lerp(pl.space[i], pl.space[j], p.fraction);
        std::optional<Point2> uv;
        if (pl.has_params()) {
            uv = lerp(pl.params[i], pl.params[j], p.fraction);
            if (auto on = ev_.point(uv->x, uv->y)) p3 = *on;
        }
        const ProjectedPoint pp = project(proj_, p3);
        return {pp.point, pp.depth, uv};
    }
    const Projection& projection() const { return proj_; }

    /// Whether some surface point in front of (q, depth) projects onto q.
    /// Surface points within parameter distance 1e-4 of `self_uv` are ignored.
    Result test(Point2 q, double depth, std::optional<Point2> self_uv = std::nullopt) const {
        bool any_candidate = false;
        bool any_converged = false;
        for (const Cell& c : cells_) {
            if (!c.box.contains(q)) continue;
            any_candidate = true;
            auto sol = solve(q, c.center);
            if (!sol) continue;
            any_converged = true;
            if (self_uv && distance(*sol, *self_uv) < 1e-4) continue;
            auto p = ev_.point(sol->x, sol->y);
            if (!p) continue;
            if (project(proj_, *p).depth > depth + epsilon_) return Result::Hidden;
        }
        if (any_candidate && !any_converged) return Result::Unresolved;
        return Result::Visible;
    }

private:
    struct Node {
        Point2 uv;
        Point2 screen;
        bool defined = false;
    };
    struct Cell {
        Point2 center;
        Rect box;
    };

    const Node& node(std::size_t i, std::size_t j) const { return nodes_[j * (n_ + 1) + i]; }

    std::optional<Point2> residual(Point2 uv, Point2 q) const {
        auto p = ev_.point(uv.x, uv.y);
        if (!p) return std::nullopt;
        return project(proj_, *p).point - q;
    }

    // Levenberg-damped Newton on (u, v), clamped to the parameter rectangle.
    std::optional<Point2> solve(Point2 q, Point2 uv) const {
        const auto& s = ev_.surface();
        const Point3 r = proj_.right(), up = proj_.up();
        const double ftol = 1e-10 * std::max(1.0, diameter_);
        auto f = residual(uv, q);
        if (!f) return std::nullopt;
        for (int it = 0; it < 40; ++it) {
            if (norm(*f) <= ftol) return uv;
            Point3 su, sv;
            if (!ev_.partials(uv.x, uv.y, su, sv)) return std::nullopt;
            const double a = dot(r, su), b = dot(r, sv), c = dot(up, su), d = dot(up, sv);
            // (J^T J + mu I) delta = -J^T f
            const double jtj00 = a * a + c * c, jtj01 = a * b + c * d, jtj11 = b * b + d * d;
            const double g0 = a * f->x + c * f->y, g1 = b * f->x + d * f->y;
            const double mu = 1e-12 * (jtj00 + jtj11) + 1e-300;
            const double m00 = jtj00 + mu, m11 = jtj11 + mu;
            const double det = m00 * m11 - jtj01 * jtj01;
            if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
            const Point2 delta{-(m11 * g0 - jtj01 * g1) / det, -(m00 * g1 - jtj01 * g0) / det};

            bool improved = false;
            double step = 1.0;
            for (int ls = 0; ls < 12; ++ls, step *= 0.5) {
                Point2 next = uv + step * delta;
                next.x = std::clamp(next.x, s.u.lo, s.u.hi);
                next.y = std::clamp(next.y, s.v.lo, s.v.hi);
                auto fn = residual(next, q);
                if (fn && norm(*fn) < norm(*f)) {
                    uv = next;
                    f = fn;
                    improved = true;
                    break;
                }
            }
            if (!improved) break;
        }
        if (norm(*f) <= ftol) return uv;
        return std::nullopt;
    }

    SurfaceEvaluator ev_;
    Projection proj_;
    std::size_t n_;
    std::vector<Node> nodes_;
    std::vector<Cell> cells_;
    double min_depth_ = std::numeric_limits<double>::infinity();
    double max_depth_ = -std::numeric_limits<double>::infinity();
    double diameter_ = 1.0;
    double epsilon_ = 1e-6;
};

/// A projected curve split into intervals with one visibility flag each.
/// `cuts` are polyline parameters (segment index + fraction), strictly
/// increasing and interior; interval k spans cuts[k-1]..cuts[k].
struct VisibilityTaggedCurve {
    Polyline projected;
    std::vector<double> cuts;
    std::vector<Visibility> flags;
    std::size_t warnings = 0;

    std::size_t intervals() const { return flags.size(); }

    std::pair<double, double> interval(std::size_t k) const {
        const double lo = k == 0 ? 0.0 : cuts[k - 1];
        const double hi = k == cuts.size() ? static_cast<double>(projected.size() - 1) : cuts[k];
        return {lo, hi};
    }

    /// The sub-polyline of interval k, annotations interpolated.
    Polyline piece(std::size_t k) const {
        const auto [lo, hi] = interval(k);
        return slice(lo, hi);
    }

    Polyline slice(double lo, double hi) const {
        Polyline out;
        auto push = [&](double s) {
            const PolylineParam p = param_from_scalar(projected.size(), s);
            const std::size_t i = p.index, j = std::min(p.index + 1, projected.size() - 1);
            const Point2 pt = lerp(projected.points[i], projected.points[j], p.fraction);
            if (!out.points.empty() && out.points.back() == pt) return;
            out.points.push_back(pt);
            if (projected.has_space()) out.space.push_back(lerp(projected.space[i], projected.space[j], p.fraction));
            if (projected.has_params()) out.params.push_back(lerp(projected.params[i], projected.params[j], p.fraction));
        };
        push(lo);
        for (double s = std::floor(lo) + 1.0; s < hi; s += 1.0) push(s);
        push(hi);
        return out;
    }

    std::size_t hidden_count() const {
        return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), Visibility::Hidden));
    }
};

// Cuts closer than this (in segment units) to a curve end are ignored; curves
// ending on the outline otherwise produce sliver intervals.
inline constexpr double end_margin = 1e-2;

namespace detail {

inline std::vector<double> cut_parameters(const Polyline& pl, std::span<const Point2> cuts) {
    std::vector<double> params;
    const double last = static_cast<double>(pl.size() - 1);
    for (Point2 c : cuts) {
        const double s = project_onto(pl.points, c).scalar();
        if (s <= end_margin || s >= last - end_margin) continue;
        params.push_back(s);
    }
    std::sort(params.begin(), params.end());
    std::vector<double> out;
    for (double s : params)
        if (out.empty() || s - out.back() > 1e-9) out.push_back(s);
    return out;
}

} // namespace detail

/// Splits the projected curve at polyline parameters `cut_params` and tests
/// each interval's midpoint against the surface. Unresolved tests count as
/// visible and add a warning.
inline VisibilityTaggedCurve classify_visibility_at(const Polyline& projected, const Occluder& occ,
                                                    std::vector<double> cut_params) {
    if (projected.size() < 2 || !projected.has_space())
        throw DegenerateError("visibility needs a projected curve with 3D annotations");
    VisibilityTaggedCurve out;
    out.projected = projected;
    const double last = static_cast<double>(projected.size() - 1);
    std::sort(cut_params.begin(), cut_params.end());
    for (double c : cut_params) {
        if (c <= end_margin || c >= last - end_margin) continue;
        if (out.cuts.empty() || c - out.cuts.back() > 1e-9) out.cuts.push_back(c);
    }
    for (std::size_t k = 0; k <= out.cuts.size(); ++k) {
        const auto [lo, hi] = out.interval(k);
        const auto pr = occ.probe(projected, 0.5 * (lo + hi));
        const auto r = occ.test(pr.q, pr.depth, pr.uv);
        if (r == Occluder::Result::Unresolved) ++out.warnings;
        out.flags.push_back(r == Occluder::Result::Hidden ? Visibility::Hidden : Visibility::Visible);
    }
    return out;
}

/// Cuts given as points on the projected curve.
inline VisibilityTaggedCurve classify_visibility(const Polyline& projected, const Occluder& occ,
                                                 std::span<const Point2> cuts) {
    if (projected.size() < 2) throw DegenerateError("visibility needs a projected curve");
    return classify_visibility_at(projected, occ, detail::cut_parameters(projected, cuts));
}

inline VisibilityTaggedCurve classify_visibility(const SpaceCurve& curve, const ParametricSurface& s,
                                                 const Projection& proj, std::span<const Point2> cuts) {
    const Occluder occ(s, proj);
    return classify_visibility(project_curve(curve, proj), occ, cuts);
}

// ---------------------------------------------------------------------------
// Scene assembly

enum class CurveRole { Boundary, Silhouette, WireU, WireV, Axis, Extra };
enum class HiddenStyle { Dashed, Omit };

struct WireSpec {
    std::vector<double> fixed_u;
    std::vector<double> fixed_v;
};

struct SceneOptions {
    std::size_t silhouette_grid = 200;
    std::size_t samples = 100;        // per boundary edge and per wire
    double contact_tol = 0.02;
    std::size_t window = 6;
    double refine_tol = 1e-7;
    std::size_t occluder_seeds = 32;
    HiddenStyle hidden = HiddenStyle::Dashed;
    bool axes = true;
    bool parallel = true;
};

struct SceneCurve {
    CurveRole role = CurveRole::Extra;
    VisibilityTaggedCurve tagged;
};

struct SurfaceScene {
    Scene scene;
    std::vector<SceneCurve> curves;
    std::size_t warnings = 0;
    std::size_t refined_contacts = 0;

    std::size_t count(CurveRole r) const {
        return static_cast<std::size_t>(
            std::count_if(curves.begin(), curves.end(), [r](const SceneCurve& c) { return c.role == r; }));
    }
};

namespace detail {

// Polyline parameter of `p` searched on segments [lo, hi).
inline double local_param(const Polyline& pl, Point2 p, std::size_t lo, std::size_t hi) {
    hi = std::min(hi, pl.size() - 1);
    double best_d = std::numeric_limits<double>::infinity();
    double best = static_cast<double>(lo);
    for (std::size_t i = lo; i < hi; ++i) {
        double t = 0.0;
        const Point2 c = closest_point_on_segment(pl[i], pl[i + 1], p, &t);
        const double d = distance(c, p);
        if (d < best_d) {
            best_d = d;
            best = static_cast<double>(i) + t;
        }
    }
    return best;
}

inline SpaceCurve densify(const SpaceCurve& c, std::size_t per_segment) {
    SpaceCurve out;
    for (std::size_t i = 0; i + 1 < c.points.size(); ++i)
        for (std::size_t k = 0; k < per_segment; ++k)
            out.points.push_back(lerp(c.points[i], c.points[i + 1], static_cast<double>(k) / static_cast<double>(per_segment)));
    if (!c.points.empty()) out.points.push_back(c.points.back());
    return out;
}

struct CurveJob {
    CurveRole role;
    Polyline projected;
};

inline bool hidden_at(const Polyline& pl, const Occluder& occ, double s) {
    const auto pr = occ.probe(pl, s);
    return occ.test(pr.q, pr.depth, pr.uv) == Occluder::Result::Hidden;
}

struct JobResult {
    VisibilityTaggedCurve tagged;
    std::size_t refined = 0;
};

inline JobResult process_curve(std::size_t index, const std::vector<CurveJob>& jobs,
                               const std::vector<std::size_t>& outline, const Occluder& occ,
                               const SceneOptions& opt) {
    const CurveJob& job = jobs[index];
    std::vector<double> cuts;
    std::size_t refined = 0;
    for (std::size_t k : outline) {
        if (k == index) continue;
        const Polyline& other = jobs[k].projected;
        for (const Crossing& c : intersect_projected(job.projected, other, opt.contact_tol)) {
            if (c.kind == CrossingKind::Transversal) {
                cuts.push_back(local_param(job.projected, c.point, c.index_a, c.index_a + 1));
                continue;
            }
            const ContactRefinement r =
                refine_contact(job.projected, other, c.index_a, c.index_b, opt.window, opt.refine_tol);
            ++refined;
            const std::size_t lo = c.index_a >= opt.window ? c.index_a - opt.window : 0;
            cuts.push_back(local_param(job.projected, r.point, lo, c.index_a + opt.window));
        }
    }
    if (!job.projected.has_params()) {
        // Off-surface curves also change visibility where they pierce the surface.
        const std::size_t n = job.projected.size();
        std::vector<char> state(n);
        for (std::size_t i = 0; i < n; ++i) state[i] = hidden_at(job.projected, occ, static_cast<double>(i));
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (state[i] == state[i + 1]) continue;
            double lo = static_cast<double>(i), hi = lo + 1.0;
            for (int it = 0; it < 30; ++it) {
                const double mid = 0.5 * (lo + hi);
                if ((hidden_at(job.projected, occ, mid) ? 1 : 0) == state[i]) lo = mid;
                else hi = mid;
            }
            cuts.push_back(0.5 * (lo + hi));
        }
    }
    return {classify_visibility_at(job.projected, occ, std::move(cuts)), refined};
}

} // namespace detail

/// Boundary, silhouette, wires and extra curves of one surface, cut at the
/// outline, classified, and drawn. Curves are processed concurrently and
/// merged in declaration order: boundary, silhouette, u-wires, v-wires, axes,
/// extra curves.
inline SurfaceScene render_surface_scene(const ParametricSurface& s, const Projection& proj, const WireSpec& wire_spec,
                                         std::span<const SpaceCurve> extra = {}, const SceneOptions& opt = {}) {
    proj.validate();
    std::vector<detail::CurveJob> jobs;
    auto add = [&](CurveRole role, const SpaceCurve& c) {
        Polyline pl = project_curve(c, proj);
        if (pl.size() >= 2) jobs.push_back({role, std::move(pl)});
    };
    for (const auto& c : boundary_curves(s, opt.samples)) add(CurveRole::Boundary, c);
    for (const auto& c : silhouette(s, proj, opt.silhouette_grid)) add(CurveRole::Silhouette, c);
    for (const auto& c : wires(s, wire_spec.fixed_u, {}, opt.samples)) add(CurveRole::WireU, c);
    for (const auto& c : wires(s, {}, wire_spec.fixed_v, opt.samples)) add(CurveRole::WireV, c);

    const SurfaceEvaluator ev(s);
    const double reach = 1.2 * detail::surface_scale(ev);
    std::vector<Point3> axis_ends{{reach, 0, 0}, {0, reach, 0}, {0, 0, reach}};
    if (opt.axes)
        for (Point3 end : axis_ends) add(CurveRole::Axis, detail::densify(SpaceCurve{{Point3{}, end}, {}}, 128));
    for (const auto& c : extra) {
        if (c.params.empty()) add(CurveRole::Extra, detail::densify(c, 4));
        else add(CurveRole::Extra, c);
    }

    std::vector<std::size_t> outline;
    for (std::size_t i = 0; i < jobs.size(); ++i)
        if (jobs[i].role == CurveRole::Boundary || jobs[i].role == CurveRole::Silhouette) outline.push_back(i);

    const Occluder occ(s, proj, opt.occluder_seeds);
    std::vector<detail::JobResult> results;
    if (opt.parallel) {
        std::vector<std::future<detail::JobResult>> futures;
        for (std::size_t i = 0; i < jobs.size(); ++i)
            futures.push_back(std::async(std::launch::async,
                                         [&, i] { return detail::process_curve(i, jobs, outline, occ, opt); }));
        for (auto& f : futures) results.push_back(f.get());
    } else {
        for (std::size_t i = 0; i < jobs.size(); ++i) results.push_back(detail::process_curve(i, jobs, outline, occ, opt));
    }

    SurfaceScene out;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        SceneCurve sc{jobs[i].role, std::move(results[i].tagged)};
        out.warnings += sc.tagged.warnings;
        out.refined_contacts += results[i].refined;
        for (std::size_t k = 0; k < sc.tagged.intervals(); ++k) {
            const bool hidden = sc.tagged.flags[k] == Visibility::Hidden;
            if (hidden && opt.hidden == HiddenStyle::Omit) continue;
            Polyline piece = sc.tagged.piece(k);
            if (piece.size() < 2) continue;
            out.scene.add(std::move(piece.points), hidden ? LineStyle::Dashed : LineStyle::Solid);
        }
        out.curves.push_back(std::move(sc));
    }
    if (opt.axes) {
        const char* names[] = {"$x$", "$y$", "$z$"};
        for (std::size_t k = 0; k < 3; ++k) {
            const Point2 tip = project(proj, 1.05 * axis_ends[k]).point;
            out.scene.add_label(names[k], tip);
        }
    }
    return out;
}

} // namespace osplot
