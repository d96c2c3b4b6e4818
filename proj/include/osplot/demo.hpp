#pragma once

// The paraboloid contact example: the iso-circle u = u0 of
// x = u cos v, y = u sin v, z = 4 - u^2 touches the silhouette where its
// projection meets the apparent outline tangentially.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "osplot/error.hpp"
#include "osplot/expr.hpp"
#include "osplot/surface.hpp"

namespace osplot {

inline ParametricSurface paraboloid() {
    ParametricSurface s;
    s.x = parse("u*cos(v)");
    s.y = parse("u*sin(v)");
    s.z = parse("4-u^2");
    s.u = {0.0, 2.0};
    s.v = {0.0, 2.0 * std::numbers::pi};
    return s;
}

/// Projected contact of the circle u = u0 with the silhouette on the side
/// where X < 0. The silhouette satisfies u cos(v - azimuth) = -tan(elevation)/2.
inline Point2 paraboloid_exact_contact(const Projection& proj, double u0) {
    const double c = -std::tan(proj.elevation) / (2.0 * u0);
    if (std::fabs(c) > 1.0) throw DegenerateError("the circle does not reach the silhouette");
    const double alpha = -std::acos(c); // v - azimuth, chosen so that X < 0
    const double x = u0 * std::sin(alpha);
    const double y = -u0 * std::cos(alpha) * std::sin(proj.elevation) + (4.0 - u0 * u0) * std::cos(proj.elevation);
    return {x, y};
}

struct ContactDemoOptions {
    Projection projection{};
    double wire_u = 5.0 / 3.0;
    std::size_t grid = 200;
    std::size_t samples = 100;
    double contact_tol = 0.02;
    std::size_t window = 6;
    double refine_tol = 1e-7;
};

struct ContactDemoResult {
    Point2 refined;
    Point2 unrefined;   // midpoint of the discrete closest approach
    Point2 exact;
    double error = 0.0;
    double unrefined_error = 0.0;
    double cluster_spread = 0.0; // extent of the wire vertices within tol of the outline
    std::size_t cluster_size = 0;
    std::size_t silhouette_components = 0;
    bool crossing = false;
};

inline ContactDemoResult contact_demo(const ContactDemoOptions& opt = {}) {
    const ParametricSurface s = paraboloid();
    const auto sil = silhouette(s, opt.projection, opt.grid);
    if (sil.empty()) throw DegenerateError("no silhouette for this view");
    const double u0 = opt.wire_u;
    const std::vector<double> fixed{u0};
    const Polyline wire = project_curve(wires(s, fixed, {}, opt.samples).front(), opt.projection);

    ContactDemoResult out;
    out.silhouette_components = sil.size();
    out.exact = paraboloid_exact_contact(opt.projection, u0);

    // Closest approach on the X < 0 side, across silhouette components.
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_a = 0, best_b = 0, best_comp = 0;
    std::vector<Polyline> outlines;
    for (const auto& c : sil) outlines.push_back(project_curve(c, opt.projection));
    for (std::size_t k = 0; k < outlines.size(); ++k) {
        for (std::size_t i = 0; i < wire.size(); ++i) {
            if (wire[i].x >= 0.0) continue;
            const PolylineParam p = project_onto(outlines[k].points, wire[i]);
            const double d = distance(point_at(outlines[k].points, p), wire[i]);
            if (d < best) {
                best = d;
                best_a = i;
                best_comp = k;
                best_b = p.fraction < 0.5 ? p.index : p.index + 1;
            }
        }
    }
    if (!std::isfinite(best) || best >= opt.contact_tol)
        throw DegenerateError("the wire does not approach the silhouette within the contact tolerance");
    const Polyline& outline = outlines[best_comp];
    out.unrefined = midpoint(wire[best_a], outline[best_b]);

    // The cluster: the contiguous run of wire vertices within tol of the outline.
    auto near = [&](std::size_t i) { return distance_to_polyline(outline.points, wire[i]) < opt.contact_tol; };
    std::size_t lo = best_a, hi = best_a;
    while (lo > 0 && near(lo - 1)) --lo;
    while (hi + 1 < wire.size() && near(hi + 1)) ++hi;
    out.cluster_size = hi - lo + 1;
    for (std::size_t i = lo; i <= hi; ++i)
        for (std::size_t j = i; j <= hi; ++j) out.cluster_spread = std::max(out.cluster_spread, distance(wire[i], wire[j]));

    const ContactRefinement r = refine_contact(wire, outline, best_a, best_b, opt.window, opt.refine_tol);
    out.refined = r.point;
    out.crossing = r.crossing;
    out.error = distance(out.refined, out.exact);
    out.unrefined_error = distance(out.unrefined, out.exact);
    return out;
}

} // namespace osplot
