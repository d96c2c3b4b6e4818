#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "osplot/demo.hpp"
#include "osplot/surface.hpp"

using namespace osplot;

namespace {

constexpr double pi = std::numbers::pi;

ParametricSurface sphere(double r) {
    ParametricSurface s;
    s.x = parse(std::to_string(r) + "*sin(u)*cos(v)");
    s.y = parse(std::to_string(r) + "*sin(u)*sin(v)");
    s.z = parse(std::to_string(r) + "*cos(u)");
    s.u = {0.0, pi};
    s.v = {0.0, 2 * pi};
    return s;
}

ParametricSurface plane() {
    ParametricSurface s;
    s.x = parse("u");
    s.y = parse("v");
    s.z = parse("0.5*u-0.25*v");
    s.u = {-1, 1};
    s.v = {-1, 1};
    return s;
}

ParametricSurface mobius() {
    ParametricSurface s;
    s.x = parse("(1+r*cos(t/2))*cos(t)");
    s.y = parse("(1+r*cos(t/2))*sin(t)");
    s.z = parse("r*sin(t/2)");
    s.u_name = "r";
    s.v_name = "t";
    s.u = {-0.4, 0.4};
    s.v = {0.0, 2 * pi};
    return s;
}

Polyline line(Point2 a, Point2 b, int n) {
    Polyline p;
    for (int k = 0; k <= n; ++k) p.points.push_back(lerp(a, b, static_cast<double>(k) / n));
    return p;
}

Polyline circle_pl(Point2 c, double r, int n) {
    Polyline p;
    for (int k = 0; k <= n; ++k) {
        const double t = 2 * pi * k / n;
        p.points.push_back({c.x + r * std::cos(t), c.y + r * std::sin(t)});
    }
    return p;
}

} // namespace

TEST(Project, AxisImages) {
    const Projection proj{degrees(60), degrees(20)};
    const auto ex = project(proj, {1, 0, 0});
    EXPECT_NEAR(ex.point.x, -std::sin(degrees(60)), 1e-15);
    EXPECT_NEAR(ex.point.y, -std::cos(degrees(60)) * std::sin(degrees(20)), 1e-15);
    const auto ez = project(proj, {0, 0, 1});
    EXPECT_NEAR(ez.point.x, 0.0, 1e-15);
    EXPECT_NEAR(ez.point.y, std::cos(degrees(20)), 1e-15);
    EXPECT_NEAR(ez.depth, std::sin(degrees(20)), 1e-15);
}

TEST(Project, Linear) {
    const Projection proj{degrees(35), degrees(-10)};
    const Point3 a{1, -2, 0.5}, b{0.3, 4, -1};
    const auto pa = project(proj, a), pb = project(proj, b), ps = project(proj, 2.0 * a + b);
    EXPECT_NEAR(ps.point.x, 2 * pa.point.x + pb.point.x, 1e-14);
    EXPECT_NEAR(ps.point.y, 2 * pa.point.y + pb.point.y, 1e-14);
    EXPECT_NEAR(ps.depth, 2 * pa.depth + pb.depth, 1e-14);
}

TEST(Project, BadElevation) {
    EXPECT_THROW((Projection{0.0, degrees(90)}.validate()), RangeError);
}

TEST(Silhouette, ParaboloidSingleComponent) {
    const Projection proj;
    const auto sil = silhouette(paraboloid(), proj);
    ASSERT_EQ(sil.size(), 1u);
    for (Point2 uv : sil[0].params) {
        const double j = uv.x * std::cos(uv.y - proj.azimuth) + std::tan(proj.elevation) / 2;
        EXPECT_NEAR(uv.x * j, 0.0, 1e-6);
    }
    // both ends on the rim
    EXPECT_NEAR(sil[0].params.front().x, 2.0, 1e-9);
    EXPECT_NEAR(sil[0].params.back().x, 2.0, 1e-9);
}

TEST(Silhouette, SphereIsCircle) {
    const double r = 1.5;
    const Projection proj{degrees(40), degrees(30)};
    const auto sil = silhouette(sphere(r), proj, 120);
    ASSERT_FALSE(sil.empty());
    for (const auto& c : sil)
        for (Point3 p : c.points) EXPECT_NEAR(norm(project(proj, p).point), r, 1e-3);
}

TEST(Silhouette, PlaneHasNone) {
    EXPECT_TRUE(silhouette(plane(), Projection{}).empty());
}

TEST(Boundary, ParaboloidKeepsRimOnly) {
    const auto b = boundary_curves(paraboloid());
    ASSERT_EQ(b.size(), 1u);
    for (Point3 p : b[0].points) {
        EXPECT_NEAR(std::hypot(p.x, p.y), 2.0, 1e-12);
        EXPECT_NEAR(p.z, 0.0, 1e-12);
    }
}

TEST(Boundary, MobiusDropsSeam) {
    const auto b = boundary_curves(mobius());
    ASSERT_EQ(b.size(), 2u);
    for (const auto& c : b) EXPECT_EQ(c.points.size(), 100u);
    EXPECT_NEAR(b[0].params.front().x, -0.4, 1e-15);
    EXPECT_NEAR(b[1].params.front().x, 0.4, 1e-15);
}

TEST(Boundary, PlaneHasFourEdges) {
    EXPECT_EQ(boundary_curves(plane()).size(), 4u);
}

TEST(Wires, CountsAndRange) {
    const auto s = paraboloid();
    EXPECT_TRUE(wires(s, {}, {}).empty());
    const std::vector<double> us{0.5, 1.0}, vs{0.0};
    const auto w = wires(s, us, vs, 50);
    ASSERT_EQ(w.size(), 3u);
    for (Point3 p : w[1].points) EXPECT_NEAR(p.z, 3.0, 1e-12);
    const std::vector<double> bad{2.5};
    EXPECT_THROW(wires(s, bad, {}), RangeError);
}

TEST(Intersect, PerpendicularLines) {
    const auto c = intersect_projected(line({-1, 0.1}, {1, 0.1}, 10), line({0.23, -1}, {0.23, 1}, 10), 1e-3);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].kind, CrossingKind::Transversal);
    EXPECT_NEAR(c[0].point.x, 0.23, 1e-14);
    EXPECT_NEAR(c[0].point.y, 0.1, 1e-14);
}

TEST(Intersect, ParallelLines) {
    EXPECT_TRUE(intersect_projected(line({0, 0}, {1, 0}, 5), line({0, 1}, {1, 1}, 5), 1e-3).empty());
}

TEST(Intersect, MatchesBruteForce) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 10; ++trial) {
        Polyline a, b;
        for (int k = 0; k < 30; ++k) a.points.push_back({u(rng), u(rng)});
        for (int k = 0; k < 30; ++k) b.points.push_back({u(rng), u(rng)});
        std::size_t brute = 0;
        for (std::size_t i = 0; i + 1 < a.size(); ++i)
            for (std::size_t j = 0; j + 1 < b.size(); ++j)
                if (detail::segment_intersection(a[i], a[i + 1], b[j], b[j + 1])) ++brute;
        const auto c = segment_crossings(a.points, b.points, 0.0);
        EXPECT_EQ(c.size(), brute);
        for (const auto& x : c) {
            EXPECT_LT(distance_to_polyline(a.points, x.point), 1e-12);
            EXPECT_LT(distance_to_polyline(b.points, x.point), 1e-12);
        }
    }
}

TEST(Refine, PerpendicularLines) {
    const Polyline a = line({-1, 0.1}, {1, 0.1}, 20), b = line({0.23, -1}, {0.23, 1}, 20);
    const auto r = refine_contact(a, b, 12, 11, 6, 1e-11);
    EXPECT_TRUE(r.crossing);
    EXPECT_NEAR(r.point.x, 0.23, 1e-9);
    EXPECT_NEAR(r.point.y, 0.1, 1e-9);
}

TEST(Refine, TangentCircles) {
    const Polyline a = circle_pl({0, 0}, 1.0, 100), b = circle_pl({2.0, 0}, 1.0, 100);
    const auto c = intersect_projected(a, b, 0.02);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].kind, CrossingKind::Contact);
    const auto r = refine_contact(a, b, c[0].index_a, c[0].index_b);
    EXPECT_LT(distance(r.point, {1.0, 0.0}), 1e-3);
}

TEST(Visibility, FloatingCurveIsVisible) {
    const auto s = paraboloid();
    const Projection proj;
    SpaceCurve c;
    for (int k = 0; k <= 50; ++k) c.points.push_back({-1 + k / 25.0, 0.3, 6.0});
    const auto t = classify_visibility(c, s, proj, {});
    ASSERT_EQ(t.intervals(), 1u);
    EXPECT_EQ(t.flags[0], Visibility::Visible);
}

TEST(Visibility, BehindSheetIsHidden) {
    const auto s = plane();
    const Projection proj{0.0, 0.0};
    SpaceCurve c;
    for (int k = 0; k <= 20; ++k) c.points.push_back({-3.0, -0.5 + k / 20.0, 0.0});
    const auto t = classify_visibility(c, s, proj, {});
    ASSERT_EQ(t.intervals(), 1u);
    EXPECT_EQ(t.flags[0], Visibility::Hidden);
    EXPECT_EQ(t.warnings, 0u);
}

TEST(Visibility, SplitAtCuts) {
    const auto s = plane();
    const Projection proj{0.0, 0.0};
    SpaceCurve c;
    for (int k = 0; k <= 40; ++k) c.points.push_back({-3.0, -2.0 + k / 10.0, 0.0});
    const Point2 cuts[] = {{-1.0, 0.0}, {1.0, 0.0}};
    const auto t = classify_visibility(c, s, proj, cuts);
    ASSERT_EQ(t.intervals(), 3u);
    EXPECT_EQ(t.flags[0], Visibility::Visible);
    EXPECT_EQ(t.flags[1], Visibility::Hidden);
    EXPECT_EQ(t.flags[2], Visibility::Visible);
}

TEST(Visibility, Idempotent) {
    const auto s = paraboloid();
    const Projection proj;
    const Occluder occ(s, proj);
    const std::vector<double> fixed{1.0};
    const Polyline pl = project_curve(wires(s, {}, fixed).front(), proj);
    const auto first = classify_visibility_at(pl, occ, {40.0});
    for (std::size_t k = 0; k < first.intervals(); ++k) {
        const auto again = classify_visibility_at(first.piece(k), occ, {});
        ASSERT_EQ(again.intervals(), 1u);
        EXPECT_EQ(again.flags[0], first.flags[k]);
    }
}

TEST(Scene, ParaboloidStructure) {
    const auto s = paraboloid();
    WireSpec spec;
    for (int k = 0; k < 6; ++k) spec.fixed_v.push_back(2 * pi * k / 6);
    const SurfaceScene sc = render_surface_scene(s, Projection{}, spec);
    EXPECT_EQ(sc.count(CurveRole::Boundary), 1u);
    EXPECT_EQ(sc.count(CurveRole::Silhouette), 1u);
    EXPECT_EQ(sc.count(CurveRole::WireV), 6u);
    EXPECT_EQ(sc.count(CurveRole::Axis), 3u);
    EXPECT_EQ(sc.warnings, 0u);
    for (const auto& c : sc.curves)
        if (c.role == CurveRole::Silhouette) {
            EXPECT_EQ(c.tagged.hidden_count(), 0u);
        }
    bool rim_hidden = false;
    for (const auto& c : sc.curves)
        if (c.role == CurveRole::Boundary) rim_hidden = c.tagged.hidden_count() > 0;
    EXPECT_TRUE(rim_hidden);
}

TEST(Scene, EmptyWireSpecAndOmit) {
    SceneOptions opt;
    opt.axes = false;
    opt.hidden = HiddenStyle::Omit;
    const SurfaceScene sc = render_surface_scene(paraboloid(), Projection{}, WireSpec{}, {}, opt);
    EXPECT_EQ(sc.curves.size(), 2u);
    for (const auto& it : sc.scene.items) EXPECT_EQ(it.style, LineStyle::Solid);
}

TEST(Scene, MobiusBand) {
    SceneOptions opt;
    opt.axes = false;
    WireSpec spec;
    spec.fixed_u = {0.0};
    const SurfaceScene sc = render_surface_scene(mobius(), Projection{}, spec, {}, opt);
    EXPECT_EQ(sc.count(CurveRole::Boundary), 2u);
    EXPECT_GE(sc.count(CurveRole::Silhouette), 1u);
    EXPECT_FALSE(sc.scene.items.empty());
}

TEST(Scene, Deterministic) {
    WireSpec spec;
    spec.fixed_u = {1.0};
    SceneOptions serial;
    serial.parallel = false;
    const auto a = render_surface_scene(paraboloid(), Projection{}, spec);
    const auto b = render_surface_scene(paraboloid(), Projection{}, spec, {}, serial);
    ASSERT_EQ(a.scene.items.size(), b.scene.items.size());
    for (std::size_t k = 0; k < a.scene.items.size(); ++k) {
        EXPECT_EQ(a.scene.items[k].points, b.scene.items[k].points);
        EXPECT_EQ(a.scene.items[k].style, b.scene.items[k].style);
    }
}

TEST(ContactDemo, CloseToExact) {
    const auto r = contact_demo();
    EXPECT_LT(r.error, 0.01);
    EXPECT_LT(r.error, r.unrefined_error);
    EXPECT_LT(r.exact.x, 0.0);
    EXPECT_EQ(r.silhouette_components, 1u);
}

TEST(ContactDemo, ExactPointLiesOnBothCurves) {
    const Projection proj;
    const Point2 e = paraboloid_exact_contact(proj, 5.0 / 3);
    const auto sil = project_curve(silhouette(paraboloid(), proj, 400).front(), proj);
    EXPECT_LT(distance_to_polyline(sil.points, e), 1e-3);
    const std::vector<double> fixed{5.0 / 3};
    const auto wire = project_curve(wires(paraboloid(), fixed, {}, 2000).front(), proj);
    EXPECT_LT(distance_to_polyline(wire.points, e), 1e-5);
}
