#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "osplot/calculus.hpp"
#include "osplot/implicit.hpp"

using namespace osplot;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<Point2> graph(const char* f, double lo, double hi, std::size_t n) {
    return sample_graph(parse(f), "x", lo, hi, n);
}

Polyline conic_trace() {
    TraceConfig cfg;
    cfg.xmin = -2;
    cfg.xmax = 2;
    cfg.ymin = -2;
    cfg.ymax = 2.5;
    const auto r = trace_implicit(parse_equation("8*x^2-4*sqrt(2)*x*y+y^2-3*x-6*sqrt(2)*y+2=0"), cfg);
    EXPECT_EQ(r.curves.size(), 1u);
    return r.curves.front();
}

} // namespace

TEST(SegmentIntegral, Diagonal) {
    EXPECT_NEAR(segment_integral({{0, 0}, {1.0 / 3, 1.0 / 3}, {2.0 / 3, 2.0 / 3}, {1, 1}}), 0.5, 1e-15);
}

TEST(SegmentIntegral, ConstantHeight) {
    const double c = 1.75;
    EXPECT_NEAR(segment_integral({{-1, c}, {0.5, c}, {2, c}, {3.5, c}}), c * 4.5, 1e-14);
}

TEST(SegmentIntegral, ReversalNegates) {
    const CubicBezier b{{0, 1}, {1, 3}, {2, -1}, {4, 2}};
    EXPECT_NEAR(segment_integral(reversed(b)), -segment_integral(b), 1e-14);
}

TEST(Integrate, SquareTimesSine) {
    const double v = integrate(graph("x^2*sin(x)", -pi, pi, 50), 0, pi);
    EXPECT_NEAR(v, 5.869063, 5e-3);
    EXPECT_NEAR(v, pi * pi - 4, 1e-3);
}

TEST(Integrate, ConstantFunction) {
    EXPECT_NEAR(integrate(graph("1", 0, 1, 10), 0, 1), 1.0, 1e-12);
}

TEST(Integrate, EmptyInterval) {
    const auto d = graph("x^2", 0, 1, 10);
    EXPECT_EQ(integrate(d, 0.4, 0.4), 0.0);
}

TEST(Integrate, ReversedLimitsAndData) {
    const auto d = graph("x^2+1", -1, 2, 30);
    const double v = integrate(d, -0.5, 1.5);
    EXPECT_NEAR(v, (1.5 * 1.5 * 1.5 + 0.125) / 3 + 2, 1e-4);
    EXPECT_EQ(integrate(d, 1.5, -0.5), -v);
    std::vector<Point2> rev(d.rbegin(), d.rend());
    EXPECT_NEAR(integrate(rev, -0.5, 1.5), v, 1e-12);
}

TEST(Integrate, Errors) {
    const auto d = graph("x", 0, 1, 10);
    EXPECT_THROW(integrate(d, -0.5, 0.5), RangeError);
    EXPECT_THROW(integrate(d, 0.5, 1.5), RangeError);
    EXPECT_THROW(integrate(std::vector<Point2>{}, 0, 1), DegenerateError);
}

TEST(Integrate, RequestForm) {
    IntegrationRequest req{graph("x", 0, 1, 4), 0, 1, SplineMethod::CatmullRom};
    EXPECT_NEAR(integrate(req), 0.5, 1e-14);
}

TEST(ClosedArea, EllipseByHalves) {
    const auto upper = sample_curve(parse("3*cos(t)"), parse("2*sin(t)"), "t", 0, pi, 25);
    const auto lower = sample_curve(parse("3*cos(t)"), parse("2*sin(t)"), "t", pi, 2 * pi, 25);
    const double ratio = (integrate(upper, -3, 3) - integrate(lower, -3, 3)) / (6 * pi);
    EXPECT_NEAR(ratio, 0.999937, 1e-5);
}

TEST(ClosedArea, Ellipse) {
    const auto pts = sample_curve(parse("3*cos(t)"), parse("2*sin(t)"), "t", 0, 2 * pi, 50);
    const double ratio = closed_area(pts) / (6 * pi);
    EXPECT_GE(ratio, 0.9989);
    EXPECT_LE(ratio, 1.0009);
}

TEST(ClosedArea, UnitSquare) {
    std::vector<Point2> pts;
    const Point2 corners[] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    for (int side = 0; side < 4; ++side)
        for (int k = 0; k < 20; ++k) pts.push_back(lerp(corners[side], corners[(side + 1) % 4], k / 20.0));
    // the spline rounds the corners slightly
    EXPECT_NEAR(closed_area(pts), 1.0, 2e-3);
    EXPECT_NEAR(closed_area(pts, SplineMethod::CatmullRom), 1.0, 2e-3);
    std::vector<Point2> rev(pts.rbegin(), pts.rend());
    EXPECT_NEAR(closed_area(rev), -closed_area(pts), 1e-14);
    EXPECT_THROW(closed_area(std::vector<Point2>{{0, 0}, {1, 1}}), DegenerateError);
}

TEST(Derivative, Parabola) {
    EXPECT_NEAR(derivative_at(graph("x^2", -1, 1, 100), 0.5), 1.0, 1e-4);
}

TEST(Derivative, Line) {
    const auto d = graph("2.5*x-1", -1, 3, 8);
    for (double x : {-0.9, 0.0, 0.37, 1.5, 2.99}) EXPECT_NEAR(derivative_at(d, x), 2.5, 1e-12);
}

TEST(Derivative, SineAtOrigin) {
    EXPECT_NEAR(derivative_at(graph("sin(x)", 0, pi, 50), 0.0), 1.0, 1e-3);
}

TEST(Derivative, Errors) {
    const auto d = graph("x^2", -1, 1, 20);
    EXPECT_THROW(derivative_at(d, 1.5), RangeError);
    const auto half = sample_curve(parse("cos(t)"), parse("sin(t)"), "t", -pi / 2, pi / 2, 2);
    EXPECT_THROW(derivative_at(half, 1.0), VerticalTangent);
}

TEST(Tangent, LineIsItself) {
    const auto d = graph("x", 0, 4, 8);
    const TangentLine t = tangent_line(d, 2.2);
    ASSERT_FALSE(t.vertical());
    EXPECT_NEAR(*t.slope, 1.0, 1e-12);
    EXPECT_NEAR(t.point.y, 2.2, 1e-9);
}

TEST(Tangent, CircleTop) {
    const auto upper = sample_curve(parse("cos(t)"), parse("sin(t)"), "t", 0, pi, 40);
    EXPECT_NEAR(*tangent_line(upper, 0.0).slope, 0.0, 1e-3);
}

TEST(Tangent, VerticalVariant) {
    const auto half = sample_curve(parse("cos(t)"), parse("sin(t)"), "t", -pi / 2, pi / 2, 2);
    const TangentLine t = tangent_line(half, 1.0);
    EXPECT_TRUE(t.vertical());
    EXPECT_EQ(t.direction, (Point2{0, 1}));
}

TEST(Tangent, ConicFan) {
    const Polyline trace = conic_trace();
    const Expr F = parse_equation("8*x^2-4*sqrt(2)*x*y+y^2-3*x-6*sqrt(2)*y+2=0");
    const Expr Fx = diff(F, "x"), Fy = diff(F, "y");
    const Point2 P = pt_start(trace), Q = pt_end(trace);
    for (int k = 0; k <= 10; ++k) {
        const double x = Q.x + k * (P.x - Q.x) / 10;
        const TangentLine t = tangent_line(trace.points, x);
        EXPECT_LE(distance_to_polyline(trace.points, t.point), 2e-3) << k;
        // implicit differentiation: the tangent is perpendicular to grad F
        const Bindings b{{"x", t.point.x}, {"y", t.point.y}};
        const Point2 grad{eval(Fx, b), eval(Fy, b)};
        EXPECT_LE(std::fabs(dot(grad, t.direction)) / (norm(grad) * norm(t.direction)), 5e-3) << k;
    }
}

TEST(Sampling, CountsAndErrors) {
    EXPECT_EQ(graph("x", 0, 1, 50).size(), 51u);
    EXPECT_EQ(graph("x", 0, 1, 50).back().x, 1.0);
    EXPECT_THROW(graph("x", 0, 1, 0), RangeError);
    EXPECT_THROW(graph("log(x)", -1, 1, 4), DomainError);
}
