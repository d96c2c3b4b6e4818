#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "osplot/calculus.hpp"
#include "osplot/implicit.hpp"

using namespace osplot;

namespace {

TraceConfig box(double xmin, double xmax, double ymin, double ymax, std::size_t grid = 200) {
    TraceConfig c;
    c.xmin = xmin;
    c.xmax = xmax;
    c.ymin = ymin;
    c.ymax = ymax;
    c.grid = grid;
    return c;
}

const char* conic = "8*x^2-4*sqrt(2)*x*y+y^2-3*x-6*sqrt(2)*y+2=0";

} // namespace

TEST(Trace, UnitCircle) {
    const auto r = trace_implicit(parse("x^2+y^2-1"), box(-2, 2, -2, 2));
    ASSERT_EQ(r.curves.size(), 1u);
    const Polyline& c = r.curves[0];
    EXPECT_TRUE(is_closed(c));
    EXPECT_EQ(pt_start(c), pt_end(c));
    for (Point2 p : c.points) EXPECT_LE(std::fabs(p.x * p.x + p.y * p.y - 1), 1e-9);
    EXPECT_NEAR(closed_area(c.points), std::numbers::pi, 2e-3);
}

TEST(Trace, EmptyZeroSet) {
    EXPECT_TRUE(trace_implicit(parse("x^2+y^2+1"), box(-2, 2, -2, 2)).curves.empty());
}

TEST(Trace, ConicEndpoints) {
    const auto r = trace_implicit(parse_equation(conic), box(-2, 2, -2, 2.5));
    ASSERT_EQ(r.curves.size(), 1u);
    const Polyline& c = r.curves[0];
    EXPECT_FALSE(is_closed(c));
    const Point2 P = pt_start(c), Q = pt_end(c);
    EXPECT_NEAR(P.x, 2.0, 1e-9);
    EXPECT_NEAR(Q.y, 2.5, 1e-9);
    EXPECT_GT(P.x, Q.x);
    EXPECT_NEAR(integrate(c.points, Q.x, P.x), 1.698725, 5e-3);
}

TEST(Trace, SingleSegmentAccessors) {
    const Polyline p = make_polyline({{0, 0}, {1, 2}});
    EXPECT_EQ(pt_start(p), (Point2{0, 0}));
    EXPECT_EQ(pt_end(p), (Point2{1, 2}));
}

TEST(Trace, LineAcrossBox) {
    const auto r = trace_implicit(parse_equation("y=0.3*x+0.1"), box(-1, 1, -1, 1, 16));
    ASSERT_EQ(r.curves.size(), 1u);
    const Polyline& c = r.curves[0];
    EXPECT_NEAR(pt_start(c).x, 1.0, 1e-12);
    EXPECT_NEAR(pt_end(c).x, -1.0, 1e-12);
    for (Point2 p : c.points) EXPECT_NEAR(p.y, 0.3 * p.x + 0.1, 1e-12);
}

TEST(Trace, SaddleIsDeterministic) {
    const auto a = trace_implicit(parse("x*y"), box(-1.05, 0.95, -1.05, 0.95, 20));
    const auto b = trace_implicit(parse("x*y"), box(-1.05, 0.95, -1.05, 0.95, 20));
    ASSERT_EQ(a.curves.size(), b.curves.size());
    for (std::size_t k = 0; k < a.curves.size(); ++k) EXPECT_EQ(a.curves[k].points, b.curves[k].points);
    EXPECT_GE(a.curves.size(), 2u);
}

TEST(Trace, LoopsAreCounterClockwise) {
    const auto r = trace_implicit(parse("(x-0.5)^2/0.1+y^2/0.3-1"), box(-1, 2, -1, 1, 64));
    ASSERT_EQ(r.curves.size(), 1u);
    EXPECT_GT(closed_area(r.curves[0].points), 0.0);
}

TEST(Trace, UndefinedRegions) {
    const auto r = trace_implicit(parse("sqrt(x)-0.5"), box(-1, 1, -1, 1, 40));
    EXPECT_GT(r.skipped_cells, 0u);
    ASSERT_EQ(r.curves.size(), 1u);
    for (Point2 p : r.curves[0].points) EXPECT_NEAR(p.x, 0.25, 1e-9);
    EXPECT_THROW(trace_implicit(parse("sqrt(-1-x^2)"), box(-1, 1, -1, 1, 10)), DomainError);
}

TEST(Trace, ConfigErrors) {
    EXPECT_THROW(trace_implicit(parse("x"), box(1, 1, 0, 1)), RangeError);
    EXPECT_THROW(trace_implicit(parse("x"), box(0, 1, 0, 1, 4)), RangeError);
    EXPECT_THROW(trace_implicit(parse("x+z"), box(0, 1, 0, 1)), UnboundVariable);
}

TEST(Trace, TwoComponents) {
    const auto r = trace_implicit(parse("((x-1)^2+y^2-0.25)*((x+1)^2+y^2-0.25)"), box(-2, 2, -2, 2, 100));
    EXPECT_EQ(r.curves.size(), 2u);
    for (const auto& c : r.curves) EXPECT_TRUE(is_closed(c));
}
