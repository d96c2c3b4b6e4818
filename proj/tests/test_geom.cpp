#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "osplot/geom.hpp"

using namespace osplot;

namespace {

const CubicBezier diagonal{{0, 0}, {1.0 / 3, 1.0 / 3}, {2.0 / 3, 2.0 / 3}, {1, 1}};

} // namespace

TEST(Bezier, Endpoints) {
    const CubicBezier b{{1, 2}, {3, 5}, {-1, 4}, {6, 0}};
    EXPECT_EQ(bezier_eval(b, 0.0), b.p0);
    EXPECT_EQ(bezier_eval(b, 1.0), b.p1);
}

TEST(Bezier, Degenerate) {
    const Point2 p{1.5, -2};
    const CubicBezier b{p, p, p, p};
    for (double t : {0.0, 0.3, 0.77, 1.0}) EXPECT_EQ(bezier_eval(b, t), p);
}

TEST(Bezier, LineMidpoint) {
    const Point2 m = bezier_eval(diagonal, 0.5);
    EXPECT_NEAR(m.x, 0.5, 1e-15);
    EXPECT_NEAR(m.y, 0.5, 1e-15);
}

TEST(Bezier, OutOfRange) {
    EXPECT_THROW(bezier_eval(diagonal, -0.1), RangeError);
    EXPECT_THROW(bezier_eval(diagonal, 1.1), RangeError);
}

TEST(Bezier, SubdivideJoin) {
    const CubicBezier b{{0, 0}, {1, 3}, {4, -1}, {5, 2}};
    const auto [l, r] = bezier_subdivide(b, 0.5);
    const Point2 mid = bezier_eval(b, 0.5);
    EXPECT_NEAR(distance(bezier_eval(l, 1.0), mid), 0.0, 1e-15);
    EXPECT_EQ(l.p1, r.p0);

    const auto [l2, r2] = bezier_subdivide(diagonal, 0.25);
    EXPECT_NEAR(l2.p1.x, 0.25, 1e-15);
    EXPECT_NEAR(l2.p1.y, 0.25, 1e-15);

    EXPECT_THROW(bezier_subdivide(b, 0.0), RangeError);
    EXPECT_THROW(bezier_subdivide(b, 1.0), RangeError);
}

TEST(Bezier, SubdivideResampling) {
    const CubicBezier b{{0, 0}, {1, 3}, {4, -1}, {5, 2}};
    const double s = 0.37;
    const auto [l, r] = bezier_subdivide(b, s);
    for (int k = 0; k < 64; ++k) {
        const double t = k / 63.0;
        const Point2 want = bezier_eval(b, t);
        const Point2 got = t <= s ? bezier_eval(l, t / s) : bezier_eval(r, (t - s) / (1 - s));
        EXPECT_LT(distance(want, got), 1e-12);
    }
}

TEST(Bezier, Derivative) {
    const CubicBezier b{{0, 0}, {1, 3}, {4, -1}, {5, 2}};
    EXPECT_EQ(derivative_at(b, 0.0), 3.0 * (b.c0 - b.p0));
    EXPECT_EQ(derivative_at(b, 1.0), 3.0 * (b.p1 - b.c1));
    const double h = 1e-6, t = 0.4;
    const Point2 fd = (point_at(b, t + h) - point_at(b, t - h)) / (2 * h);
    EXPECT_LT(distance(fd, derivative_at(b, t)), 1e-8);
}

TEST(Bezier, BoundingBoxContainsCurve) {
    const CubicBezier b{{0, 0}, {1, 3}, {4, -1}, {5, 2}};
    const Rect r = bezier_bbox(b).inflated(1e-12);
    for (int k = 0; k <= 1000; ++k) EXPECT_TRUE(r.contains(point_at(b, k / 1000.0)));
}

TEST(Polyline, MakeDropsDuplicates) {
    const Polyline p = make_polyline({{0, 0}, {0, 0}, {1, 0}, {1, 0}, {1, 1}});
    EXPECT_EQ(p.size(), 3u);
    EXPECT_THROW(make_polyline({{0, 0}, {0, 0}}), DegenerateError);
}

TEST(Polyline, ProjectAndParam) {
    const Polyline p = make_polyline({{0, 0}, {2, 0}, {2, 2}});
    const PolylineParam s = project_onto(p.points, {1.0, 0.5});
    EXPECT_EQ(s.index, 0u);
    EXPECT_DOUBLE_EQ(s.fraction, 0.5);
    EXPECT_EQ(point_at(p.points, s), (Point2{1, 0}));
    EXPECT_DOUBLE_EQ(length(p.points), 4.0);
    EXPECT_DOUBLE_EQ(distance_to_polyline(p.points, {3, 1}), 1.0);
    const PolylineParam e = param_from_scalar(p.size(), 2.0);
    EXPECT_EQ(point_at(p.points, e), (Point2{2, 2}));
}

TEST(ClosestApproach, Simple) {
    const std::vector<Point2> a{{0, 0}, {1, 0}};
    const std::vector<Point2> b{{0, 1}, {1, 1}};
    const auto r = closest_approach(a, b);
    EXPECT_EQ(r.distance, 1.0);
    EXPECT_EQ(r.index_a, 0u);
    EXPECT_EQ(r.index_b, 0u);
    EXPECT_EQ(closest_approach(a, a).distance, 0.0);
}

TEST(ClosestApproach, MatchesBruteForce) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Point2> a(100), b(100);
        for (auto& p : a) p = {u(rng), u(rng)};
        for (auto& p : b) p = {u(rng), u(rng)};
        double best = 1e300;
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j)
                if (distance(a[i], b[j]) < best) {
                    best = distance(a[i], b[j]);
                    bi = i;
                    bj = j;
                }
        const auto r = closest_approach(a, b);
        EXPECT_EQ(r.distance, best);
        EXPECT_EQ(r.index_a, bi);
        EXPECT_EQ(r.index_b, bj);
    }
}

TEST(Csv, RoundTrip) {
    const std::vector<Point2> pts{{0.1, -2}, {3.0 / 7, 1e-17}, {-1e5, 2.5}};
    std::stringstream s;
    write_points_csv(s, pts);
    const auto back = read_points_csv(s);
    EXPECT_EQ(back, pts);
}

TEST(Csv, CommentsAndErrors) {
    std::istringstream ok("# header\n1,2\n\n 3 , 4 # trailing\n");
    const auto pts = read_points_csv(ok);
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_EQ(pts[1], (Point2{3, 4}));
    std::istringstream bad("1,2\n3;4\n");
    EXPECT_THROW(read_points_csv(bad), Error);
}
