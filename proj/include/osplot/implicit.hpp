#pragma once

// Zero-set tracing of F(x, y) = 0 over a rectangle by marching squares.
//
// Grid nodes are classified by sign (F < 0 versus F >= 0). Each sign change
// on a cell edge yields one vertex, located by bisection along the edge and
// shared by the two cells that own the edge, so chaining is exact. Saddle
// cells are split by the sign of F at the cell centre. Components come out
// either closed (first vertex repeated at the end, counter-clockwise) or
// open with both ends on the rectangle boundary or next to skipped cells;
// open chains start at their larger-x end.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "osplot/error.hpp"
#include "osplot/expr.hpp"
#include "osplot/geom.hpp"

namespace osplot {

struct TraceConfig {
    double xmin = -1.0, xmax = 1.0;
    double ymin = -1.0, ymax = 1.0;
    std::size_t grid = 200;  // cells per axis
    double join_tolerance = 1e-9;

    void validate() const {
        if (!(xmax > xmin) || !(ymax > ymin)) throw RangeError("trace rectangle is degenerate");
        if (grid < 8) throw RangeError("trace grid must have at least 8 cells per axis");
    }
};

struct TraceResult {
    std::vector<Polyline> curves;
    std::size_t skipped_cells = 0;
};

/// Scalar field: returns nullopt where F is undefined.
using ScalarField = std::function<std::optional<double>(double, double)>;

namespace detail {

class MarchingSquares {
public:
    MarchingSquares(const ScalarField& f, const TraceConfig& cfg) : f_(f), cfg_(cfg), n_(cfg.grid) {
        dx_ = (cfg.xmax - cfg.xmin) / static_cast<double>(n_);
        dy_ = (cfg.ymax - cfg.ymin) / static_cast<double>(n_);
    }

    TraceResult run() {
        sample_nodes();
        build_segments();
        TraceResult out;
        out.skipped_cells = skipped_;
        chain(out.curves);
        return out;
    }

private:
    static constexpr std::int64_t none = -1;

    double node_x(std::size_t i) const { return i == n_ ? cfg_.xmax : cfg_.xmin + dx_ * static_cast<double>(i); }
    double node_y(std::size_t j) const { return j == n_ ? cfg_.ymax : cfg_.ymin + dy_ * static_cast<double>(j); }
    std::size_t node(std::size_t i, std::size_t j) const { return j * (n_ + 1) + i; }

    // Horizontal edge (i,j)-(i+1,j) and vertical edge (i,j)-(i,j+1).
    std::size_t hedge(std::size_t i, std::size_t j) const { return j * n_ + i; }
    std::size_t vedge(std::size_t i, std::size_t j) const { return (n_ + 1) * n_ + j * (n_ + 1) + i; }

    void sample_nodes() {
        values_.assign((n_ + 1) * (n_ + 1), std::numeric_limits<double>::quiet_NaN());
        bool any = false;
        for (std::size_t j = 0; j <= n_; ++j)
            for (std::size_t i = 0; i <= n_; ++i) {
                auto v = f_(node_x(i), node_y(j));
                if (v && std::isfinite(*v)) {
                    values_[node(i, j)] = *v;
                    any = true;
                }
            }
        if (!any) throw DomainError("function undefined at every grid node");
    }

    bool negative(double v) const { return v < 0.0; }

    void add_segment(std::size_t e0, std::size_t e1, double scale) {
        scale_[e0] = std::max(scale_[e0], scale);
        scale_[e1] = std::max(scale_[e1], scale);
        const std::size_t id = segments_.size();
        segments_.push_back({e0, e1});
        attach(e0, id);
        attach(e1, id);
    }

    void attach(std::size_t edge, std::size_t seg) {
        auto& slots = edge_segments_[edge];
        if (slots[0] == none) slots[0] = static_cast<std::int64_t>(seg);
        else slots[1] = static_cast<std::int64_t>(seg);
    }

    void build_segments() {
        const std::size_t edges = 2 * n_ * (n_ + 1);
        edge_segments_.assign(edges, {none, none});
        scale_.assign(edges, 0.0);
        vertex_cache_.assign(edges, Point2{});
        vertex_known_.assign(edges, 0);
        for (std::size_t j = 0; j < n_; ++j) {
            for (std::size_t i = 0; i < n_; ++i) {
                const double v00 = values_[node(i, j)];
                const double v10 = values_[node(i + 1, j)];
                const double v11 = values_[node(i + 1, j + 1)];
                const double v01 = values_[node(i, j + 1)];
                if (std::isnan(v00) || std::isnan(v10) || std::isnan(v11) || std::isnan(v01)) {
                    ++skipped_;
                    continue;
                }
                const double scale =
                    1.0 + std::max({std::fabs(v00), std::fabs(v10), std::fabs(v11), std::fabs(v01)});
                const bool s00 = negative(v00), s10 = negative(v10), s11 = negative(v11), s01 = negative(v01);
                const std::size_t bottom = hedge(i, j), top = hedge(i, j + 1);
                const std::size_t left = vedge(i, j), right = vedge(i + 1, j);

                std::array<std::size_t, 4> crossing{};
                std::size_t count = 0;
                if (s00 != s10) crossing[count++] = bottom;
                if (s10 != s11) crossing[count++] = right;
                if (s11 != s01) crossing[count++] = top;
                if (s01 != s00) crossing[count++] = left;

                if (count == 2) {
                    add_segment(crossing[0], crossing[1], scale);
                } else if (count == 4) {
                    double centre = 0.25 * (v00 + v10 + v11 + v01);
                    if (auto c = f_(node_x(i) + 0.5 * dx_, node_y(j) + 0.5 * dy_); c && std::isfinite(*c))
                        centre = *c;
                    if (negative(centre) == s00) {
                        // Diagonal v00-v11 connected: isolate v10 and v01.
                        add_segment(bottom, right, scale);
                        add_segment(top, left, scale);
                    } else {
                        add_segment(bottom, left, scale);
                        add_segment(top, right, scale);
                    }
                }
            }
        }
    }

    // Endpoints of an edge as grid nodes.
    void edge_nodes(std::size_t e, std::size_t& ia, std::size_t& ja, std::size_t& ib, std::size_t& jb) const {
        const std::size_t hcount = (n_ + 1) * n_;
        if (e < hcount) {
            ja = jb = e / n_;
            ia = e % n_;
            ib = ia + 1;
        } else {
            const std::size_t k = e - hcount;
            ja = k / (n_ + 1);
            jb = ja + 1;
            ia = ib = k % (n_ + 1);
        }
    }

    Point2 crossing_point(std::size_t e) {
        if (vertex_known_[e]) return vertex_cache_[e];
        std::size_t ia, ja, ib, jb;
        edge_nodes(e, ia, ja, ib, jb);
        const Point2 a{node_x(ia), node_y(ja)};
        const Point2 b{node_x(ib), node_y(jb)};
        const Point2 p = refine(a, values_[node(ia, ja)], b, values_[node(ib, jb)], scale_[e]);
        vertex_cache_[e] = p;
        vertex_known_[e] = 1;
        return p;
    }

    // Bisection on the bracket [a, b], seeded by linear interpolation.
    Point2 refine(Point2 a, double fa, Point2 b, double fb, double scale) const {
        const double tol = 1e-10 * scale;
        double lo = 0.0, hi = 1.0, flo = fa, fhi = fb;
        Point2 best = lerp(a, b, fa / (fa - fb));
        double best_res = std::numeric_limits<double>::infinity();

        auto eval = [&](double t) -> std::optional<double> {
            const Point2 p = lerp(a, b, t);
            auto v = f_(p.x, p.y);
            if (v && std::isfinite(*v)) return v;
            return std::nullopt;
        };
        auto consider = [&](double t, double f) {
            if (std::fabs(f) < best_res) {
                best_res = std::fabs(f);
                best = lerp(a, b, t);
            }
        };
        consider(0.0, fa);
        consider(1.0, fb);

        const double t_lin = fa / (fa - fb);
        if (auto f = eval(t_lin)) {
            consider(t_lin, *f);
            if (best_res <= tol) return best;
            if (negative(*f) == negative(flo)) {
                lo = t_lin;
                flo = *f;
            } else {
                hi = t_lin;
                fhi = *f;
            }
        }
        for (int it = 0; it < 30; ++it) {
            const double mid = 0.5 * (lo + hi);
            auto f = eval(mid);
            if (!f) break;
            consider(mid, *f);
            if (best_res <= tol) return best;
            if (negative(*f) == negative(flo)) {
                lo = mid;
                flo = *f;
            } else {
                hi = mid;
                fhi = *f;
            }
        }
        if (flo != fhi) {
            const double t = lo + (hi - lo) * flo / (flo - fhi);
            if (auto f = eval(t)) consider(t, *f);
        }
        return best;
    }

    std::size_t other_edge(std::size_t seg, std::size_t edge) const {
        const auto& s = segments_[seg];
        return s[0] == edge ? s[1] : s[0];
    }

    std::int64_t next_segment(std::size_t edge, const std::vector<char>& used) const {
        for (std::int64_t s : edge_segments_[edge])
            if (s != none && !used[static_cast<std::size_t>(s)]) return s;
        return none;
    }

    void push_vertex(std::vector<Point2>& pts, Point2 p) const {
        if (!pts.empty() && distance(pts.back(), p) <= cfg_.join_tolerance) return;
        pts.push_back(p);
    }

    std::vector<Point2> walk(std::size_t start_edge, std::vector<char>& used) {
        std::vector<Point2> pts;
        push_vertex(pts, crossing_point(start_edge));
        std::size_t edge = start_edge;
        for (;;) {
            const std::int64_t s = next_segment(edge, used);
            if (s == none) break;
            used[static_cast<std::size_t>(s)] = 1;
            edge = other_edge(static_cast<std::size_t>(s), edge);
            push_vertex(pts, crossing_point(edge));
            if (edge == start_edge) break;
        }
        return pts;
    }

    void chain(std::vector<Polyline>& out) {
        std::vector<char> used(segments_.size(), 0);

        auto emit = [&](std::vector<Point2> pts, bool closed) {
            if (closed) {
                if (pts.size() < 3) return;
                if (pts.front() != pts.back()) pts.push_back(pts.front());
                double area2 = 0.0;
                for (std::size_t k = 0; k + 1 < pts.size(); ++k) area2 += cross(pts[k], pts[k + 1]);
                if (area2 < 0.0) std::reverse(pts.begin(), pts.end());
            } else {
                if (pts.size() < 2) return;
                const Point2 s = pts.front(), e = pts.back();
                if (e.x > s.x || (e.x == s.x && e.y > s.y)) std::reverse(pts.begin(), pts.end());
            }
            Polyline pl;
            pl.points = std::move(pts);
            out.push_back(std::move(pl));
        };

        // Open chains start at edges owned by a single segment.
        for (std::size_t e = 0; e < edge_segments_.size(); ++e) {
            const auto& slots = edge_segments_[e];
            if (slots[0] == none || slots[1] != none) continue;
            if (used[static_cast<std::size_t>(slots[0])]) continue;
            emit(walk(e, used), false);
        }
        for (std::size_t s = 0; s < segments_.size(); ++s) {
            if (used[s]) continue;
            const std::size_t start = segments_[s][0];
            auto pts = walk(start, used);
            emit(std::move(pts), true);
        }
    }

    const ScalarField& f_;
    TraceConfig cfg_;
    std::size_t n_;
    double dx_ = 0.0, dy_ = 0.0;
    std::vector<double> values_;
    std::vector<std::array<std::size_t, 2>> segments_;
    std::vector<std::array<std::int64_t, 2>> edge_segments_;
    std::vector<double> scale_;
    std::vector<Point2> vertex_cache_;
    std::vector<char> vertex_known_;
    std::size_t skipped_ = 0;
};

} // namespace detail

/// Traces F = 0 for a field given as a callable.
inline TraceResult trace_field(const ScalarField& f, const TraceConfig& cfg) {
    cfg.validate();
    return detail::MarchingSquares(f, cfg).run();
}

/// Traces F(x, y) = 0. `F` may use only the two named variables.
inline TraceResult trace_implicit(const Expr& F, const TraceConfig& cfg, const std::string& xvar = "x",
                                  const std::string& yvar = "y") {
    for (const auto& v : free_variables(F))
        if (v != xvar && v != yvar) throw UnboundVariable(v);
    const CompiledExpr fn = compile(F, {xvar, yvar});
    return trace_field([&fn](double x, double y) { return fn.try_eval(x, y); }, cfg);
}

inline Point2 pt_start(const Polyline& p) {
    if (p.empty()) throw DegenerateError("empty polyline has no start");
    return p.points.front();
}

inline Point2 pt_end(const Polyline& p) {
    if (p.empty()) throw DegenerateError("empty polyline has no end");
    return p.points.back();
}

inline bool is_closed(const Polyline& p) { return p.size() > 2 && p.points.front() == p.points.back(); }

} // namespace osplot
