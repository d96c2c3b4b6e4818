#pragma once

// Scene serializers: LaTeX picture environment and SVG.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "osplot/geom.hpp"

namespace osplot {

enum class LineStyle { Solid, Dashed, Dotted, DottedDisc };

inline std::string_view to_string(LineStyle s) {
    switch (s) {
    case LineStyle::Solid: return "solid";
    case LineStyle::Dashed: return "dashed";
    case LineStyle::Dotted: return "dotted";
    case LineStyle::DottedDisc: return "dotted-disc";
    }
    return "solid";
}

/// Text placed at `anchor`. `align` uses makebox letters: "" centred,
/// combinations of l/r and t/b otherwise.
struct Label {
    std::string text;
    Point2 anchor;
    std::string align;
};

struct DrawItem {
    std::vector<Point2> points;
    LineStyle style = LineStyle::Solid;
    double thickness = 0.008; // inches
    std::optional<Label> label;
};

struct Scene {
    std::vector<DrawItem> items;

    void add(std::vector<Point2> pts, LineStyle style = LineStyle::Solid, double thickness = 0.008) {
        items.push_back({std::move(pts), style, thickness, std::nullopt});
    }
    void add_label(std::string text, Point2 anchor, std::string align = "") {
        items.push_back({{}, LineStyle::Solid, 0.008, Label{std::move(text), anchor, std::move(align)}});
    }

    /// Bounding box of all geometry and label anchors, padded by 5% of its
    /// size. An empty scene gets the unit square.
    Rect bbox() const {
        Rect r;
        for (const auto& it : items) {
            for (Point2 p : it.points) r.include(p);
            if (it.label) r.include(it.label->anchor);
        }
        if (r.empty()) return {0.0, 0.0, 1.0, 1.0};
        const double pad_x = std::max(0.05 * r.width(), 0.05 * r.height());
        const double pad_y = pad_x;
        Rect out{r.xmin - pad_x, r.ymin - pad_y, r.xmax + pad_x, r.ymax + pad_y};
        if (out.width() <= 0.0) out = {out.xmin - 0.5, out.ymin, out.xmax + 0.5, out.ymax};
        if (out.height() <= 0.0) out = {out.xmin, out.ymin - 0.5, out.xmax, out.ymax + 0.5};
        return out;
    }
};

/// Fixed-point with `decimals` digits, rounded half away from zero, never "-0.000".
inline std::string format_fixed(double v, int decimals = 5) {
    decimals = std::clamp(decimals, 0, 9);
    unsigned long long scale = 1;
    for (int i = 0; i < decimals; ++i) scale *= 10;
    const long long n = std::llround(v * static_cast<double>(scale));
    const unsigned long long a = static_cast<unsigned long long>(n < 0 ? -n : n);
    std::string out = n < 0 ? "-" : "";
    out += std::to_string(a / scale);
    if (decimals > 0) {
        std::string frac = std::to_string(a % scale);
        out += '.';
        out.append(static_cast<std::size_t>(decimals) - frac.size(), '0');
        out += frac;
    }
    return out;
}

namespace detail {

// Shortest decimal up to 5 places, for picture headers.
inline std::string format_short(double v) {
    std::string s = format_fixed(v, 5);
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
    return s == "-0" ? "0" : s;
}

inline std::string pair(Point2 p) { return "(" + format_fixed(p.x) + "," + format_fixed(p.y) + ")"; }

/// Splits a polyline into dash runs of arc length `dash` separated by `gap`.
inline std::vector<std::vector<Point2>> dash_runs(std::span<const Point2> pts, double dash, double gap) {
    std::vector<std::vector<Point2>> runs;
    if (pts.size() < 2) return runs;
    bool on = true;
    double left = dash;
    std::vector<Point2> cur{pts[0]};
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        Point2 a = pts[i];
        const Point2 b = pts[i + 1];
        double seg = distance(a, b);
        while (seg > left) {
            const Point2 cut = lerp(a, b, left / seg);
            if (on) {
                cur.push_back(cut);
                runs.push_back(std::move(cur));
                cur.clear();
            } else {
                cur = {cut};
            }
            on = !on;
            seg -= left;
            a = cut;
            left = on ? dash : gap;
        }
        left -= seg;
        if (on) cur.push_back(b);
    }
    if (on && cur.size() >= 2 && length(cur) > 1e-9 * dash) runs.push_back(std::move(cur));
    return runs;
}

/// Points spaced `step` apart in arc length, endpoints included.
inline std::vector<Point2> dot_positions(std::span<const Point2> pts, double step) {
    std::vector<Point2> out;
    if (pts.empty()) return out;
    out.push_back(pts[0]);
    double carry = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double seg = distance(pts[i], pts[i + 1]);
        double s = step - carry;
        while (s <= seg) {
            out.push_back(lerp(pts[i], pts[i + 1], s / seg));
            s += step;
        }
        carry = seg - (s - step);
    }
    if (pts.size() > 1 && distance(out.back(), pts.back()) > 0.25 * step) out.push_back(pts.back());
    return out;
}

inline void polyline_tex(std::string& out, std::span<const Point2> pts) {
    out += "\\polyline";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        out += pair(pts[i]);
        if ((i + 1) % 5 == 0 && i + 1 < pts.size()) out += "%\n";
    }
    out += "%\n";
}

} // namespace detail

struct LatexOptions {
    double dash = 0.1; // cm
    double gap = 0.1;
    double dot_step = 0.1;
    double dot_diameter = 0.04064;
    double disc_diameter = 0.12;
};

inline std::string emit_latex(const Scene& scene, const LatexOptions& opt = {}) {
    const Rect bb = scene.bbox();
    std::string out = "{\\unitlength=1cm%\n\\begin{picture}%\n";
    out += "(" + detail::format_short(bb.width()) + "," + detail::format_short(bb.height()) + ")(" +
           detail::format_short(bb.xmin) + "," + detail::format_short(bb.ymin) + ")%\n";
    std::optional<double> thickness;
    for (const DrawItem& it : scene.items) {
        if (it.points.size() >= 1 && (!thickness || *thickness != it.thickness)) {
            out += "\\linethickness{" + detail::format_short(it.thickness) + "in}%\n";
            thickness = it.thickness;
        }
        switch (it.style) {
        case LineStyle::Solid:
            if (it.points.size() >= 2) detail::polyline_tex(out, it.points);
            break;
        case LineStyle::Dashed:
            for (const auto& run : detail::dash_runs(it.points, opt.dash, opt.gap)) detail::polyline_tex(out, run);
            break;
        case LineStyle::Dotted:
        case LineStyle::DottedDisc: {
            const double d = it.style == LineStyle::Dotted ? opt.dot_diameter : opt.disc_diameter;
            const auto dots = it.style == LineStyle::Dotted ? detail::dot_positions(it.points, opt.dot_step)
                                                            : it.points;
            for (std::size_t i = 0; i < dots.size(); ++i) {
                out += "\\put" + detail::pair(dots[i]) + "{\\circle*{" + format_fixed(d, 6) + "}}";
                if (i % 2 == 1 || i + 1 == dots.size()) out += "%\n";
            }
            break;
        }
        }
        if (it.label) {
            const Label& l = *it.label;
            out += "\\put" + detail::pair(l.anchor) + "{\\makebox(0,0)" +
                   (l.align.empty() ? std::string() : "[" + l.align + "]") + "{" + l.text + "}}%\n";
        }
    }
    out += "\\end{picture}}%\n";
    return out;
}

inline constexpr double svg_px_per_cm = 37.795;

namespace detail {

inline std::string px(double v) {
    std::string s = format_fixed(v, 3);
    return s;
}

inline std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace detail

inline std::string emit_svg(const Scene& scene) {
    const Rect bb = scene.bbox();
    const double k = svg_px_per_cm;
    auto sx = [&](double x) { return (x - bb.xmin) * k; };
    auto sy = [&](double y) { return (bb.ymax - y) * k; };
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::px(bb.width() * k) +
                      "\" height=\"" + detail::px(bb.height() * k) + "\" viewBox=\"0 0 " +
                      detail::px(bb.width() * k) + " " + detail::px(bb.height() * k) + "\">\n";
    for (const DrawItem& it : scene.items) {
        const std::string width = detail::px(it.thickness * 2.54 * k);
        if (it.style == LineStyle::DottedDisc) {
            for (Point2 p : it.points)
                out += "<circle cx=\"" + detail::px(sx(p.x)) + "\" cy=\"" + detail::px(sy(p.y)) + "\" r=\"" +
                       detail::px(0.06 * k) + "\" fill=\"black\"/>\n";
        } else if (it.points.size() >= 2) {
            out += "<path d=\"";
            for (std::size_t i = 0; i < it.points.size(); ++i) {
                out += i == 0 ? "M" : " L";
                out += detail::px(sx(it.points[i].x)) + "," + detail::px(sy(it.points[i].y));
            }
            out += "\" fill=\"none\" stroke=\"black\" stroke-width=\"" + width + "\"";
            if (it.style == LineStyle::Dashed)
                out += " stroke-dasharray=\"" + detail::px(0.1 * k) + "," + detail::px(0.1 * k) + "\"";
            else if (it.style == LineStyle::Dotted)
                out += " stroke-dasharray=\"" + detail::px(0.02 * k) + "," + detail::px(0.08 * k) +
                       "\" stroke-linecap=\"round\"";
            out += "/>\n";
        }
        if (it.label) {
            const Label& l = *it.label;
            std::string anchor = "middle";
            if (l.align.find('l') != std::string::npos) anchor = "start";
            if (l.align.find('r') != std::string::npos) anchor = "end";
            out += "<text x=\"" + detail::px(sx(l.anchor.x)) + "\" y=\"" + detail::px(sy(l.anchor.y)) +
                   "\" text-anchor=\"" + anchor + "\" font-size=\"12\">" + detail::xml_escape(l.text) +
                   "</text>\n";
        }
    }
    out += "</svg>\n";
    return out;
}

} // namespace osplot
