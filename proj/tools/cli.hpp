#pragma once

// Command-line front end. `run` is the whole program minus process exit so
// tests can drive it with string arguments.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "osplot/osplot.hpp"

namespace osplot::cli {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf) == "-0.000000" ? "0.000000" : buf;
}

/// Real number given as a constant expression ("pi/2", "-3", "2*e").
inline double real_value(const std::string& text) {
    try {
        return eval(parse(text, {}), {});
    } catch (const Error& e) {
        throw UsageError("bad number '" + text + "': " + e.what());
    }
}

/// Splits on commas outside parentheses.
inline std::vector<std::string> split_top(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : text) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::vector<double> real_list(const std::string& text) {
    std::vector<double> out;
    if (detail::trim(text).empty()) return out;
    for (const auto& part : split_top(text)) out.push_back(real_value(std::string(detail::trim(part))));
    return out;
}

inline std::pair<double, double> real_pair(const std::string& text, const std::string& flag) {
    const auto v = real_list(text);
    if (v.size() != 2) throw UsageError(flag + " expects two values lo,hi");
    return {v[0], v[1]};
}

inline Expr expression(const std::string& text, std::initializer_list<const char*> vars) {
    std::set<std::string, std::less<>> allowed;
    for (const char* v : vars) allowed.insert(v);
    try {
        return parse(text, allowed);
    } catch (const ParseError& e) {
        throw UsageError("cannot parse '" + text + "': " + e.what());
    }
}

inline SplineMethod method_value(const std::string& text) {
    if (auto m = spline_method_from_string(text)) return *m;
    throw UsageError("unknown spline method '" + text + "' (oshima or cr)");
}

/// "--flag value" pairs whose value starts with '-' become "--flag=value"
/// so that negative numbers and ranges such as -pi,pi reach the option.
inline std::vector<std::string> join_negative_values(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        const bool long_flag = a.size() > 2 && a.rfind("--", 0) == 0 && a.find('=') == std::string::npos;
        if (long_flag && i + 1 < args.size()) {
            const std::string& next = args[i + 1];
            if (next.size() > 1 && next[0] == '-' && next[1] != '-') {
                out.push_back(a + "=" + next);
                ++i;
                continue;
            }
        }
        out.push_back(a);
    }
    return out;
}

struct Output {
    std::string format;  // tex, svg, csv or empty
    std::string path;    // empty: standard output

    std::string resolved(const std::string& fallback) const {
        if (!format.empty()) return format;
        for (const char* ext : {"tex", "svg", "csv"})
            if (path.size() > 4 && path.compare(path.size() - 4, 4, std::string(".") + ext) == 0) return ext;
        return fallback;
    }
};

inline void write_text(const Output& o, const std::string& text, std::ostream& out) {
    if (o.path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(o.path, std::ios::binary);
    if (!f) throw Error("cannot write " + o.path);
    f << text;
    if (!f) throw Error("failed writing " + o.path);
}

inline std::string scene_text(const Scene& scene, const std::string& format) {
    if (format == "svg") return emit_svg(scene);
    if (format == "tex") return emit_latex(scene);
    throw UsageError("format '" + format + "' is not available for figures");
}

inline std::string csv_text(std::span<const Point2> pts) {
    std::ostringstream s;
    write_points_csv(s, pts);
    return s.str();
}

inline std::vector<Point2> read_points_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open " + path);
    return read_points_csv(f);
}

/// Data points from --points, --fn or --curve.
struct DataSource {
    std::string points;
    std::string fn;
    std::string curve;
    std::string range;
    std::size_t num = 50;

    void add_to(CLI::App* app, const char* range_flag = "--range") {
        app->add_option("--points", points, "CSV file of x,y points");
        app->add_option("--fn", fn, "function of x, sampled on the range");
        app->add_option("--curve", curve, "parametric curve \"fx,fy\" in t");
        app->add_option(range_flag, range, "sampling range lo,hi");
        app->add_option("--num", num, "number of sampling subintervals")->capture_default_str();
    }

    std::vector<Point2> load() const {
        const int given = !points.empty() + !fn.empty() + !curve.empty();
        if (given != 1) throw UsageError("give exactly one of --points, --fn, --curve");
        if (!points.empty()) return read_points_file(points);
        if (range.empty()) throw UsageError("sampling needs a range");
        if (num == 0) throw UsageError("--num must be positive");
        const auto [lo, hi] = real_pair(range, "range");
        if (!fn.empty()) return sample_graph(expression(fn, {"x"}), "x", lo, hi, num);
        const auto parts = split_top(curve);
        if (parts.size() != 2) throw UsageError("--curve expects \"fx,fy\"");
        return sample_curve(expression(parts[0], {"t"}), expression(parts[1], {"t"}), "t", lo, hi, num);
    }
};

inline Scene points_scene(std::span<const Point2> pts, LineStyle style = LineStyle::Solid) {
    Scene s;
    s.add({pts.begin(), pts.end()}, style);
    return s;
}

// ---------------------------------------------------------------------------
// Surface spec files

struct SurfaceSpec {
    std::string x = "u*cos(v)", y = "u*sin(v)", z = "4-u^2";
    std::string u = "0,2", v = "0,2*pi";
    std::string params = "u,v";
    std::string wires_u = "1/3,2/3,1,4/3,5/3", wires_v = "0,2*pi/6,4*pi/6,pi,8*pi/6,10*pi/6";
    std::string theta = "60", phi = "20";
};

inline void read_surface_spec(std::istream& in, SurfaceSpec& spec, std::map<std::string, std::string>& extra) {
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        const auto body = detail::trim(std::string_view(line).substr(0, line.find('#')));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) throw UsageError("spec line " + std::to_string(n) + ": expected key=value");
        const std::string key(detail::trim(body.substr(0, eq)));
        const std::string value(detail::trim(body.substr(eq + 1)));
        if (key == "x") spec.x = value;
        else if (key == "y") spec.y = value;
        else if (key == "z") spec.z = value;
        else if (key == "u") spec.u = value;
        else if (key == "v") spec.v = value;
        else if (key == "params") spec.params = value;
        else if (key == "wires_u") spec.wires_u = value;
        else if (key == "wires_v") spec.wires_v = value;
        else if (key == "theta") spec.theta = value;
        else if (key == "phi") spec.phi = value;
        else if (key == "samples" || key == "grid" || key == "hidden" || key == "axes" || key == "window" ||
                 key == "contact_tol")
            extra[key] = value;
        else throw UsageError("spec line " + std::to_string(n) + ": unknown key '" + key + "'");
    }
}

/// Builds the surface. z may refer to x and y, which are replaced by their
/// parametric expressions.
inline ParametricSurface make_surface(const SurfaceSpec& spec) {
    const auto names = split_top(spec.params);
    if (names.size() != 2) throw UsageError("params expects two names");
    ParametricSurface s;
    s.u_name = std::string(detail::trim(names[0]));
    s.v_name = std::string(detail::trim(names[1]));
    std::set<std::string, std::less<>> allowed{s.u_name, s.v_name};
    try {
        s.x = parse(spec.x, allowed);
        s.y = parse(spec.y, allowed);
        auto with_xy = allowed;
        with_xy.insert("x");
        with_xy.insert("y");
        s.z = substitute(substitute(parse(spec.z, with_xy), "x", s.x), "y", s.y);
    } catch (const ParseError& e) {
        throw UsageError(std::string("surface expression: ") + e.what());
    }
    const auto [u0, u1] = real_pair(spec.u, s.u_name);
    const auto [v0, v1] = real_pair(spec.v, s.v_name);
    if (!(u0 < u1) || !(v0 < v1)) throw UsageError("parameter ranges must satisfy lo < hi");
    s.u = {u0, u1};
    s.v = {v0, v1};
    return s;
}

// ---------------------------------------------------------------------------

inline int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"osplot: Oshima splines, spline calculus, implicit curves and hidden-line surface drawings"};
    app.require_subcommand(1);
    app.footer("Expressions: + - * / ^, unary minus, sin cos tan sqrt exp log abs, constants pi and e.\n"
               "Real-valued flags accept constant expressions, e.g. --range -pi,pi.");
    bool show_config = false;
    Output output;
    auto add_output = [&](CLI::App* sub, const char* fallback) {
        sub->add_option("--format", output.format, std::string("tex, svg or csv (default ") + fallback + ")")
            ->check(CLI::IsMember({"tex", "svg", "csv"}));
        sub->add_option("--out", output.path, "output file (default standard output)");
        sub->add_flag("--show-config", show_config, "print the resolved settings and exit");
    };

    // spline
    auto* sp = app.add_subcommand("spline", "fit a spline through points and draw it");
    DataSource sp_data;
    std::string sp_method = "oshima";
    bool sp_closed = false, sp_open = false;
    std::size_t sp_per = 10;
    sp_data.add_to(sp);
    sp->add_option("--method", sp_method, "oshima or cr")->capture_default_str();
    sp->add_flag("--closed", sp_closed, "treat the points as a closed curve");
    sp->add_flag("--open", sp_open, "never close the curve");
    sp->add_option("--per-segment", sp_per, "output samples per segment")->capture_default_str();
    add_output(sp, "tex");

    // integrate
    auto* in = app.add_subcommand("integrate", "integral of y dx over the spline through the data");
    DataSource in_data;
    std::string in_interval, in_method = "oshima";
    in_data.add_to(in, "--sample-range");
    in->add_option("--interval", in_interval, "integration interval a,b")->required();
    in->add_option("--method", in_method, "oshima or cr")->capture_default_str();
    in->add_flag("--show-config", show_config, "print the resolved settings and exit");

    // area
    auto* ar = app.add_subcommand("area", "area enclosed by a closed spline");
    DataSource ar_data;
    std::string ar_method = "oshima", ar_ratio;
    ar_data.add_to(ar);
    ar->add_option("--method", ar_method, "oshima or cr")->capture_default_str();
    ar->add_option("--ratio", ar_ratio, "print area divided by this value");
    ar->add_flag("--show-config", show_config, "print the resolved settings and exit");

    // tangent
    auto* tg = app.add_subcommand("tangent", "slope of the spline through the data at x");
    DataSource tg_data;
    std::string tg_at, tg_hint, tg_method = "oshima";
    double tg_half = 1.0;
    tg_data.add_to(tg);
    tg->add_option("--at", tg_at, "x coordinate")->required();
    tg->add_option("--y-hint", tg_hint, "pick the branch nearest this y");
    tg->add_option("--method", tg_method, "oshima or cr")->capture_default_str();
    tg->add_option("--half-length", tg_half, "half length of the drawn tangent segment")->capture_default_str();
    add_output(tg, "tex");

    // implicit
    auto* im = app.add_subcommand("implicit", "trace F(x,y)=0 in a rectangle");
    std::string im_fn, im_x = "-1,1", im_y = "-1,1";
    std::size_t im_grid = 200;
    bool im_integrate = false;
    im->add_option("--fn", im_fn, "equation lhs=rhs or expression in x,y")->required();
    im->add_option("--xrange", im_x, "x range")->capture_default_str();
    im->add_option("--yrange", im_y, "y range")->capture_default_str();
    im->add_option("--grid", im_grid, "cells per axis")->capture_default_str();
    im->add_flag("--integrate-endpoints", im_integrate,
                 "print the integral of y dx along the first curve between its end and start x");
    add_output(im, "csv");

    // surface
    auto* sf = app.add_subcommand("surface", "hidden-line drawing of a parametric surface");
    SurfaceSpec spec;
    std::string sf_file, sf_hidden = "dashed";
    SceneOptions sf_opt;
    bool sf_no_axes = false;
    sf->add_option("--spec", sf_file, "key=value surface description file");
    sf->add_option("--x", spec.x, "x(u,v)")->capture_default_str();
    sf->add_option("--y", spec.y, "y(u,v)")->capture_default_str();
    sf->add_option("--z", spec.z, "z(u,v); may use x and y")->capture_default_str();
    sf->add_option("--u", spec.u, "u range")->capture_default_str();
    sf->add_option("--v", spec.v, "v range")->capture_default_str();
    sf->add_option("--params", spec.params, "parameter names")->capture_default_str();
    sf->add_option("--wires-u", spec.wires_u, "u values of iso-u wires");
    sf->add_option("--wires-v", spec.wires_v, "v values of iso-v wires")->capture_default_str();
    sf->add_option("--theta", spec.theta, "azimuth in degrees")->capture_default_str();
    sf->add_option("--phi", spec.phi, "elevation in degrees")->capture_default_str();
    sf->add_option("--grid", sf_opt.silhouette_grid, "silhouette tracing cells per axis")->capture_default_str();
    sf->add_option("--samples", sf_opt.samples, "points per boundary edge and wire")->capture_default_str();
    sf->add_option("--window", sf_opt.window, "contact refinement window")->capture_default_str();
    sf->add_option("--contact-tol", sf_opt.contact_tol, "contact cluster distance")->capture_default_str();
    sf->add_option("--hidden", sf_hidden, "dashed or omit")->check(CLI::IsMember({"dashed", "omit"}))->capture_default_str();
    sf->add_flag("--no-axes", sf_no_axes, "leave out the axis triad");
    add_output(sf, "tex");

    // contact-demo
    auto* cd = app.add_subcommand("contact-demo", "paraboloid silhouette contact refinement");
    ContactDemoOptions cd_opt;
    std::string cd_theta = "60", cd_phi = "20", cd_u = "5/3";
    cd->add_option("--theta", cd_theta, "azimuth in degrees")->capture_default_str();
    cd->add_option("--phi", cd_phi, "elevation in degrees")->capture_default_str();
    cd->add_option("--wire-u", cd_u, "radius parameter of the iso-circle")->capture_default_str();
    cd->add_option("--grid", cd_opt.grid, "silhouette tracing cells per axis")->capture_default_str();
    cd->add_option("--samples", cd_opt.samples, "points on the iso-circle")->capture_default_str();
    cd->add_option("--window", cd_opt.window, "refinement window")->capture_default_str();
    cd->add_option("--tol", cd_opt.refine_tol, "subdivision tolerance")->capture_default_str();
    cd->add_flag("--show-config", show_config, "print the resolved settings and exit");

    const std::vector<std::string> args = join_negative_values(raw_args);
    std::vector<const char*> argv{"osplot"};
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "osplot: " << e.what() << "\n";
        return 2;
    }

    auto config_line = [&](const std::string& key, const std::string& value) { out << key << " = " << value << "\n"; };

    try {
        if (sp->parsed()) {
            if (sp_closed && sp_open) throw UsageError("--closed and --open exclude each other");
            const SplineMethod m = method_value(sp_method);
            const Closure closure = sp_closed ? Closure::Closed : sp_open ? Closure::Open : Closure::Auto;
            if (show_config) {
                config_line("method", std::string(to_string(m)));
                config_line("closure", sp_closed ? "closed" : sp_open ? "open" : "auto");
                config_line("per_segment", std::to_string(sp_per));
                config_line("format", output.resolved("tex"));
                return 0;
            }
            if (sp_per == 0) throw UsageError("--per-segment must be positive");
            const auto data = sp_data.load();
            const auto pts = sample(build_spline(data, m, closure), sp_per);
            const std::string f = output.resolved("tex");
            write_text(output, f == "csv" ? csv_text(pts) : scene_text(points_scene(pts), f), out);
            return 0;
        }
        if (in->parsed()) {
            const SplineMethod m = method_value(in_method);
            const auto [a, b] = real_pair(in_interval, "--interval");
            if (show_config) {
                config_line("method", std::string(to_string(m)));
                config_line("num", std::to_string(in_data.num));
                config_line("interval", fmt6(a) + "," + fmt6(b));
                return 0;
            }
            out << fmt6(integrate(in_data.load(), a, b, m)) << "\n";
            return 0;
        }
        if (ar->parsed()) {
            const SplineMethod m = method_value(ar_method);
            if (show_config) {
                config_line("method", std::string(to_string(m)));
                config_line("num", std::to_string(ar_data.num));
                return 0;
            }
            double area = std::fabs(closed_area(ar_data.load(), m));
            if (!ar_ratio.empty()) area /= real_value(ar_ratio);
            out << fmt6(area) << "\n";
            return 0;
        }
        if (tg->parsed()) {
            const SplineMethod m = method_value(tg_method);
            const double x0 = real_value(tg_at);
            std::optional<double> hint;
            if (!tg_hint.empty()) hint = real_value(tg_hint);
            if (show_config) {
                config_line("method", std::string(to_string(m)));
                config_line("at", fmt6(x0));
                config_line("format", output.resolved("tex"));
                return 0;
            }
            const auto data = tg_data.load();
            const TangentLine line = tangent_line(data, x0, m, hint);
            const std::string slope = line.vertical() ? "vertical" : fmt6(*line.slope);
            if (output.path.empty() && output.format.empty()) {
                out << slope << "\n";
                return 0;
            }
            Scene scene = points_scene(sample(build_spline(data, m), 10));
            scene.add({line.point - tg_half * line.direction, line.point + tg_half * line.direction});
            scene.items.push_back({{line.point}, LineStyle::DottedDisc, 0.008, std::nullopt});
            const std::string f = output.resolved("tex");
            if (f == "csv") throw UsageError("tangent figures are tex or svg");
            write_text(output, scene_text(scene, f), out);
            if (!output.path.empty()) out << slope << "\n";
            return 0;
        }
        if (im->parsed()) {
            TraceConfig cfg;
            std::tie(cfg.xmin, cfg.xmax) = real_pair(im_x, "--xrange");
            std::tie(cfg.ymin, cfg.ymax) = real_pair(im_y, "--yrange");
            cfg.grid = im_grid;
            if (show_config) {
                config_line("xrange", fmt6(cfg.xmin) + "," + fmt6(cfg.xmax));
                config_line("yrange", fmt6(cfg.ymin) + "," + fmt6(cfg.ymax));
                config_line("grid", std::to_string(cfg.grid));
                config_line("format", output.resolved("csv"));
                return 0;
            }
            cfg.validate();
            Expr F;
            try {
                F = parse_equation(im_fn);
            } catch (const ParseError& e) {
                throw UsageError(std::string("cannot parse equation: ") + e.what());
            }
            for (const auto& v : free_variables(F))
                if (v != "x" && v != "y") throw UsageError("unknown variable '" + v + "' in equation");
            const TraceResult r = trace_implicit(F, cfg);
            if (im_integrate) {
                if (r.curves.empty()) throw DegenerateError("no curve found in the rectangle");
                const Polyline& c = r.curves.front();
                const Point2 p = pt_start(c), q = pt_end(c);
                out << fmt6(integrate(c.points, q.x, p.x)) << "\n";
                if (output.path.empty() && output.format.empty()) return 0;
            }
            const std::string f = output.resolved("csv");
            if (f == "csv") {
                std::ostringstream s;
                for (std::size_t k = 0; k < r.curves.size(); ++k) {
                    if (k) s << "\n";
                    s << "# curve " << k << "\n";
                    write_points_csv(s, r.curves[k].points);
                }
                write_text(output, s.str(), out);
            } else {
                Scene scene;
                for (const auto& c : r.curves) scene.add(c.points);
                write_text(output, scene_text(scene, f), out);
            }
            return 0;
        }
        if (sf->parsed()) {
            if (!sf_file.empty()) {
                std::ifstream f(sf_file);
                if (!f) throw Error("cannot open " + sf_file);
                std::map<std::string, std::string> extra;
                read_surface_spec(f, spec, extra);
                if (extra.count("samples")) sf_opt.samples = static_cast<std::size_t>(real_value(extra["samples"]));
                if (extra.count("grid")) sf_opt.silhouette_grid = static_cast<std::size_t>(real_value(extra["grid"]));
                if (extra.count("window")) sf_opt.window = static_cast<std::size_t>(real_value(extra["window"]));
                if (extra.count("contact_tol")) sf_opt.contact_tol = real_value(extra["contact_tol"]);
                if (extra.count("hidden")) sf_hidden = extra["hidden"];
                if (extra.count("axes")) sf_no_axes = extra["axes"] == "0" || extra["axes"] == "false" || extra["axes"] == "no";
            }
            if (sf_hidden != "dashed" && sf_hidden != "omit") throw UsageError("hidden must be dashed or omit");
            sf_opt.hidden = sf_hidden == "omit" ? HiddenStyle::Omit : HiddenStyle::Dashed;
            sf_opt.axes = !sf_no_axes;
            Projection proj;
            proj.azimuth = degrees(real_value(spec.theta));
            proj.elevation = degrees(real_value(spec.phi));
            if (show_config) {
                config_line("x", spec.x);
                config_line("y", spec.y);
                config_line("z", spec.z);
                config_line("params", spec.params);
                config_line("u", spec.u);
                config_line("v", spec.v);
                config_line("wires_u", spec.wires_u);
                config_line("wires_v", spec.wires_v);
                config_line("theta", spec.theta);
                config_line("phi", spec.phi);
                config_line("grid", std::to_string(sf_opt.silhouette_grid));
                config_line("samples", std::to_string(sf_opt.samples));
                config_line("window", std::to_string(sf_opt.window));
                config_line("contact_tol", fmt6(sf_opt.contact_tol));
                config_line("hidden", sf_hidden);
                config_line("axes", sf_opt.axes ? "yes" : "no");
                config_line("format", output.resolved("tex"));
                return 0;
            }
            proj.validate();
            if (sf_opt.samples < 2 || sf_opt.silhouette_grid < 2) throw UsageError("samples and grid must be at least 2");
            const ParametricSurface s = make_surface(spec);
            WireSpec ws{real_list(spec.wires_u), real_list(spec.wires_v)};
            const SurfaceScene scene = render_surface_scene(s, proj, ws, {}, sf_opt);
            const std::string f = output.resolved("tex");
            write_text(output, scene_text(scene.scene, f), out);
            std::ostream& info = output.path.empty() ? err : out;
            info << "silhouettes " << scene.count(CurveRole::Silhouette) << ", boundaries "
                 << scene.count(CurveRole::Boundary) << ", wires "
                 << scene.count(CurveRole::WireU) + scene.count(CurveRole::WireV) << ", refined contacts "
                 << scene.refined_contacts << "\n";
            if (scene.warnings) err << "osplot: " << scene.warnings << " visibility tests did not converge\n";
            return 0;
        }
        if (cd->parsed()) {
            cd_opt.projection.azimuth = degrees(real_value(cd_theta));
            cd_opt.projection.elevation = degrees(real_value(cd_phi));
            cd_opt.wire_u = real_value(cd_u);
            if (show_config) {
                config_line("theta", cd_theta);
                config_line("phi", cd_phi);
                config_line("wire_u", fmt6(cd_opt.wire_u));
                config_line("grid", std::to_string(cd_opt.grid));
                config_line("samples", std::to_string(cd_opt.samples));
                config_line("window", std::to_string(cd_opt.window));
                config_line("tol", std::to_string(cd_opt.refine_tol));
                return 0;
            }
            cd_opt.projection.validate();
            const auto t0 = std::chrono::steady_clock::now();
            const ContactDemoResult r = contact_demo(cd_opt);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            char buf[512];
            std::snprintf(buf, sizeof buf,
                          "refined   [%.9f, %.9f]\nexact     [%.15f, %.15f]\nerror     %.3e\n"
                          "unrefined [%.9f, %.9f] error %.3e\ncluster   %zu vertices, spread %.6f\n"
                          "splines   %s\nelapsed   %.3f s\n",
                          r.refined.x, r.refined.y, r.exact.x, r.exact.y, r.error, r.unrefined.x, r.unrefined.y,
                          r.unrefined_error, r.cluster_size, r.cluster_spread, r.crossing ? "cross" : "do not cross",
                          secs);
            out << buf;
            return 0;
        }
    } catch (const UsageError& e) {
        err << "osplot: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "osplot: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace osplot::cli
