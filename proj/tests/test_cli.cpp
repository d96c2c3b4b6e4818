#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli.hpp"

namespace {

struct CliResult {
    int code;
    std::string out, err;
};

CliResult run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = osplot::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string temp_path(const char* name) { return testing::TempDir() + name; }

} // namespace

TEST(Cli, IntegrateSampledFunction) {
    const CliResult r = run({"integrate", "--fn", "x^2*sin(x)", "--sample-range", "-pi,pi", "--num", "50", "--interval",
                       "0,pi"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(std::stod(r.out), 5.869063, 5e-3);
}

TEST(Cli, NegativeValueAfterFlag) {
    const CliResult r = run({"integrate", "--fn", "x", "--sample-range", "-1,1", "--interval", "-1,0"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(std::stod(r.out), -0.5, 1e-9);
}

TEST(Cli, AreaRatio) {
    const CliResult r = run({"area", "--curve", "3*cos(t),2*sin(t)", "--range", "0,2*pi", "--num", "50", "--ratio", "6*pi"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(std::stod(r.out), 1.0, 1e-3);
}

TEST(Cli, ImplicitIntegrate) {
    const CliResult r = run({"implicit", "--fn", "8*x^2-4*sqrt(2)*x*y+y^2-3*x-6*sqrt(2)*y+2=0", "--xrange", "-2,2",
                       "--yrange", "-2,2.5", "--integrate-endpoints"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(std::stod(r.out), 1.698725, 5e-3);
}

TEST(Cli, SplineCsvFromPoints) {
    const std::string in = temp_path("osplot_pts.csv");
    std::ofstream(in) << "3,0\n0,2\n-3,0\n0,-2\n3,0\n";
    const CliResult r = run({"spline", "--points", in, "--method", "cr", "--format", "csv", "--per-segment", "10"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("2.943"), std::string::npos);
    std::remove(in.c_str());
}

TEST(Cli, SplineTexToFile) {
    const std::string out = temp_path("osplot_fig.tex");
    const CliResult r = run({"spline", "--fn", "x^2", "--range", "0,1", "--out", out});
    EXPECT_EQ(r.code, 0) << r.err;
    std::ifstream f(out);
    std::stringstream s;
    s << f.rdbuf();
    EXPECT_NE(s.str().find("\\polyline"), std::string::npos);
    std::remove(out.c_str());
}

TEST(Cli, Tangent) {
    const CliResult r = run({"tangent", "--fn", "x^2", "--range", "-1,1", "--num", "100", "--at", "0.5"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(std::stod(r.out), 1.0, 1e-3);
}

TEST(Cli, SurfaceDefault) {
    const std::string out = temp_path("osplot_surface.tex");
    const CliResult r = run({"surface", "--out", out});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("silhouettes 1"), std::string::npos);
    std::remove(out.c_str());
}

TEST(Cli, ContactDemo) {
    const CliResult r = run({"contact-demo"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("refined"), std::string::npos);
    EXPECT_NE(r.out.find("exact"), std::string::npos);
}

TEST(Cli, ShowConfig) {
    const CliResult r = run({"surface", "--show-config", "--theta", "45"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("theta = 45"), std::string::npos);
    EXPECT_NE(r.out.find("phi = 20"), std::string::npos);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"integrate", "--fn", "x", "--sample-range", "0,1"}).code, 2);
    EXPECT_EQ(run({"integrate", "--fn", "x", "--sample-range", "0,1", "--interval", "0,2"}).code, 1);
    EXPECT_EQ(run({"integrate", "--fn", "x+", "--sample-range", "0,1", "--interval", "0,1"}).code, 2);
    EXPECT_EQ(run({"spline", "--method", "bspline", "--fn", "x", "--range", "0,1"}).code, 2);
    EXPECT_EQ(run({"implicit", "--fn", "x^2+y^2+1", "--integrate-endpoints"}).code, 1);
    EXPECT_EQ(run({"--help"}).code, 0);
}
