#include "oracles.hpp"

#include <qbmor/benchmarks.hpp>
#include <qbmor/errors.hpp>
#include <qbmor/interpolation.hpp>
#include <qbmor/metrics.hpp>
#include <qbmor/projection.hpp>

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace qbmor;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("pointwise relative errors", "[metrics]") {
    RealMatrix y(2, 3), yr(2, 3);
    y << 2.0, 1.0, 0.0, 1.0, 1.0, 0.0;
    yr << 1.0, 1.0, 0.0, 0.9, 0.5, 0.0;
    const auto e = pointwise_relerr({0.0, 1.0, 2.0}, y, yr);
    REQUIRE(e.size() == 3);
    CHECK_THAT(e[0].relerr, WithinAbs(0.5, 1e-15));
    CHECK_THAT(e[1].relerr, WithinAbs(0.5, 1e-15));
    CHECK(e[2].relerr == 0.0);
    CHECK_FALSE(e[2].included);
    const auto same = pointwise_relerr({0.0, 1.0, 2.0}, y, y);
    for (const auto& p : same) CHECK(p.relerr == 0.0);
    CHECK_THROWS_AS(pointwise_relerr({0.0}, y, yr), DimensionMismatch);
}

TEST_CASE("two outputs take the larger relative error", "[metrics]") {
    RealMatrix y(2, 1), yr(2, 1);
    y << 1.0, 1.0;
    yr << 0.5, 0.9;
    CHECK_THAT(pointwise_relerr({0.0}, y, yr)[0].relerr, WithinAbs(0.5, 1e-15));
}

TEST_CASE("trajectory norms", "[metrics]") {
    RealMatrix y(1, 2), z = RealMatrix::Zero(1, 2);
    y << 1.0, 0.0;
    CHECK(relerr_L2(y, z) == 1.0);
    CHECK(relerr_Linf(y, z) == 1.0);
    CHECK(relerr_L2(y, y) == 0.0);
    CHECK_THROWS_AS(relerr_L2(z, y), ZeroReference);
    CHECK_THROWS_AS(relerr_Linf(z, y), ZeroReference);
    std::mt19937_64 rng(81);
    const RealMatrix a = oracle::random_real(rng, 2, 20).real(), b = oracle::random_real(rng, 2, 20).real();
    CHECK_THAT(relerr_L2(-3.5 * a, -3.5 * b), WithinRel(relerr_L2(a, b), 1e-14));
    CHECK_THAT(relerr_Linf(7.0 * a, 7.0 * b), WithinRel(relerr_Linf(a, b), 1e-14));
}

TEST_CASE("frequency errors of an identity projection vanish", "[metrics]") {
    const auto sys = build_heated_rod({20, 1.0});
    ReductionBasis b;
    b.V = Matrix::Identity(20, 20);
    b.W = b.V;
    const auto red = project(sys, b);
    const auto grid = log_grid(1e-2, 1e2, 9);
    CHECK(relerr_Hinf_1(sys, red.system, grid) <= 1e-12);
    CHECK(relerr_Hinf_2(sys, red.system, grid, grid) <= 1e-11);
    const auto fe = relerr_sweep_1(sys, red.system, {1.0});
    REQUIRE(fe.relerr.size() == 1);
    CHECK(fe.hinf() == fe.relerr[0]);
}

TEST_CASE("zero level-two transfer functions are flagged, not NaN", "[metrics]") {
    std::mt19937_64 rng(82);
    auto d = oracle::random_dense_first_order(rng, 6, 1, 1);
    d.H.setZero();
    d.N.setZero();
    const auto sys = oracle::to_first_order_preset(d);
    const auto grid = log_grid(0.1, 10.0, 4);
    const auto fe = relerr_sweep_2(sys, sys, grid, grid);
    for (double e : fe.relerr) CHECK_FALSE(std::isnan(e));
    CHECK(fe.hinf() == 0.0);
}

TEST_CASE("grid refinement never lowers the individual maxima", "[metrics][property]") {
    const auto sys = build_heated_rod({30, 1.0});
    const auto b = strategy_equi(sys, Method::SymInt, Sidedness::V, 12, {1e-2, 1e2});
    const auto red = project(sys, b);
    const auto coarse = log_grid(1e-2, 1e2, 5);
    const auto fine = log_grid(1e-2, 1e2, 9);  // contains the coarse grid
    const auto a = relerr_sweep_1(sys, red.system, coarse);
    const auto f = relerr_sweep_1(sys, red.system, fine);
    CHECK(f.max_numerator >= a.max_numerator);
    CHECK(f.max_denominator >= a.max_denominator);
}

TEST_CASE("interpolation points are local error minima", "[metrics]") {
    const auto sys = build_heated_rod({40, 1.0});
    const auto b = strategy_equi(sys, Method::SymInt, Sidedness::V, 12, {1e-2, 1e2});
    const auto red = project(sys, b);
    const double w0 = b.points_used.points[0].imag();
    const auto e = relerr_sweep_1(sys, red.system, {w0 / 3.0, w0, w0 * 3.0});
    CHECK(e.relerr[1] < e.relerr[0]);
    CHECK(e.relerr[1] < e.relerr[2]);
    CHECK(e.relerr[1] <= 1e-9);
}

TEST_CASE("table emission", "[metrics]") {
    std::ostringstream os;
    write_table(os, {});
    CHECK(os.str() == "method,relerr_L2,relerr_Linf,relerr_Hinf1,relerr_Hinf2\n");
    ErrorReport r{"POD(avg)", kInf, kInf, 1.5e-3, 0.25, false, "unstable"};
    ErrorReport s{"SymInt(V,equi)", 8.1604e-07, 1e-6, 2e-6, 3e-6, true, ""};
    std::ostringstream os2;
    write_table(os2, {r, s});
    CHECK(os2.str() ==
          "method,relerr_L2,relerr_Linf,relerr_Hinf1,relerr_Hinf2\n"
          "POD(avg),inf,inf,0.0015,0.25\n"
          "\"SymInt(V,equi)\",8.1604000000000005e-07,9.9999999999999995e-07,1.9999999999999999e-06,3.0000000000000001e-06\n");
    CHECK(format_short(8.1604e-07) == "8.1604e-07");
    CHECK(format_short(kInf) == "inf");
    CHECK(std::stod(format_full(0.1)) == 0.1);

    const auto dir = std::filesystem::temp_directory_path() / "qbmor_metrics_test";
    std::filesystem::create_directories(dir);
    std::vector<ErrorReport> ten(10, s);
    for (int i = 0; i < 10; ++i) ten[static_cast<std::size_t>(i)].method_tag = "m" + std::to_string(i);
    emit_table(ten, (dir / "t.csv").string());
    std::ifstream is(dir / "t.csv");
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(is, line)) lines.push_back(line);
    REQUIRE(lines.size() == 11);
    CHECK(lines[1].rfind("m0,", 0) == 0);
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"x\"") == "\"say \"\"x\"\"\"");
    CHECK(lines[10].rfind("m9,", 0) == 0);
    CHECK_THROWS_AS(emit_table(ten, "/nonexistent-dir/x.csv"), IOFailure);
}
