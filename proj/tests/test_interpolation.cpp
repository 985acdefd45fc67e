#include "oracles.hpp"

#include <qbmor/benchmarks.hpp>
#include <qbmor/errors.hpp>
#include <qbmor/interpolation.hpp>
#include <qbmor/projection.hpp>

#include <catch_amalgamated.hpp>

#include <random>

using namespace qbmor;
using Catch::Matchers::WithinRel;

namespace {

Scalar random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> re(0.05, 0.5), im(-2.0, 2.0);
    return {re(rng), im(rng)};
}

/// Largest relative condition error after projection.
double worst(const StructuredQBSystem& sys, const ReductionBasis& b) {
    auto red = project(sys, b);
    verify(sys, red);
    double w = 0.0;
    for (const auto& c : red.ledger) w = std::max(w, c.relative_error);
    return w;
}

StructuredQBSystem any_system(std::mt19937_64& rng, int kind, Index n, Index m, Index p) {
    switch (kind % 3) {
        case 0: return oracle::random_first_order(rng, n, m, p);
        case 1: return oracle::random_second_order(rng, n, m, p);
        default: return oracle::random_time_delay(rng, n, m, p);
    }
}

}  // namespace

TEST_CASE("theorem bases interpolate their conditions", "[interpolation][property]") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 6; ++trial) {
        const auto sys = any_system(rng, trial, 30, 1 + trial % 2, 1 + (trial / 2) % 2);
        const Scalar s1 = random_point(rng), s2 = random_point(rng), s3 = random_point(rng);
        const auto bv = basis_sym_V(sys, s1, s2);
        CHECK(bv.guaranteed_conditions.size() == 3);
        CHECK(worst(sys, bv) <= 1e-9);
        const auto bvw = basis_sym_VW(sys, s1, s2);
        CHECK(bvw.guaranteed_conditions.size() == 4);
        CHECK(bvw.V.cols() == bvw.W.cols());
        CHECK(worst(sys, bvw) <= 1e-9);
        for (auto part : {CoincidentPart::a, CoincidentPart::b, CoincidentPart::c})
            CHECK(worst(sys, basis_coincident(sys, s1, part)) <= 1e-8);
        CHECK(worst(sys, basis_gen_V(sys, s1, s2, s3, true)) <= 1e-9);
        CHECK(worst(sys, basis_gen_V(sys, s1, s2, s3, false)) <= 1e-9);
        CHECK(worst(sys, basis_gen_VW(sys, s1, s2)) <= 1e-9);
    }
}

TEST_CASE("one-sided bases work with an arbitrary full-rank W", "[interpolation][property]") {
    std::mt19937_64 rng(42);
    const auto sys = oracle::random_first_order(rng, 25, 2, 2);
    const Scalar s1 = random_point(rng), s2 = random_point(rng), s3 = random_point(rng);
    for (auto b : {basis_sym_V(sys, s1, s2), basis_gen_V(sys, s1, s2, s3, true),
                   basis_coincident(sys, s1, CoincidentPart::a)}) {
        b.W = oracle::random_real(rng, sys.n, b.V.cols());
        CHECK(worst(sys, b) <= 1e-8);
    }
}

TEST_CASE("enlarging V keeps the guaranteed conditions", "[interpolation][property]") {
    std::mt19937_64 rng(43);
    const auto sys = oracle::random_second_order(rng, 20, 1, 2);
    auto b = basis_sym_V(sys, random_point(rng), random_point(rng));
    Matrix extra(sys.n, b.V.cols() + 3);
    extra << b.V, oracle::random_complex(rng, sys.n, 3);
    b.V = orthonormalize(extra);
    b.W = b.V;
    CHECK(worst(sys, b) <= 1e-8);
}

TEST_CASE("theorem bases without quadratic and bilinear terms", "[interpolation]") {
    std::mt19937_64 rng(44);
    auto d = oracle::random_dense_first_order(rng, 12, 1, 1);
    d.H.setZero();
    d.N.setZero();
    const auto sys = oracle::to_first_order_preset(d);
    const Scalar s1(0.1, 1.0), s2(0.2, -0.5);
    // V_2 vanishes and is dropped: two linear solves only
    CHECK(basis_sym_V(sys, s1, s2).V.cols() == 2);
    CHECK(basis_coincident(sys, s1, CoincidentPart::a).V.cols() == 1);
    // SISO: one column on each side for part (b) and for the generalized two-sided basis
    const auto bb = basis_coincident(sys, s1, CoincidentPart::b);
    CHECK(bb.V.cols() == 1);
    CHECK(worst(sys, bb) <= 1e-9);
    CHECK(basis_gen_VW(sys, s1, s1).V.cols() == 1);
}

TEST_CASE("coincident generalized points drop the repeated block", "[interpolation]") {
    std::mt19937_64 rng(45);
    const auto sys = oracle::random_first_order(rng, 15, 1, 1);
    const Scalar s(0.1, 0.7);
    const auto b = basis_gen_V(sys, s, s, s, true);
    CHECK(b.V.cols() == 4);
    CHECK(worst(sys, b) <= 1e-9);
}

TEST_CASE("log-center interpolation points", "[interpolation]") {
    const auto pts = log_center_points(1e-2, 1e2, 2);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].real() == 0.0);
    CHECK_THAT(pts[0].imag(), WithinRel(0.1, 1e-14));
    CHECK_THAT(pts[1].imag(), WithinRel(10.0, 1e-14));
    const auto ex = extra_points(1e-2, 1e2, 2, 3);
    REQUIRE(ex.size() == 3);
    // 4 sub-intervals: centers 10^-1.5, 10^-0.5, 10^0.5, 10^1.5, middle ones first
    CHECK_THAT(ex[0].imag(), WithinRel(std::pow(10.0, -0.5), 1e-13));
    CHECK_THAT(ex[1].imag(), WithinRel(std::pow(10.0, 0.5), 1e-13));
    CHECK_THAT(ex[2].imag(), WithinRel(std::pow(10.0, -1.5), 1e-13));
    CHECK_THROWS(log_center_points(1.0, 0.5, 3));
}

TEST_CASE("equi strategy on the heated rod", "[interpolation][strategy]") {
    const auto sys = build_heated_rod({50, 1.0});
    for (auto method : {Method::SymInt, Method::GenInt}) {
        for (auto side : {Sidedness::V, Sidedness::VW}) {
            const auto b = strategy_equi(sys, method, side, 24, {1e-3, 1e3});
            CHECK(b.V.cols() == 24);
            CHECK(b.W.cols() == 24);
            CHECK(b.V.imag().isZero(0.0));
            CHECK(b.W.imag().isZero(0.0));
            CHECK(orthonormality_defect(b.V) <= 1e-12);
            CHECK(b.method_tag == method_tag(method, side, false));
            CHECK_FALSE(b.guaranteed_conditions.empty());
            auto red = project(sys, b);
            verify(sys, red);
            CHECK(red.all_pass());
            // reduced matrices are real
            CHECK(red.system.K.eval(Scalar(0.0, 0.0)).imag().isZero(0.0));
        }
    }
}

TEST_CASE("equi strategy truncating inside a point", "[interpolation][strategy]") {
    const auto sys = build_heated_rod({50, 1.0});
    // one point contributes 12 real columns; r = 8 keeps only part of it
    const auto b = strategy_equi(sys, Method::SymInt, Sidedness::V, 8, {1e-3, 1e3});
    CHECK(b.V.cols() == 8);
    auto red = project(sys, b);
    verify(sys, red);
    CHECK(red.all_pass());
    CHECK_THROWS_AS(strategy_equi(sys, Method::SymInt, Sidedness::V, 3, {1e-3, 1e3}), TargetOrderUnreachable);
    CHECK_THROWS_AS(strategy_equi(sys, Method::SymInt, Sidedness::V, 60, {1e-3, 1e3}), TargetOrderUnreachable);
}

TEST_CASE("real-ified basis spans the conjugate-closed complex space", "[interpolation][property]") {
    std::mt19937_64 rng(46);
    const Matrix x = oracle::random_complex(rng, 20, 3);
    Matrix both(20, 6);
    both << x, x.conjugate();
    const Matrix qc = orthonormalize(both);
    const Matrix qr = orthonormalize(realify(x));
    CHECK((qc * qc.adjoint() - qr * qr.adjoint()).norm() <= 1e-12);
}

TEST_CASE("avg strategy compresses to exactly r columns", "[interpolation][strategy]") {
    const auto sys = build_heated_rod({50, 1.0});
    for (auto method : {Method::SymInt, Method::GenInt}) {
        for (auto comp : {Compression::pivoted_qr, Compression::svd}) {
            const auto b = strategy_avg(sys, method, Sidedness::VW, 16, {1e-3, 1e3}, 6, comp);
            CHECK(b.V.cols() == 16);
            CHECK(b.W.cols() == 16);
            CHECK(b.guaranteed_conditions.empty());
            CHECK(b.method_tag == method_tag(method, Sidedness::VW, true));
            CHECK(orthonormality_defect(b.W) <= 1e-12);
        }
    }
    CHECK_THROWS_AS(strategy_avg(sys, Method::SymInt, Sidedness::V, 40, {1e-3, 1e3}, 1), TargetOrderUnreachable);
}

TEST_CASE("avg with the exact equi sampling spans the equi space", "[interpolation][strategy]") {
    const auto sys = build_heated_rod({40, 1.0});
    // two points of 12 real columns each give r = 24 without truncation
    const auto be = strategy_equi(sys, Method::SymInt, Sidedness::V, 24, {1e-2, 1e2});
    const auto ba = strategy_avg(sys, Method::SymInt, Sidedness::V, 24, {1e-2, 1e2}, 2);
    const Eigen::JacobiSVD<Matrix> cosines(be.V.adjoint() * ba.V);
    CHECK(cosines.singularValues().minCoeff() >= 1.0 - 1e-10);
    ReductionBasis shared = ba;
    shared.guaranteed_conditions = be.guaranteed_conditions;
    auto red = project(sys, shared);
    verify(sys, red);
    CHECK(red.all_pass());
}

TEST_CASE("avg W sampling grows until it reaches r columns", "[interpolation][strategy]") {
    TodaConfig cfg;
    cfg.ell = 20;
    const auto sys = build_toda(cfg);
    const auto b = strategy_avg(sys, Method::GenInt, Sidedness::VW, 12, {1e-2, 1e1}, 4);
    CHECK(b.W.cols() == 12);
    CHECK(b.points_used.points.size() >= 4 + 6);
    CHECK(orthonormality_defect(b.W) <= 1e-12);
}
