#include "oracles.hpp"

#include <qbmor/benchmarks.hpp>
#include <qbmor/errors.hpp>
#include <qbmor/transfer.hpp>

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <random>
#include <type_traits>

using namespace qbmor;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

StructuredQBSystem scalar_system() {
    SparseMatrix e(1, 1), a(1, 1), b(1, 1), c(1, 1), nn(1, 1), h(1, 1);
    e.insert(0, 0) = 1.0;
    a.insert(0, 0) = -1.0;
    b.insert(0, 0) = 1.0;
    c.insert(0, 0) = 1.0;
    nn.insert(0, 0) = 0.25;
    h.insert(0, 0) = 0.5;
    return preset_first_order(e, a, QuadraticOperator({h}), {nn}, b, c);
}

Scalar random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> re(0.0, 0.5), im(-3.0, 3.0);
    return {re(rng), im(rng)};
}

}  // namespace

TEST_CASE("scalar system frozen values", "[transfer]") {
    const auto sys = scalar_system();
    CHECK_THAT(sym_tf(1, sys, {Scalar(1.0)}).matrix(0, 0).real(), WithinRel(0.5, 1e-15));
    // 1/2 * 1/4 * (2*0.5/(2*3) + 0.25/2 + 0.25/3) = 9/192
    CHECK_THAT(sym_tf(2, sys, {Scalar(1.0), Scalar(2.0)}).matrix(0, 0).real(), WithinRel(9.0 / 192.0, 1e-14));
    // G_NB(1, 2) = 1/3 * 0.25 * 1/2
    CHECK_THAT(gen_tf(TFVariant::gen_NB, sys, {Scalar(1.0), Scalar(2.0)}).matrix(0, 0).real(),
               WithinRel(0.25 / 6.0, 1e-15));
    // G_HBB(1, 2, 3) = 1/4 * 0.5 * 1/3 * 1/2
    CHECK_THAT(gen_tf(TFVariant::gen_HBB, sys, {Scalar(1.0), Scalar(2.0), Scalar(3.0)}).matrix(0, 0).real(),
               WithinRel(0.5 / 24.0, 1e-15));
}

TEST_CASE("first-order preset matches dense formulas", "[transfer][oracle]") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 6; ++trial) {
        const auto d = oracle::random_dense_first_order(rng, 8 + trial, 1 + trial % 3, 1 + (trial + 1) % 3);
        const auto sys = oracle::to_first_order_preset(d);
        TransferFunctions tf(sys);
        const Scalar s1 = random_point(rng), s2 = random_point(rng), s3 = random_point(rng);
        CHECK(oracle::rel(d.G1(s1), tf.sym(1, {s1})) <= 1e-11);
        CHECK(oracle::rel(d.G2(s1, s2), tf.sym(2, {s1, s2})) <= 1e-11);
        CHECK(oracle::rel(d.G3(s1, s2, s3), tf.sym(3, {s1, s2, s3})) <= 1e-11);
        CHECK(oracle::rel(d.GB(s1), tf.gen(TFVariant::gen_B, {s1})) <= 1e-11);
        CHECK(oracle::rel(d.GNB(s1, s2), tf.gen(TFVariant::gen_NB, {s1, s2})) <= 1e-11);
        CHECK(oracle::rel(d.GNNB(s1, s2, s3), tf.gen(TFVariant::gen_NNB, {s1, s2, s3})) <= 1e-11);
        CHECK(oracle::rel(d.GHBB(s1, s2, s3), tf.gen(TFVariant::gen_HBB, {s1, s2, s3})) <= 1e-11);
    }
}

TEST_CASE("transfer function output shapes", "[transfer]") {
    std::mt19937_64 rng(32);
    const auto sys = oracle::random_first_order(rng, 7, 2, 3);
    TransferFunctions tf(sys);
    const Scalar s(0.1, 1.0);
    CHECK(tf.sym(1, {s}).cols() == 2);
    CHECK(tf.sym(2, {s, s}).cols() == 4);
    CHECK(tf.sym(3, {s, s, s}).cols() == 8);
    CHECK(tf.gen(TFVariant::gen_NB, {s, s}).cols() == 4);
    CHECK(tf.gen(TFVariant::gen_NNB, {s, s, s}).cols() == 8);
    CHECK(tf.gen(TFVariant::gen_HBB, {s, s, s}).cols() == 4);
    CHECK(tf.sym(1, {s}).rows() == 3);
    CHECK_THROWS_AS(tf.sym(2, {s}), DimensionMismatch);
    CHECK_THROWS(tf.sym(4, {s, s, s, s}));
}

TEST_CASE("symmetric transfer functions are permutation invariant", "[transfer][property]") {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 5; ++trial) {
        const auto sys = trial % 2 ? oracle::random_second_order(rng, 6, 2, 2) : oracle::random_time_delay(rng, 9, 2, 1);
        TransferFunctions tf(sys);
        const Scalar a = random_point(rng), b = random_point(rng), c = random_point(rng);
        CHECK(oracle::rel(tf.sym(2, {a, b}), tf.sym(2, {b, a})) <= 1e-13);
        std::array<Scalar, 3> pts{a, b, c};
        std::sort(pts.begin(), pts.end(), [](Scalar x, Scalar y) { return x.imag() < y.imag(); });
        const Matrix ref = tf.sym(3, {pts[0], pts[1], pts[2]});
        do {
            CHECK(oracle::rel(ref, tf.sym(3, {pts[0], pts[1], pts[2]})) <= 1e-13);
        } while (std::next_permutation(pts.begin(), pts.end(), [](Scalar x, Scalar y) { return x.imag() < y.imag(); }));
    }
}

TEST_CASE("second-order transfer functions equal companion realization", "[transfer][oracle]") {
    std::mt19937_64 rng(34);
    const auto sys = oracle::random_second_order(rng, 6, 2, 2);
    const auto comp = companion_embedding(sys);
    TransferFunctions a(sys), b(comp);
    const Scalar s1 = random_point(rng), s2 = random_point(rng), s3 = random_point(rng);
    CHECK(oracle::rel(a.sym(1, {s1}), b.sym(1, {s1})) <= 1e-9);
    CHECK(oracle::rel(a.sym(2, {s1, s2}), b.sym(2, {s1, s2})) <= 1e-9);
    CHECK(oracle::rel(a.sym(3, {s1, s2, s3}), b.sym(3, {s1, s2, s3})) <= 1e-9);
    for (auto v : {TFVariant::gen_B, TFVariant::gen_NB, TFVariant::gen_NNB, TFVariant::gen_HBB}) {
        FrequencyPoint pt{s1, s2, s3};
        pt.resize(static_cast<std::size_t>(arity(v)));
        CHECK(oracle::rel(a.gen(v, pt), b.gen(v, pt)) <= 1e-9);
    }
}

TEST_CASE("transfer functions cannot bind a temporary system", "[transfer]") {
    STATIC_CHECK_FALSE(std::is_constructible_v<TransferFunctions, StructuredQBSystem&&>);
    STATIC_CHECK(std::is_constructible_v<TransferFunctions, const StructuredQBSystem&>);
}

TEST_CASE("factorization cache and work counters", "[transfer]") {
    std::mt19937_64 rng(35);
    const auto sys = oracle::random_first_order(rng, 10, 1, 1);
    TransferFunctions tf(sys);
    const Scalar s(0.0, 1.0);
    (void)tf.psi1(s);
    (void)tf.psi1(s);
    CHECK(tf.factorizations() == 1);
    CHECK(tf.solves() == 2);
    TransferFunctions nocache(sys, false);
    (void)nocache.psi1(s);
    (void)nocache.psi1(s);
    CHECK(nocache.factorizations() == 2);
}

TEST_CASE("singular K(s) is reported with its argument", "[transfer]") {
    TodaConfig cfg;
    cfg.ell = 4;
    const auto sys = build_toda(cfg);
    TransferFunctions tf(sys);
    CHECK_THROWS_AS(tf.sym(1, {Scalar(0.0)}), SingularMatrix);
    bool flagged = false;
    for_each_level1(
        sys, {0.0, 1.0}, [](std::size_t, const Matrix&) {}, [&](std::size_t i) { flagged = flagged || i == 0; });
    CHECK(flagged);
}

TEST_CASE("sweeps agree with pointwise evaluation", "[transfer]") {
    std::mt19937_64 rng(36);
    const auto sys = oracle::random_first_order(rng, 12, 2, 2);
    const auto g1 = log_grid(1e-2, 1e2, 7);
    const auto g2 = log_grid(1e-1, 1e1, 5);
    REQUIRE(g1.size() == 7);
    CHECK_THAT(g1.front(), WithinRel(1e-2, 1e-14));
    CHECK_THAT(g1.back(), WithinRel(1e2, 1e-14));
    TransferFunctions tf(sys);
    const auto s1 = sweep_level1(sys, g1);
    for (std::size_t i = 0; i < g1.size(); ++i)
        CHECK_THAT(s1[i].value, WithinRel(spectral_norm(tf.sym(1, {Scalar(0.0, g1[i])})), 1e-12));
    const auto s2 = sweep_level2(sys, g1, g2);
    for (std::size_t i = 0; i < g1.size(); ++i)
        for (std::size_t j = 0; j < g2.size(); ++j)
            CHECK_THAT(s2.values(static_cast<Index>(i), static_cast<Index>(j)),
                       WithinRel(spectral_norm(tf.sym(2, {Scalar(0.0, g1[i]), Scalar(0.0, g2[j])})), 1e-12));
    // symmetric grid path
    std::size_t visited = 0;
    for_each_level2(sys, g2, g2, [&](std::size_t i, std::size_t j, const Matrix& g) {
        ++visited;
        CHECK(oracle::rel(tf.sym(2, {Scalar(0.0, g2[i]), Scalar(0.0, g2[j])}), g) <= 1e-12);
    });
    CHECK(visited == g2.size() * g2.size());
}
