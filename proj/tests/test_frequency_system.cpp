#include "oracles.hpp"

#include <qbmor/errors.hpp>
#include <qbmor/frequency.hpp>
#include <qbmor/system.hpp>
#include <qbmor/transfer.hpp>

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace qbmor;
using Catch::Matchers::WithinAbs;

TEST_CASE("frequency function values", "[frequency]") {
    const Scalar s(0.5, 2.0);
    CHECK(FrequencyFunction::constant()(s) == Scalar(1.0));
    CHECK(std::abs(FrequencyFunction::monomial(2)(s) - s * s) < 1e-15);
    CHECK(std::abs(FrequencyFunction::exp_decay(1.5)(s) - std::exp(-1.5 * s)) < 1e-15);
    const auto prod = FrequencyFunction::product({FrequencyFunction::monomial(1), FrequencyFunction::exp_decay(0.5)});
    CHECK(std::abs(prod(s) - s * std::exp(-0.5 * s)) < 1e-15);
    CHECK(FrequencyFunction::monomial(0) == FrequencyFunction::constant());
    CHECK_THROWS_AS(FrequencyFunction::exp_decay(-1.0), NegativeDelay);
}

TEST_CASE("frequency function tags round-trip", "[frequency]") {
    const std::vector<FrequencyFunction> fs{
        FrequencyFunction::constant(), FrequencyFunction::monomial(3), FrequencyFunction::exp_decay(0.1),
        FrequencyFunction::product({FrequencyFunction::monomial(1),
                                    FrequencyFunction::product({FrequencyFunction::exp_decay(2.0)})})};
    for (const auto& f : fs) {
        const auto g = FrequencyFunction::parse(f.tag());
        CHECK(g == f);
        CHECK(std::abs(g(Scalar(0.3, 1.1)) - f(Scalar(0.3, 1.1))) == 0.0);
    }
    CHECK(FrequencyFunction::exp_decay(0.1).tag() == "exp(-0.10000000000000001*s)");
    CHECK_THROWS_AS(FrequencyFunction::parse("sin(s)"), IOFailure);
}

TEST_CASE("matrix function evaluation and adjoint application", "[frequency]") {
    std::mt19937_64 rng(21);
    const Matrix k0 = oracle::random_complex(rng, 4, 4), k1 = oracle::random_complex(rng, 4, 4);
    MatrixFunction f(4, 4);
    f.add(FrequencyFunction::constant(), SparseMatrix(k0.sparseView())).add(FrequencyFunction::exp_decay(0.7), SparseMatrix(k1.sparseView()));
    const Scalar s(0.2, 3.0);
    const Matrix ref = k0 + std::exp(-0.7 * s) * k1;
    CHECK(oracle::rel(ref, f.eval(s)) <= 1e-15);
    const Matrix x = oracle::random_complex(rng, 4, 2);
    CHECK(oracle::rel(ref * x, f.apply(s, x)) <= 1e-14);
    CHECK(oracle::rel(ref.adjoint() * x, f.apply_adjoint(s, x)) <= 1e-14);
    CHECK_THROWS_AS(f.add(FrequencyFunction::constant(), SparseMatrix(3, 4)), DimensionMismatch);
}

TEST_CASE("first-order preset evaluates sE - A", "[system]") {
    std::mt19937_64 rng(22);
    const auto d = oracle::random_dense_first_order(rng, 6, 2, 3);
    const auto sys = oracle::to_first_order_preset(d);
    const Scalar s(0.1, 1.7);
    CHECK(oracle::rel(s * d.E - d.A, sys.eval_K(s)) <= 1e-15);
    CHECK(oracle::rel(d.B, sys.eval_B(s)) == 0.0);
    CHECK(oracle::rel(d.C, sys.eval_C(s)) == 0.0);
    CHECK(oracle::rel(d.H, sys.eval_H(s, s).to_dense()) <= 1e-15);
    const Matrix x = oracle::random_complex(rng, 6, 3);
    CHECK(oracle::rel(d.N * oracle::kron(oracle::eye(2), x), sys.apply_N(s, x)) <= 1e-14);
}

TEST_CASE("second-order preset coefficients and companion embedding", "[system]") {
    std::mt19937_64 rng(23);
    const auto sys = oracle::random_second_order(rng, 5, 2, 2);
    const auto mats = second_order_matrices(sys);
    const Scalar s(0.0, 0.8);
    const Matrix kref = s * s * Matrix(mats.mass) + s * Matrix(mats.damping) + Matrix(mats.stiffness);
    CHECK(oracle::rel(kref, sys.eval_K(s)) <= 1e-15);
    CHECK(oracle::rel(Matrix(mats.cp) + s * Matrix(mats.cv), sys.eval_C(s)) <= 1e-15);

    const auto comp = companion_embedding(sys);
    CHECK(comp.structure == Structure::first_order);
    CHECK(comp.n == 10);
    // level-1 transfer functions coincide
    const Matrix g = sym_tf(1, sys, {s}).matrix;
    const Matrix gc = sym_tf(1, comp, {s}).matrix;
    CHECK(oracle::rel(g, gc) <= 1e-12);
}

TEST_CASE("time-delay preset carries exponential terms", "[system]") {
    const Index n = 3;
    SparseMatrix e(n, n), a(n, n), ad(n, n);
    for (Index i = 0; i < n; ++i) {
        e.insert(i, i) = 1.0;
        a.insert(i, i) = -2.0;
        ad.insert(i, i) = 0.5;
    }
    SparseMatrix b(n, 1), c(1, n);
    b.insert(0, 0) = 1.0;
    c.insert(0, n - 1) = 1.0;
    const auto sys = preset_time_delay(e, {a, ad}, {0.0, 1.25}, QuadraticOperator::zero(n), {SparseMatrix(n, n)}, b, c);
    const Scalar s(0.0, 2.0);
    const Matrix ref = s * oracle::eye(n) + 2.0 * oracle::eye(n) - 0.5 * std::exp(-1.25 * s) * oracle::eye(n);
    CHECK(oracle::rel(ref, sys.eval_K(s)) <= 1e-15);
    const auto fo = first_order_matrices(sys);
    REQUIRE(fo.tau.size() == 1);
    CHECK(fo.tau[0] == 1.25);
    CHECK(Matrix(fo.a).real().isApprox(Eigen::MatrixXd(-2.0 * Eigen::MatrixXd::Identity(n, n))));
    CHECK_THROWS_AS(preset_time_delay(e, {a, ad}, {0.0, -1.0}, QuadraticOperator::zero(n), {SparseMatrix(n, n)}, b, c),
                    NegativeDelay);
}

TEST_CASE("system validation rejects inconsistent shapes", "[system]") {
    SparseMatrix e(3, 3), a(3, 3), b(3, 1), c(1, 2);
    e.setIdentity();
    CHECK_THROWS_AS(preset_first_order(e, a, QuadraticOperator::zero(3), {SparseMatrix(3, 3)}, b, c), DimensionMismatch);
    SparseMatrix c3(1, 3);
    CHECK_THROWS_AS(preset_first_order(e, a, QuadraticOperator::zero(2), {SparseMatrix(3, 3)}, b, c3), DimensionMismatch);
    CHECK_THROWS_AS(preset_first_order(e, a, QuadraticOperator::zero(3), {}, b, c3), DimensionMismatch);
}
