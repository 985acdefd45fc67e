#include "oracles.hpp"

#include <qbmor/errors.hpp>
#include <qbmor/linalg.hpp>

#include <catch_amalgamated.hpp>

#include <random>

using namespace qbmor;
using Catch::Matchers::WithinAbs;

TEST_CASE("apply_quadratic matches the dense Kronecker product", "[linalg]") {
    std::mt19937_64 rng(11);
    for (Index n = 1; n <= 8; ++n) {
        const Matrix hd = oracle::random_complex(rng, n, n * n);
        const auto h = QuadraticOperator::from_dense(hd);
        const Matrix x = oracle::random_complex(rng, n, 2);
        const Matrix y = oracle::random_complex(rng, n, 3);
        const Matrix ref = hd * oracle::kron(x, y);
        CHECK(oracle::rel(ref, apply_quadratic(h, x, y)) <= 1e-12);
        const Vector xv = x.col(0), yv = y.col(1);
        CHECK(oracle::rel(hd * oracle::kron(xv, yv), apply_quadratic(h, xv, yv)) <= 1e-12);
    }
}

TEST_CASE("left-applied quadratic operator reproduces apply_quadratic", "[linalg]") {
    std::mt19937_64 rng(12);
    for (Index n = 1; n <= 6; ++n) {
        const auto h = QuadraticOperator::from_dense(oracle::random_complex(rng, n + 1, n * n));
        const Matrix x = oracle::random_complex(rng, n, 3);
        const Matrix y = oracle::random_complex(rng, n, 2);
        const SparseMatrix p = left_apply_quadratic(h, x);
        CHECK(p.rows() == n + 1);
        CHECK(p.cols() == 3 * n);
        CHECK(oracle::rel(apply_quadratic(h, x, y), apply_left_applied(p, n, y)) <= 1e-13);
    }
    const auto h = QuadraticOperator::from_dense(Matrix::Ones(2, 4));
    CHECK_THROWS_AS(left_apply_quadratic(h, Matrix::Ones(3, 1)), DimensionMismatch);
    CHECK_THROWS_AS(apply_left_applied(left_apply_quadratic(h, Matrix::Ones(2, 1)), 2, Matrix::Ones(3, 1)),
                    DimensionMismatch);
}

TEST_CASE("apply_quadratic small frozen example", "[linalg]") {
    // H = [1 2 3 4] on n = 2: H(x (x) y) = x1 y1 + 2 x1 y2 + 3 x2 y1 + 4 x2 y2
    Matrix hd(1, 4);
    hd << 1.0, 2.0, 3.0, 4.0;
    const auto h = QuadraticOperator::from_dense(hd);
    Vector x(2), y(2);
    x << 1.0, 2.0;
    y << 3.0, -1.0;
    const Vector out = apply_quadratic(h, x, y);
    CHECK_THAT(out(0).real(), WithinAbs(3.0 - 2.0 + 18.0 - 8.0, 1e-15));
    CHECK(QuadraticOperator::from_dense(hd).to_dense() == hd);
    CHECK_THROWS_AS(apply_quadratic(h, Vector(Vector::Zero(3)), y), DimensionMismatch);
}

TEST_CASE("compress_quadratic matches W^H H (V (x) V)", "[linalg]") {
    std::mt19937_64 rng(12);
    for (Index n = 2; n <= 6; ++n) {
        for (Index r = 1; r <= n; ++r) {
            const Matrix hd = oracle::random_complex(rng, n, n * n);
            const Matrix v = oracle::random_complex(rng, n, r);
            const Matrix w = oracle::random_complex(rng, n, r);
            const Matrix ref = w.adjoint() * hd * oracle::kron(v, v);
            const auto red = compress_quadratic(QuadraticOperator::from_dense(hd), w.adjoint(), v);
            CHECK(oracle::rel(ref, red.to_dense()) <= 1e-12);
        }
    }
}

TEST_CASE("compress_quadratic with sparse slices uses only touched rows", "[linalg]") {
    std::mt19937_64 rng(13);
    const Index n = 12;
    std::vector<SparseMatrix> slices;
    for (Index k = 0; k < n; ++k) {
        SparseMatrix s(n, n);
        s.insert(k, (k + 1) % n) = Scalar(0.5 + k, -0.25);
        slices.push_back(s);
    }
    const QuadraticOperator h(slices);
    const Matrix v = oracle::random_complex(rng, n, 4), w = oracle::random_complex(rng, n, 4);
    const Matrix ref = w.adjoint() * h.to_dense() * oracle::kron(v, v);
    CHECK(oracle::rel(ref, compress_quadratic(h, w.adjoint(), v).to_dense()) <= 1e-12);
}

TEST_CASE("LU factorization solves and reports singularity", "[linalg]") {
    std::mt19937_64 rng(14);
    const Matrix a = oracle::random_complex(rng, 7, 7) + 5.0 * oracle::eye(7);
    const Matrix b = oracle::random_complex(rng, 7, 2);
    const auto f = lu_factor(a);
    CHECK(oracle::rel(b, a * f.solve(b)) <= 1e-13);
    CHECK(oracle::rel(b, a.adjoint() * f.solve_adjoint(b)) <= 1e-13);

    // sparse path on a larger tridiagonal matrix
    const Index n = 300;
    SparseMatrix t(n, n);
    for (Index i = 0; i < n; ++i) {
        t.insert(i, i) = Scalar(4.0, 1.0);
        if (i > 0) t.insert(i, i - 1) = -1.0;
        if (i + 1 < n) t.insert(i, i + 1) = -1.0;
    }
    const auto fs = lu_factor(t);
    CHECK(fs.is_sparse());
    const Matrix rhs = oracle::random_complex(rng, n, 1);
    CHECK(oracle::rel(rhs, Matrix(t * fs.solve(rhs))) <= 1e-13);
    CHECK(oracle::rel(rhs, Matrix(SparseMatrix(t.adjoint()) * fs.solve_adjoint(rhs))) <= 1e-13);

    Matrix sing = Matrix::Zero(3, 3);
    sing(0, 0) = 1.0;
    CHECK_THROWS_AS(lu_factor(sing), SingularMatrix);
    SparseMatrix ssing(n, n);
    for (Index i = 0; i + 1 < n; ++i) ssing.insert(i, i) = 1.0;
    CHECK_THROWS_AS(lu_factor(ssing), SingularMatrix);
}

TEST_CASE("orthonormalize_tracked keeps order and drops dependent columns", "[linalg]") {
    std::mt19937_64 rng(15);
    Matrix x = oracle::random_complex(rng, 10, 5);
    x.col(2) = 2.0 * x.col(0) - x.col(1);
    const auto ob = orthonormalize_tracked(x);
    REQUIRE(ob.q.cols() == 4);
    CHECK(ob.kept == std::vector<Index>{0, 1, 3, 4});
    CHECK(orthonormality_defect(ob.q) <= 1e-13);
    // leading columns span the same space as the leading inputs
    const Matrix proj = ob.q.leftCols(2) * (ob.q.leftCols(2).adjoint() * x.leftCols(3));
    CHECK(oracle::rel(x.leftCols(3), proj) <= 1e-12);
}

TEST_CASE("truncated bases and rank checks", "[linalg]") {
    std::mt19937_64 rng(16);
    const Matrix x = oracle::random_real(rng, 20, 8);
    const Matrix u = truncated_svd_basis(x, 5);
    CHECK(u.cols() == 5);
    CHECK(orthonormality_defect(u) <= 1e-13);
    const Matrix q = pivoted_qr_basis(x, 6);
    CHECK(q.cols() == 6);
    CHECK(orthonormality_defect(q) <= 1e-13);
    const Matrix low = oracle::random_real(rng, 20, 2) * oracle::random_real(rng, 2, 8);
    CHECK_THROWS_AS(truncated_svd_basis(low, 3), RankTooSmall);
    CHECK_THROWS_AS(pivoted_qr_basis(low, 3), RankTooSmall);
}

TEST_CASE("realify splits real and imaginary parts", "[linalg]") {
    Matrix x(2, 1);
    x << Scalar(1.0, 2.0), Scalar(3.0, -4.0);
    const Matrix r = realify(x);
    REQUIRE(r.cols() == 2);
    CHECK(r(0, 0) == Scalar(1.0, 0.0));
    CHECK(r(1, 1) == Scalar(-4.0, 0.0));
}

TEST_CASE("spectral norm and relative error", "[linalg]") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 3.0;
    a(1, 1) = Scalar(0.0, -4.0);
    CHECK_THAT(spectral_norm(a), WithinAbs(4.0, 1e-14));
    Matrix b = a;
    b(0, 0) = 3.4;
    CHECK_THAT(relative_error(a, b), WithinAbs(0.1, 1e-14));
}
