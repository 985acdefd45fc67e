#pragma once

// Dense/sparse complex linear algebra kernels shared by every module:
// factorized solves, Kronecker-structured quadratic operators, and the
// orthogonalization / compression routines used to build projection bases.

#include <qbmor/errors.hpp>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <utility>
#include <vector>

namespace qbmor {

using Scalar = std::complex<double>;
using Index = Eigen::Index;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<Scalar, Eigen::ColMajor>;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

struct Shape {
    Index rows = 0;
    Index cols = 0;
    friend bool operator==(const Shape&, const Shape&) = default;
};

/// Shape of a Kronecker product.
[[nodiscard]] constexpr Shape kron_dims(Shape a, Shape b) noexcept {
    return {a.rows * b.rows, a.cols * b.cols};
}

[[nodiscard]] inline double max_abs(const Matrix& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

[[nodiscard]] inline double max_abs(const SparseMatrix& a) {
    double m = 0.0;
    for (Index k = 0; k < a.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
}

[[nodiscard]] inline bool all_finite(const Matrix& a) { return a.allFinite(); }

[[nodiscard]] inline SparseMatrix to_sparse(const Matrix& a) { return a.sparseView(); }

[[nodiscard]] inline SparseMatrix to_sparse(const RealMatrix& a) {
    return Matrix(a.cast<Scalar>()).sparseView();
}

/// Relative threshold below which an LU pivot counts as zero.
inline constexpr double kPivotTolerance = 1e-13;

namespace detail {

class PivotSparseLU : public Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> {
public:
    [[nodiscard]] double min_abs_pivot() const {
        double m = std::numeric_limits<double>::infinity();
        for (Index j = 0; j < this->cols(); ++j) {
            double d = 0.0;
            for (SCMatrix::InnerIterator it(this->m_Lstore, j); it; ++it) {
                if (it.index() == j) {
                    d = std::abs(it.value());
                    break;
                }
            }
            m = std::min(m, d);
        }
        return m;
    }
};

inline bool prefer_dense(const SparseMatrix& a) {
    const double n = static_cast<double>(a.rows());
    return a.rows() <= 100 || static_cast<double>(a.nonZeros()) > 0.1 * n * n;
}

}  // namespace detail

/// LU factorization with partial pivoting. Small or dense inputs use a dense
/// factorization, large sparse inputs a supernodal sparse LU. Both paths
/// reject matrices with |pivot| < 1e-13 * max|A|.
class LuFactorization {
public:
    LuFactorization() = default;

    [[nodiscard]] static LuFactorization factor(const Matrix& a) {
        if (a.rows() != a.cols()) throw DimensionMismatch("lu_factor: matrix is not square");
        if (!a.allFinite()) throw SingularMatrix("lu_factor: non-finite entries");
        LuFactorization f;
        f.n_ = a.rows();
        auto lu = std::make_shared<Eigen::PartialPivLU<Matrix>>(a);
        const double scale = max_abs(a);
        const auto& u = lu->matrixLU();
        double min_pivot = std::numeric_limits<double>::infinity();
        for (Index i = 0; i < f.n_; ++i) min_pivot = std::min(min_pivot, std::abs(u(i, i)));
        if (f.n_ > 0 && !(min_pivot >= kPivotTolerance * scale) ) throw SingularMatrix("lu_factor: singular matrix");
        if (f.n_ > 0 && scale == 0.0) throw SingularMatrix("lu_factor: zero matrix");
        f.dense_ = std::move(lu);
        return f;
    }

    [[nodiscard]] static LuFactorization factor(const SparseMatrix& a) {
        if (a.rows() != a.cols()) throw DimensionMismatch("lu_factor: matrix is not square");
        if (detail::prefer_dense(a)) return factor(Matrix(a));
        LuFactorization f;
        f.n_ = a.rows();
        auto lu = std::make_shared<detail::PivotSparseLU>();
        SparseMatrix compressed = a;
        compressed.makeCompressed();
        lu->compute(compressed);
        if (lu->info() != Eigen::Success) throw SingularMatrix("lu_factor: sparse factorization failed");
        const double scale = max_abs(compressed);
        if (!(lu->min_abs_pivot() >= kPivotTolerance * scale)) throw SingularMatrix("lu_factor: singular matrix");
        f.sparse_ = std::move(lu);
        return f;
    }

    [[nodiscard]] Index rows() const noexcept { return n_; }
    [[nodiscard]] bool is_sparse() const noexcept { return static_cast<bool>(sparse_); }

    /// X with A X = B.
    [[nodiscard]] Matrix solve(const Matrix& b) const {
        check(b);
        if (dense_) return dense_->solve(b);
        Matrix x = sparse_->solve(b);
        return x;
    }

    /// X with A^H X = B.
    [[nodiscard]] Matrix solve_adjoint(const Matrix& b) const {
        check(b);
        if (dense_) return dense_->adjoint().solve(b);
        Matrix x(b.rows(), b.cols());
        for (Index j = 0; j < b.cols(); ++j) x.col(j) = sparse_->adjoint().solve(Vector(b.col(j)));
        return x;
    }

private:
    void check(const Matrix& b) const {
        if (!dense_ && !sparse_) throw Error("LuFactorization: not initialized");
        if (b.rows() != n_) throw DimensionMismatch("solve: right-hand side has wrong row count");
    }

    Index n_ = 0;
    std::shared_ptr<const Eigen::PartialPivLU<Matrix>> dense_;
    std::shared_ptr<detail::PivotSparseLU> sparse_;
};

[[nodiscard]] inline LuFactorization lu_factor(const Matrix& a) { return LuFactorization::factor(a); }
[[nodiscard]] inline LuFactorization lu_factor(const SparseMatrix& a) { return LuFactorization::factor(a); }
[[nodiscard]] inline Matrix solve(const LuFactorization& f, const Matrix& b) { return f.solve(b); }

/// Linear map H : C^{n^2} -> C^n stored as n column slices of size n x n,
/// so that H (x (x) y) = sum_j x_j * (slice_j * y). Slices are sparse, which
/// doubles as the sparsity mask.
class QuadraticOperator {
public:
    QuadraticOperator() = default;

    explicit QuadraticOperator(std::vector<SparseMatrix> slices) : slices_(std::move(slices)) {
        n_ = static_cast<Index>(slices_.size());
        rows_ = n_ == 0 ? 0 : slices_.front().rows();
        for (auto& s : slices_) {
            if (s.cols() != n_ || s.rows() != rows_)
                throw DimensionMismatch("QuadraticOperator: slice shape must be rows x n with n slices");
            s.makeCompressed();
        }
        for (Index k = 0; k < n_; ++k) {
            const auto& s = slices_[static_cast<std::size_t>(k)];
            for (Index c = 0; c < s.outerSize(); ++c)
                for (SparseMatrix::InnerIterator it(s, c); it; ++it) entries_.push_back({it.row(), k, c, it.value()});
        }
    }

    /// One stored nonzero: slice k, entry (row, col).
    struct Entry {
        Index row;
        Index k;
        Index col;
        Scalar value;
    };

    [[nodiscard]] static QuadraticOperator zero(Index n) { return zero(n, n); }

    [[nodiscard]] static QuadraticOperator zero(Index rows, Index n) {
        return QuadraticOperator(std::vector<SparseMatrix>(static_cast<std::size_t>(n), SparseMatrix(rows, n)));
    }

    /// From the explicit rows x n^2 matrix.
    [[nodiscard]] static QuadraticOperator from_dense(const Matrix& h) {
        const auto n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(h.cols()))));
        if (n * n != h.cols()) throw DimensionMismatch("QuadraticOperator: column count is not a square");
        std::vector<SparseMatrix> slices;
        slices.reserve(static_cast<std::size_t>(n));
        for (Index j = 0; j < n; ++j) slices.push_back(Matrix(h.middleCols(j * n, n)).sparseView());
        return QuadraticOperator(std::move(slices));
    }

    [[nodiscard]] Matrix to_dense() const {
        Matrix h = Matrix::Zero(rows_, n_ * n_);
        for (Index j = 0; j < n_; ++j) h.middleCols(j * n_, n_) = Matrix(slices_[static_cast<std::size_t>(j)]);
        return h;
    }

    [[nodiscard]] Index n() const noexcept { return n_; }
    [[nodiscard]] Index rows() const noexcept { return rows_; }
    [[nodiscard]] const std::vector<SparseMatrix>& slices() const noexcept { return slices_; }
    [[nodiscard]] const SparseMatrix& slice(Index j) const { return slices_.at(static_cast<std::size_t>(j)); }

    [[nodiscard]] const std::vector<Entry>& entries() const noexcept { return entries_; }
    [[nodiscard]] Index non_zeros() const { return static_cast<Index>(entries_.size()); }

    [[nodiscard]] bool is_zero() const { return non_zeros() == 0; }

    [[nodiscard]] QuadraticOperator scaled(Scalar alpha) const {
        std::vector<SparseMatrix> out;
        out.reserve(slices_.size());
        for (const auto& s : slices_) out.push_back(alpha * s);
        return QuadraticOperator(std::move(out));
    }

    /// this + alpha * other (same shape).
    [[nodiscard]] QuadraticOperator plus(const QuadraticOperator& other, Scalar alpha = 1.0) const {
        if (other.n_ != n_ || other.rows_ != rows_) throw DimensionMismatch("QuadraticOperator::plus: shape mismatch");
        std::vector<SparseMatrix> out;
        out.reserve(slices_.size());
        for (std::size_t j = 0; j < slices_.size(); ++j) out.push_back(slices_[j] + alpha * other.slices_[j]);
        return QuadraticOperator(std::move(out));
    }

private:
    Index n_ = 0;
    Index rows_ = 0;
    std::vector<SparseMatrix> slices_;
    std::vector<Entry> entries_;
};

/// H (x (x) y) without forming the Kronecker product.
[[nodiscard]] inline Vector apply_quadratic(const QuadraticOperator& h, const Vector& x, const Vector& y) {
    if (x.size() != h.n() || y.size() != h.n()) throw DimensionMismatch("apply_quadratic: vector length != n");
    Vector out = Vector::Zero(h.rows());
    for (const auto& e : h.entries()) out(e.row) += x(e.k) * e.value * y(e.col);
    return out;
}

/// H (X (x) Y) for blocks X (n x a), Y (n x b); column i*b + j of the result
/// is H (x_i (x) y_j).
[[nodiscard]] inline Matrix apply_quadratic(const QuadraticOperator& h, const Matrix& x, const Matrix& y) {
    if (x.rows() != h.n() || y.rows() != h.n()) throw DimensionMismatch("apply_quadratic: block row count != n");
    const Index a = x.cols();
    const Index b = y.cols();
    Matrix out = Matrix::Zero(h.rows(), a * b);
    for (const auto& e : h.entries()) {
        for (Index i = 0; i < a; ++i) {
            const Scalar w = x(e.k, i) * e.value;
            if (w == Scalar(0)) continue;
            for (Index j = 0; j < b; ++j) out(e.row, i * b + j) += w * y(e.col, j);
        }
    }
    return out;
}

/// [H (x_1 (x) I), ..., H (x_a (x) I)] for the columns of X, as one rows x (a n)
/// sparse matrix.
[[nodiscard]] inline SparseMatrix left_apply_quadratic(const QuadraticOperator& h, const Matrix& x) {
    if (x.rows() != h.n()) throw DimensionMismatch("left_apply_quadratic: block row count != n");
    const Index n = h.n();
    std::vector<Eigen::Triplet<Scalar>> trips;
    trips.reserve(h.entries().size() * static_cast<std::size_t>(x.cols()));
    for (const auto& e : h.entries())
        for (Index i = 0; i < x.cols(); ++i) {
            const Scalar w = x(e.k, i) * e.value;
            if (w != Scalar(0)) trips.emplace_back(e.row, i * n + e.col, w);
        }
    SparseMatrix out(h.rows(), x.cols() * n);
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

/// H (X (x) Y) from P = left_apply_quadratic(H, X), same column order as
/// apply_quadratic.
[[nodiscard]] inline Matrix apply_left_applied(const SparseMatrix& p, Index n, const Matrix& y) {
    if (y.rows() != n || p.cols() % n != 0) throw DimensionMismatch("apply_left_applied: shapes do not match");
    const Index a = p.cols() / n;
    const Index b = y.cols();
    Matrix out(p.rows(), a * b);
    for (Index i = 0; i < a; ++i) out.middleCols(i * b, b).noalias() = p.middleCols(i * n, n) * y;
    return out;
}

/// Wt H (V (x) V) as an operator of order r, slice j = sum_k V(k, j) * (Wt slice_k V).
[[nodiscard]] inline QuadraticOperator compress_quadratic(const QuadraticOperator& h, const Matrix& wt, const Matrix& v) {
    if (wt.cols() != h.rows() || v.rows() != h.n())
        throw DimensionMismatch("compress_quadratic: basis shapes do not match the operator");
    const Index r_out = wt.rows();
    const Index r = v.cols();
    std::vector<Matrix> reduced(static_cast<std::size_t>(r), Matrix::Zero(r_out, r));
    std::vector<Index> rows;
    for (Index k = 0; k < h.n(); ++k) {
        const auto& s = h.slice(k);
        if (s.nonZeros() == 0) continue;
        // restrict Wt to the rows the slice touches
        rows.clear();
        for (Index c = 0; c < s.outerSize(); ++c)
            for (SparseMatrix::InnerIterator it(s, c); it; ++it) rows.push_back(it.row());
        std::sort(rows.begin(), rows.end());
        rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
        const Matrix sv = s * v;
        Matrix t;
        if (static_cast<Index>(rows.size()) * 2 < h.rows()) {
            Matrix wsub(r_out, static_cast<Index>(rows.size()));
            Matrix svsub(static_cast<Index>(rows.size()), r);
            for (std::size_t i = 0; i < rows.size(); ++i) {
                wsub.col(static_cast<Index>(i)) = wt.col(rows[i]);
                svsub.row(static_cast<Index>(i)) = sv.row(rows[i]);
            }
            t = wsub * svsub;
        } else {
            t = wt * sv;
        }
        for (Index j = 0; j < r; ++j) {
            const Scalar c = v(k, j);
            if (c != Scalar(0)) reduced[static_cast<std::size_t>(j)].noalias() += c * t;
        }
    }
    std::vector<SparseMatrix> slices;
    slices.reserve(reduced.size());
    for (const auto& m : reduced) slices.push_back(m.sparseView(1.0, 0.0));
    return QuadraticOperator(std::move(slices));
}

/// Result of an order-preserving orthonormalization: the basis and which
/// input columns contributed a new direction.
struct OrthonormalBasis {
    Matrix q;
    std::vector<Index> kept;
};

/// Classical Gram-Schmidt with one reorthogonalization pass, processing the
/// columns in order. Each column is normalized before the test, so a column
/// is dropped when less than `rank_tol` of it lies outside the current span.
[[nodiscard]] inline OrthonormalBasis orthonormalize_tracked(const Matrix& columns, double rank_tol = 1e-10,
                                                             const Matrix& against = Matrix()) {
    const Index n = columns.rows();
    const Index offset = against.cols();
    Matrix q(n, offset + std::min(n, columns.cols()));
    if (offset > 0) q.leftCols(offset) = against;
    Index k = offset;
    std::vector<Index> kept;
    for (Index j = 0; j < columns.cols() && k < n; ++j) {
        const double norm = columns.col(j).norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) continue;
        Vector v = columns.col(j) / norm;
        for (int pass = 0; pass < 2; ++pass) {
            if (k > 0) v -= q.leftCols(k) * (q.leftCols(k).adjoint() * v);
        }
        const double rest = v.norm();
        if (rest <= rank_tol) continue;
        q.col(k) = v / rest;
        ++k;
        kept.push_back(j);
    }
    return {Matrix(q.middleCols(offset, k - offset)), std::move(kept)};
}

[[nodiscard]] inline Matrix orthonormalize(const Matrix& columns, double rank_tol = 1e-10) {
    return orthonormalize_tracked(columns, rank_tol).q;
}

/// Numerical rank with the usual max(rows, cols) * eps * sigma_1 cutoff.
[[nodiscard]] inline Index numerical_rank(const Eigen::VectorXd& sigma, Index rows, Index cols) {
    if (sigma.size() == 0 || sigma(0) == 0.0) return 0;
    const double tol = static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() * sigma(0);
    Index rank = 0;
    while (rank < sigma.size() && sigma(rank) > tol) ++rank;
    return rank;
}

/// r leading left singular vectors of X.
[[nodiscard]] inline Matrix truncated_svd_basis(const Matrix& x, Index r) {
    if (r < 0 || r > std::min(x.rows(), x.cols()))
        throw RankTooSmall("truncated_svd_basis: requested rank exceeds matrix dimensions");
    Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU);
    if (numerical_rank(svd.singularValues(), x.rows(), x.cols()) < r)
        throw RankTooSmall("truncated_svd_basis: numerical rank below requested order");
    return svd.matrixU().leftCols(r);
}

/// Orthonormal basis of the r most significant columns selected by
/// column-pivoted Householder QR.
[[nodiscard]] inline Matrix pivoted_qr_basis(const Matrix& x, Index r) {
    if (r < 0 || r > std::min(x.rows(), x.cols()))
        throw RankTooSmall("pivoted_qr_basis: requested rank exceeds matrix dimensions");
    Eigen::ColPivHouseholderQR<Matrix> qr(x);
    qr.setThreshold(static_cast<double>(std::max(x.rows(), x.cols())) * std::numeric_limits<double>::epsilon());
    if (qr.rank() < r) throw RankTooSmall("pivoted_qr_basis: numerical rank below requested order");
    Matrix q = qr.householderQ() * Matrix::Identity(x.rows(), r);
    return q;
}

/// [Re X, Im X]; spans the same real space as [X, conj(X)].
[[nodiscard]] inline Matrix realify(const Matrix& x) {
    Matrix out(x.rows(), 2 * x.cols());
    out.leftCols(x.cols()) = x.real().cast<Scalar>();
    out.rightCols(x.cols()) = x.imag().cast<Scalar>();
    return out;
}

/// max_ij |(Q^H Q - I)_ij|
[[nodiscard]] inline double orthonormality_defect(const Matrix& q) {
    if (q.cols() == 0) return 0.0;
    return max_abs(Matrix(q.adjoint() * q - Matrix::Identity(q.cols(), q.cols())));
}

/// Spectral norm of a small dense matrix.
[[nodiscard]] inline double spectral_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()(0);
}

/// Relative error ||a - b||_2 / ||a||_2 falling back to the absolute error
/// when the reference vanishes.
[[nodiscard]] inline double relative_error(const Matrix& reference, const Matrix& approx) {
    const double den = spectral_norm(reference);
    const double num = spectral_norm(reference - approx);
    return den > 0.0 ? num / den : num;
}

}  // namespace qbmor
