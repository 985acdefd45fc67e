#pragma once

#include <qbmor/errors.hpp>
#include <qbmor/interpolation.hpp>
#include <qbmor/linalg.hpp>
#include <qbmor/system.hpp>
#include <qbmor/transfer.hpp>

#include <string>
#include <utility>
#include <vector>

namespace qbmor {

/// Outcome of re-checking one guaranteed condition on a reduced model.
struct ConditionCheck {
    InterpolationCondition condition;
    double relative_error = 0.0;
    bool pass = false;
    std::string note;
};

struct ReducedModel {
    StructuredQBSystem system;
    ReductionBasis basis;
    std::string parent_id;
    std::vector<ConditionCheck> ledger;

    [[nodiscard]] bool all_pass() const {
        for (const auto& c : ledger)
            if (!c.pass) return false;
        return true;
    }
};

inline constexpr double kConditionTolerance = 1e-8;

namespace detail {

inline void check_full_rank(const Matrix& x, const char* what) {
    if (x.cols() == 0) throw RankDeficientBasis(std::string(what) + " has no columns");
    Eigen::ColPivHouseholderQR<Matrix> qr(x);
    if (qr.rank() < x.cols()) throw RankDeficientBasis(std::string(what) + " is not of full column rank");
}

inline SparseMatrix dense_term(const Matrix& x) { return x.sparseView(1.0, 0.0); }

}  // namespace detail

/// Petrov-Galerkin projection applied termwise: the reduced system keeps the
/// scalar frequency functions of the original.
[[nodiscard]] inline ReducedModel project(const StructuredQBSystem& sys, const ReductionBasis& basis,
                                          std::string parent_id = {}) {
    sys.validate();
    const Matrix& v = basis.V;
    const Matrix& w = basis.W;
    if (v.rows() != sys.n || w.rows() != sys.n) throw DimensionMismatch("project: basis row count differs from n");
    if (v.cols() != w.cols()) throw RankDeficientBasis("project: V and W differ in column count");
    detail::check_full_rank(v, "V");
    detail::check_full_rank(w, "W");
    const Index r = v.cols();
    const Matrix wh = w.adjoint();

    ReducedModel red;
    red.basis = basis;
    red.parent_id = std::move(parent_id);
    auto& out = red.system;
    out.structure = sys.structure;
    out.n = r;
    out.m = sys.m;
    out.p = sys.p;
    out.C = sys.C.map(sys.p, r, [&](const SparseMatrix& c) { return detail::dense_term(c * v); });
    out.K = sys.K.map(r, r, [&](const SparseMatrix& k) { return detail::dense_term(wh * (k * v)); });
    out.B = sys.B.map(r, sys.m, [&](const SparseMatrix& b) { return detail::dense_term(wh * b); });
    for (const auto& nj : sys.N)
        out.N.push_back(nj.map(r, r, [&](const SparseMatrix& k) { return detail::dense_term(wh * (k * v)); }));
    out.H = BivariateMatrixFunction(r);
    for (const auto& t : sys.H.terms()) out.H.add(t.g, t.h, compress_quadratic(t.op, wh, v));
    return red;
}

/// Relative spectral-norm distance of the full and reduced values of one
/// condition.
[[nodiscard]] inline double condition_error(const TransferFunctions& full, const TransferFunctions& reduced,
                                            const InterpolationCondition& c) {
    const Matrix g = full.value(c.variant, c.point);
    const Matrix gr = reduced.value(c.variant, c.point);
    return relative_error(g, gr);
}

/// Re-evaluates every guaranteed condition and stamps the ledger.
inline void verify(const StructuredQBSystem& sys, ReducedModel& red, double tol = kConditionTolerance) {
    TransferFunctions full(sys);
    TransferFunctions reduced(red.system);
    red.ledger.clear();
    for (const auto& c : red.basis.guaranteed_conditions) {
        ConditionCheck check{c, 0.0, false, {}};
        try {
            check.relative_error = condition_error(full, reduced, c);
            check.pass = check.relative_error <= tol;
        } catch (const SingularMatrix& e) {
            check.relative_error = std::numeric_limits<double>::infinity();
            check.note = e.what();
        }
        red.ledger.push_back(std::move(check));
    }
}

/// Block-diagonal enlargement diag(V_1, V_2) with V = [V_1; V_2] split at
/// `split_row`. Each block is orthonormalized separately and padded with
/// seeded directions to the column count of V when it loses rank, so the
/// enlarged order is 2r.
[[nodiscard]] inline ReductionBasis split_congruence(const ReductionBasis& basis, Index split_row) {
    const Index n = basis.V.rows();
    if (split_row <= 0 || split_row >= n) throw Error("split_congruence: split row must lie strictly inside the state");
    const Index r = basis.V.cols();
    auto split = [&](const Matrix& x, std::uint64_t seed) {
        const Matrix top = detail::fill_basis(x.topRows(split_row), Matrix(), std::min(r, split_row), seed);
        const Matrix bottom = detail::fill_basis(x.bottomRows(n - split_row), Matrix(), std::min(r, n - split_row), seed + 1);
        Matrix out = Matrix::Zero(n, top.cols() + bottom.cols());
        out.topLeftCorner(split_row, top.cols()) = top;
        out.bottomRightCorner(n - split_row, bottom.cols()) = bottom;
        return out;
    };
    ReductionBasis out = basis;
    out.V = split(basis.V, 0x5eed5ULL);
    out.W = basis.W == basis.V ? out.V : split(basis.W, 0x5eed5ULL + 2);
    out.method_tag = basis.method_tag + "+split";
    return out;
}

}  // namespace qbmor
