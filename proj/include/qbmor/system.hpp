#pragma once

#include <qbmor/errors.hpp>
#include <qbmor/frequency.hpp>
#include <qbmor/linalg.hpp>

#include <string>
#include <utility>
#include <vector>

namespace qbmor {

enum class Structure { general, first_order, second_order, time_delay };

[[nodiscard]] inline std::string to_string(Structure s) {
    switch (s) {
        case Structure::general: return "general";
        case Structure::first_order: return "first_order";
        case Structure::second_order: return "second_order";
        case Structure::time_delay: return "time_delay";
    }
    return "general";
}

[[nodiscard]] inline Structure structure_from_string(const std::string& s) {
    if (s == "general") return Structure::general;
    if (s == "first_order") return Structure::first_order;
    if (s == "second_order") return Structure::second_order;
    if (s == "time_delay") return Structure::time_delay;
    throw IOFailure("unknown structure: " + s);
}

/// Structured quadratic-bilinear system given by the frequency-affine
/// functions C(s) (p x n), K(s) (n x n), B(s) (n x m), N_j(s) (n x n, one per
/// input) and H(s1, s2) (n x n^2).
struct StructuredQBSystem {
    Structure structure = Structure::general;
    Index n = 0;
    Index m = 0;
    Index p = 0;
    MatrixFunction C;
    MatrixFunction K;
    MatrixFunction B;
    std::vector<MatrixFunction> N;
    BivariateMatrixFunction H;

    void validate() const {
        if (C.rows() != p || C.cols() != n) throw DimensionMismatch("system: C must be p x n");
        if (K.rows() != n || K.cols() != n) throw DimensionMismatch("system: K must be n x n");
        if (B.rows() != n || B.cols() != m) throw DimensionMismatch("system: B must be n x m");
        if (static_cast<Index>(N.size()) != m) throw DimensionMismatch("system: need one N block per input");
        for (const auto& nj : N)
            if (nj.rows() != n || nj.cols() != n) throw DimensionMismatch("system: N blocks must be n x n");
        if (H.rows() != n || H.n() != n) throw DimensionMismatch("system: H must be n x n^2");
    }

    [[nodiscard]] Matrix eval_K(Scalar s) const { return K.eval(s); }
    [[nodiscard]] Matrix eval_B(Scalar s) const { return B.eval(s); }
    [[nodiscard]] Matrix eval_C(Scalar s) const { return C.eval(s); }

    [[nodiscard]] std::vector<Matrix> eval_N(Scalar s) const {
        std::vector<Matrix> out;
        out.reserve(N.size());
        for (const auto& nj : N) out.push_back(nj.eval(s));
        return out;
    }

    [[nodiscard]] QuadraticOperator eval_H(Scalar s1, Scalar s2) const { return H.eval(s1, s2); }

    /// N(s) (I_m (x) X) = [N_1(s) X, ..., N_m(s) X]
    [[nodiscard]] Matrix apply_N(Scalar s, const Matrix& x) const {
        Matrix out(n, m * x.cols());
        for (Index j = 0; j < m; ++j) out.middleCols(j * x.cols(), x.cols()) = N[static_cast<std::size_t>(j)].apply(s, x);
        return out;
    }

    [[nodiscard]] bool has_bilinear() const {
        for (const auto& nj : N)
            for (const auto& t : nj.terms())
                if (t.matrix.nonZeros() > 0) return true;
        return false;
    }

    [[nodiscard]] StructuredQBSystem with_C(MatrixFunction c) const {
        StructuredQBSystem out = *this;
        out.C = std::move(c);
        return out;
    }
};

/// Sum of all term matrices whose scalar function equals `h`.
[[nodiscard]] inline SparseMatrix coefficient(const MatrixFunction& f, const FrequencyFunction& h) {
    SparseMatrix out(f.rows(), f.cols());
    for (const auto& t : f.terms())
        if (t.h == h) out += t.matrix;
    return out;
}

[[nodiscard]] inline QuadraticOperator coefficient(const BivariateMatrixFunction& f, const FrequencyFunction& g,
                                                   const FrequencyFunction& h) {
    QuadraticOperator out = QuadraticOperator::zero(f.rows(), f.n());
    for (const auto& t : f.terms())
        if (t.g == g && t.h == h) out = out.plus(t.op);
    return out;
}

namespace detail {

inline void check_square(const SparseMatrix& a, Index n, const char* what) {
    if (a.rows() != n || a.cols() != n) throw DimensionMismatch(std::string(what) + " must be n x n");
}

inline std::vector<MatrixFunction> constant_blocks(const std::vector<SparseMatrix>& blocks, Index n) {
    std::vector<MatrixFunction> out;
    for (const auto& b : blocks) {
        check_square(b, n, "N_j");
        MatrixFunction f(n, n);
        f.add(FrequencyFunction::constant(), b);
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace detail

/// E x' = A x + H (x (x) x) + sum_j N_j x u_j + B u, y = C x.
[[nodiscard]] inline StructuredQBSystem preset_first_order(const SparseMatrix& e, const SparseMatrix& a,
                                                           const QuadraticOperator& h,
                                                           const std::vector<SparseMatrix>& n_list,
                                                           const SparseMatrix& b, const SparseMatrix& c) {
    const Index n = a.rows();
    detail::check_square(e, n, "E");
    detail::check_square(a, n, "A");
    if (b.rows() != n || c.cols() != n) throw DimensionMismatch("first-order preset: B/C shape mismatch");
    if (h.n() != n || h.rows() != n) throw DimensionMismatch("first-order preset: H must be n x n^2");
    if (static_cast<Index>(n_list.size()) != b.cols()) throw DimensionMismatch("first-order preset: need m N blocks");
    StructuredQBSystem sys;
    sys.structure = Structure::first_order;
    sys.n = n;
    sys.m = b.cols();
    sys.p = c.rows();
    sys.C = MatrixFunction(sys.p, n);
    sys.C.add(FrequencyFunction::constant(), c);
    sys.K = MatrixFunction(n, n);
    sys.K.add(FrequencyFunction::monomial(1), e);
    sys.K.add(FrequencyFunction::constant(), SparseMatrix(-a));
    sys.B = MatrixFunction(n, sys.m);
    sys.B.add(FrequencyFunction::constant(), b);
    sys.N = detail::constant_blocks(n_list, n);
    sys.H = BivariateMatrixFunction(n);
    sys.H.add(FrequencyFunction::constant(), FrequencyFunction::constant(), h);
    return sys;
}

/// Quadratic blocks of a second-order system.
struct SecondOrderQuadratic {
    QuadraticOperator pp;
    QuadraticOperator pv;
    QuadraticOperator vp;
    QuadraticOperator vv;
};

/// 0 = M q'' + D q' + K q + Hvv(q'(x)q') + Hvp(q'(x)q) + Hpv(q(x)q') + Hpp(q(x)q)
///     - sum_j (Nv_j q' + Np_j q) u_j - Bu u,  y = Cp q + Cv q'.
[[nodiscard]] inline StructuredQBSystem preset_second_order(
    const SparseMatrix& mass, const SparseMatrix& damping, const SparseMatrix& stiffness,
    const SecondOrderQuadratic& h, const std::vector<SparseMatrix>& np_list, const std::vector<SparseMatrix>& nv_list,
    const SparseMatrix& bu, const SparseMatrix& cp, const SparseMatrix& cv) {
    const Index n = mass.rows();
    detail::check_square(mass, n, "M");
    detail::check_square(damping, n, "D");
    detail::check_square(stiffness, n, "K");
    const Index m = bu.cols();
    if (bu.rows() != n || cp.cols() != n || cv.cols() != n || cp.rows() != cv.rows())
        throw DimensionMismatch("second-order preset: Bu/Cp/Cv shape mismatch");
    if (static_cast<Index>(np_list.size()) != m || static_cast<Index>(nv_list.size()) != m)
        throw DimensionMismatch("second-order preset: need m Np and m Nv blocks");
    for (const auto* op : {&h.pp, &h.pv, &h.vp, &h.vv})
        if (op->n() != n || op->rows() != n) throw DimensionMismatch("second-order preset: H blocks must be n x n^2");

    const auto one = FrequencyFunction::constant();
    const auto s = FrequencyFunction::monomial(1);
    StructuredQBSystem sys;
    sys.structure = Structure::second_order;
    sys.n = n;
    sys.m = m;
    sys.p = cp.rows();
    sys.C = MatrixFunction(sys.p, n);
    sys.C.add(one, cp).add(s, cv);
    sys.K = MatrixFunction(n, n);
    sys.K.add(FrequencyFunction::monomial(2), mass).add(s, damping).add(one, stiffness);
    sys.B = MatrixFunction(n, m);
    sys.B.add(one, bu);
    for (Index j = 0; j < m; ++j) {
        detail::check_square(np_list[static_cast<std::size_t>(j)], n, "Np_j");
        detail::check_square(nv_list[static_cast<std::size_t>(j)], n, "Nv_j");
        MatrixFunction f(n, n);
        f.add(one, np_list[static_cast<std::size_t>(j)]).add(s, nv_list[static_cast<std::size_t>(j)]);
        sys.N.push_back(std::move(f));
    }
    sys.H = BivariateMatrixFunction(n);
    sys.H.add(one, one, h.pp.scaled(-1.0));
    sys.H.add(one, s, h.pv.scaled(-1.0));
    sys.H.add(s, one, h.vp.scaled(-1.0));
    sys.H.add(s, s, h.vv.scaled(-1.0));
    return sys;
}

/// E x'(t) = sum_k A_k x(t - tau_k) + H (x (x) x) + sum_j N_j x u_j + B u, y = C x.
[[nodiscard]] inline StructuredQBSystem preset_time_delay(const SparseMatrix& e, const std::vector<SparseMatrix>& a_list,
                                                          const std::vector<double>& tau_list,
                                                          const QuadraticOperator& h,
                                                          const std::vector<SparseMatrix>& n_list,
                                                          const SparseMatrix& b, const SparseMatrix& c) {
    if (a_list.size() != tau_list.size()) throw DimensionMismatch("time-delay preset: A and tau lists differ in length");
    for (double tau : tau_list)
        if (!(tau >= 0.0)) throw NegativeDelay("time-delay preset: delays must be non-negative");
    const Index n = e.rows();
    detail::check_square(e, n, "E");
    if (b.rows() != n || c.cols() != n) throw DimensionMismatch("time-delay preset: B/C shape mismatch");
    if (h.n() != n || h.rows() != n) throw DimensionMismatch("time-delay preset: H must be n x n^2");
    if (static_cast<Index>(n_list.size()) != b.cols()) throw DimensionMismatch("time-delay preset: need m N blocks");
    StructuredQBSystem sys;
    sys.structure = Structure::time_delay;
    sys.n = n;
    sys.m = b.cols();
    sys.p = c.rows();
    sys.C = MatrixFunction(sys.p, n);
    sys.C.add(FrequencyFunction::constant(), c);
    sys.K = MatrixFunction(n, n);
    sys.K.add(FrequencyFunction::monomial(1), e);
    for (std::size_t k = 0; k < a_list.size(); ++k) {
        detail::check_square(a_list[k], n, "A_k");
        sys.K.add(FrequencyFunction::exp_decay(tau_list[k]), SparseMatrix(-a_list[k]));
    }
    sys.B = MatrixFunction(n, sys.m);
    sys.B.add(FrequencyFunction::constant(), b);
    sys.N = detail::constant_blocks(n_list, n);
    sys.H = BivariateMatrixFunction(n);
    sys.H.add(FrequencyFunction::constant(), FrequencyFunction::constant(), h);
    return sys;
}

/// Constant matrices of a second-order system, read back from its terms.
struct SecondOrderMatrices {
    SparseMatrix mass, damping, stiffness, bu, cp, cv;
    std::vector<SparseMatrix> np, nv;
    SecondOrderQuadratic h;
};

[[nodiscard]] inline SecondOrderMatrices second_order_matrices(const StructuredQBSystem& sys) {
    if (sys.structure != Structure::second_order) throw Error("second_order_matrices: not a second-order system");
    const auto one = FrequencyFunction::constant();
    const auto s = FrequencyFunction::monomial(1);
    SecondOrderMatrices out;
    out.mass = coefficient(sys.K, FrequencyFunction::monomial(2));
    out.damping = coefficient(sys.K, s);
    out.stiffness = coefficient(sys.K, one);
    out.bu = coefficient(sys.B, one);
    out.cp = coefficient(sys.C, one);
    out.cv = coefficient(sys.C, s);
    for (const auto& nj : sys.N) {
        out.np.push_back(coefficient(nj, one));
        out.nv.push_back(coefficient(nj, s));
    }
    out.h.pp = coefficient(sys.H, one, one).scaled(-1.0);
    out.h.pv = coefficient(sys.H, one, s).scaled(-1.0);
    out.h.vp = coefficient(sys.H, s, one).scaled(-1.0);
    out.h.vv = coefficient(sys.H, s, s).scaled(-1.0);
    return out;
}

namespace detail {

inline SparseMatrix block2(Index n, const SparseMatrix* a11, const SparseMatrix* a12, const SparseMatrix* a21,
                           const SparseMatrix* a22) {
    std::vector<Eigen::Triplet<Scalar>> trips;
    auto put = [&](const SparseMatrix* a, Index r0, Index c0) {
        if (!a) return;
        for (Index k = 0; k < a->outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(*a, k); it; ++it) trips.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
    };
    put(a11, 0, 0);
    put(a12, 0, n);
    put(a21, n, 0);
    put(a22, n, n);
    SparseMatrix out(2 * n, 2 * n);
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

inline SparseMatrix identity(Index n) {
    SparseMatrix id(n, n);
    id.setIdentity();
    return id;
}

}  // namespace detail

/// First-order realization of a second-order system in x = [q; q'].
[[nodiscard]] inline StructuredQBSystem companion_embedding(const StructuredQBSystem& sys) {
    const auto mats = second_order_matrices(sys);
    const Index n = sys.n;
    const SparseMatrix id = detail::identity(n);
    const SparseMatrix neg_k = -mats.stiffness;
    const SparseMatrix neg_d = -mats.damping;
    const SparseMatrix e = detail::block2(n, &id, nullptr, nullptr, &mats.mass);
    const SparseMatrix a = detail::block2(n, nullptr, &id, &neg_k, &neg_d);

    SparseMatrix b(2 * n, sys.m);
    {
        std::vector<Eigen::Triplet<Scalar>> trips;
        for (Index k = 0; k < mats.bu.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(mats.bu, k); it; ++it) trips.emplace_back(n + it.row(), it.col(), it.value());
        b.setFromTriplets(trips.begin(), trips.end());
    }
    SparseMatrix c(sys.p, 2 * n);
    {
        std::vector<Eigen::Triplet<Scalar>> trips;
        for (Index k = 0; k < mats.cp.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(mats.cp, k); it; ++it) trips.emplace_back(it.row(), it.col(), it.value());
        for (Index k = 0; k < mats.cv.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(mats.cv, k); it; ++it) trips.emplace_back(it.row(), n + it.col(), it.value());
        c.setFromTriplets(trips.begin(), trips.end());
    }
    std::vector<SparseMatrix> n_list;
    for (Index j = 0; j < sys.m; ++j)
        n_list.push_back(detail::block2(n, nullptr, nullptr, &mats.np[static_cast<std::size_t>(j)],
                                        &mats.nv[static_cast<std::size_t>(j)]));

    // slice k (q_k): -[0 0; Hpp_k Hpv_k], slice n+k (q'_k): -[0 0; Hvp_k Hvv_k]
    std::vector<SparseMatrix> slices;
    slices.reserve(static_cast<std::size_t>(2 * n));
    for (int half = 0; half < 2; ++half) {
        const auto& left = half == 0 ? mats.h.pp : mats.h.vp;
        const auto& right = half == 0 ? mats.h.pv : mats.h.vv;
        for (Index k = 0; k < n; ++k) {
            const SparseMatrix l = -left.slice(k);
            const SparseMatrix r = -right.slice(k);
            slices.push_back(detail::block2(n, nullptr, nullptr, &l, &r));
        }
    }
    auto out = preset_first_order(e, a, QuadraticOperator(std::move(slices)), n_list, b, c);
    return out;
}

/// Maps a first-order-integrable system to constant matrices:
/// E x' = A x + sum_k A_k x(t - tau_k) + H(x(x)x) + sum_j N_j x u_j + B u, y = C x.
struct FirstOrderMatrices {
    SparseMatrix e, a, b, c;
    std::vector<SparseMatrix> a_delay;
    std::vector<double> tau;
    std::vector<SparseMatrix> n;
    QuadraticOperator h;
};

[[nodiscard]] inline FirstOrderMatrices first_order_matrices(const StructuredQBSystem& sys) {
    if (sys.structure == Structure::second_order) return first_order_matrices(companion_embedding(sys));
    if (sys.structure == Structure::general)
        throw Error("time integration is only defined for the first-order, second-order and time-delay presets");
    FirstOrderMatrices out;
    const Index n = sys.n;
    out.e = SparseMatrix(n, n);
    out.a = SparseMatrix(n, n);
    for (const auto& t : sys.K.terms()) {
        switch (t.h.kind()) {
            case FrequencyFunction::Kind::constant: out.a -= t.matrix; break;
            case FrequencyFunction::Kind::monomial:
                if (t.h.power() != 1) throw Error("first_order_matrices: unsupported K term " + t.h.tag());
                out.e += t.matrix;
                break;
            case FrequencyFunction::Kind::exp_decay:
                if (t.h.tau() == 0.0) {
                    out.a -= t.matrix;
                } else {
                    out.a_delay.push_back(-t.matrix);
                    out.tau.push_back(t.h.tau());
                }
                break;
            default: throw Error("first_order_matrices: unsupported K term " + t.h.tag());
        }
    }
    const auto one = FrequencyFunction::constant();
    auto only_constant = [&](const MatrixFunction& f, const char* what) {
        for (const auto& t : f.terms())
            if (!(t.h == one)) throw Error(std::string("first_order_matrices: non-constant ") + what + " term");
        return coefficient(f, one);
    };
    out.b = only_constant(sys.B, "B");
    out.c = only_constant(sys.C, "C");
    for (const auto& nj : sys.N) out.n.push_back(only_constant(nj, "N"));
    out.h = QuadraticOperator::zero(n);
    for (const auto& t : sys.H.terms()) {
        if (!(t.g == one) || !(t.h == one)) throw Error("first_order_matrices: non-constant H term");
        out.h = out.h.plus(t.op);
    }
    return out;
}

}  // namespace qbmor
