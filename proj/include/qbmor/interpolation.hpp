#pragma once

#include <qbmor/errors.hpp>
#include <qbmor/linalg.hpp>
#include <qbmor/system.hpp>
#include <qbmor/transfer.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace qbmor {

enum class ClosurePolicy { as_given, conjugate_closed };

struct InterpolationPointSet {
    std::vector<Scalar> points;
    ClosurePolicy closure = ClosurePolicy::as_given;
};

/// Equality G(point) = G_hat(point) of one transfer function.
struct InterpolationCondition {
    TFVariant variant = TFVariant::symmetric;
    FrequencyPoint point;

    [[nodiscard]] int level() const {
        return variant == TFVariant::symmetric ? static_cast<int>(point.size()) : arity(variant);
    }

    [[nodiscard]] std::string describe() const {
        std::ostringstream os;
        os.precision(6);
        if (variant == TFVariant::symmetric)
            os << "G" << point.size();
        else
            os << "G_" << to_string(variant);
        os << "(";
        for (std::size_t i = 0; i < point.size(); ++i) {
            if (i) os << ", ";
            os << point[i].real() << (point[i].imag() < 0 ? "-" : "+") << std::abs(point[i].imag()) << "i";
        }
        os << ")";
        return os.str();
    }
};

struct WorkCount {
    std::size_t factorizations = 0;
    std::size_t solves = 0;
    [[nodiscard]] std::size_t total() const noexcept { return factorizations + solves; }
};

/// Right/left projection bases and the interpolation conditions the
/// construction guarantees.
struct ReductionBasis {
    Matrix V;
    Matrix W;
    std::string method_tag;
    InterpolationPointSet points_used;
    std::vector<InterpolationCondition> guaranteed_conditions;
    WorkCount work;

    [[nodiscard]] Index order() const noexcept { return V.cols(); }
};

enum class Method { SymInt, GenInt };
enum class Sidedness { V, VW };
enum class Compression { pivoted_qr, svd };

[[nodiscard]] inline std::string method_tag(Method method, Sidedness side, bool avg) {
    return std::string(method == Method::SymInt ? "SymInt" : "GenInt") + "(" + (side == Sidedness::V ? "V" : "VW") + "," +
           (avg ? "avg" : "equi") + ")";
}

namespace detail {

inline InterpolationCondition sym_cond(std::initializer_list<Scalar> pts) { return {TFVariant::symmetric, pts}; }
inline InterpolationCondition gen_cond(TFVariant v, std::initializer_list<Scalar> pts) { return {v, pts}; }

inline WorkCount work_of(const TransferFunctions& tf) { return {tf.factorizations(), tf.solves()}; }

/// K(mu)^{-H} C(mu)^H
inline Matrix left_block(const TransferFunctions& tf, Scalar mu) {
    return tf.solve_adjoint(mu, Matrix(tf.system().C.eval(mu).adjoint()));
}

inline Matrix hcat(const std::vector<Matrix>& blocks, Index rows) {
    Index cols = 0;
    for (const auto& b : blocks) cols += b.cols();
    Matrix out(rows, cols);
    Index c = 0;
    for (const auto& b : blocks) {
        out.middleCols(c, b.cols()) = b;
        c += b.cols();
    }
    return out;
}

/// Orthonormal basis of `required`, extended by `extra` and then by seeded
/// random directions until it has `target` columns.
inline Matrix fill_basis(const Matrix& required, const Matrix& extra, Index target, std::uint64_t seed) {
    Matrix q = orthonormalize(required);
    const Index n = required.rows();
    if (q.cols() < target && extra.cols() > 0) {
        Matrix more = orthonormalize_tracked(extra, 1e-10, q).q;
        const Index take = std::min(target - q.cols(), more.cols());
        Matrix joined(n, q.cols() + take);
        joined << q, more.leftCols(take);
        q = joined;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    while (q.cols() < target) {
        Matrix candidate(n, 1);
        for (Index i = 0; i < n; ++i) candidate(i, 0) = Scalar(normal(rng), 0.0);
        Matrix more = orthonormalize_tracked(candidate, 1e-10, q).q;
        if (more.cols() == 0) continue;
        Matrix joined(n, q.cols() + 1);
        joined << q, more;
        q = joined;
    }
    return q;
}

/// Pads the smaller of V and W to the larger dimension.
inline void equalize(ReductionBasis& basis, const Matrix& v_required, const Matrix& v_extra, const Matrix& w_required,
                     const Matrix& w_extra) {
    const Index rv = orthonormalize(v_required).cols();
    const Index rw = orthonormalize(w_required).cols();
    const Index r = std::max(rv, rw);
    basis.V = fill_basis(v_required, v_extra, r, 0x5eedULL);
    basis.W = fill_basis(w_required, w_extra, r, 0x5eedULL + 1);
}

inline ReductionBasis one_sided(const Matrix& blocks) {
    ReductionBasis b;
    b.V = orthonormalize(blocks);
    b.W = b.V;
    return b;
}

}  // namespace detail

/// V_1 = K(s)^{-1} B(s)
[[nodiscard]] inline Matrix sym_block_v1(const TransferFunctions& tf, Scalar s) { return tf.psi1(s); }

/// V_2 = K(2s)^{-1} (H(s,s)(V_1 (x) V_1) + N(s)(I (x) V_1))
[[nodiscard]] inline Matrix sym_block_v2(const TransferFunctions& tf, Scalar s, const Matrix& v1) {
    const auto& sys = tf.system();
    return tf.solve(2.0 * s, Matrix(sys.H.apply(s, s, v1, v1) + sys.apply_N(s, v1)));
}

/// V_3 = K(3s)^{-1} (H(2s,s)(V_2 (x) V_1) + H(s,2s)(V_1 (x) V_2) + N(2s)(I (x) V_2))
[[nodiscard]] inline Matrix sym_block_v3(const TransferFunctions& tf, Scalar s, const Matrix& v1, const Matrix& v2) {
    const auto& sys = tf.system();
    Matrix rhs = sys.H.apply(2.0 * s, s, v2, v1);
    rhs += sys.H.apply(s, 2.0 * s, v1, v2);
    rhs += sys.apply_N(2.0 * s, v2);
    return tf.solve(3.0 * s, rhs);
}

/// One-sided interpolation of G1 at s1, s2 and G2 at (s1, s2).
[[nodiscard]] inline ReductionBasis basis_sym_V(const StructuredQBSystem& sys, Scalar s1, Scalar s2) {
    TransferFunctions tf(sys);
    const Matrix v11 = tf.psi1(s1);
    const Matrix v12 = tf.psi1(s2);
    Matrix rhs = sys.H.apply(s1, s2, v11, v12);
    rhs += sys.H.apply(s2, s1, v12, v11);
    rhs += sys.apply_N(s1, v11);
    rhs += sys.apply_N(s2, v12);
    const Matrix v2 = tf.solve(s1 + s2, rhs);
    auto b = detail::one_sided(detail::hcat({v11, v12, v2}, sys.n));
    b.method_tag = "symV";
    b.points_used = {{s1, s2}, ClosurePolicy::as_given};
    b.guaranteed_conditions = {detail::sym_cond({s1}), detail::sym_cond({s2}), detail::sym_cond({s1, s2})};
    b.work = detail::work_of(tf);
    return b;
}

/// Two-sided interpolation of G1 at s1, s2, s1 + s2 and G2 at (s1, s2).
[[nodiscard]] inline ReductionBasis basis_sym_VW(const StructuredQBSystem& sys, Scalar s1, Scalar s2) {
    TransferFunctions tf(sys);
    const Matrix v = detail::hcat({tf.psi1(s1), tf.psi1(s2)}, sys.n);
    const Matrix w = detail::left_block(tf, s1 + s2);
    ReductionBasis b;
    detail::equalize(b, v, tf.psi1(s1 + s2), w, detail::hcat({detail::left_block(tf, s1), detail::left_block(tf, s2)}, sys.n));
    b.method_tag = "symVW";
    b.points_used = {{s1, s2}, ClosurePolicy::as_given};
    b.guaranteed_conditions = {detail::sym_cond({s1}), detail::sym_cond({s2}), detail::sym_cond({s1 + s2}),
                               detail::sym_cond({s1, s2})};
    b.work = detail::work_of(tf);
    return b;
}

enum class CoincidentPart { a, b, c };

/// Coincident-point interpolation at s with the bases V_1, V_2, V_3 and the
/// left bases at 2s and 3s.
[[nodiscard]] inline ReductionBasis basis_coincident(const StructuredQBSystem& sys, Scalar s, CoincidentPart part) {
    TransferFunctions tf(sys);
    const Matrix v1 = sym_block_v1(tf, s);
    ReductionBasis b;
    b.points_used = {{s}, ClosurePolicy::as_given};
    switch (part) {
        case CoincidentPart::a: {
            const Matrix v2 = sym_block_v2(tf, s, v1);
            const Matrix v3 = sym_block_v3(tf, s, v1, v2);
            b = detail::one_sided(detail::hcat({v1, v2, v3}, sys.n));
            b.points_used = {{s}, ClosurePolicy::as_given};
            b.method_tag = "coincident-a";
            b.guaranteed_conditions = {detail::sym_cond({s}), detail::sym_cond({s, s}), detail::sym_cond({s, s, s})};
            break;
        }
        case CoincidentPart::b: {
            const Matrix w1 = detail::left_block(tf, 2.0 * s);
            detail::equalize(b, v1, tf.psi1(2.0 * s), w1, detail::left_block(tf, s));
            b.method_tag = "coincident-b";
            b.guaranteed_conditions = {detail::sym_cond({s}), detail::sym_cond({2.0 * s}), detail::sym_cond({s, s})};
            break;
        }
        case CoincidentPart::c: {
            const Matrix v2 = sym_block_v2(tf, s, v1);
            const Matrix w2 = detail::left_block(tf, 3.0 * s);
            detail::equalize(b, detail::hcat({v1, v2}, sys.n), tf.psi1(3.0 * s), w2,
                             detail::hcat({detail::left_block(tf, s), detail::left_block(tf, 2.0 * s)}, sys.n));
            b.method_tag = "coincident-c";
            b.guaranteed_conditions = {detail::sym_cond({s}), detail::sym_cond({3.0 * s}), detail::sym_cond({s, s}),
                                       detail::sym_cond({s, s, s})};
            break;
        }
    }
    b.work = detail::work_of(tf);
    return b;
}

/// Blocks of the one-sided generalized construction.
struct GenBlocks {
    Matrix v11, v12, v2, v31, v32;
};

[[nodiscard]] inline GenBlocks gen_blocks(const TransferFunctions& tf, Scalar s1, Scalar s2, Scalar s3, bool with_nnb,
                                          bool with_hbb = true) {
    const auto& sys = tf.system();
    GenBlocks g;
    g.v11 = tf.psi1(s1);
    g.v12 = s2 == s1 ? g.v11 : tf.psi1(s2);
    g.v2 = tf.solve(s2, sys.apply_N(s1, g.v11));
    if (with_nnb) g.v31 = tf.solve(s3, sys.apply_N(s2, g.v2));
    if (with_hbb) g.v32 = tf.solve(s3, sys.H.apply(s2, s1, g.v12, g.v11));
    return g;
}

/// One-sided interpolation of the generalized transfer functions.
[[nodiscard]] inline ReductionBasis basis_gen_V(const StructuredQBSystem& sys, Scalar s1, Scalar s2, Scalar s3,
                                                bool include_nnb) {
    TransferFunctions tf(sys);
    const auto g = gen_blocks(tf, s1, s2, s3, include_nnb);
    std::vector<Matrix> blocks{g.v11, g.v12, g.v2};
    if (include_nnb) blocks.push_back(g.v31);
    blocks.push_back(g.v32);
    auto b = detail::one_sided(detail::hcat(blocks, sys.n));
    b.method_tag = include_nnb ? "genV" : "genV-noNNB";
    b.points_used = {{s1, s2, s3}, ClosurePolicy::as_given};
    b.guaranteed_conditions = {detail::gen_cond(TFVariant::gen_B, {s1}), detail::gen_cond(TFVariant::gen_B, {s2}),
                               detail::gen_cond(TFVariant::gen_NB, {s1, s2})};
    if (include_nnb) b.guaranteed_conditions.push_back(detail::gen_cond(TFVariant::gen_NNB, {s1, s2, s3}));
    b.guaranteed_conditions.push_back(detail::gen_cond(TFVariant::gen_HBB, {s1, s2, s3}));
    b.work = detail::work_of(tf);
    return b;
}

/// Two-sided interpolation of the generalized transfer functions from
/// V = K(s1)^{-1} B(s1) and W = K(s2)^{-H} C(s2)^H.
[[nodiscard]] inline ReductionBasis basis_gen_VW(const StructuredQBSystem& sys, Scalar s1, Scalar s2) {
    TransferFunctions tf(sys);
    const Matrix v = tf.psi1(s1);
    const Matrix w = detail::left_block(tf, s2);
    ReductionBasis b;
    detail::equalize(b, v, s2 == s1 ? Matrix() : tf.psi1(s2), w, s2 == s1 ? Matrix() : detail::left_block(tf, s1));
    b.method_tag = "genVW";
    b.points_used = {{s1, s2}, ClosurePolicy::as_given};
    b.guaranteed_conditions = {detail::gen_cond(TFVariant::gen_B, {s1}), detail::gen_cond(TFVariant::gen_B, {s2}),
                               detail::gen_cond(TFVariant::gen_NB, {s1, s2}),
                               detail::gen_cond(TFVariant::gen_HBB, {s1, s1, s2})};
    b.work = detail::work_of(tf);
    return b;
}

/// k points i*omega with omega the log-centers of k equal logarithmic
/// sub-intervals of [lo, hi].
[[nodiscard]] inline std::vector<Scalar> log_center_points(double lo, double hi, std::size_t k) {
    if (!(lo > 0.0) || !(hi > lo)) throw Error("frequency range must satisfy 0 < omega_min < omega_max");
    std::vector<Scalar> out(k);
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t i = 0; i < k; ++i)
        out[i] = Scalar(0.0, std::pow(10.0, a + (b - a) * (static_cast<double>(i) + 0.5) / static_cast<double>(k)));
    return out;
}

/// Additional points for W: log-centers of 2k, 4k, ... sub-intervals, each
/// level ordered from the middle of the range outward.
[[nodiscard]] inline std::vector<Scalar> extra_points(double lo, double hi, std::size_t k, std::size_t count) {
    std::vector<Scalar> out;
    const double mid = 0.5 * (std::log10(lo) + std::log10(hi));
    for (std::size_t level = 2 * k; out.size() < count && level < (std::size_t{1} << 20) * std::max<std::size_t>(k, 1);
         level *= 2) {
        auto pts = log_center_points(lo, hi, level);
        std::stable_sort(pts.begin(), pts.end(), [&](Scalar x, Scalar y) {
            return std::abs(std::log10(x.imag()) - mid) < std::abs(std::log10(y.imag()) - mid) - 1e-12;
        });
        for (const auto& p : pts) {
            if (out.size() >= count) break;
            out.push_back(p);
        }
    }
    return out;
}

namespace detail {

struct PointContribution {
    Scalar sigma;
    std::vector<Matrix> v_blocks;
    std::vector<Matrix> w_blocks;
    std::vector<InterpolationCondition> v_conditions;
    std::vector<InterpolationCondition> w_conditions;
    std::vector<InterpolationCondition> joint_conditions;
};

inline PointContribution equi_point(const TransferFunctions& tf, Method method, Sidedness side, Scalar s,
                                    std::size_t index) {
    PointContribution pc;
    pc.sigma = s;
    if (method == Method::SymInt) {
        const Matrix v1 = sym_block_v1(tf, s);
        const Matrix v2 = sym_block_v2(tf, s, v1);
        pc.v_blocks = {v1, v2};
        pc.v_conditions = {sym_cond({s}), sym_cond({s, s})};
        if (side == Sidedness::VW) {
            pc.w_blocks = {left_block(tf, 3.0 * s)};
            pc.w_conditions = {sym_cond({3.0 * s})};
            pc.joint_conditions = {sym_cond({s}), sym_cond({3.0 * s}), sym_cond({s, s}), sym_cond({s, s, s})};
        }
    } else {
        const bool nb = index % 2 == 0;
        const auto g = gen_blocks(tf, s, s, s, false, !nb);
        pc.v_blocks = {g.v11, nb ? g.v2 : g.v32};
        pc.v_conditions = {gen_cond(TFVariant::gen_B, {s}),
                           nb ? gen_cond(TFVariant::gen_NB, {s, s}) : gen_cond(TFVariant::gen_HBB, {s, s, s})};
        if (side == Sidedness::VW) {
            pc.w_blocks = {left_block(tf, s)};
            pc.w_conditions = {gen_cond(TFVariant::gen_B, {s})};
            pc.joint_conditions = {gen_cond(TFVariant::gen_B, {s}), gen_cond(TFVariant::gen_NB, {s, s}),
                                   gen_cond(TFVariant::gen_HBB, {s, s, s})};
        }
    }
    return pc;
}

/// Left block used at a W-only point.
inline Matrix w_only_block(const TransferFunctions& tf, Method method, Scalar s, InterpolationCondition& cond) {
    if (method == Method::SymInt) {
        cond = sym_cond({3.0 * s});
        return left_block(tf, 3.0 * s);
    }
    cond = gen_cond(TFVariant::gen_B, {s});
    return left_block(tf, s);
}

/// Real-ified, order-preserving orthonormalization of a block sequence,
/// truncated to r columns. `retained[i]` tells whether all columns of
/// block i lie in the truncated span.
struct Assembled {
    Matrix q;
    std::vector<bool> retained;
};

inline Assembled assemble(const std::vector<Matrix>& blocks, Index n, Index r) {
    std::vector<Matrix> real_blocks;
    std::vector<Index> last_col;
    Index c = 0;
    for (const auto& b : blocks) {
        real_blocks.push_back(realify(b));
        c += 2 * b.cols();
        last_col.push_back(c - 1);
    }
    const Matrix all = hcat(real_blocks, n);
    auto ob = orthonormalize_tracked(all);
    Assembled out;
    if (static_cast<Index>(ob.kept.size()) < r) {
        out.q = ob.q;
        return out;
    }
    const bool complete = static_cast<Index>(ob.kept.size()) == r;
    out.q = ob.q.leftCols(r);
    for (Index lc : last_col) out.retained.push_back(complete || lc < ob.kept[static_cast<std::size_t>(r)]);
    return out;
}

}  // namespace detail

/// Interpolation at logarithmically equidistant points on the imaginary
/// axis, using as many points as needed to reach order r exactly.
[[nodiscard]] inline ReductionBasis strategy_equi(const StructuredQBSystem& sys, Method method, Sidedness side, Index r,
                                                  std::pair<double, double> freq_range) {
    if (r < 1) throw TargetOrderUnreachable("strategy_equi: r must be positive");
    TransferFunctions tf(sys);
    const auto [lo, hi] = freq_range;

    // real width of one point's V contribution; each point has two blocks
    const Index m = sys.m;
    const Index width = 2 * (m + m * m);
    if (2 * m > r)
        throw TargetOrderUnreachable("strategy_equi: the " + std::to_string(2 * m) +
                                     " block columns of one point exceed r = " + std::to_string(r));
    if (r > sys.n) throw TargetOrderUnreachable("strategy_equi: r exceeds the state dimension");
    const std::size_t k_start = static_cast<std::size_t>((r + width - 1) / width);
    const std::size_t k_limit = 4 * k_start + 8;

    std::vector<detail::PointContribution> pcs;
    detail::Assembled av;
    std::size_t k = k_start;
    for (; k <= k_limit; ++k) {
        pcs.clear();
        const auto pts = log_center_points(lo, hi, k);
        std::vector<Matrix> blocks;
        for (std::size_t i = 0; i < k; ++i) {
            pcs.push_back(detail::equi_point(tf, method, side, pts[i], i));
            Matrix joined = detail::hcat(pcs.back().v_blocks, sys.n);
            blocks.push_back(joined);
        }
        av = detail::assemble(blocks, sys.n, r);
        if (av.q.cols() == r) break;
    }
    if (av.q.cols() != r)
        throw TargetOrderUnreachable("strategy_equi: sampled V space has rank below r = " + std::to_string(r));

    ReductionBasis basis;
    basis.method_tag = method_tag(method, side, false);
    basis.points_used.closure = ClosurePolicy::conjugate_closed;
    basis.V = av.q;
    for (const auto& pc : pcs) basis.points_used.points.push_back(pc.sigma);

    if (side == Sidedness::V) {
        basis.W = basis.V;
        for (std::size_t i = 0; i < pcs.size(); ++i)
            if (av.retained[i])
                basis.guaranteed_conditions.insert(basis.guaranteed_conditions.end(), pcs[i].v_conditions.begin(),
                                                   pcs[i].v_conditions.end());
        basis.work = detail::work_of(tf);
        return basis;
    }

    // W: blocks at the V points, then at additional points
    std::vector<Matrix> wblocks;
    std::vector<InterpolationCondition> wonly;
    for (const auto& pc : pcs) wblocks.push_back(detail::hcat(pc.w_blocks, sys.n));
    const Index wwidth = 2 * sys.p;
    const auto need = static_cast<std::size_t>(std::max<Index>(0, (r + wwidth - 1) / wwidth - static_cast<Index>(pcs.size())));
    std::vector<Scalar> extras;
    detail::Assembled aw = detail::assemble(wblocks, sys.n, r);
    for (std::size_t want = std::max<std::size_t>(need, 1); aw.q.cols() < r; want *= 2) {
        if (want > static_cast<std::size_t>(64 * r)) break;
        extras = extra_points(lo, hi, pcs.size(), want);
        wblocks.resize(pcs.size());
        wonly.clear();
        for (const auto& s : extras) {
            InterpolationCondition cond;
            wblocks.push_back(detail::w_only_block(tf, method, s, cond));
            wonly.push_back(cond);
        }
        aw = detail::assemble(wblocks, sys.n, r);
    }
    if (aw.q.cols() != r) throw TargetOrderUnreachable("strategy_equi: sampled W space has rank below r");
    basis.W = aw.q;
    for (const auto& s : extras) basis.points_used.points.push_back(s);
    for (std::size_t i = 0; i < pcs.size(); ++i) {
        const auto& pc = pcs[i];
        const auto& list = av.retained[i] && aw.retained[i] ? pc.joint_conditions
                           : av.retained[i]                ? pc.v_conditions
                           : aw.retained[i]                ? pc.w_conditions
                                                           : std::vector<InterpolationCondition>{};
        basis.guaranteed_conditions.insert(basis.guaranteed_conditions.end(), list.begin(), list.end());
        if (av.retained[i] && aw.retained[i])
            for (const auto& c : pc.v_conditions) {
                bool present = false;
                for (const auto& d : list)
                    if (d.variant == c.variant && d.point == c.point) present = true;
                if (!present) basis.guaranteed_conditions.push_back(c);
            }
    }
    for (std::size_t j = 0; j < extras.size(); ++j)
        if (aw.retained[pcs.size() + j]) basis.guaranteed_conditions.push_back(wonly[j]);
    basis.work = detail::work_of(tf);
    return basis;
}

/// Oversampled interpolation bases compressed to order r. Nothing is
/// guaranteed to interpolate exactly.
[[nodiscard]] inline ReductionBasis strategy_avg(const StructuredQBSystem& sys, Method method, Sidedness side, Index r,
                                                 std::pair<double, double> freq_range, std::size_t oversample,
                                                 Compression compression = Compression::pivoted_qr) {
    if (r < 1) throw TargetOrderUnreachable("strategy_avg: r must be positive");
    if (oversample < 1) throw TargetOrderUnreachable("strategy_avg: need at least one sample point");
    TransferFunctions tf(sys);
    const auto [lo, hi] = freq_range;
    auto compress = [&](const Matrix& x, const char* what) -> Matrix {
        const Matrix xr = realify(x);
        if (xr.cols() < r)
            throw TargetOrderUnreachable(std::string("strategy_avg: ") + what + " samples provide fewer than r columns");
        try {
            return compression == Compression::svd ? truncated_svd_basis(xr, r) : pivoted_qr_basis(xr, r);
        } catch (const RankTooSmall& e) {
            throw TargetOrderUnreachable(std::string("strategy_avg: ") + what + " samples: " + e.what());
        }
    };

    const auto pts = log_center_points(lo, hi, oversample);
    std::vector<Matrix> vblocks;
    for (const auto& s : pts) {
        if (method == Method::SymInt) {
            const Matrix v1 = sym_block_v1(tf, s);
            vblocks.push_back(v1);
            vblocks.push_back(sym_block_v2(tf, s, v1));
        } else {
            const auto g = gen_blocks(tf, s, s, s, false);
            vblocks.push_back(g.v11);
            vblocks.push_back(g.v2);
            vblocks.push_back(g.v32);
        }
    }
    ReductionBasis basis;
    basis.method_tag = method_tag(method, side, true);
    basis.points_used = {pts, ClosurePolicy::conjugate_closed};
    basis.V = compress(detail::hcat(vblocks, sys.n), "V");
    if (side == Sidedness::V) {
        basis.W = basis.V;
    } else {
        std::size_t wcount = method == Method::SymInt ? 2 * oversample : oversample;
        wcount = std::max(wcount, static_cast<std::size_t>((r + 2 * sys.p - 1) / (2 * sys.p)));
        std::vector<Scalar> wpts;
        for (;; wcount *= 2) {
            wpts = log_center_points(lo, hi, wcount);
            std::vector<Matrix> wblocks;
            for (const auto& s : wpts) {
                InterpolationCondition unused;
                wblocks.push_back(detail::w_only_block(tf, method, s, unused));
            }
            try {
                basis.W = compress(detail::hcat(wblocks, sys.n), "W");
                break;
            } catch (const TargetOrderUnreachable&) {
                if (wcount > static_cast<std::size_t>(8 * r)) throw;
            }
        }
        for (const auto& s : wpts) basis.points_used.points.push_back(s);
    }
    basis.work = detail::work_of(tf);
    return basis;
}

}  // namespace qbmor
