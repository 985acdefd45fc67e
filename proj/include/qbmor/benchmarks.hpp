#pragma once

#include <qbmor/errors.hpp>
#include <qbmor/linalg.hpp>
#include <qbmor/system.hpp>

#include <cmath>
#include <numbers>
#include <vector>

namespace qbmor {

struct HeatedRodConfig {
    Index n = 200;
    double tau = 1.0;
};

/// Time-delayed reaction-diffusion rod on (0, pi) with homogeneous Dirichlet
/// ends, central differences on n interior nodes.
///   E = I, A = Laplacian - diag(2 sin z), A_d = diag(2 sin z),
///   H(x (x) x)_i = -2 sin(z_i) x_i^2, N_j = diag(b_j), B = [b_1 b_2],
/// b_1 the indicator of z < pi/3, b_2 = 1 - b_1; y_1, y_2 are the means over
/// the first and second half of the nodes.
[[nodiscard]] inline StructuredQBSystem build_heated_rod(const HeatedRodConfig& cfg) {
    const Index n = cfg.n;
    if (n < 3) throw Error("heated rod: n must be at least 3");
    if (!(cfg.tau >= 0.0)) throw NegativeDelay("heated rod: tau must be non-negative");
    const double h = std::numbers::pi / static_cast<double>(n + 1);
    const double ih2 = 1.0 / (h * h);
    std::vector<Eigen::Triplet<Scalar>> ta, td, te;
    std::vector<SparseMatrix> slices;
    slices.reserve(static_cast<std::size_t>(n));
    SparseMatrix b(n, 2);
    std::vector<Eigen::Triplet<Scalar>> tb;
    SparseMatrix c(2, n);
    std::vector<Eigen::Triplet<Scalar>> tc;
    const Index first = (n + 1) / 2;  // nodes with index < n/2
    for (Index i = 0; i < n; ++i) {
        const double z = static_cast<double>(i + 1) * h;
        const double react = 2.0 * std::sin(z);
        te.emplace_back(i, i, 1.0);
        ta.emplace_back(i, i, -2.0 * ih2 - react);
        if (i > 0) ta.emplace_back(i, i - 1, ih2);
        if (i + 1 < n) ta.emplace_back(i, i + 1, ih2);
        td.emplace_back(i, i, react);
        SparseMatrix s(n, n);
        s.insert(i, i) = -react;
        slices.push_back(std::move(s));
        tb.emplace_back(i, z < std::numbers::pi / 3.0 ? 0 : 1, 1.0);
        if (2 * i < n)
            tc.emplace_back(0, i, 1.0 / static_cast<double>(first));
        else
            tc.emplace_back(1, i, 1.0 / static_cast<double>(n - first));
    }
    SparseMatrix e(n, n), a(n, n), ad(n, n);
    e.setFromTriplets(te.begin(), te.end());
    a.setFromTriplets(ta.begin(), ta.end());
    ad.setFromTriplets(td.begin(), td.end());
    b.setFromTriplets(tb.begin(), tb.end());
    c.setFromTriplets(tc.begin(), tc.end());
    std::vector<SparseMatrix> nlist{SparseMatrix(n, n), SparseMatrix(n, n)};
    for (int j = 0; j < 2; ++j) {
        std::vector<Eigen::Triplet<Scalar>> tn;
        for (Index i = 0; i < n; ++i)
            if (b.coeff(i, j) != Scalar(0)) tn.emplace_back(i, i, 1.0);
        nlist[static_cast<std::size_t>(j)].setFromTriplets(tn.begin(), tn.end());
    }
    return preset_time_delay(e, {a, ad}, {0.0, cfg.tau}, QuadraticOperator(std::move(slices)), nlist, b, c);
}

struct TodaConfig {
    Index ell = 100;
    /// stiffness k_j, damping d_j (uniform when a single value is given)
    std::vector<double> stiffness{1.0};
    std::vector<double> damping{0.1};
    /// particle driven by the input and particle whose velocity is observed
    Index input_particle = 0;
    Index output_particle = 0;

    [[nodiscard]] double k(Index j) const {
        return stiffness.size() == 1 ? stiffness[0] : stiffness.at(static_cast<std::size_t>(j));
    }
    [[nodiscard]] double d(Index j) const {
        return damping.size() == 1 ? damping[0] : damping.at(static_cast<std::size_t>(j));
    }
};

/// Row index separating the physical positions from the auxiliary variables.
[[nodiscard]] inline Index toda_split_row(const TodaConfig& cfg) { return cfg.ell; }

/// Quadratic-bilinear second-order form of the Toda lattice in the stacked
/// variables Q = [q; z], z_j = exp(k_j (q_j - q_{j+1})) - 1 (z_l = exp(k_l q_l) - 1):
///   q'' = -Dt q' - L z + Bt u
///   z_j'' = k_j z_j' (P q')_j + k_j (z_j + 1) (P q'')_j
/// with P q = (q_j - q_{j+1})_j and (L z)_j = z_j - z_{j-1}.
[[nodiscard]] inline StructuredQBSystem build_toda(const TodaConfig& cfg) {
    const Index l = cfg.ell;
    if (l < 1) throw Error("toda: need at least one particle");
    for (Index j = 0; j < l; ++j)
        if (!(cfg.k(j) > 0.0) || !(cfg.d(j) >= 0.0)) throw Error("toda: need k_j > 0 and d_j >= 0");
    if (cfg.input_particle < 0 || cfg.input_particle >= l || cfg.output_particle < 0 || cfg.output_particle >= l)
        throw Error("toda: input/output particle out of range");
    const Index n = 2 * l;
    // P (upper bidiagonal), L (lower bidiagonal), PL, P Dt as dense-by-row helpers
    auto p_entry = [&](Index j, Index c) -> double { return c == j ? 1.0 : (c == j + 1 && j + 1 < l ? -1.0 : 0.0); };
    auto l_entry = [&](Index j, Index c) -> double { return c == j ? 1.0 : (c + 1 == j ? -1.0 : 0.0); };
    auto pl_entry = [&](Index j, Index c) {
        double s = 0.0;
        for (Index t = j; t <= std::min(j + 1, l - 1); ++t) s += p_entry(j, t) * l_entry(t, c);
        return s;
    };
    auto pd_entry = [&](Index j, Index c) { return p_entry(j, c) * cfg.d(c); };
    auto pb = [&](Index j) { return p_entry(j, cfg.input_particle); };

    std::vector<Eigen::Triplet<Scalar>> tm, td, tk, tb, tnp, tc;
    std::vector<std::vector<Eigen::Triplet<Scalar>>> hvv(static_cast<std::size_t>(n)), hpv(static_cast<std::size_t>(n)),
        hpp(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) tm.emplace_back(i, i, 1.0);
    for (Index j = 0; j < l; ++j) {
        const double kj = cfg.k(j);
        td.emplace_back(j, j, cfg.d(j));
        for (Index c = std::max<Index>(0, j - 1); c <= j; ++c)
            if (l_entry(j, c) != 0.0) tk.emplace_back(j, l + c, l_entry(j, c));
        const Index zr = l + j;
        for (Index c = j; c <= std::min(j + 1, l - 1); ++c) {
            const double pd = pd_entry(j, c);
            if (pd != 0.0) {
                td.emplace_back(zr, c, kj * pd);
                hpv[static_cast<std::size_t>(zr)].emplace_back(zr, c, kj * pd);
            }
            const double pe = p_entry(j, c);
            if (pe != 0.0) hvv[static_cast<std::size_t>(zr)].emplace_back(zr, c, -kj * pe);
        }
        for (Index c = std::max<Index>(0, j - 1); c <= std::min(j + 1, l - 1); ++c) {
            const double v = pl_entry(j, c);
            if (v != 0.0) {
                tk.emplace_back(zr, l + c, kj * v);
                hpp[static_cast<std::size_t>(zr)].emplace_back(zr, l + c, kj * v);
            }
        }
        if (pb(j) != 0.0) {
            tb.emplace_back(zr, 0, kj * pb(j));
            tnp.emplace_back(zr, zr, kj * pb(j));
        }
    }
    tb.emplace_back(cfg.input_particle, 0, 1.0);
    tc.emplace_back(0, cfg.output_particle, 1.0);

    auto make = [&](Index rows, Index cols, const std::vector<Eigen::Triplet<Scalar>>& t) {
        SparseMatrix s(rows, cols);
        s.setFromTriplets(t.begin(), t.end());
        return s;
    };
    auto make_op = [&](const std::vector<std::vector<Eigen::Triplet<Scalar>>>& per_slice) {
        std::vector<SparseMatrix> slices;
        for (const auto& t : per_slice) slices.push_back(make(n, n, t));
        return QuadraticOperator(std::move(slices));
    };
    SecondOrderQuadratic h{make_op(hpp), make_op(hpv), QuadraticOperator::zero(n), make_op(hvv)};
    return preset_second_order(make(n, n, tm), make(n, n, td), make(n, n, tk), h, {make(n, n, tnp)},
                               {SparseMatrix(n, n)}, make(n, 1, tb), SparseMatrix(1, n), make(1, n, tc));
}

}  // namespace qbmor
