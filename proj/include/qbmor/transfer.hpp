#pragma once

#include <qbmor/errors.hpp>
#include <qbmor/linalg.hpp>
#include <qbmor/system.hpp>

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace qbmor {

/// s1[, s2[, s3]]
using FrequencyPoint = std::vector<Scalar>;

enum class TFVariant { symmetric, gen_B, gen_NB, gen_NNB, gen_HBB };

[[nodiscard]] inline std::string to_string(TFVariant v) {
    switch (v) {
        case TFVariant::symmetric: return "sym";
        case TFVariant::gen_B: return "B";
        case TFVariant::gen_NB: return "NB";
        case TFVariant::gen_NNB: return "NNB";
        case TFVariant::gen_HBB: return "HBB";
    }
    return "?";
}

/// Number of frequency arguments of a generalized variant.
[[nodiscard]] constexpr int arity(TFVariant v) {
    switch (v) {
        case TFVariant::gen_B: return 1;
        case TFVariant::gen_NB: return 2;
        case TFVariant::gen_NNB: return 3;
        case TFVariant::gen_HBB: return 3;
        default: return 0;
    }
}

struct TFValue {
    int level = 1;
    TFVariant variant = TFVariant::symmetric;
    Matrix matrix;
};

/// Evaluates structured transfer functions of one system, caching the
/// factorizations of K(s) by exact argument. Safe for concurrent use. Holds a
/// reference to `sys`, which must outlive it.
class TransferFunctions {
public:
    explicit TransferFunctions(const StructuredQBSystem& sys, bool cache = true) : sys_(&sys), cache_(cache) {
        sys.validate();
    }
    explicit TransferFunctions(StructuredQBSystem&&, bool = true) = delete;

    [[nodiscard]] const StructuredQBSystem& system() const noexcept { return *sys_; }

    /// Factorization of K(s); SingularMatrix names s.
    [[nodiscard]] std::shared_ptr<const LuFactorization> factor(Scalar s) const {
        const Key key{s.real(), s.imag()};
        if (cache_) {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = lu_cache_.find(key);
            if (it != lu_cache_.end()) return it->second;
        }
        std::shared_ptr<const LuFactorization> f;
        try {
            f = std::make_shared<const LuFactorization>(lu_factor(sys_->K.eval_sparse(s)));
        } catch (const SingularMatrix&) {
            throw SingularMatrix("K(s) is singular", s);
        }
        ++factorizations_;
        if (cache_) {
            std::lock_guard<std::mutex> lock(mutex_);
            lu_cache_.emplace(key, f);
        }
        return f;
    }

    /// K(s)^{-1} X
    [[nodiscard]] Matrix solve(Scalar s, const Matrix& x) const {
        solves_ += x.cols();
        return factor(s)->solve(x);
    }

    /// K(s)^{-H} X
    [[nodiscard]] Matrix solve_adjoint(Scalar s, const Matrix& x) const {
        solves_ += x.cols();
        return factor(s)->solve_adjoint(x);
    }

    [[nodiscard]] Matrix psi1(Scalar s1) const { return solve(s1, sys_->B.eval(s1)); }

    /// Psi_2 from precomputed Psi_1 values.
    [[nodiscard]] Matrix psi2(Scalar s1, Scalar s2, const Matrix& p1, const Matrix& p2) const {
        Matrix rhs = sys_->H.apply(s1, s2, p1, p2);
        rhs += sys_->H.apply(s2, s1, p2, p1);
        rhs += sys_->apply_N(s1, p1);
        rhs += sys_->apply_N(s2, p2);
        return 0.5 * solve(s1 + s2, rhs);
    }

    [[nodiscard]] Matrix psi2(Scalar s1, Scalar s2) const { return psi2(s1, s2, psi1(s1), psi1(s2)); }

    [[nodiscard]] Matrix psi3(Scalar s1, Scalar s2, Scalar s3) const {
        const Matrix p1 = psi1(s1);
        const Matrix p2 = psi1(s2);
        const Matrix p3 = psi1(s3);
        const Matrix p12 = psi2(s1, s2, p1, p2);
        const Matrix p13 = psi2(s1, s3, p1, p3);
        const Matrix p23 = psi2(s2, s3, p2, p3);
        const auto& h = sys_->H;
        Matrix rhs = h.apply(s1 + s2, s3, p12, p3);
        rhs += h.apply(s1 + s3, s2, p13, p2);
        rhs += h.apply(s2 + s3, s1, p23, p1);
        rhs += h.apply(s1, s2 + s3, p1, p23);
        rhs += h.apply(s2, s1 + s3, p2, p13);
        rhs += h.apply(s3, s1 + s2, p3, p12);
        rhs += sys_->apply_N(s1 + s2, p12);
        rhs += sys_->apply_N(s1 + s3, p13);
        rhs += sys_->apply_N(s2 + s3, p23);
        return solve(s1 + s2 + s3, rhs) / 6.0;
    }

    /// Input-to-state transition of the symmetric transfer function.
    [[nodiscard]] Matrix state(int level, const FrequencyPoint& pt) const {
        check_point(level, pt);
        switch (level) {
            case 1: return psi1(pt[0]);
            case 2: return psi2(pt[0], pt[1]);
            default: return psi3(pt[0], pt[1], pt[2]);
        }
    }

    /// G_k = C(s1 + ... + sk) Psi_k
    [[nodiscard]] Matrix sym(int level, const FrequencyPoint& pt) const {
        check_point(level, pt);
        Scalar total = 0.0;
        for (const auto& s : pt) total += s;
        return sys_->C.apply(total, state(level, pt));
    }

    [[nodiscard]] Matrix gen(TFVariant variant, const FrequencyPoint& pt) const {
        const int k = arity(variant);
        if (k == 0) throw Error("gen: symmetric is not a generalized variant");
        if (static_cast<int>(pt.size()) != k) throw DimensionMismatch("gen: wrong number of frequency arguments");
        switch (variant) {
            case TFVariant::gen_B: return sys_->C.apply(pt[0], psi1(pt[0]));
            case TFVariant::gen_NB: {
                const Matrix x = solve(pt[1], sys_->apply_N(pt[0], psi1(pt[0])));
                return sys_->C.apply(pt[1], x);
            }
            case TFVariant::gen_NNB: {
                const Matrix x1 = solve(pt[1], sys_->apply_N(pt[0], psi1(pt[0])));
                const Matrix x2 = solve(pt[2], sys_->apply_N(pt[1], x1));
                return sys_->C.apply(pt[2], x2);
            }
            case TFVariant::gen_HBB: {
                const Matrix x = solve(pt[2], sys_->H.apply(pt[1], pt[0], psi1(pt[1]), psi1(pt[0])));
                return sys_->C.apply(pt[2], x);
            }
            default: break;
        }
        throw Error("gen: unreachable");
    }

    [[nodiscard]] Matrix value(TFVariant variant, const FrequencyPoint& pt) const {
        if (variant == TFVariant::symmetric) return sym(static_cast<int>(pt.size()), pt);
        return gen(variant, pt);
    }

    [[nodiscard]] std::size_t factorizations() const noexcept { return factorizations_.load(); }
    [[nodiscard]] std::size_t solves() const noexcept { return solves_.load(); }

    void clear_cache() const {
        std::lock_guard<std::mutex> lock(mutex_);
        lu_cache_.clear();
    }

private:
    using Key = std::pair<double, double>;

    static void check_point(int level, const FrequencyPoint& pt) {
        if (level < 1 || level > 3) throw Error("transfer functions are available for levels 1 to 3");
        if (static_cast<int>(pt.size()) != level) throw DimensionMismatch("frequency point length must equal the level");
    }

    const StructuredQBSystem* sys_;
    bool cache_;
    mutable std::mutex mutex_;
    mutable std::map<Key, std::shared_ptr<const LuFactorization>> lu_cache_;
    mutable std::atomic<std::size_t> factorizations_{0};
    mutable std::atomic<std::size_t> solves_{0};
};

[[nodiscard]] inline Matrix symtf_state(int level, const StructuredQBSystem& sys, const FrequencyPoint& pt) {
    return TransferFunctions(sys).state(level, pt);
}

[[nodiscard]] inline TFValue sym_tf(int level, const StructuredQBSystem& sys, const FrequencyPoint& pt) {
    return {level, TFVariant::symmetric, TransferFunctions(sys).sym(level, pt)};
}

[[nodiscard]] inline TFValue gen_tf(TFVariant variant, const StructuredQBSystem& sys, const FrequencyPoint& pt) {
    return {arity(variant), variant, TransferFunctions(sys).gen(variant, pt)};
}

/// Calls f(i, G1(i omega_i)) for every grid point; singular points are
/// reported through `on_singular(i)` and skipped.
inline void for_each_level1(const StructuredQBSystem& sys, const std::vector<double>& grid,
                            const std::function<void(std::size_t, const Matrix&)>& f,
                            const std::function<void(std::size_t)>& on_singular = {}) {
    TransferFunctions tf(sys, false);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        try {
            f(i, tf.sym(1, {Scalar(0.0, grid[i])}));
        } catch (const SingularMatrix&) {
            if (on_singular) on_singular(i);
        }
    }
}

/// Calls f(i, j, G2(i omega1_i, i omega2_j)) over the product grid. Psi_1 and
/// the bilinear products are computed once per grid point; factorizations at
/// the sums are not cached. Symmetric grids are evaluated on one triangle.
inline void for_each_level2(const StructuredQBSystem& sys, const std::vector<double>& grid1,
                            const std::vector<double>& grid2,
                            const std::function<void(std::size_t, std::size_t, const Matrix&)>& f,
                            const std::function<void(std::size_t, std::size_t)>& on_singular = {}) {
    TransferFunctions tf(sys, false);
    struct PointData {
        Scalar s;
        bool ok = false;
        Matrix psi;
        Matrix npsi;
        std::vector<SparseMatrix> left;  // H_t (psi (x) I) per H term
    };
    const auto& hterms = sys.H.terms();
    auto prepare = [&](const std::vector<double>& grid) {
        std::vector<PointData> out(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            out[i].s = Scalar(0.0, grid[i]);
            try {
                out[i].psi = tf.psi1(out[i].s);
                out[i].npsi = sys.apply_N(out[i].s, out[i].psi);
                for (const auto& t : hterms) out[i].left.push_back(left_apply_quadratic(t.op, out[i].psi));
                out[i].ok = true;
            } catch (const SingularMatrix&) {
            }
        }
        return out;
    };
    const bool same = grid1 == grid2;
    const auto d1 = prepare(grid1);
    const auto d2 = same ? d1 : prepare(grid2);
    const bool quad = !sys.H.is_zero();
    for (std::size_t i = 0; i < d1.size(); ++i) {
        for (std::size_t j = same ? i : 0; j < d2.size(); ++j) {
            const auto& a = d1[i];
            const auto& b = d2[j];
            bool ok = a.ok && b.ok;
            Matrix g;
            if (ok) {
                try {
                    Matrix rhs = a.npsi + b.npsi;
                    if (quad) {
                        for (std::size_t t = 0; t < hterms.size(); ++t) {
                            const auto& term = hterms[t];
                            if (a.left[t].nonZeros() > 0)
                                rhs += term.g(a.s) * term.h(b.s) * apply_left_applied(a.left[t], sys.n, b.psi);
                            if (b.left[t].nonZeros() > 0)
                                rhs += term.g(b.s) * term.h(a.s) * apply_left_applied(b.left[t], sys.n, a.psi);
                        }
                    }
                    const Scalar sum = a.s + b.s;
                    g = sys.C.apply(sum, Matrix(0.5 * tf.factor(sum)->solve(rhs)));
                } catch (const SingularMatrix&) {
                    ok = false;
                }
            }
            if (!ok) {
                if (on_singular) {
                    on_singular(i, j);
                    if (same && i != j) on_singular(j, i);
                }
                continue;
            }
            f(i, j, g);
            if (same && i != j) f(j, i, g);
        }
    }
}

struct SweepPoint {
    double omega = 0.0;
    double value = 0.0;
    bool ok = true;
};

/// ||G1(i omega)||_2 over the grid.
[[nodiscard]] inline std::vector<SweepPoint> sweep_level1(const StructuredQBSystem& sys, const std::vector<double>& grid) {
    std::vector<SweepPoint> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i].omega = grid[i];
    for_each_level1(
        sys, grid, [&](std::size_t i, const Matrix& g) { out[i].value = spectral_norm(g); },
        [&](std::size_t i) { out[i].ok = false; });
    return out;
}

struct Sweep2 {
    RealMatrix values;
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> ok;
};

/// ||G2(i omega1, i omega2)||_2 over the product grid.
[[nodiscard]] inline Sweep2 sweep_level2(const StructuredQBSystem& sys, const std::vector<double>& grid1,
                                         const std::vector<double>& grid2) {
    const auto n1 = static_cast<Index>(grid1.size());
    const auto n2 = static_cast<Index>(grid2.size());
    Sweep2 out{RealMatrix::Zero(n1, n2), Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n1, n2, true)};
    for_each_level2(
        sys, grid1, grid2,
        [&](std::size_t i, std::size_t j, const Matrix& g) {
            out.values(static_cast<Index>(i), static_cast<Index>(j)) = spectral_norm(g);
        },
        [&](std::size_t i, std::size_t j) { out.ok(static_cast<Index>(i), static_cast<Index>(j)) = false; });
    return out;
}

/// n points logarithmically equidistant in [lo, hi].
[[nodiscard]] inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

}  // namespace qbmor
