#pragma once

#include <qbmor/errors.hpp>
#include <qbmor/linalg.hpp>
#include <qbmor/system.hpp>

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace qbmor {

using RealSparse = Eigen::SparseMatrix<double, Eigen::ColMajor>;

/// Sampled input signal u(t), m x n_t, linearly interpolated between
/// samples and held constant outside.
struct InputSignal {
    std::vector<double> times;
    RealMatrix values;

    [[nodiscard]] Index channels() const noexcept { return values.rows(); }

    [[nodiscard]] RealVector at(double t) const {
        if (times.empty()) return RealVector::Zero(values.rows());
        if (t <= times.front()) return values.col(0);
        if (t >= times.back()) return values.col(values.cols() - 1);
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        const auto j = static_cast<Index>(it - times.begin());
        const double t0 = times[static_cast<std::size_t>(j - 1)];
        const double t1 = times[static_cast<std::size_t>(j)];
        const double w = (t - t0) / (t1 - t0);
        return (1.0 - w) * values.col(j - 1) + w * values.col(j);
    }

    /// u_j(t) = amplitude_j for all t.
    [[nodiscard]] static InputSignal constant(const RealVector& amplitude) {
        InputSignal u;
        u.times = {0.0};
        u.values = amplitude;
        return u;
    }

    [[nodiscard]] static InputSignal unit_step(Index m) { return constant(RealVector::Ones(m)); }
    [[nodiscard]] static InputSignal zero(Index m) { return constant(RealVector::Zero(m)); }
};

/// Gaussian-process draw with constant mean and squared exponential kernel.
struct GPInputSignal : InputSignal {
    double mean = 0.0;
    double smoothing = 0.0;
    std::uint64_t seed = 0;
    double jitter = 0.0;
};

/// m independent draws mu + L z on `grid`, L the Cholesky factor of the
/// kernel Gram matrix with escalating diagonal jitter.
[[nodiscard]] inline GPInputSignal sample_gp_input(double mu, double smoothing, const std::vector<double>& grid,
                                                   std::uint64_t seed, Index m) {
    if (!(smoothing >= 0.0)) throw Error("sample_gp_input: smoothing must be >= 0");
    const auto nt = static_cast<Index>(grid.size());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    RealMatrix z(nt, m);
    for (Index j = 0; j < m; ++j)
        for (Index i = 0; i < nt; ++i) z(i, j) = normal(rng);
    double jitter = 0.0;
    RealMatrix draws = z;
    if (smoothing > 0.0) {
        RealMatrix gram(nt, nt);
        for (Index i = 0; i < nt; ++i) {
            for (Index j = 0; j < nt; ++j) {
                const double d = grid[static_cast<std::size_t>(i)] - grid[static_cast<std::size_t>(j)];
                gram(i, j) = std::exp(-d * d / (2.0 * smoothing * smoothing));
            }
        }
        Eigen::LLT<RealMatrix> llt(gram);
        for (double eps = 1e-10; llt.info() != Eigen::Success && eps <= 1.0; eps *= 10.0) {
            jitter = eps;
            llt.compute(gram + eps * RealMatrix::Identity(nt, nt));
        }
        if (llt.info() != Eigen::Success) throw Error("sample_gp_input: kernel Gram matrix not factorizable");
        draws = llt.matrixL() * z;
    }
    GPInputSignal u;
    u.times = grid;
    u.values = (draws.transpose().array() + mu).matrix();
    u.mean = mu;
    u.smoothing = smoothing;
    u.seed = seed;
    u.jitter = jitter;
    return u;
}

/// Uniform grid 0, step, ..., t_final.
[[nodiscard]] inline std::vector<double> uniform_grid(double t_final, double step) {
    const auto n = static_cast<std::size_t>(std::llround(t_final / step));
    std::vector<double> out(n + 1);
    for (std::size_t i = 0; i <= n; ++i) out[i] = static_cast<double>(i) * step;
    return out;
}

struct Trajectory {
    std::vector<double> times;
    RealMatrix outputs;
    RealMatrix states;
};

struct IntegratorOptions {
    double newton_tol = 1e-10;
    int max_newton = 25;
    double blowup = 1e12;
    bool keep_states = false;
    Index stride = 1;
};

namespace detail {

inline RealSparse real_part(const SparseMatrix& a, const char* what) {
    RealSparse out(a.rows(), a.cols());
    std::vector<Eigen::Triplet<double>> trips;
    for (Index k = 0; k < a.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
            if (std::abs(it.value().imag()) > 1e-12 * (1.0 + std::abs(it.value().real())))
                throw Error(std::string("time integration needs real matrices; ") + what + " is complex");
            if (it.value().real() != 0.0) trips.emplace_back(it.row(), it.col(), it.value().real());
        }
    }
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

/// Factorization of a real Jacobian, dense for small or dense inputs.
class RealLu {
public:
    void compute(const RealSparse& a) {
        const double n = static_cast<double>(a.rows());
        if (a.rows() <= 100 || static_cast<double>(a.nonZeros()) > 0.1 * n * n) {
            sparse_.reset();
            dense_ = std::make_unique<Eigen::PartialPivLU<RealMatrix>>(RealMatrix(a));
        } else {
            dense_.reset();
            if (!sparse_) sparse_ = std::make_unique<Eigen::SparseLU<RealSparse, Eigen::COLAMDOrdering<int>>>();
            RealSparse c = a;
            c.makeCompressed();
            sparse_->compute(c);
            if (sparse_->info() != Eigen::Success) throw IntegrationFailure("Newton Jacobian is singular");
        }
    }

    [[nodiscard]] RealVector solve(const RealVector& b) const {
        return dense_ ? RealVector(dense_->solve(b)) : RealVector(sparse_->solve(b));
    }

private:
    std::unique_ptr<Eigen::PartialPivLU<RealMatrix>> dense_;
    std::unique_ptr<Eigen::SparseLU<RealSparse, Eigen::COLAMDOrdering<int>>> sparse_;
};

/// Real first-order QB model with flattened quadratic coefficients.
struct RealQB {
    Index n = 0, m = 0, p = 0;
    RealSparse e, a, b, c;
    std::vector<RealSparse> a_delay;
    std::vector<Index> delay_steps;
    std::vector<double> tau;
    std::vector<RealSparse> nmat;
    // out_i += v * x_k * x_j
    struct QuadEntry {
        Index i, k, j;
        double v;
    };
    std::vector<QuadEntry> quad;

    [[nodiscard]] RealVector quadratic(const RealVector& x) const {
        RealVector out = RealVector::Zero(n);
        for (const auto& q : quad) out(q.i) += q.v * x(q.k) * x(q.j);
        return out;
    }

    [[nodiscard]] RealVector rhs(const RealVector& x, const RealVector& u, const RealVector& delayed_sum) const {
        RealVector f = a * x + delayed_sum + quadratic(x) + b * u;
        for (Index j = 0; j < m; ++j)
            if (u(j) != 0.0) f += u(j) * (nmat[static_cast<std::size_t>(j)] * x);
        return f;
    }

    /// d rhs / dx (without the delay terms)
    [[nodiscard]] RealSparse jacobian(const RealVector& x, const RealVector& u) const {
        std::vector<Eigen::Triplet<double>> trips;
        for (const auto& q : quad) {
            trips.emplace_back(q.i, q.k, q.v * x(q.j));
            trips.emplace_back(q.i, q.j, q.v * x(q.k));
        }
        RealSparse jq(n, n);
        jq.setFromTriplets(trips.begin(), trips.end());
        RealSparse j = a + jq;
        for (Index k = 0; k < m; ++k)
            if (u(k) != 0.0) j += u(k) * nmat[static_cast<std::size_t>(k)];
        return j;
    }
};

inline RealQB make_real(const StructuredQBSystem& sys, double step) {
    const auto fo = first_order_matrices(sys);
    RealQB q;
    q.n = fo.e.rows();
    q.m = fo.b.cols();
    q.p = fo.c.rows();
    q.e = real_part(fo.e, "E");
    q.a = real_part(fo.a, "A");
    q.b = real_part(fo.b, "B");
    q.c = real_part(fo.c, "C");
    for (std::size_t k = 0; k < fo.tau.size(); ++k) {
        const double ratio = fo.tau[k] / step;
        const auto d = static_cast<Index>(std::llround(ratio));
        if (d < 1 || std::abs(ratio - static_cast<double>(d)) > 1e-8 * std::max(1.0, ratio))
            throw Error("time step must divide every delay");
        q.a_delay.push_back(real_part(fo.a_delay[k], "A_d"));
        q.delay_steps.push_back(d);
        q.tau.push_back(fo.tau[k]);
    }
    for (const auto& nj : fo.n) q.nmat.push_back(real_part(nj, "N"));
    for (Index k = 0; k < fo.h.n(); ++k) {
        const RealSparse s = real_part(fo.h.slice(k), "H");
        for (Index col = 0; col < s.outerSize(); ++col)
            for (RealSparse::InnerIterator it(s, col); it; ++it) q.quad.push_back({it.row(), k, it.col(), it.value()});
    }
    return q;
}

}  // namespace detail

/// Implicit trapezoidal integration from zero initial state and zero
/// history. Each step solves the nonlinear stage equation by Newton's method
/// with the Jacobian frozen at the start of the step and refreshed when the
/// iteration stalls.
[[nodiscard]] inline Trajectory simulate(const StructuredQBSystem& sys, const InputSignal& u, double t_final, double step,
                                         const IntegratorOptions& opt = {}) {
    if (!(step > 0.0) || !(t_final >= 0.0)) throw Error("simulate: need step > 0 and t_final >= 0");
    if (u.channels() != sys.m) throw DimensionMismatch("simulate: input has wrong channel count");
    const auto q = detail::make_real(sys, step);
    const auto steps = static_cast<Index>(std::llround(t_final / step));
    const bool has_delay = !q.delay_steps.empty();
    const bool constant_jacobian = q.quad.empty() && q.nmat.empty();
    const Index stride = std::max<Index>(1, opt.stride);

    Trajectory tr;
    const Index kept = steps / stride + 1;
    tr.times.reserve(static_cast<std::size_t>(kept));
    tr.outputs.resize(q.p, kept);
    if (opt.keep_states) tr.states.resize(q.n, kept);

    std::vector<RealVector> history;
    if (has_delay) history.reserve(static_cast<std::size_t>(steps + 1));
    auto past = [&](Index idx) -> RealVector {
        if (idx < 0) return RealVector::Zero(q.n);
        return history[static_cast<std::size_t>(idx)];
    };
    auto delayed = [&](Index idx) {
        RealVector sum = RealVector::Zero(q.n);
        for (std::size_t k = 0; k < q.a_delay.size(); ++k) {
            const Index back = idx - q.delay_steps[k];
            if (back >= 0) sum += q.a_delay[k] * past(back);
        }
        return sum;
    };

    RealVector x = RealVector::Zero(q.n);
    RealVector u0 = u.at(0.0);
    RealVector f_old = q.rhs(x, u0, delayed(0));
    if (has_delay) history.push_back(x);
    auto record = [&](Index idx, const RealVector& state) {
        if (idx % stride != 0) return;
        const Index col = idx / stride;
        tr.times.push_back(static_cast<double>(idx) * step);
        tr.outputs.col(col) = q.c * state;
        if (opt.keep_states) tr.states.col(col) = state;
    };
    record(0, x);

    const double half = 0.5 * step;
    detail::RealLu lu;
    bool lu_ready = false;
    for (Index k = 1; k <= steps; ++k) {
        const double t = static_cast<double>(k) * step;
        const RealVector uk = u.at(t);
        const RealVector dk = delayed(k);
        const RealVector base = q.e * x + half * f_old;
        RealVector xn = x;
        auto residual = [&](const RealVector& z) -> RealVector {
            return RealVector(q.e * z) - half * q.rhs(z, uk, dk) - base;
        };
        auto refactor = [&](const RealVector& z) {
            lu.compute(RealSparse(q.e - half * q.jacobian(z, uk)));
            lu_ready = true;
        };
        if (!constant_jacobian || !lu_ready) refactor(xn);
        RealVector r = residual(xn);
        const double scale = std::max({1.0, x.lpNorm<Eigen::Infinity>(), base.lpNorm<Eigen::Infinity>()});
        bool converged = false;
        double prev = r.lpNorm<Eigen::Infinity>();
        for (int it = 0; it < opt.max_newton && !converged; ++it) {
            const RealVector dx = lu.solve(r);
            xn -= dx;
            if (!xn.allFinite()) throw IntegrationFailure("non-finite state at t = " + std::to_string(t));
            r = residual(xn);
            const double rn = r.lpNorm<Eigen::Infinity>();
            converged = rn <= opt.newton_tol * scale || dx.lpNorm<Eigen::Infinity>() <= 1e-14 * std::max(1.0, xn.lpNorm<Eigen::Infinity>());
            if (!converged && rn > 0.5 * prev && !constant_jacobian) refactor(xn);
            prev = rn;
        }
        if (!converged) throw IntegrationFailure("Newton iteration did not converge at t = " + std::to_string(t));
        if (!xn.allFinite() || xn.lpNorm<Eigen::Infinity>() > opt.blowup)
            throw IntegrationFailure("solution blew up at t = " + std::to_string(t));
        x = xn;
        f_old = q.rhs(x, uk, dk);
        if (has_delay) history.push_back(x);
        record(k, x);
    }
    return tr;
}

/// Second-order systems are integrated on their first-order companion
/// realization; outputs are Cp q + Cv q'.
[[nodiscard]] inline Trajectory simulate_second_order(const StructuredQBSystem& sys, const InputSignal& u, double t_final,
                                                      double step, const IntegratorOptions& opt = {}) {
    if (sys.structure != Structure::second_order) throw Error("simulate_second_order: not a second-order system");
    return simulate(sys, u, t_final, step, opt);
}

}  // namespace qbmor
