#pragma once

#include <qbmor/errors.hpp>
#include <qbmor/integration.hpp>
#include <qbmor/interpolation.hpp>
#include <qbmor/linalg.hpp>
#include <qbmor/system.hpp>

#include <string>
#include <vector>

namespace qbmor {

struct SnapshotSet {
    RealMatrix states;
    std::vector<double> times;
    std::string input_descriptor;
    /// implicit time steps spent collecting the snapshots
    std::size_t steps = 0;
};

/// Every stride-th state of the unit step response, one simulation per
/// input channel. Second-order systems contribute position and velocity
/// snapshots side by side, so the set lives in the n-dimensional
/// configuration space.
[[nodiscard]] inline SnapshotSet collect_snapshots(const StructuredQBSystem& sys, double t_final, double step,
                                                   Index stride = 1) {
    SnapshotSet out;
    out.input_descriptor = "unit_step";
    IntegratorOptions opt;
    opt.keep_states = true;
    opt.stride = stride;
    std::vector<RealMatrix> parts;
    for (Index j = 0; j < sys.m; ++j) {
        RealVector amp = RealVector::Zero(sys.m);
        amp(j) = 1.0;
        const auto tr = simulate(sys, InputSignal::constant(amp), t_final, step, opt);
        out.steps += static_cast<std::size_t>(std::llround(t_final / step));
        if (sys.structure == Structure::second_order) {
            parts.push_back(tr.states.topRows(sys.n));
            parts.push_back(tr.states.bottomRows(sys.n));
        } else {
            parts.push_back(tr.states);
        }
        out.times.insert(out.times.end(), tr.times.begin(), tr.times.end());
    }
    Index cols = 0;
    for (const auto& p : parts) cols += p.cols();
    out.states.resize(sys.n, cols);
    Index c = 0;
    for (const auto& p : parts) {
        out.states.middleCols(c, p.cols()) = p;
        c += p.cols();
    }
    return out;
}

/// r leading left singular vectors of the snapshot matrix, V = W.
[[nodiscard]] inline ReductionBasis pod_basis(const SnapshotSet& snaps, Index r, const std::string& tag = "POD") {
    ReductionBasis b;
    b.V = truncated_svd_basis(snaps.states.cast<Scalar>(), r);
    b.W = b.V;
    b.method_tag = tag;
    b.work.solves = snaps.steps;
    return b;
}

}  // namespace qbmor
