// Toda lattice with split congruence: one-sided interpolation basis enlarged
// to diag(V_q, V_z) and simulated under a smooth GP input.
#include <qbmor/benchmarks.hpp>
#include <qbmor/integration.hpp>
#include <qbmor/interpolation.hpp>
#include <qbmor/metrics.hpp>
#include <qbmor/projection.hpp>

#include <cstdio>

int main() {
    using namespace qbmor;
    TodaConfig cfg;
    cfg.ell = 40;
    const auto sys = build_toda(cfg);
    const auto basis = split_congruence(strategy_equi(sys, Method::SymInt, Sidedness::V, 12, {1e-3, 1e3}),
                                        toda_split_row(cfg));
    auto red = project(sys, basis, "toda(ell=40)");
    verify(sys, red);
    std::printf("%s: order %ld, self-check %s\n", basis.method_tag.c_str(), static_cast<long>(red.system.n),
                red.all_pass() ? "passed" : "FAILED");

    const auto grid = uniform_grid(10.0, 0.25);
    const auto u = sample_gp_input(0.0, 2.0, grid, 7, sys.m);
    const auto y = simulate(sys, u, 10.0, 1e-2);
    const auto yr = simulate(red.system, u, 10.0, 1e-2);
    std::printf("relerr_L2 = %.4e  relerr_Linf = %.4e\n", relerr_L2(y, yr), relerr_Linf(y, yr));
    return red.all_pass() ? 0 : 1;
}
