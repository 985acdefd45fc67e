// Reduces the heated rod with SymInt(V,equi), re-checks the interpolation
// conditions and compares a step response.
#include <qbmor/benchmarks.hpp>
#include <qbmor/integration.hpp>
#include <qbmor/interpolation.hpp>
#include <qbmor/metrics.hpp>
#include <qbmor/projection.hpp>

#include <cstdio>

int main() {
    using namespace qbmor;
    const auto sys = build_heated_rod({100, 1.0});
    const auto basis = strategy_equi(sys, Method::SymInt, Sidedness::V, 16, {1e-3, 1e3});
    auto red = project(sys, basis, "heated_rod(n=100)");
    verify(sys, red);
    std::printf("%s: order %ld, %zu conditions\n", basis.method_tag.c_str(), static_cast<long>(red.system.n),
                red.ledger.size());
    for (const auto& c : red.ledger)
        std::printf("  %-12s at %zu point(s)  relerr %.3e  %s\n", to_string(c.condition.variant).c_str(),
                    c.condition.point.size(), c.relative_error, c.pass ? "ok" : "FAIL");

    const auto u = InputSignal::unit_step(sys.m);
    const auto y = simulate(sys, u, 5.0, 1e-2);
    const auto yr = simulate(red.system, u, 5.0, 1e-2);
    std::printf("step response relerr_L2 = %.4e\n", relerr_L2(y, yr));
    std::printf("level-1 relerr_Hinf = %.4e\n", relerr_Hinf_1(sys, red.system, log_grid(1e-3, 1e3, 100)));
    return red.all_pass() ? 0 : 1;
}
