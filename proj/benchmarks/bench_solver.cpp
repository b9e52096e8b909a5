// Microbenchmarks for the hot paths: the pressure Poisson solve, one full
// projection step, and the advection operator.

#include <benchmark/benchmark.h>

#include "topoflow/ns_solver.hpp"

using namespace topoflow;

namespace {

ScalarField smooth_rhs(const Grid& g) {
    ScalarField rhs(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            rhs.at(i, j) = std::cos(M_PI * g.xc(i) / g.lx) * std::cos(M_PI * g.yc(j) / g.ly);
    return rhs;
}

StaggeredVelocity shear_field(const Grid& g) {
    StaggeredVelocity u(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) u.x(i, j) = std::sin(2.0 * M_PI * g.yc(j) / g.ly);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) u.y(i, j) = std::sin(2.0 * M_PI * g.xc(i) / g.lx);
    return u;
}

void BM_PoissonSolve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Grid g = build_grid(n, n, 1.0, 1.0);
    const ScalarField rhs = smooth_rhs(g);
    for (auto _ : state) {
        PoissonResult res = poisson_solve(rhs, 1e-10, 50000);
        benchmark::DoNotOptimize(res.p.v.data());
    }
    state.SetItemsProcessed(state.iterations() * g.cell_count());
}

void BM_ForwardStep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Grid g = build_grid(n, n, 1.0, 1.0);
    SolverConfig cfg;
    ForwardSolver solver(g, cfg, ScalarField(g), ForcingSpec::zero(),
                         BoundarySpec::lid(1.0, 0.1));
    for (auto _ : state) {
        if (solver.done()) state.SkipWithError("trajectory exhausted; raise T");
        solver.advance();
        benchmark::DoNotOptimize(solver.state().ux.data());
    }
    state.SetItemsProcessed(state.iterations() * g.cell_count());
}

void BM_Advection(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Grid g = build_grid(n, n, 1.0, 1.0);
    const StaggeredVelocity u = shear_field(g);
    StaggeredVelocity out(g);
    const WallSpeeds wall{};
    for (auto _ : state) {
        out.fill(0.0);
        add_advection(u, u, wall, -1.0, out);
        benchmark::DoNotOptimize(out.ux.data());
    }
    state.SetItemsProcessed(state.iterations() * g.cell_count());
}

} // namespace

BENCHMARK(BM_PoissonSolve)->Arg(64)->Arg(96)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForwardStep)->Arg(64)->Arg(96)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Advection)->Arg(64)->Arg(96)->Arg(128)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
