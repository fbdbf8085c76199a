#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "memwave/diagnostics.hpp"
#include "memwave/solver.hpp"

using namespace memwave;

static void BM_Convolve(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::vector<double> u(n, 1.0);
    auto h = [](double t) { return -std::exp(-2.0 * t); };
    for (auto _ : state) {
        auto out = convolve(h, u, 1e-3);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Convolve)->Range(256, 8192)->Complexity(benchmark::oNSquared);

static void BM_VolterraSolve(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = std::sin(1e-3 * static_cast<double>(i));
    auto h = [](double t) { return -std::exp(-2.0 * t); };
    for (auto _ : state) {
        auto phi = volterra_solve(h, rhs, 1e-3);
        benchmark::DoNotOptimize(phi.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_VolterraSolve)->Range(256, 8192)->Complexity(benchmark::oNSquared);

/// Cost of one leapfrog step as the stored history grows (the O(n) sweep).
static void BM_MemoryQuadrature(benchmark::State& state) {
    const auto grid = Grid::interval(1.0, 101);
    const auto kernel = MemoryKernel::poly_exp(2.0, 0.0, 1.0);
    const auto nl = Nonlinearity::zero();
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 1.0;
    WaveStepper stepper(grid, kernel, nl, cfg);
    auto sim = stepper.initial_state(InitialData::eigenmode(grid, 1));
    const auto row = laplacian(grid, sim.u);
    const std::int64_t depth = state.range(0);
    while (sim.n < depth) {
        sim.lap_history.push(row);
        sim.n += 1;
    }
    for (auto _ : state) {
        auto q = stepper.memory_term(sim);
        benchmark::DoNotOptimize(q.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MemoryQuadrature)->Range(256, 16384)->Complexity(benchmark::oN);

static void BM_Run1D(benchmark::State& state) {
    const auto grid = Grid::interval(1.0, 101);
    const auto kernel = MemoryKernel::poly_exp(2.0, 0.0, 1.0);
    const auto nl = Nonlinearity::sine(1.0);
    const auto ic = InitialData::eigenmode(grid, 1);
    SolverConfig cfg;
    cfg.dt = 2e-3;
    cfg.t_final = 0.25 * static_cast<double>(state.range(0));
    cfg.snapshot_every = 50;
    for (auto _ : state) {
        auto result = run(grid, kernel, nl, ic, cfg);
        benchmark::DoNotOptimize(result.summary.steps);
    }
}
BENCHMARK(BM_Run1D)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_PDCertify(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto cert = certify_positive_definite([](double t) { return std::exp(-t); }, 10.0, n);
        benchmark::DoNotOptimize(cert.min_eigenvalue);
    }
}
BENCHMARK(BM_PDCertify)->Arg(50)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

static void BM_EnergyReport(benchmark::State& state) {
    const auto grid = Grid::interval(1.0, 101);
    const auto kernel = MemoryKernel::poly_exp(2.0, 0.0, 1.0);
    const auto nl = Nonlinearity::sine(1.0);
    SolverConfig cfg;
    cfg.dt = 2e-3;
    cfg.t_final = 2.0;
    cfg.snapshot_every = static_cast<int>(state.range(0));
    const auto result = run(grid, kernel, nl, InitialData::eigenmode(grid, 1), cfg);
    for (auto _ : state) {
        auto report = build_energy_report(result.trajectory, grid, kernel, nl);
        benchmark::DoNotOptimize(report.records.data());
    }
}
BENCHMARK(BM_EnergyReport)->Arg(10)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_SmallestEigenvalue2D(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto grid = Grid::rectangle(1.0, 1.0, n, n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(smallest_eigenvalue(grid));
    }
}
BENCHMARK(BM_SmallestEigenvalue2D)->Arg(21)->Arg(41)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
