#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>

#include "memwave/diagnostics.hpp"
#include "memwave/solver.hpp"

using namespace memwave;
namespace nums = std::numbers;

namespace {

double l2_error_vs_standing_wave(const Grid& grid, const TrajectoryRecord& rec) {
    double acc = 0.0;
    for (int i = 1; i <= grid.interior_nodes(0); ++i) {
        const double exact =
            std::cos(nums::pi * rec.t) * std::sin(nums::pi * grid.coord_x(i));
        const double d = rec.u[grid.interior_index(i)] - exact;
        acc += d * d;
    }
    return std::sqrt(acc * grid.cell_volume());
}

} // namespace

TEST_CASE("memory-free eigenmode follows cos(pi t) sin(pi x)") {
    const auto grid = Grid::interval(1.0, 101);
    SolverConfig cfg;
    cfg.dt = 5e-3;
    cfg.t_final = 1.0;
    cfg.snapshot_every = 20;
    const auto result = run(grid, MemoryKernel::zero(), Nonlinearity::zero(),
                            InitialData::eigenmode(grid, 1), cfg);
    CHECK(l2_error_vs_standing_wave(grid, result.trajectory.records.back()) < 1e-3);
}

TEST_CASE("zero data stays exactly zero") {
    const auto grid = Grid::interval(1.0, 51);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 0.02;
    const auto result = run(grid, MemoryKernel::poly_exp(2.0, 0.0, 1.0),
                            Nonlinearity::sine(1.0), InitialData::zero(grid), cfg);
    for (const auto& rec : result.trajectory.records) {
        for (double v : rec.u) CHECK(v == 0.0);
        for (double v : rec.u_t) CHECK(v == 0.0);
    }
}

TEST_CASE("first step is the Taylor start") {
    const auto grid = Grid::interval(1.0, 41);
    const auto kernel = MemoryKernel::poly_exp(2.0, 0.0, 1.0);
    const auto nl = Nonlinearity::sine(1.0);
    SolverConfig cfg;
    cfg.dt = 2e-3;
    cfg.t_final = 1.0;
    WaveStepper stepper(grid, kernel, nl, cfg);
    const auto ic = InitialData::eigenmode(grid, 2);
    auto state = stepper.initial_state(ic);
    stepper.step(state);

    const auto lap = laplacian(grid, ic.u0);
    for (std::size_t k = 0; k < ic.u0.size(); ++k) {
        const double expected =
            ic.u0[k] + 0.5 * cfg.dt * cfg.dt * (lap[k] + nl.g(ic.u0[k]));
        CHECK(state.u[k] == doctest::Approx(expected).epsilon(1e-15));
    }
}

TEST_CASE("identical configurations give bitwise-identical trajectories") {
    const auto grid = Grid::interval(1.0, 61);
    SolverConfig cfg;
    cfg.dt = 2e-3;
    cfg.t_final = 0.5;
    cfg.snapshot_every = 5;
    auto once = [&]() {
        return run(grid, MemoryKernel::poly_exp(2.0, 0.0, 1.0), Nonlinearity::sine(1.0),
                   InitialData::random_smooth(grid, 77, 6), cfg);
    };
    const auto a = once(), b = once();
    REQUIRE(a.trajectory.records.size() == b.trajectory.records.size());
    for (std::size_t m = 0; m < a.trajectory.records.size(); ++m) {
        const auto& ra = a.trajectory.records[m];
        const auto& rb = b.trajectory.records[m];
        CHECK(std::memcmp(ra.u.data(), rb.u.data(), ra.u.size() * sizeof(double)) == 0);
        CHECK(std::memcmp(ra.u_t.data(), rb.u_t.data(), ra.u_t.size() * sizeof(double)) == 0);
    }
}

TEST_CASE("staggered leapfrog invariant is conserved without memory") {
    const auto grid = Grid::interval(1.0, 101);
    SolverConfig cfg;
    cfg.dt = 5e-3;
    cfg.t_final = 50.0; // 10^4 steps
    cfg.snapshot_every = 1;
    const auto result = run(grid, MemoryKernel::zero(), Nonlinearity::zero(),
                            InitialData::eigenmode(grid, 1), cfg);
    const auto inv = leapfrog_invariant_series(result.trajectory, grid);
    double drift = 0.0;
    for (double v : inv) drift = std::max(drift, std::abs(v - inv.front()));
    CHECK(drift <= 1e-12 * std::abs(inv.front()));
}

TEST_CASE("T_final = 0 produces only the initial record") {
    const auto grid = Grid::interval(1.0, 21);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 0.0;
    const auto result =
        run(grid, MemoryKernel::zero(), Nonlinearity::zero(), InitialData::eigenmode(grid, 1), cfg);
    CHECK(result.summary.steps == 0);
    REQUIRE(result.trajectory.records.size() == 1);
    CHECK(result.trajectory.records[0].t == 0.0);
}

TEST_CASE("CFL violation is rejected before stepping") {
    const auto grid = Grid::interval(1.0, 101);
    SolverConfig cfg;
    cfg.dt = 2e-2; // h = 0.01, bound = 0.9 h
    cfg.t_final = 1.0;
    CHECK_THROWS_AS(WaveStepper(grid, MemoryKernel::zero(), Nonlinearity::zero(), cfg),
                    CflViolation);
}

TEST_CASE("unstable stepping is detected as a non-finite field") {
    const auto grid = Grid::interval(1.0, 101);
    SolverConfig cfg;
    cfg.dt = 5e-2;
    cfg.t_final = 30.0;
    cfg.cfl_check = false;
    CHECK_THROWS_AS(run(grid, MemoryKernel::zero(), Nonlinearity::zero(),
                        InitialData::eigenmode(grid, 50), cfg),
                    NonFiniteField);
}

TEST_CASE("singular kernels cannot be stepped") {
    const auto grid = Grid::interval(1.0, 51);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 0.1;
    CHECK_THROWS_AS(run(grid, MemoryKernel::exp_integral(0.2, 1.0, 0.5), Nonlinearity::zero(),
                        InitialData::eigenmode(grid, 1), cfg),
                    SingularityError);
}

TEST_CASE("modal resolvent reduces to the harmonic oscillator") {
    const double mu = nums::pi * nums::pi;
    const auto res = modal_resolvent(mu, MemoryKernel::zero(), 1e-4, 2.0);
    CHECK(res.r[0] == 1.0);
    CHECK(res.one_star_r[0] == 0.0);
    double worst_r = 0.0, worst_i = 0.0;
    for (std::size_t k = 0; k < res.r.size(); ++k) {
        const double t = res.dt * static_cast<double>(k);
        worst_r = std::max(worst_r, std::abs(res.r[k] - std::cos(nums::pi * t)));
        worst_i = std::max(worst_i,
                           std::abs(res.one_star_r[k] - std::sin(nums::pi * t) / nums::pi));
    }
    CHECK(worst_r < 2e-5);
    CHECK(worst_i < 2e-5);
    CHECK(res.sup_bound <= 1.0 + 1e-10);
}

TEST_CASE("modal resolvent bound holds with memory") {
    const double mu = nums::pi * nums::pi;
    for (const auto& kernel :
         {MemoryKernel::poly_exp(2.0, 0.0, 1.0), MemoryKernel::power_law(1.0, 3.0)}) {
        const auto res = modal_resolvent(mu, kernel, 1e-3, 10.0);
        CHECK(res.sup_bound <= 1.0 + 1e-6);
    }
}

TEST_CASE("mild solution matches the run exactly in the linear memory-free case") {
    const auto grid = Grid::interval(1.0, 41);
    SolverConfig cfg;
    cfg.dt = 2e-3;
    cfg.t_final = 1.0;
    cfg.snapshot_every = 1;
    const auto ic = InitialData::eigenmode(grid, 1);
    const auto result = run(grid, MemoryKernel::zero(), Nonlinearity::zero(), ic, cfg);
    const auto modal = mild_solution_modal(grid, MemoryKernel::zero(), Nonlinearity::zero(), ic,
                                           8, cfg.dt, cfg.t_final);
    CHECK(modal.iterations == 1);
    double worst = 0.0;
    for (std::size_t m = 0; m < result.trajectory.records.size(); ++m) {
        const auto& u_run = result.trajectory.records[m].u;
        const auto& u_modal = modal.fields[m];
        for (std::size_t k = 0; k < u_run.size(); ++k)
            worst = std::max(worst, std::abs(u_run[k] - u_modal[k]));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("mild solution agrees with the stepper on the nonlinear memory problem") {
    const auto grid = Grid::interval(1.0, 41);
    const auto kernel = MemoryKernel::poly_exp(2.0, 0.0, 1.0);
    const auto nl = Nonlinearity::sine(1.0);
    const auto ic = InitialData::eigenmode(grid, 1);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 0.5;
    cfg.snapshot_every = 50;
    const auto result = run(grid, kernel, nl, ic, cfg);
    const auto modal = mild_solution_modal(grid, kernel, nl, ic, 16, 1e-3, 0.5);

    const auto& last_run = result.trajectory.records.back();
    const auto& last_modal = modal.fields.back();
    double acc = 0.0;
    for (std::size_t k = 0; k < last_run.u.size(); ++k) {
        const double d = last_run.u[k] - last_modal[k];
        acc += d * d;
    }
    CHECK(std::sqrt(acc * grid.cell_volume()) <= 1e-3);
    CHECK(modal.final_delta < 1e-10);
}

TEST_CASE("history window within the fading-memory tail is harmless") {
    const auto grid = Grid::interval(1.0, 51);
    const auto kernel = MemoryKernel::poly_exp(6.0, 0.0, 3.0); // a_dot = -3 e^{-6t}
    const auto nl = Nonlinearity::zero();
    const auto ic = InitialData::eigenmode(grid, 1);
    SolverConfig full;
    full.dt = 1e-3;
    full.t_final = 5.0;
    full.snapshot_every = 1000;
    SolverConfig windowed = full;
    // window of 3.2 time units: the tail integral of |a_dot| beyond it is
    // 0.5 exp(-19.2) ~ 2e-9
    windowed.history_window = 3200;
    const auto a = run(grid, kernel, nl, ic, full);
    const auto b = run(grid, kernel, nl, ic, windowed);
    double num = 0.0, den = 0.0;
    const auto& ua = a.trajectory.records.back().u;
    const auto& ub = b.trajectory.records.back().u;
    for (std::size_t k = 0; k < ua.size(); ++k) {
        num += (ua[k] - ub[k]) * (ua[k] - ub[k]);
        den += ua[k] * ua[k];
    }
    CHECK(std::sqrt(num) <= 1e-6 * std::max(1.0, std::sqrt(den)));
}

TEST_CASE("weak form residual vanishes for the zero trajectory") {
    const auto grid = Grid::interval(1.0, 41);
    SolverConfig cfg;
    cfg.dt = 2e-3;
    cfg.t_final = 0.1;
    cfg.snapshot_every = 1;
    const auto result = run(grid, MemoryKernel::poly_exp(2.0, 0.0, 1.0), Nonlinearity::sine(1.0),
                            InitialData::zero(grid), cfg);
    const auto rep = check_weak_form(result.trajectory, grid, MemoryKernel::poly_exp(2.0, 0.0, 1.0),
                                     Nonlinearity::sine(1.0));
    CHECK(rep.max_residual == 0.0);
}

TEST_CASE("weak form residual shrinks under dt refinement") {
    const auto grid = Grid::interval(1.0, 101);
    const auto kernel = MemoryKernel::poly_exp(2.0, 0.0, 1.0);
    const auto nl = Nonlinearity::sine(1.0);
    const auto ic = InitialData::eigenmode(grid, 1);
    auto residual = [&](double dt) {
        SolverConfig cfg;
        cfg.dt = dt;
        cfg.t_final = 1.0;
        cfg.snapshot_every = 1;
        const auto result = run(grid, kernel, nl, ic, cfg);
        return check_weak_form(result.trajectory, grid, kernel, nl).max_residual;
    };
    const double r1 = residual(4e-3), r2 = residual(2e-3);
    CHECK(r1 / r2 >= 2.0); // at least first order
}

TEST_CASE("random smooth data is reproducible and band-limited") {
    const auto grid = Grid::interval(1.0, 101);
    const auto a = InitialData::random_smooth(grid, 5, 8);
    const auto b = InitialData::random_smooth(grid, 5, 8);
    CHECK(a.u0 == b.u0);
    CHECK(a.u1 == b.u1);
    const auto c = InitialData::random_smooth(grid, 6, 8);
    CHECK(a.u0 != c.u0);
}

TEST_CASE("2D memory-free eigenmode follows the analytic standing wave") {
    const auto grid = Grid::rectangle(1.0, 1.0, 41, 41);
    SolverConfig cfg;
    cfg.dt = 5e-3;
    cfg.t_final = 1.0;
    cfg.snapshot_every = 50;
    const auto result = run(grid, MemoryKernel::zero(), Nonlinearity::zero(),
                            InitialData::eigenmode(grid, 1), cfg);
    const double omega = std::sqrt(sine_mode_eigenvalue(grid, 1));
    const auto& rec = result.trajectory.records.back();
    double acc = 0.0;
    for (int j = 1; j <= grid.interior_nodes(1); ++j)
        for (int i = 1; i <= grid.interior_nodes(0); ++i) {
            const double exact = std::cos(omega * rec.t) *
                                 std::sin(nums::pi * grid.coord_x(i)) *
                                 std::sin(nums::pi * grid.coord_y(j));
            const double d = rec.u[grid.interior_index(i, j)] - exact;
            acc += d * d;
        }
    // the discrete mode oscillates at sqrt(mu_stencil); against that the
    // only errors left are the leapfrog phase and start-up, both O(dt^2)
    CHECK(std::sqrt(acc * grid.cell_volume()) < 1e-3);
}

TEST_CASE("2D run with memory and nonlinearity dissipates") {
    const auto grid = Grid::rectangle(1.0, 1.0, 21, 21);
    SolverConfig cfg;
    cfg.dt = 5e-3;
    cfg.t_final = 2.0;
    cfg.snapshot_every = 10;
    const auto kernel = MemoryKernel::poly_exp(2.0, 0.0, 1.0);
    const auto nl = Nonlinearity::sine(1.0);
    const auto result = run(grid, kernel, nl, InitialData::eigenmode(grid, 1), cfg);
    const auto report = build_energy_report(result.trajectory, grid, kernel, nl);
    const auto mono = check_monotone(report, result.trajectory, grid, kernel);
    CHECK(mono.monotone_pass);
    CHECK(report.records.back().e_history < report.records.front().e_history);
}
