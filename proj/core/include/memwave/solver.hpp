#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "memwave/domain.hpp"
#include "memwave/kernels.hpp"
#include "memwave/nonlinearity.hpp"

namespace memwave {

/// Initial data (u0, u1) as interior fields; the Dirichlet trace of u0 is
/// zero by representation.
struct InitialData {
    std::vector<double> u0;
    std::vector<double> u1;
    std::string tag = "custom";

    static InitialData zero(const Grid& grid);
    /// u0 = k-th sine eigenmode (tensor (k,k) in 2D), u1 = amp1 * same mode.
    static InitialData eigenmode(const Grid& grid, int k, double amp0 = 1.0, double amp1 = 0.0);
    /// Band-limited random data: modes up to `cutoff` with coefficients
    /// decaying like 1/k^2 (u0) and 1/k (u1).
    static InitialData random_smooth(const Grid& grid, std::uint64_t seed, int cutoff);
    static InitialData custom(std::vector<double> u0, std::vector<double> u1);
};

struct SolverConfig {
    double dt = 1e-3;
    double t_final = 1.0;
    bool cfl_check = true;
    double cfl_factor = 0.9;
    /// Number of most recent history entries used by the memory quadrature;
    /// 0 means unbounded (full history).
    std::size_t history_window = 0;
    int snapshot_every = 10;
};

/// Ring buffer of Laplacian snapshots, one row per time step, truncated to
/// the most recent `window` rows when a window is set.
class HistoryBuffer {
  public:
    HistoryBuffer(std::size_t field_size, std::size_t window);

    void push(std::span<const double> row);
    std::size_t stored() const { return stored_; }
    std::size_t total_pushed() const { return total_; }
    /// Global index of the oldest stored row.
    std::size_t first_index() const { return total_ - stored_; }
    std::span<const double> row(std::size_t global_index) const;

  private:
    std::size_t field_size_;
    std::size_t window_; // 0 = unbounded
    std::size_t stored_ = 0;
    std::size_t total_ = 0;
    std::size_t head_ = 0; // ring start (windowed mode)
    std::vector<double> data_;
};

/// Simulation state: u^n, u^{n-1}, the centered velocity estimate and the
/// Laplacian history. t = n dt exactly.
struct SimState {
    std::int64_t n = 0;
    double dt = 0.0;
    std::vector<double> u;      ///< u^n
    std::vector<double> u_prev; ///< u^{n-1} (empty before the first step)
    std::vector<double> u_t;    ///< centered velocity at the latest completed estimate
    std::vector<double> u1;     ///< initial velocity (used by the Taylor start)
    HistoryBuffer lap_history;  ///< Delta u^j, j = 0..n

    SimState(const Grid& grid, const InitialData& ic, const SolverConfig& cfg);
    double t() const { return static_cast<double>(n) * dt; }
};

/// Explicit leapfrog stepper with trapezoidal convolution quadrature over
/// the Laplacian history:
///   u^{n+1} = 2u^n - u^{n-1} + dt^2 [Delta u^n + Q_n + g(u^n)],
///   Q_n ~= Int_0^{t_n} a_dot(t_n - s) Delta u(s) ds,
/// with the Taylor start u^1 = u^0 + dt u1 + (dt^2/2)[Delta u^0 + g(u^0)].
class WaveStepper {
  public:
    WaveStepper(const Grid& grid, const MemoryKernel& kernel, const Nonlinearity& nl,
                const SolverConfig& cfg);

    SimState initial_state(const InitialData& ic) const;
    void step(SimState& state) const;

    /// Memory quadrature Q_n at the state's current step (exposed for tests).
    std::vector<double> memory_term(const SimState& state) const;

    const SolverConfig& config() const { return cfg_; }
    const Grid& grid() const { return grid_; }

  private:
    double adot_sample(std::size_t m) const;

    const Grid& grid_;
    const MemoryKernel& kernel_;
    const Nonlinearity& nl_;
    SolverConfig cfg_;
    mutable std::vector<double> adot_samples_;
};

struct TrajectoryRecord {
    std::int64_t step = 0;
    double t = 0.0;
    std::vector<double> u;
    std::vector<double> u_t;
};

/// Snapshot series of a run at uniform cadence (snapshot_every steps).
struct Trajectory {
    Grid grid;
    double dt = 0.0;
    int snapshot_every = 1;
    std::size_t history_window = 0; ///< as configured (0 = full history)
    std::vector<TrajectoryRecord> records;

    double record_dt() const { return dt * static_cast<double>(snapshot_every); }
    bool full_history() const { return history_window == 0; }
};

struct RunSummary {
    std::int64_t steps = 0;
    double t_final = 0.0;
    double wall_seconds = 0.0;
    double max_abs_u = 0.0;
    double final_norm_u = 0.0;
    double final_norm_ut = 0.0;
    double final_grad_norm_sq = 0.0;
};

struct RunResult {
    Trajectory trajectory;
    RunSummary summary;
};

/// Advances the problem to t_final, recording snapshots at the configured
/// cadence. Deterministic: identical inputs give bitwise-identical output.
RunResult run(const Grid& grid, const MemoryKernel& kernel, const Nonlinearity& nl,
              const InitialData& ic, const SolverConfig& cfg);

/// Scalar resolvent r_mu of r'' + mu r + mu (a_dot * r) = 0, r(0) = 1,
/// r'(0) = 0, integrated with the same leapfrog + trapezoid scheme, plus the
/// running integral (1 * r). sup_bound records the maximum over samples of
/// r^2 + (1 - a(0)) mu (1*r)^2.
struct ModalResolvent {
    double mu = 0.0;
    double dt = 0.0;
    std::vector<double> r;
    std::vector<double> one_star_r;
    double sup_bound = 0.0;
};

ModalResolvent modal_resolvent(double mu, const MemoryKernel& kernel, double dt, double T);

/// Mild solution through the variation-of-parameters formula, evaluated in
/// the discrete sine eigenbasis of the grid Laplacian with Picard iteration
/// on the nonlinear term. `modes` counts per-axis modes (pairs in 2D).
struct ModalSolution {
    double dt = 0.0;
    std::vector<double> times;
    std::vector<std::vector<double>> fields; ///< interior field per time sample
    int iterations = 0;
    double final_delta = 0.0;
    double contraction_ratio = 0.0;
};

ModalSolution mild_solution_modal(const Grid& grid, const MemoryKernel& kernel,
                                  const Nonlinearity& nl, const InitialData& ic, int modes,
                                  double dt, double T, int picard_iters = 50,
                                  double tol = 1e-10);

/// Residual of the weak formulation against the first `test_modes` discrete
/// eigenmodes, with centered time differencing at the snapshot cadence.
struct WeakFormReport {
    std::vector<double> mode_residuals;
    double max_residual = 0.0;
};

WeakFormReport check_weak_form(const Trajectory& traj, const Grid& grid,
                               const MemoryKernel& kernel, const Nonlinearity& nl,
                               int test_modes = 5);

} // namespace memwave
