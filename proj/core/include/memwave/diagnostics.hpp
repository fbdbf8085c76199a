#pragma once

#include <vector>

#include "memwave/domain.hpp"
#include "memwave/kernels.hpp"
#include "memwave/nonlinearity.hpp"
#include "memwave/solver.hpp"

namespace memwave {

/// One row of the energy ledger. e_simple uses the flat coefficient
/// (1 - a(0))/2 on the gradient; e_history uses the time-dependent
/// coefficient plus the nonnegative kernel-difference term.
struct EnergyRecord {
    double t = 0.0;
    double kinetic = 0.0;            ///< 1/2 ||u_t||^2
    double pot_simple = 0.0;         ///< (1 - a(0))/2 ||grad u||^2
    double pot_history = 0.0;        ///< (1 - a(0) + a(t))/2 ||grad u||^2
    double history_term = 0.0;       ///< -1/2 Int a_dot(t-s) ||grad u(s) - grad u(t)||^2 ds
    double g_integral = 0.0;         ///< Int G(u)
    double e_simple = 0.0;           ///< kinetic + pot_simple - g_integral
    double e_history = 0.0;          ///< kinetic + pot_history + history_term - g_integral
    double memory_dissipation = 0.0; ///< Int_0^t <(a * grad u_t)(s), grad u_t(s)> ds
};

struct EnergyReport {
    std::vector<EnergyRecord> records;
    double record_dt = 0.0;
    double e0_simple() const { return records.empty() ? 0.0 : records.front().e_simple; }
    double e0_history() const { return records.empty() ? 0.0 : records.front().e_history; }
};

/// Pointwise energies for a single state.
double energy_simple(const Grid& grid, const MemoryKernel& kernel, const Nonlinearity& nl,
                     std::span<const double> u, std::span<const double> u_t);

/// Energy with the history term; `history` are the earlier u snapshots at
/// uniform spacing `record_dt` (the last entry is u(t) itself).
double energy_history(const Grid& grid, const MemoryKernel& kernel, const Nonlinearity& nl,
                      std::span<const std::vector<double>> history, double record_dt,
                      std::span<const double> u_t);

/// Full energy ledger along a trajectory (all terms, trapezoid in s and t).
EnergyReport build_energy_report(const Trajectory& traj, const Grid& grid,
                                 const MemoryKernel& kernel, const Nonlinearity& nl);

struct MonotoneReport {
    bool claimed_a2 = false;
    bool monotone_pass = true;
    double worst_increase = 0.0;        ///< largest E(t+) - E(t) over consecutive records
    double tolerance = 0.0;             ///< tol_rel * E(0) actually applied
    double first_violation_t = 0.0;
    double max_derivative_residual = 0.0; ///< centered dE/dt vs the dissipation identity
};

/// Flags any increase of e_history beyond tol_rel * E(0) between
/// consecutive records and compares the centered derivative of e_history
/// with the kernel dissipation formula.
MonotoneReport check_monotone(const EnergyReport& report, const Trajectory& traj,
                              const Grid& grid, const MemoryKernel& kernel,
                              double tol_rel = 1e-6);

struct CoercivityReport {
    double C0 = 0.0;
    double lambda = 0.0;
    double coercivity_C = 0.0;
    bool smallness_holds = false;
    double min_margin_simple = 0.0;   ///< min E_simple - (kinetic + C/2 ||grad u||^2)
    double min_margin_history = 0.0;  ///< min E_history - (kinetic + C ||grad u||^2)
    bool coercive_pass = false;
    double data_norm = 0.0;           ///< ||u1||^2 + ||grad u0||^2
    double bound_constant = 0.0;      ///< sup E_simple / data_norm
    double measured_315 = 0.0;        ///< sup E_simple + memory dissipation
    bool degenerate = false;
};

CoercivityReport check_coercivity_and_bounds(const EnergyReport& report, const Trajectory& traj,
                                             const Grid& grid, const MemoryKernel& kernel,
                                             const Nonlinearity& nl, double lambda);

struct StrongIdentityReport {
    double max_residual = 0.0;
    std::vector<double> residuals;
};

/// Residual of the strong-solution energy identity: E(t) plus the memory
/// dissipation integral against the initial-data boundary terms.
StrongIdentityReport check_strong_energy_identity(const EnergyReport& report,
                                                  const Trajectory& traj, const Grid& grid,
                                                  const MemoryKernel& kernel);

struct IntegratedEnergyReport {
    double c0 = 0.0;        ///< sup_t (Int_0^t E) / E(0)
    bool is_uniform = false; ///< running sup changed < 1% over the last tenth of the horizon
    double horizon = 0.0;
};

/// Empirical constant of the integrated-energy hypothesis. Throws
/// DegenerateData when E(0) <= 0.
IntegratedEnergyReport check_integrated_energy(std::span<const double> energy, double record_dt);

/// Staggered leapfrog invariant 1/2 ||(u^{n+1} - u^n)/dt||^2
/// + 1/2 <grad u^{n+1}, grad u^n> per step; requires snapshot cadence 1.
std::vector<double> leapfrog_invariant_series(const Trajectory& traj, const Grid& grid);

} // namespace memwave
