#include "memwave/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace memwave {

namespace {

double g_integral_of(const Grid& grid, const Nonlinearity& nl, std::span<const double> u) {
    if (nl.is_zero()) return 0.0;
    double acc = 0.0;
    for (double v : u) acc += nl.G(v);
    return acc * grid.cell_volume();
}

/// -1/2 Int_0^t a_dot(t - s) ||grad u(s) - grad u(t)||^2 ds by trapezoid
/// over uniform snapshots; `fields` spans u(0) .. u(t).
double history_term_of(const Grid& grid, const MemoryKernel& kernel,
                       std::span<const std::vector<double>> fields, double record_dt) {
    const std::size_t m = fields.size() - 1;
    if (m == 0 || kernel.is_zero()) return 0.0;
    const auto& ut_field = fields[m];
    std::vector<double> diff(ut_field.size());
    double acc = 0.0;
    for (std::size_t j = 0; j <= m; ++j) {
        const double w = (j == 0 || j == m) ? 0.5 : 1.0;
        const double ad = kernel.a_dot(record_dt * static_cast<double>(m - j));
        if (ad == 0.0) continue;
        for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = fields[j][k] - ut_field[k];
        acc += w * ad * gradient_norm_sq(grid, diff);
    }
    return -0.5 * acc * record_dt;
}

} // namespace

double energy_simple(const Grid& grid, const MemoryKernel& kernel, const Nonlinearity& nl,
                     std::span<const double> u, std::span<const double> u_t) {
    return 0.5 * norm_sq(grid, u_t) +
           0.5 * (1.0 - kernel.a_at_zero()) * gradient_norm_sq(grid, u) -
           g_integral_of(grid, nl, u);
}

double energy_history(const Grid& grid, const MemoryKernel& kernel, const Nonlinearity& nl,
                      std::span<const std::vector<double>> history, double record_dt,
                      std::span<const double> u_t) {
    if (history.empty()) throw SizeMismatch("energy_history: history must contain u(t)");
    const auto& u = history.back();
    const double t = record_dt * static_cast<double>(history.size() - 1);
    return 0.5 * norm_sq(grid, u_t) +
           0.5 * (1.0 - kernel.a_at_zero() + kernel.a(t)) * gradient_norm_sq(grid, u) +
           history_term_of(grid, kernel, history, record_dt) - g_integral_of(grid, nl, u);
}

EnergyReport build_energy_report(const Trajectory& traj, const Grid& grid,
                                 const MemoryKernel& kernel, const Nonlinearity& nl) {
    EnergyReport report;
    report.record_dt = traj.record_dt();
    const std::size_t nrec = traj.records.size();
    report.records.resize(nrec);
    const double a0 = kernel.a_at_zero();
    const double rdt = report.record_dt;

    std::vector<std::vector<double>> fields;
    fields.reserve(nrec);
    std::vector<double> conv(grid.interior_count());
    double prev_integrand = 0.0;

    for (std::size_t m = 0; m < nrec; ++m) {
        const auto& rec = traj.records[m];
        fields.push_back(rec.u);
        EnergyRecord& e = report.records[m];
        e.t = rec.t;
        e.kinetic = 0.5 * norm_sq(grid, rec.u_t);
        const double gns = gradient_norm_sq(grid, rec.u);
        e.pot_simple = 0.5 * (1.0 - a0) * gns;
        e.pot_history = 0.5 * (1.0 - a0 + (kernel.is_zero() ? 0.0 : kernel.a(rec.t))) * gns;
        e.g_integral = g_integral_of(grid, nl, rec.u);
        e.history_term = history_term_of(grid, kernel, {fields.data(), m + 1}, rdt);
        e.e_simple = e.kinetic + e.pot_simple - e.g_integral;
        e.e_history = e.kinetic + e.pot_history + e.history_term - e.g_integral;

        // memory dissipation: running integral of <(a * grad u_t)(s), grad u_t(s)>
        if (m == 0 || kernel.is_zero()) {
            e.memory_dissipation = (m == 0) ? 0.0 : report.records[m - 1].memory_dissipation;
        } else {
            // integrand at record m, trapezoid in the inner convolution
            std::fill(conv.begin(), conv.end(), 0.0);
            for (std::size_t j = 0; j <= m; ++j) {
                const double w = (j == 0 || j == m) ? 0.5 : 1.0;
                const double av = kernel.a(rdt * static_cast<double>(m - j));
                const auto& utj = traj.records[j].u_t;
                for (std::size_t k = 0; k < conv.size(); ++k) conv[k] += w * av * utj[k];
            }
            for (double& v : conv) v *= rdt;
            const double this_integrand = gradient_inner(grid, conv, traj.records[m].u_t);
            e.memory_dissipation = report.records[m - 1].memory_dissipation +
                                   0.5 * rdt * (prev_integrand + this_integrand);
            prev_integrand = this_integrand;
        }
    }
    return report;
}

MonotoneReport check_monotone(const EnergyReport& report, const Trajectory& traj,
                              const Grid& grid, const MemoryKernel& kernel, double tol_rel) {
    MonotoneReport rep;
    rep.claimed_a2 = kernel.claims().a2;
    const auto& recs = report.records;
    if (recs.size() < 2) return rep;
    rep.tolerance = tol_rel * std::abs(recs.front().e_history);
    for (std::size_t m = 0; m + 1 < recs.size(); ++m) {
        const double inc = recs[m + 1].e_history - recs[m].e_history;
        if (inc > rep.worst_increase) rep.worst_increase = inc;
        if (inc > rep.tolerance && rep.monotone_pass) {
            rep.monotone_pass = false;
            rep.first_violation_t = recs[m + 1].t;
        }
    }

    // centered dE/dt against E'(t) = 1/2 a_dot(t) ||grad u||^2
    //                              - 1/2 Int a_ddot(t-s) ||grad u(s)-grad u(t)||^2 ds
    const double rdt = report.record_dt;
    std::vector<double> diff(grid.interior_count());
    for (std::size_t m = 1; m + 1 < recs.size(); ++m) {
        const double dEdt = (recs[m + 1].e_history - recs[m - 1].e_history) / (2.0 * rdt);
        double rhs = 0.0;
        if (!kernel.is_zero()) {
            rhs = 0.5 * kernel.a_dot(recs[m].t) * gradient_norm_sq(grid, traj.records[m].u);
            double conv = 0.0;
            for (std::size_t j = 0; j <= m; ++j) {
                const double w = (j == 0 || j == m) ? 0.5 : 1.0;
                const double add = kernel.a_ddot(rdt * static_cast<double>(m - j));
                if (add == 0.0) continue;
                for (std::size_t k = 0; k < diff.size(); ++k)
                    diff[k] = traj.records[j].u[k] - traj.records[m].u[k];
                conv += w * add * gradient_norm_sq(grid, diff);
            }
            rhs -= 0.5 * conv * rdt;
        }
        rep.max_derivative_residual = std::max(rep.max_derivative_residual, std::abs(dEdt - rhs));
    }
    return rep;
}

CoercivityReport check_coercivity_and_bounds(const EnergyReport& report, const Trajectory& traj,
                                             const Grid& grid, const MemoryKernel& kernel,
                                             const Nonlinearity& nl, double lambda) {
    CoercivityReport rep;
    const auto grid_c0 = default_c0_grid();
    rep.C0 = estimate_C0(nl, grid_c0);
    rep.lambda = lambda;
    rep.coercivity_C = (lambda * (1.0 - kernel.a_at_zero()) - 2.0 * rep.C0) / lambda;
    rep.smallness_holds = rep.C0 < lambda * (1.0 - kernel.a_at_zero()) / 2.0;

    const auto& recs = report.records;
    if (recs.empty() || traj.records.empty()) return rep;

    rep.data_norm = norm_sq(grid, traj.records.front().u_t) +
                    gradient_norm_sq(grid, traj.records.front().u);
    rep.degenerate = rep.data_norm == 0.0;

    double min_simple = 0.0, min_history = 0.0, sup_ratio = 0.0, sup_315 = 0.0;
    bool first = true;
    for (std::size_t m = 0; m < recs.size(); ++m) {
        const double gns = gradient_norm_sq(grid, traj.records[m].u);
        const double margin_s = recs[m].e_simple - (recs[m].kinetic + 0.5 * rep.coercivity_C * gns);
        const double margin_h = recs[m].e_history - (recs[m].kinetic + rep.coercivity_C * gns);
        if (first) {
            min_simple = margin_s;
            min_history = margin_h;
            first = false;
        } else {
            min_simple = std::min(min_simple, margin_s);
            min_history = std::min(min_history, margin_h);
        }
        if (!rep.degenerate)
            sup_ratio = std::max(sup_ratio, recs[m].e_simple / rep.data_norm);
        sup_315 = std::max(sup_315, recs[m].e_simple + recs[m].memory_dissipation);
    }
    rep.min_margin_simple = min_simple;
    rep.min_margin_history = min_history;
    rep.bound_constant = sup_ratio;
    rep.measured_315 = sup_315;
    const double scale = std::abs(recs.front().e_simple) + 1e-30;
    rep.coercive_pass = rep.smallness_holds && min_simple >= -1e-9 * scale;
    return rep;
}

StrongIdentityReport check_strong_energy_identity(const EnergyReport& report,
                                                  const Trajectory& traj, const Grid& grid,
                                                  const MemoryKernel& kernel) {
    StrongIdentityReport rep;
    const auto& recs = report.records;
    if (recs.empty()) return rep;
    const double rdt = report.record_dt;
    const double e0 = recs.front().e_simple;
    const auto& u0 = traj.records.front().u;
    const double gns0 = gradient_norm_sq(grid, u0);

    // running integral of a_dot(s) <grad u0, grad u(s)>; it enters the
    // right-hand side with a plus sign (differentiate a(s)<grad u0, grad u(s)>
    // and integrate back to see the boundary terms pair up this way)
    double tail = 0.0;
    std::vector<double> cross(recs.size());
    for (std::size_t m = 0; m < recs.size(); ++m)
        cross[m] = gradient_inner(grid, u0, traj.records[m].u);

    rep.residuals.resize(recs.size());
    for (std::size_t m = 0; m < recs.size(); ++m) {
        if (m > 0) {
            const double f_prev = kernel.is_zero() ? 0.0
                                                   : kernel.a_dot(rdt * static_cast<double>(m - 1)) *
                                                         cross[m - 1];
            const double f_here =
                kernel.is_zero() ? 0.0 : kernel.a_dot(rdt * static_cast<double>(m)) * cross[m];
            tail += 0.5 * rdt * (f_prev + f_here);
        }
        const double a_t = kernel.is_zero() ? 0.0 : kernel.a(recs[m].t);
        const double lhs = recs[m].e_simple + recs[m].memory_dissipation;
        const double rhs = e0 + kernel.a_at_zero() * gns0 - a_t * cross[m] + tail;
        rep.residuals[m] = lhs - rhs;
        rep.max_residual = std::max(rep.max_residual, std::abs(rep.residuals[m]));
    }
    return rep;
}

IntegratedEnergyReport check_integrated_energy(std::span<const double> energy, double record_dt) {
    if (energy.empty() || !(energy.front() > 0.0))
        throw DegenerateData("check_integrated_energy: E(0) must be positive");
    IntegratedEnergyReport rep;
    rep.horizon = record_dt * static_cast<double>(energy.size() - 1);
    const double e0 = energy.front();
    double integral = 0.0, sup = 0.0, sup_early = 0.0;
    const double t_cut = 0.9 * rep.horizon;
    for (std::size_t m = 1; m < energy.size(); ++m) {
        integral += 0.5 * record_dt * (energy[m - 1] + energy[m]);
        sup = std::max(sup, integral / e0);
        if (record_dt * static_cast<double>(m) <= t_cut) sup_early = sup;
    }
    rep.c0 = sup;
    rep.is_uniform = (sup - sup_early) < 0.01 * sup;
    return rep;
}

std::vector<double> leapfrog_invariant_series(const Trajectory& traj, const Grid& grid) {
    if (traj.snapshot_every != 1)
        throw SizeMismatch("leapfrog_invariant_series requires snapshot cadence 1");
    std::vector<double> out;
    if (traj.records.size() < 2) return out;
    const double dt = traj.dt;
    std::vector<double> vel(grid.interior_count());
    for (std::size_t m = 0; m + 1 < traj.records.size(); ++m) {
        const auto& a = traj.records[m].u;
        const auto& b = traj.records[m + 1].u;
        for (std::size_t k = 0; k < vel.size(); ++k) vel[k] = (b[k] - a[k]) / dt;
        out.push_back(0.5 * norm_sq(grid, vel) + 0.5 * gradient_inner(grid, a, b));
    }
    return out;
}

} // namespace memwave
