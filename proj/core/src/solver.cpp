#include "memwave/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

namespace memwave {

namespace {

void check_finite(std::span<const double> field, std::int64_t step) {
    for (double v : field)
        if (!std::isfinite(v))
            throw NonFiniteField("non-finite field value at step " + std::to_string(step));
}

std::int64_t step_count(double t_final, double dt) {
    if (t_final < 0.0) throw ParameterViolation("t_final >= 0 required");
    if (!(dt > 0.0)) throw ParameterViolation("dt > 0 required");
    return std::llround(t_final / dt);
}

} // namespace

InitialData InitialData::zero(const Grid& grid) {
    InitialData ic;
    ic.u0.assign(grid.interior_count(), 0.0);
    ic.u1.assign(grid.interior_count(), 0.0);
    ic.tag = "zero";
    return ic;
}

InitialData InitialData::eigenmode(const Grid& grid, int k, double amp0, double amp1) {
    InitialData ic;
    ic.u0 = sine_mode(grid, k);
    ic.u1 = ic.u0;
    for (double& v : ic.u0) v *= amp0;
    for (double& v : ic.u1) v *= amp1;
    ic.tag = "eigenmode(" + std::to_string(k) + ")";
    return ic;
}

InitialData InitialData::random_smooth(const Grid& grid, std::uint64_t seed, int cutoff) {
    if (cutoff < 1) throw ParameterViolation("random_smooth: cutoff >= 1");
    cutoff = std::min(cutoff, grid.interior_nodes(0) - 1);
    if (grid.dim() == 2) cutoff = std::min(cutoff, grid.interior_nodes(1) - 1);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    InitialData ic;
    ic.u0.assign(grid.interior_count(), 0.0);
    ic.u1.assign(grid.interior_count(), 0.0);
    for (int k = 1; k <= cutoff; ++k) {
        const auto mode = sine_mode(grid, k);
        const double dk = static_cast<double>(k);
        const double c0 = dist(rng) / (dk * dk);
        const double c1 = dist(rng) / dk;
        for (std::size_t i = 0; i < mode.size(); ++i) {
            ic.u0[i] += c0 * mode[i];
            ic.u1[i] += c1 * mode[i];
        }
    }
    ic.tag = "random_smooth(" + std::to_string(seed) + "," + std::to_string(cutoff) + ")";
    return ic;
}

InitialData InitialData::custom(std::vector<double> u0, std::vector<double> u1) {
    InitialData ic;
    ic.u0 = std::move(u0);
    ic.u1 = std::move(u1);
    ic.tag = "custom";
    return ic;
}

HistoryBuffer::HistoryBuffer(std::size_t field_size, std::size_t window)
    : field_size_(field_size), window_(window) {}

void HistoryBuffer::push(std::span<const double> row) {
    if (row.size() != field_size_) throw SizeMismatch("HistoryBuffer::push: row size mismatch");
    if (window_ == 0 || stored_ < window_) {
        data_.insert(data_.end(), row.begin(), row.end());
        ++stored_;
    } else {
        std::copy(row.begin(), row.end(), data_.begin() + static_cast<std::ptrdiff_t>(head_ * field_size_));
        head_ = (head_ + 1) % window_;
    }
    ++total_;
}

std::span<const double> HistoryBuffer::row(std::size_t global_index) const {
    const std::size_t first = first_index();
    if (global_index < first || global_index >= total_)
        throw SizeMismatch("HistoryBuffer::row: index outside stored window");
    std::size_t local = global_index - first;
    if (window_ != 0 && total_ > window_) local = (head_ + local) % window_;
    return {data_.data() + local * field_size_, field_size_};
}

SimState::SimState(const Grid& grid, const InitialData& ic, const SolverConfig& cfg)
    : dt(cfg.dt), lap_history(grid.interior_count(), cfg.history_window) {
    if (ic.u0.size() != grid.interior_count() || ic.u1.size() != grid.interior_count())
        throw SizeMismatch("initial data does not match the grid");
    check_finite(ic.u0, 0);
    check_finite(ic.u1, 0);
    u = ic.u0;
    u1 = ic.u1;
    u_t = ic.u1;
    lap_history.push(laplacian(grid, u));
}

WaveStepper::WaveStepper(const Grid& grid, const MemoryKernel& kernel, const Nonlinearity& nl,
                         const SolverConfig& cfg)
    : grid_(grid), kernel_(kernel), nl_(nl), cfg_(cfg) {
    if (!(cfg.dt > 0.0)) throw ParameterViolation("solver dt > 0 required");
    if (cfg.cfl_check) {
        const double limit =
            cfg.cfl_factor * grid.min_spacing() / std::sqrt(static_cast<double>(grid.dim()));
        if (cfg.dt > limit)
            throw CflViolation("dt = " + std::to_string(cfg.dt) +
                               " exceeds the CFL bound cfl_factor*h/sqrt(N) = " +
                               std::to_string(limit));
    }
    if (!kernel.is_zero() && !kernel.finite_a_dot_at_zero())
        throw SingularityError(
            "time stepping requires a finite a_dot(0); this kernel is singular there");
    adot_samples_.push_back(kernel_.is_zero() ? 0.0 : kernel_.a_dot(0.0));
}

double WaveStepper::adot_sample(std::size_t m) const {
    while (adot_samples_.size() <= m)
        adot_samples_.push_back(
            kernel_.a_dot(cfg_.dt * static_cast<double>(adot_samples_.size())));
    return adot_samples_[m];
}

SimState WaveStepper::initial_state(const InitialData& ic) const {
    return SimState(grid_, ic, cfg_);
}

std::vector<double> WaveStepper::memory_term(const SimState& state) const {
    const std::size_t m = grid_.interior_count();
    std::vector<double> q(m, 0.0);
    const std::size_t n = static_cast<std::size_t>(state.n);
    if (n == 0 || kernel_.is_zero()) return q;
    const std::size_t j0 = state.lap_history.first_index();
    // trapezoid over the stored window [t_j0, t_n]
    for (std::size_t j = j0; j <= n; ++j) {
        const double endpoint = (j == j0 || j == n) ? 0.5 : 1.0;
        const double coeff = endpoint * cfg_.dt * adot_sample(n - j);
        if (coeff == 0.0) continue;
        const auto row = state.lap_history.row(j);
        for (std::size_t k = 0; k < m; ++k) q[k] += coeff * row[k];
    }
    return q;
}

void WaveStepper::step(SimState& state) const {
    const std::size_t m = grid_.interior_count();
    std::vector<double> u_new(m);
    const auto lap = state.lap_history.row(static_cast<std::size_t>(state.n));
    const double dt = cfg_.dt;

    if (state.n == 0) {
        // Taylor start; the memory term vanishes at t = 0
        for (std::size_t k = 0; k < m; ++k)
            u_new[k] = state.u[k] + dt * state.u1[k] +
                       0.5 * dt * dt * (lap[k] + nl_.g(state.u[k]));
        state.u_t = state.u1;
    } else {
        const auto q = memory_term(state);
        for (std::size_t k = 0; k < m; ++k)
            u_new[k] = 2.0 * state.u[k] - state.u_prev[k] +
                       dt * dt * (lap[k] + q[k] + nl_.g(state.u[k]));
        // centered velocity at the step we are leaving
        for (std::size_t k = 0; k < m; ++k)
            state.u_t[k] = (u_new[k] - state.u_prev[k]) / (2.0 * dt);
    }
    check_finite(u_new, state.n + 1);

    state.u_prev = std::move(state.u);
    state.u = std::move(u_new);
    state.n += 1;
    state.lap_history.push(laplacian(grid_, state.u));
}

RunResult run(const Grid& grid, const MemoryKernel& kernel, const Nonlinearity& nl,
              const InitialData& ic, const SolverConfig& cfg) {
    if (cfg.snapshot_every < 1) throw ParameterViolation("snapshot_every >= 1 required");
    const std::int64_t n_steps = step_count(cfg.t_final, cfg.dt);
    const auto t0 = std::chrono::steady_clock::now();

    WaveStepper stepper(grid, kernel, nl, cfg);
    SimState state = stepper.initial_state(ic);

    RunResult result;
    result.trajectory.grid = grid;
    result.trajectory.dt = cfg.dt;
    result.trajectory.snapshot_every = cfg.snapshot_every;
    result.trajectory.history_window = cfg.history_window;

    auto track_max = [&](std::span<const double> u) {
        for (double v : u) result.summary.max_abs_u = std::max(result.summary.max_abs_u, std::abs(v));
    };

    // record 0 carries the exact initial velocity
    result.trajectory.records.push_back({0, 0.0, state.u, state.u1});
    track_max(state.u);

    for (std::int64_t n = 0; n < n_steps; ++n) {
        stepper.step(state);
        track_max(state.u);
        // state now holds u^{n+1}; u_prev = u^n with centered velocity at n
        const std::int64_t done = n; // record for step `done` is now complete
        if (done > 0 && done % cfg.snapshot_every == 0)
            result.trajectory.records.push_back(
                {done, static_cast<double>(done) * cfg.dt, state.u_prev, state.u_t});
    }

    std::vector<double> final_u, final_ut;
    if (n_steps > 0) {
        // one extra step finalizes the centered velocity at the last record
        final_u = state.u;
        stepper.step(state);
        final_ut = state.u_t;
        if (n_steps % cfg.snapshot_every == 0)
            result.trajectory.records.push_back(
                {n_steps, static_cast<double>(n_steps) * cfg.dt, final_u, final_ut});
    } else {
        final_u = state.u;
        final_ut = state.u1;
    }

    result.summary.steps = n_steps;
    result.summary.t_final = static_cast<double>(n_steps) * cfg.dt;
    result.summary.final_norm_u = std::sqrt(norm_sq(grid, final_u));
    result.summary.final_norm_ut = std::sqrt(norm_sq(grid, final_ut));
    result.summary.final_grad_norm_sq = gradient_norm_sq(grid, final_u);
    result.summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

ModalResolvent modal_resolvent(double mu, const MemoryKernel& kernel, double dt, double T) {
    if (!(mu > 0.0)) throw ParameterViolation("modal_resolvent: mu > 0 required");
    const std::int64_t n = step_count(T, dt);
    if (!kernel.is_zero() && !kernel.finite_a_dot_at_zero())
        throw SingularityError("modal_resolvent requires a finite a_dot(0)");

    ModalResolvent res;
    res.mu = mu;
    res.dt = dt;
    res.r.resize(static_cast<std::size_t>(n) + 1);
    res.one_star_r.resize(static_cast<std::size_t>(n) + 1);

    std::vector<double> adot(static_cast<std::size_t>(n) + 1, 0.0);
    if (!kernel.is_zero())
        for (std::size_t m = 0; m <= static_cast<std::size_t>(n); ++m)
            adot[m] = kernel.a_dot(dt * static_cast<double>(m));

    auto& r = res.r;
    auto& I = res.one_star_r;
    r[0] = 1.0;
    I[0] = 0.0;
    if (n >= 1) {
        r[1] = 1.0 - 0.5 * dt * dt * mu;
        I[1] = 0.5 * dt * (r[0] + r[1]);
    }
    for (std::size_t k = 1; k + 1 <= static_cast<std::size_t>(n); ++k) {
        double conv = 0.5 * (adot[k] * r[0] + adot[0] * r[k]);
        for (std::size_t j = 1; j < k; ++j) conv += adot[k - j] * r[j];
        conv *= dt;
        r[k + 1] = 2.0 * r[k] - r[k - 1] - dt * dt * mu * (r[k] + conv);
        if (!std::isfinite(r[k + 1]))
            throw NonFiniteField("modal resolvent became non-finite at step " + std::to_string(k + 1));
        I[k + 1] = I[k] + 0.5 * dt * (r[k] + r[k + 1]);
    }

    const double coeff = (1.0 - kernel.a_at_zero()) * mu;
    for (std::size_t k = 0; k < r.size(); ++k)
        res.sup_bound = std::max(res.sup_bound, r[k] * r[k] + coeff * I[k] * I[k]);
    return res;
}

namespace {

/// Discrete sine basis bookkeeping for the modal oracle.
struct SineBasis {
    std::vector<std::vector<double>> modes; // interior fields
    std::vector<double> eigenvalues;        // discrete stencil eigenvalues
    double norm_sq = 0.0;                   // <e, e> (same for every mode)
};

SineBasis build_basis(const Grid& grid, int modes) {
    SineBasis basis;
    if (modes < 1) throw ParameterViolation("mild_solution_modal: modes >= 1");
    if (grid.dim() == 1) {
        if (modes > grid.interior_nodes(0))
            throw ParameterViolation("mild_solution_modal: modes <= interior nodes");
        const double pi = std::numbers::pi;
        for (int k = 1; k <= modes; ++k) {
            std::vector<double> e(grid.interior_count());
            for (int i = 1; i <= grid.interior_nodes(0); ++i)
                e[grid.interior_index(i)] =
                    std::sin(static_cast<double>(k) * pi * grid.coord_x(i) / grid.extent(0));
            basis.modes.push_back(std::move(e));
            const double h = grid.spacing(0), L = grid.extent(0);
            const double s = std::sin(static_cast<double>(k) * pi * h / (2.0 * L));
            basis.eigenvalues.push_back(4.0 / (h * h) * s * s);
        }
        basis.norm_sq = grid.extent(0) / 2.0;
        return basis;
    }
    if (modes > grid.interior_nodes(0) || modes > grid.interior_nodes(1))
        throw ParameterViolation("mild_solution_modal: modes <= interior nodes per axis");
    const double pi = std::numbers::pi;
    auto axis_eig = [&](int k, int a) {
        const double h = grid.spacing(a), L = grid.extent(a);
        const double s = std::sin(static_cast<double>(k) * pi * h / (2.0 * L));
        return 4.0 / (h * h) * s * s;
    };
    for (int ky = 1; ky <= modes; ++ky)
        for (int kx = 1; kx <= modes; ++kx) {
            std::vector<double> e(grid.interior_count());
            for (int j = 1; j <= grid.interior_nodes(1); ++j)
                for (int i = 1; i <= grid.interior_nodes(0); ++i)
                    e[grid.interior_index(i, j)] =
                        std::sin(static_cast<double>(kx) * pi * grid.coord_x(i) / grid.extent(0)) *
                        std::sin(static_cast<double>(ky) * pi * grid.coord_y(j) / grid.extent(1));
            basis.modes.push_back(std::move(e));
            basis.eigenvalues.push_back(axis_eig(kx, 0) + axis_eig(ky, 1));
        }
    basis.norm_sq = grid.extent(0) * grid.extent(1) / 4.0;
    return basis;
}

} // namespace

ModalSolution mild_solution_modal(const Grid& grid, const MemoryKernel& kernel,
                                  const Nonlinearity& nl, const InitialData& ic, int modes,
                                  double dt, double T, int picard_iters, double tol) {
    const std::int64_t n_steps = step_count(T, dt);
    const std::size_t nt = static_cast<std::size_t>(n_steps) + 1;
    const std::size_t nfield = grid.interior_count();
    if (ic.u0.size() != nfield || ic.u1.size() != nfield)
        throw SizeMismatch("initial data does not match the grid");

    const SineBasis basis = build_basis(grid, modes);
    const std::size_t nm = basis.modes.size();

    // per-mode resolvents
    std::vector<ModalResolvent> res;
    res.reserve(nm);
    for (std::size_t m = 0; m < nm; ++m)
        res.push_back(modal_resolvent(basis.eigenvalues[m], kernel, dt, T));

    auto project = [&](std::span<const double> field, std::size_t m) {
        return inner(grid, field, basis.modes[m]) / basis.norm_sq;
    };

    // linear part v(t) = R(t) u0 + (1 * R)(t) u1, per mode
    std::vector<std::vector<double>> coef(nm, std::vector<double>(nt));
    std::vector<std::vector<double>> lin(nm, std::vector<double>(nt));
    for (std::size_t m = 0; m < nm; ++m) {
        const double c0 = project(ic.u0, m), c1 = project(ic.u1, m);
        for (std::size_t k = 0; k < nt; ++k)
            lin[m][k] = res[m].r[k] * c0 + res[m].one_star_r[k] * c1;
        coef[m] = lin[m];
    }

    auto reconstruct = [&](std::size_t k, std::vector<double>& out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t m = 0; m < nm; ++m) {
            const double c = coef[m][k];
            if (c == 0.0) continue;
            const auto& e = basis.modes[m];
            for (std::size_t i = 0; i < nfield; ++i) out[i] += c * e[i];
        }
    };

    ModalSolution sol;
    sol.dt = dt;
    sol.times.resize(nt);
    for (std::size_t k = 0; k < nt; ++k) sol.times[k] = dt * static_cast<double>(k);
    sol.fields.assign(nt, std::vector<double>(nfield, 0.0));
    for (std::size_t k = 0; k < nt; ++k) reconstruct(k, sol.fields[k]);

    if (nl.is_zero()) {
        sol.iterations = 1;
        return sol;
    }

    std::vector<std::vector<double>> gcoef(nm, std::vector<double>(nt));
    std::vector<double> gfield(nfield);
    double delta_prev = 0.0;
    for (int it = 1; it <= picard_iters; ++it) {
        // project g(u(t_k)) on the basis
        for (std::size_t k = 0; k < nt; ++k) {
            const auto& uk = sol.fields[k];
            for (std::size_t i = 0; i < nfield; ++i) gfield[i] = nl.g(uk[i]);
            for (std::size_t m = 0; m < nm; ++m) gcoef[m][k] = project(gfield, m);
        }
        // coef_m = lin_m + (1*R_m) * gcoef_m  (trapezoid convolution)
        for (std::size_t m = 0; m < nm; ++m) {
            const auto& I = res[m].one_star_r;
            const auto& gm = gcoef[m];
            coef[m][0] = lin[m][0];
            for (std::size_t k = 1; k < nt; ++k) {
                double conv = 0.5 * (I[k] * gm[0] + I[0] * gm[k]);
                for (std::size_t j = 1; j < k; ++j) conv += I[k - j] * gm[j];
                coef[m][k] = lin[m][k] + dt * conv;
            }
        }
        // reconstruct and measure the update
        double delta = 0.0;
        std::vector<double> unew(nfield);
        for (std::size_t k = 0; k < nt; ++k) {
            reconstruct(k, unew);
            double diff = 0.0;
            for (std::size_t i = 0; i < nfield; ++i) {
                const double d = unew[i] - sol.fields[k][i];
                diff += d * d;
            }
            delta = std::max(delta, std::sqrt(diff * grid.cell_volume()));
            sol.fields[k] = unew;
        }
        sol.iterations = it;
        sol.final_delta = delta;
        sol.contraction_ratio = (delta_prev > 0.0) ? delta / delta_prev : 0.0;
        if (delta < tol) return sol;
        delta_prev = delta;
    }
    throw NoConvergence("Picard iteration did not reach tolerance; last contraction ratio " +
                        std::to_string(sol.contraction_ratio));
}

WeakFormReport check_weak_form(const Trajectory& traj, const Grid& grid,
                               const MemoryKernel& kernel, const Nonlinearity& nl,
                               int test_modes) {
    WeakFormReport rep;
    const std::size_t nrec = traj.records.size();
    if (nrec < 3) return rep;
    const double rdt = traj.record_dt();
    test_modes = std::min(test_modes, grid.interior_nodes(0));

    for (int k = 1; k <= test_modes; ++k) {
        const auto v = sine_mode(grid, k);
        const double mu = sine_mode_eigenvalue(grid, k);
        std::vector<double> pu(nrec), put(nrec), pg(nrec);
        std::vector<double> gfield(grid.interior_count());
        for (std::size_t m = 0; m < nrec; ++m) {
            pu[m] = inner(grid, traj.records[m].u, v);
            put[m] = inner(grid, traj.records[m].u_t, v);
            for (std::size_t i = 0; i < gfield.size(); ++i)
                gfield[i] = nl.g(traj.records[m].u[i]);
            pg[m] = inner(grid, gfield, v);
        }
        const auto conv = kernel.is_zero()
                              ? std::vector<double>(nrec, 0.0)
                              : convolve(kernel, KernelOrder::a_dot, pu, rdt);
        double worst = 0.0;
        for (std::size_t m = 1; m + 1 < nrec; ++m) {
            const double lhs = (put[m + 1] - put[m - 1]) / (2.0 * rdt);
            const double rhs = -mu * (pu[m] + conv[m]) + pg[m];
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        rep.mode_residuals.push_back(worst);
        rep.max_residual = std::max(rep.max_residual, worst);
    }
    return rep;
}

} // namespace memwave
