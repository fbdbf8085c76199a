#include "memwave/trace.hpp"

#include <algorithm>
#include <cmath>

namespace memwave {

namespace {

std::size_t record_index_for(double t, double record_dt, std::size_t count, const char* what) {
    const double pos = t / record_dt;
    const auto idx = static_cast<std::size_t>(std::llround(pos));
    if (std::abs(pos - static_cast<double>(idx)) > 1e-6)
        throw DomainError(std::string(what) + " = " + std::to_string(t) +
                          " is not aligned with the snapshot cadence");
    if (idx >= count)
        throw DomainError(std::string(what) + " = " + std::to_string(t) +
                          " is beyond the trace horizon");
    return idx;
}

} // namespace

TraceSeries extract_trace(const Trajectory& traj, const Grid& grid, const MemoryKernel& kernel) {
    TraceSeries tr;
    tr.record_dt = traj.record_dt();
    const std::size_t nrec = traj.records.size();
    const std::size_t nb = grid.boundary().size();
    tr.times.resize(nrec);
    tr.weights.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) tr.weights[b] = grid.boundary()[b].weight;
    tr.raw.assign(nb, std::vector<double>(nrec, 0.0));

    for (std::size_t m = 0; m < nrec; ++m) {
        tr.times[m] = traj.records[m].t;
        const auto dnu = boundary_normal_derivative(grid, traj.records[m].u);
        for (std::size_t b = 0; b < nb; ++b) tr.raw[b][m] = dnu[b];
    }

    tr.convolved.assign(nb, {});
    for (std::size_t b = 0; b < nb; ++b) {
        if (kernel.is_zero()) {
            tr.convolved[b] = tr.raw[b];
        } else {
            auto conv = convolve(kernel, KernelOrder::a_dot, tr.raw[b], tr.record_dt);
            tr.convolved[b] = tr.raw[b];
            for (std::size_t m = 0; m < nrec; ++m) tr.convolved[b][m] += conv[m];
        }
    }
    return tr;
}

namespace {

double quad_sq(const TraceSeries& trace, const std::vector<std::vector<double>>& series,
               double T) {
    if (trace.times.empty()) return 0.0;
    const std::size_t mT =
        record_index_for(T, trace.record_dt, trace.times.size(), "hidden_quantity horizon T");
    double acc = 0.0;
    for (std::size_t m = 0; m <= mT; ++m) {
        double s = 0.0;
        for (std::size_t b = 0; b < series.size(); ++b)
            s += trace.weights[b] * series[b][m] * series[b][m];
        const double w = (m == 0 || m == mT) ? 0.5 : 1.0;
        acc += w * s;
    }
    return acc * trace.record_dt;
}

} // namespace

double hidden_quantity(const TraceSeries& trace, double T) {
    return quad_sq(trace, trace.convolved, T);
}

double hidden_quantity_raw(const TraceSeries& trace, double T) {
    return quad_sq(trace, trace.raw, T);
}

TraceSeries deconvolve_trace(const TraceSeries& trace, const MemoryKernel& kernel) {
    TraceSeries out = trace;
    for (std::size_t b = 0; b < trace.convolved.size(); ++b) {
        if (kernel.is_zero())
            out.raw[b] = trace.convolved[b];
        else
            out.raw[b] = volterra_solve([&](double t) { return kernel.a_dot(t); },
                                        trace.convolved[b], trace.record_dt);
    }
    return out;
}

DirectInequalityReport direct_inequality_report(std::span<const Trajectory> runs,
                                                const Grid& grid, const MemoryKernel& kernel,
                                                const Nonlinearity& nl, double T) {
    DirectInequalityReport rep;
    for (const auto& traj : runs) {
        DirectInequalityEntry e;
        if (traj.records.empty()) throw DegenerateData("direct_inequality_report: empty run");
        e.data_norm = gradient_norm_sq(grid, traj.records.front().u) +
                      norm_sq(grid, traj.records.front().u_t);
        if (e.data_norm == 0.0)
            throw DegenerateData("direct_inequality_report: zero initial data");

        const auto trace = extract_trace(traj, grid, kernel);
        e.hidden = hidden_quantity(trace, T);
        const auto deconv = deconvolve_trace(trace, kernel);
        e.hidden_raw = hidden_quantity_raw(deconv, T);
        e.ratio = e.hidden / e.data_norm;
        e.ratio_raw = e.hidden_raw / e.data_norm;

        const auto energy = build_energy_report(traj, grid, kernel, nl);
        const std::size_t mT =
            record_index_for(T, energy.record_dt, energy.records.size(), "T");
        double integral = 0.0;
        for (std::size_t m = 1; m <= mT; ++m)
            integral += 0.5 * energy.record_dt *
                        (energy.records[m - 1].e_history + energy.records[m].e_history);
        const double denom = integral + energy.e0_history();
        e.c0_energy = denom > 0.0 ? e.hidden / denom : 0.0;

        rep.max_ratio = std::max(rep.max_ratio, e.ratio);
        rep.max_ratio_raw = std::max(rep.max_ratio_raw, e.ratio_raw);
        rep.max_c0_energy = std::max(rep.max_c0_energy, e.c0_energy);
        rep.entries.push_back(e);
    }
    return rep;
}

IdentityLedger multiplier_identity_residual(const Trajectory& traj, const Grid& grid,
                                            const MemoryKernel& kernel, const Nonlinearity& nl,
                                            const MultiplierField& hfield, double S, double T) {
    if (!traj.full_history())
        throw HistoryTruncated("multiplier_identity_residual requires a full-history run");
    const double rdt = traj.record_dt();
    const std::size_t nrec = traj.records.size();
    const std::size_t mS = record_index_for(S, rdt, nrec, "S");
    const std::size_t mT = record_index_for(T, rdt, nrec, "T");
    if (mT <= mS) throw DomainError("multiplier_identity_residual: T must exceed S");

    const std::size_t nfield = grid.interior_count();
    const bool two_d = grid.dim() == 2;
    const double vol = grid.cell_volume();
    const double div_h = hfield.divergence;

    IdentityLedger ledger;
    std::vector<double> w_field(nfield), cfield(nfield);

    // endpoint values of 2 Int u_t h . grad w
    double endpoint_S = 0.0, endpoint_T = 0.0;

    for (std::size_t m = mS; m <= mT; ++m) {
        const auto& rec = traj.records[m];
        const double tw = ((m == mS || m == mT) ? 0.5 : 1.0) * rdt;

        // w(t) = u(t) + (a_dot * u)(t), trapezoid over the records from 0
        std::copy(rec.u.begin(), rec.u.end(), w_field.begin());
        if (!kernel.is_zero() && m > 0) {
            for (std::size_t j = 0; j <= m; ++j) {
                const double ew = (j == 0 || j == m) ? 0.5 : 1.0;
                const double c = ew * rdt * kernel.a_dot(rdt * static_cast<double>(m - j));
                if (c == 0.0) continue;
                const auto& uj = traj.records[j].u;
                for (std::size_t k = 0; k < nfield; ++k) w_field[k] += c * uj[k];
            }
        }

        const auto gwx = node_gradient(grid, w_field, 0);
        const auto gwy = two_d ? node_gradient(grid, w_field, 1) : std::vector<double>();
        const auto gux = node_gradient(grid, rec.u, 0);
        const auto guy = two_d ? node_gradient(grid, rec.u, 1) : std::vector<double>();

        // left-hand side boundary integrand
        const auto dnu_w = boundary_normal_derivative(grid, w_field);
        double lhs_full_m = 0.0, lhs_red_m = 0.0;
        const auto& bnodes = grid.boundary();
        for (std::size_t b = 0; b < bnodes.size(); ++b) {
            const auto& bn = bnodes[b];
            if (bn.weight == 0.0) continue;
            // grad w on the boundary: normal part from the one-sided stencil,
            // tangential part zero (w vanishes along the boundary)
            const double gx = dnu_w[b] * bn.normal[0];
            const double gy = dnu_w[b] * bn.normal[1];
            const double hx = 2.0 * grid.coord_x(bn.ij[0]) / grid.extent(0) - 1.0;
            const double hy = two_d ? 2.0 * grid.coord_y(bn.ij[1]) / grid.extent(1) - 1.0 : 0.0;
            const double h_dot_grad = hx * gx + hy * gy;
            const double h_dot_nu = hx * bn.normal[0] + hy * bn.normal[1];
            const double grad_sq = gx * gx + gy * gy;
            // u_t vanishes on the boundary, so its term drops
            lhs_full_m += bn.weight * (2.0 * dnu_w[b] * h_dot_grad - h_dot_nu * grad_sq);
            lhs_red_m += bn.weight * dnu_w[b] * dnu_w[b];
        }
        ledger.lhs_full += tw * lhs_full_m;
        ledger.lhs_reduced += tw * lhs_red_m;

        // endpoint bracket 2 Int u_t h . grad w
        if (m == mS || m == mT) {
            double acc = 0.0;
            for (std::size_t k = 0; k < nfield; ++k) {
                const double hg =
                    hfield.values[k][0] * gwx[k] + (two_d ? hfield.values[k][1] * gwy[k] : 0.0);
                acc += rec.u_t[k] * hg;
            }
            acc *= 2.0 * vol;
            if (m == mS) endpoint_S = acc;
            if (m == mT) endpoint_T = acc;
        }

        // div h (u_t)^2
        ledger.divergence_velocity += tw * div_h * norm_sq(grid, rec.u_t);

        // -2 Int u_t h . Int a_ddot(t-s) (grad u(s) - grad u(t)) ds
        if (!kernel.is_zero() && m > 0) {
            std::fill(cfield.begin(), cfield.end(), 0.0);
            for (std::size_t j = 0; j <= m; ++j) {
                const double ew = (j == 0 || j == m) ? 0.5 : 1.0;
                const double c = ew * rdt * kernel.a_ddot(rdt * static_cast<double>(m - j));
                if (c == 0.0) continue;
                const auto& uj = traj.records[j].u;
                for (std::size_t k = 0; k < nfield; ++k) cfield[k] += c * (uj[k] - rec.u[k]);
            }
            const auto gcx = node_gradient(grid, cfield, 0);
            const auto gcy = two_d ? node_gradient(grid, cfield, 1) : std::vector<double>();
            double acc = 0.0;
            for (std::size_t k = 0; k < nfield; ++k) {
                const double hg =
                    hfield.values[k][0] * gcx[k] + (two_d ? hfield.values[k][1] * gcy[k] : 0.0);
                acc += rec.u_t[k] * hg;
            }
            ledger.kernel_difference += tw * (-2.0) * vol * acc;
        }

        // -2 a_dot(t) Int u_t h . grad u
        if (!kernel.is_zero()) {
            double acc = 0.0;
            for (std::size_t k = 0; k < nfield; ++k) {
                const double hg =
                    hfield.values[k][0] * gux[k] + (two_d ? hfield.values[k][1] * guy[k] : 0.0);
                acc += rec.u_t[k] * hg;
            }
            ledger.adot_velocity += tw * (-2.0) * kernel.a_dot(rec.t) * vol * acc;
        }

        // 2 Sum_i d_i h_i Int (d_i w)^2   (diagonal Jacobian of the built-in field)
        // and -div h Int |grad w|^2, both on the edge form
        const double dxw = directional_gradient_norm_sq(grid, w_field, 0);
        const double dyw = two_d ? directional_gradient_norm_sq(grid, w_field, 1) : 0.0;
        ledger.jacobian_quadratic +=
            tw * 2.0 * (hfield.jacobian_diag[0] * dxw + hfield.jacobian_diag[1] * dyw);
        ledger.divergence_gradient += tw * (-div_h) * (dxw + dyw);

        // 2 Int g(u) h . grad w
        if (!nl.is_zero()) {
            double acc = 0.0;
            for (std::size_t k = 0; k < nfield; ++k) {
                const double hg =
                    hfield.values[k][0] * gwx[k] + (two_d ? hfield.values[k][1] * gwy[k] : 0.0);
                acc += nl.g(rec.u[k]) * hg;
            }
            ledger.nonlinear_term += tw * (-2.0) * vol * acc;
        }
    }

    ledger.endpoint_term = endpoint_T - endpoint_S;
    return ledger;
}

} // namespace memwave
