#pragma once

#include <array>
#include <string>
#include <vector>

#include "memwave/diagnostics.hpp"
#include "memwave/domain.hpp"
#include "memwave/kernels.hpp"
#include "memwave/solver.hpp"

namespace memwave {

/// Boundary normal-derivative series per boundary node, with the convolved
/// companion d_nu u + a_dot * d_nu u.
struct TraceSeries {
    std::vector<double> times;
    std::vector<std::vector<double>> raw;       ///< [boundary node][record]
    std::vector<std::vector<double>> convolved; ///< [boundary node][record]
    std::vector<double> weights;                ///< boundary quadrature weights
    double record_dt = 0.0;
};

/// Extracts d_nu u at every boundary node and snapshot (one-sided stencil)
/// and forms the convolved series with the kernel's a_dot.
TraceSeries extract_trace(const Trajectory& traj, const Grid& grid, const MemoryKernel& kernel);

/// Boundary-and-time quadrature of the squared convolved trace up to T.
double hidden_quantity(const TraceSeries& trace, double T);
/// Same for the raw trace.
double hidden_quantity_raw(const TraceSeries& trace, double T);

/// Recovers the raw trace from the convolved one by per-node Volterra
/// deconvolution with kernel a_dot; the raw series of the result is the
/// deconvolution output.
TraceSeries deconvolve_trace(const TraceSeries& trace, const MemoryKernel& kernel);

struct DirectInequalityEntry {
    double data_norm = 0.0;      ///< ||grad u0||^2 + ||u1||^2
    double hidden = 0.0;         ///< Int Int |d_nu u + a_dot * d_nu u|^2
    double hidden_raw = 0.0;     ///< Int Int |d_nu u|^2 (after deconvolution)
    double ratio = 0.0;
    double ratio_raw = 0.0;
    double c0_energy = 0.0;      ///< hidden / (Int_0^T E + E(0))
};

struct DirectInequalityReport {
    std::vector<DirectInequalityEntry> entries;
    double max_ratio = 0.0;
    double max_ratio_raw = 0.0;
    double max_c0_energy = 0.0;
};

/// Family study of the direct inequality over >= 1 completed runs sharing
/// (grid, kernel, nonlinearity, T). Throws DegenerateData for a run with
/// zero initial data.
DirectInequalityReport direct_inequality_report(std::span<const Trajectory> runs,
                                                const Grid& grid, const MemoryKernel& kernel,
                                                const Nonlinearity& nl, double T);

/// Per-term ledger of the multiplier identity over [S, T]: the boundary
/// integral on the left against the seven volume/endpoint terms on the
/// right.
struct IdentityLedger {
    double lhs_full = 0.0;    ///< boundary integrand assembled from the full formula
    double lhs_reduced = 0.0; ///< reduced Dirichlet form |d_nu(u + a_dot*u)|^2
    double endpoint_term = 0.0;        ///< 2 [Int u_t h . grad w]_S^T
    double divergence_velocity = 0.0;  ///< Int Int div h (u_t)^2
    double kernel_difference = 0.0;    ///< -2 Int Int u_t h . Int a_ddot (grad u(s)-grad u(t))
    double adot_velocity = 0.0;        ///< -2 Int a_dot(t) Int u_t h . grad u
    double jacobian_quadratic = 0.0;   ///< 2 Int Sum d_i h_j d_i w d_j w
    double divergence_gradient = 0.0;  ///< -Int Int div h |grad w|^2
    double nonlinear_term = 0.0;       ///< -2 Int Int g(u) h . grad w
    double rhs_total() const {
        return endpoint_term + divergence_velocity + kernel_difference + adot_velocity +
               jacobian_quadratic + divergence_gradient + nonlinear_term;
    }
    double residual() const { return lhs_full - rhs_total(); }
};

/// Evaluates every term of the multiplier identity by composite quadrature
/// (trapezoid in t and s, grid weights in space). Requires a full-history
/// trajectory; throws HistoryTruncated otherwise.
IdentityLedger multiplier_identity_residual(const Trajectory& traj, const Grid& grid,
                                            const MemoryKernel& kernel, const Nonlinearity& nl,
                                            const MultiplierField& hfield, double S, double T);

} // namespace memwave
