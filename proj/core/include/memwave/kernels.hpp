#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "memwave/errors.hpp"

namespace memwave {

enum class KernelFamily { zero, exp_integral, poly_exp, power_law, custom_table };
enum class KernelOrder { a, a_dot, a_ddot };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

/// Which hypothesis profiles a kernel claims to satisfy. `a1` is the basic
/// profile (positive definite, a, a_dot integrable, a(0) < 1); `a2` is the
/// stronger sign profile (a in C^1, a_dot(0) < 0, a >= 0, a_dot <= 0,
/// a_ddot >= 0 a.e.). Claims are set by the factory from the family's known
/// properties; the check_* operations test them numerically.
struct KernelAssumptions {
    bool a1 = false;
    bool a2 = false;
};

/// Memory kernel a(t) of the convolution term, with evaluators for a, a_dot
/// and a_ddot. Immutable after construction and safe to share across
/// threads. Every constructed kernel satisfies a(0) < 1.
class MemoryKernel {
  public:
    /// Generic factory; params are family-specific:
    ///   zero         : {}
    ///   exp_integral : {a0, alpha, beta}   a(t) = a0 * Int_t^inf exp(-alpha s) s^-beta ds
    ///   poly_exp     : {alpha, a0, a1}     a(t) = (a0/alpha t + (a0+alpha a1)/alpha^2) exp(-alpha t)
    ///   power_law    : {k, alpha}          a(t) = k/(alpha-1) (1+t)^(1-alpha)
    ///   custom_table : {dt, v0, v1, ...}   natural cubic spline through uniform samples
    static MemoryKernel make(KernelFamily family, std::span<const double> params);

    static MemoryKernel zero();
    static MemoryKernel exp_integral(double a0, double alpha, double beta);
    static MemoryKernel poly_exp(double alpha, double a0, double a1);
    static MemoryKernel power_law(double k, double alpha);
    static MemoryKernel custom_table(double dt, std::vector<double> samples,
                                     KernelAssumptions claims = {});

    double a(double t) const;
    double a_dot(double t) const;
    double a_ddot(double t) const;
    double eval(double t, KernelOrder order) const;

    /// a(0), cached at construction.
    double a_at_zero() const { return a0_; }

    KernelFamily family() const { return family_; }
    const std::vector<double>& params() const { return params_; }
    const KernelAssumptions& claims() const { return claims_; }

    /// False when a_dot(0+) is unbounded (exp_integral with beta > 0).
    bool finite_a_dot_at_zero() const { return finite_adot0_; }
    /// False when a_ddot(0+) is unbounded.
    bool finite_a_ddot_at_zero() const { return finite_addot0_; }

    /// Largest t for which the evaluators are defined (infinity for the
    /// analytic families, end of table for custom_table).
    double t_max() const { return t_max_; }

    bool is_zero() const { return family_ == KernelFamily::zero; }

  private:
    MemoryKernel() = default;
    void verify_derivative_consistency() const;

    KernelFamily family_ = KernelFamily::zero;
    std::vector<double> params_;
    KernelAssumptions claims_;
    double a0_ = 0.0;
    double t_max_ = 0.0;
    bool finite_adot0_ = true;
    bool finite_addot0_ = true;

    // custom_table spline data (second derivatives at the knots).
    double table_dt_ = 0.0;
    std::vector<double> table_values_;
    std::vector<double> table_m_;
};

/// Result of the discrete positive-definiteness test of the convolution
/// quadratic form (scalar-valued reduction of the double-integral form).
struct PDCertificate {
    double horizon = 0.0;     ///< tested horizon T
    int resolution = 0;       ///< grid resolution n
    double min_eigenvalue = 0.0;
    double operator_norm = 0.0;
    double tolerance = 0.0;   ///< acceptance threshold actually applied
    bool positive_definite = false;
    double delta = 0.0;       ///< strong-PD margin (0 unless a strong test accepted one)
};

/// Brute-force oracle: builds the n x n lower-triangular discrete
/// convolution matrix K[i][j] = kernel_fn((i-j) T/n) * (T/n), symmetrizes it
/// and reports the minimum eigenvalue. Verdict is positive-definite iff
/// min_eig >= -tol_rel * operator_norm.
PDCertificate certify_positive_definite(const std::function<double(double)>& kernel_fn,
                                        double T, int n, double tol_rel = 1e-10);

/// Scans delta_grid (positive, increasing) and returns the certificate of
/// the largest delta for which a(t) - delta e^{-t} certifies positive
/// definite; delta = 0 with verdict indefinite when none is accepted.
PDCertificate certify_strongly_pd(const MemoryKernel& kernel, double T, int n,
                                  std::span<const double> delta_grid,
                                  double tol_rel = 1e-10);

struct SignCondition {
    bool pass = true;
    double first_violation_t = 0.0;
    double first_violation_value = 0.0;
};

/// Per-condition numerical check of the strong sign profile.
struct SignProfileReport {
    SignCondition a_nonneg;
    SignCondition a_dot_nonpos;
    SignCondition a_ddot_nonneg;
    SignCondition a_dot0_negative;
    SignCondition a0_below_one;
    bool all_pass() const {
        return a_nonneg.pass && a_dot_nonpos.pass && a_ddot_nonneg.pass &&
               a_dot0_negative.pass && a0_below_one.pass;
    }
};

/// Samples the kernel on t_grid (nonempty, increasing, positive) and reports
/// pass/fail for {a >= 0, a_dot <= 0, a_ddot >= 0, a_dot(0) < 0, a(0) < 1}
/// with the first violating sample, if any. When a_dot is singular at 0 the
/// a_dot(0) < 0 condition is evaluated at the first grid point.
SignProfileReport check_sign_profile(const MemoryKernel& kernel,
                                     std::span<const double> t_grid);

/// Exponential decay-rate hypothesis: true iff a_ddot(t) <= m |a_dot(t)| + tol
/// at every grid point (m > 0), i.e. -a_dot decays no faster than e^{-mt}.
/// Vacuously true for the zero kernel; meaningful for A2-profile kernels.
bool check_exp_decay_condition(const MemoryKernel& kernel, double m,
                               std::span<const double> t_grid, double tol = 1e-12);

/// Trapezoidal product-integration weights for the causal convolution
/// (h * f)(n dt) = Int_0^{n dt} h(n dt - s) f(s) ds over a uniform grid.
/// The kernel samples h(m dt) are precomputed once; weight(n, j) is the
/// sample scaled by dt and the trapezoid endpoint factor. (h * f)(0) = 0
/// exactly, and for f == 1 the rule reduces to the plain trapezoid rule.
class QuadratureWeights {
  public:
    QuadratureWeights(const std::function<double(double)>& h, double dt, std::size_t n_max);

    double dt() const { return dt_; }
    std::size_t max_index() const { return samples_.size() - 1; }
    double sample(std::size_t m) const { return samples_[m]; }
    const std::vector<double>& samples() const { return samples_; }

    /// w[n][j] for 0 <= j <= n <= n_max; zero row for n = 0.
    double weight(std::size_t n, std::size_t j) const;

    /// sum_j w[n][j] f[j] over f[0..n]; `f` must have at least n+1 entries.
    double apply(std::span<const double> f, std::size_t n) const;

  private:
    double dt_ = 0.0;
    std::vector<double> samples_;
};

/// Trapezoidal product quadrature of (h * u)(t_n) at every sample of `u`
/// (uniform spacing dt). Index 0 is exactly 0.
std::vector<double> convolve(const std::function<double(double)>& h,
                             std::span<const double> u, double dt);
std::vector<double> convolve(const MemoryKernel& kernel, KernelOrder order,
                             std::span<const double> u, double dt);

/// Solves the second-kind Volterra equation phi + h * phi = rhs under the
/// same trapezoid quadrature as convolve(), by forward substitution. The
/// pair (convolve, volterra_solve) round-trips to machine precision up to
/// conditioning. Requires 1 + (dt/2) h(0) != 0.
std::vector<double> volterra_solve(const std::function<double(double)>& h,
                                   std::span<const double> rhs, double dt);

} // namespace memwave
