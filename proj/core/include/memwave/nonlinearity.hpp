#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "memwave/errors.hpp"
#include "memwave/kernels.hpp"

namespace memwave {

class Grid;

enum class NonlinearityFamily { zero, power, sine, custom };

std::string to_string(NonlinearityFamily family);
NonlinearityFamily nonlinearity_family_from_string(const std::string& name);

/// Nonlinear source g with antiderivative G(x) = Int_0^x g and growth
/// metadata. g(0) = 0 for every constructed instance. Immutable and
/// shareable.
class Nonlinearity {
  public:
    /// params: power {c, p} (c < 0, p >= 0, p(N-2) <= 2); sine {c}; zero {}.
    static Nonlinearity make(NonlinearityFamily family, std::span<const double> params,
                             int dimension);

    static Nonlinearity zero();
    static Nonlinearity power(double c, double p, int dimension);
    static Nonlinearity sine(double c);
    /// Custom g; G is built by composite adaptive quadrature cached on a
    /// uniform table over [-range, range].
    static Nonlinearity custom(std::function<double(double)> g, double growth_alpha,
                               double range = 50.0);

    double g(double x) const;
    double G(double x) const;

    /// Growth exponent alpha of the Lipschitz-type bound.
    double alpha() const { return alpha_; }
    /// Claimed growth constant C (positive).
    double claimed_C() const { return claimed_growth_; }
    /// Claimed quadratic bound constant C0 with G(t) <= C0 t^2 (positive).
    double claimed_C0() const { return claimed_c0_; }

    NonlinearityFamily family() const { return family_; }
    const std::vector<double>& params() const { return params_; }
    bool is_zero() const;

  private:
    Nonlinearity() = default;
    void build_antiderivative_table(double range);

    NonlinearityFamily family_ = NonlinearityFamily::zero;
    std::vector<double> params_;
    double alpha_ = 0.0;
    double claimed_growth_ = 1e-12;
    double claimed_c0_ = 1e-12;

    std::function<double(double)> custom_g_;
    double table_range_ = 0.0;
    double table_dx_ = 0.0;
    std::vector<double> table_G_; // cumulative antiderivative at the knots
};

/// sup over the grid of G(t)/t^2, clamped below at epsilon = 1e-12. The
/// grid must exclude 0 and be symmetric about it.
double estimate_C0(const Nonlinearity& nl, std::span<const double> t_grid);

/// Default grid for estimate_C0: log-dense near 0 plus a uniform far part,
/// mirrored about the origin.
std::vector<double> default_c0_grid(double far_limit = 20.0);

struct GrowthReport {
    double max_ratio = 0.0;
    double bound = 0.0;
    bool pass = true;
    double worst_x = 0.0;
    double worst_y = 0.0;
};

/// Samples random pairs in [-range, range]^2 and reports the maximum of
/// |g(x)-g(y)| / ((1 + |x|^alpha + |y|^alpha) |x-y|) against the claimed C.
GrowthReport check_growth(const Nonlinearity& nl, double C, int samples, double range,
                          std::uint64_t seed = 0x9e3779b97f4a7c15ULL);

struct SmallnessReport {
    double C0 = 0.0;
    double lambda = 0.0;
    double kernel_a0 = 0.0;
    double threshold = 0.0;   ///< lambda (1 - a(0)) / 2
    double margin = 0.0;      ///< threshold - C0
    double coercivity_C = 0.0; ///< (lambda (1 - a(0)) - 2 C0) / lambda
    bool pass = false;
};

/// Checks the smallness condition C0 < lambda (1 - a(0)) / 2 and reports the
/// coercivity constant it produces.
SmallnessReport check_smallness(const Nonlinearity& nl, const MemoryKernel& kernel,
                                double lambda);

struct H1LipschitzReport {
    double max_ratio = 0.0;
    int samples = 0;
    bool finite = true;
};

/// Over random discrete fields vanishing on the boundary (normalized to
/// unit discrete H1 seminorm), reports the maximum ratio
/// ||g(u)||^2_{L2} / ||grad u||^2_{L2}.
H1LipschitzReport check_h1_lipschitz(const Nonlinearity& nl, const Grid& grid, int samples,
                                     std::uint64_t seed = 0x2545f4914f6cdd1dULL);

} // namespace memwave
