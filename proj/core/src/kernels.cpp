#include "memwave/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace memwave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

void require(bool ok, const std::string& inequality) {
    if (!ok) throw ParameterViolation("kernel parameter constraint violated: " + inequality);
}

/// Adaptive quadrature of a0 * Int_t^inf exp(-alpha s) s^-beta ds. The
/// substitution x = s^(1-beta) removes the endpoint singularity at s = 0,
/// and the tail is cut where the exponential is below 1e-30.
double exp_integral_a(double a0, double alpha, double beta, double t) {
    if (a0 == 0.0) return 0.0;
    const double p = 1.0 - beta;            // > 0
    const double cut = t + 70.0 / alpha + 1.0;
    const double x_lo = std::pow(t, p);
    const double x_hi = std::pow(cut, p);
    auto f = [&](double x) {
        const double s = std::pow(x, 1.0 / p);
        return std::exp(-alpha * s) / p;
    };
    using boost::math::quadrature::gauss_kronrod;
    const double val =
        gauss_kronrod<double, 15>::integrate(f, x_lo, x_hi, 15, 1e-14);
    return a0 * val;
}

} // namespace

std::string to_string(KernelFamily family) {
    switch (family) {
        case KernelFamily::zero: return "zero";
        case KernelFamily::exp_integral: return "exp_integral";
        case KernelFamily::poly_exp: return "poly_exp";
        case KernelFamily::power_law: return "power_law";
        case KernelFamily::custom_table: return "custom_table";
    }
    return "unknown";
}

KernelFamily kernel_family_from_string(const std::string& name) {
    if (name == "zero") return KernelFamily::zero;
    if (name == "exp_integral") return KernelFamily::exp_integral;
    if (name == "poly_exp") return KernelFamily::poly_exp;
    if (name == "power_law") return KernelFamily::power_law;
    if (name == "custom_table") return KernelFamily::custom_table;
    throw ParameterViolation("unknown kernel family: " + name);
}

MemoryKernel MemoryKernel::make(KernelFamily family, std::span<const double> params) {
    switch (family) {
        case KernelFamily::zero:
            return zero();
        case KernelFamily::exp_integral:
            require(params.size() == 3, "exp_integral expects params {a0, alpha, beta}");
            return exp_integral(params[0], params[1], params[2]);
        case KernelFamily::poly_exp:
            require(params.size() == 3, "poly_exp expects params {alpha, a0, a1}");
            return poly_exp(params[0], params[1], params[2]);
        case KernelFamily::power_law:
            require(params.size() == 2, "power_law expects params {k, alpha}");
            return power_law(params[0], params[1]);
        case KernelFamily::custom_table: {
            require(params.size() >= 5, "custom_table expects params {dt, v0, v1, ...} with >= 4 samples");
            std::vector<double> samples(params.begin() + 1, params.end());
            return custom_table(params[0], std::move(samples));
        }
    }
    throw ParameterViolation("unknown kernel family");
}

MemoryKernel MemoryKernel::zero() {
    MemoryKernel k;
    k.family_ = KernelFamily::zero;
    k.claims_ = {true, false};
    k.a0_ = 0.0;
    k.t_max_ = kInf;
    return k;
}

MemoryKernel MemoryKernel::exp_integral(double a0, double alpha, double beta) {
    require(alpha > 0.0, "exp_integral: alpha > 0");
    require(beta >= 0.0 && beta < 1.0, "exp_integral: 0 <= beta < 1");
    require(a0 >= 0.0, "exp_integral: a0 >= 0");
    MemoryKernel k;
    k.family_ = KernelFamily::exp_integral;
    k.params_ = {a0, alpha, beta};
    k.t_max_ = kInf;
    k.finite_adot0_ = (beta == 0.0) || (a0 == 0.0);
    k.finite_addot0_ = k.finite_adot0_;
    k.a0_ = exp_integral_a(a0, alpha, beta, 0.0);
    require(k.a0_ < 1.0, "exp_integral: a(0) = " + fmt(k.a0_) + " must be < 1");
    // completely monotone family; a_dot(0) < 0 needs a0 > 0 and beta = 0
    k.claims_ = {true, a0 > 0.0 && beta == 0.0};
    k.verify_derivative_consistency();
    return k;
}

MemoryKernel MemoryKernel::poly_exp(double alpha, double a0, double a1) {
    require(alpha > 0.0, "poly_exp: alpha > 0");
    require(a0 >= 0.0, "poly_exp: a0 >= 0");
    require(a1 >= 0.0, "poly_exp: a1 >= 0");
    require((a0 + alpha * a1) / (alpha * alpha) < 1.0,
            "poly_exp: (a0 + alpha a1)/alpha^2 < 1");
    require(alpha * a1 - a0 >= 0.0, "poly_exp: alpha a1 - a0 >= 0");
    MemoryKernel k;
    k.family_ = KernelFamily::poly_exp;
    k.params_ = {alpha, a0, a1};
    k.t_max_ = kInf;
    k.a0_ = (a0 + alpha * a1) / (alpha * alpha);
    // a_dot(0) = -a1, so the strong profile needs a1 > 0
    k.claims_ = {true, a1 > 0.0};
    k.verify_derivative_consistency();
    return k;
}

MemoryKernel MemoryKernel::power_law(double kk, double alpha) {
    require(kk > 0.0, "power_law: k > 0");
    require(alpha > 2.0, "power_law: alpha > 2");
    require(kk / (alpha - 1.0) < 1.0, "power_law: k/(alpha-1) < 1, i.e. a(0) < 1");
    MemoryKernel k;
    k.family_ = KernelFamily::power_law;
    k.params_ = {kk, alpha};
    k.t_max_ = kInf;
    k.a0_ = kk / (alpha - 1.0);
    k.claims_ = {true, true};
    k.verify_derivative_consistency();
    return k;
}

MemoryKernel MemoryKernel::custom_table(double dt, std::vector<double> samples,
                                        KernelAssumptions claims) {
    require(dt > 0.0, "custom_table: dt > 0");
    require(samples.size() >= 4, "custom_table: at least 4 samples");
    for (double v : samples)
        require(std::isfinite(v), "custom_table: samples finite");
    require(samples.front() < 1.0, "custom_table: a(0) = " + fmt(samples.front()) + " must be < 1");

    MemoryKernel k;
    k.family_ = KernelFamily::custom_table;
    k.claims_ = claims;
    k.table_dt_ = dt;
    k.table_values_ = std::move(samples);
    k.a0_ = k.table_values_.front();
    k.t_max_ = dt * static_cast<double>(k.table_values_.size() - 1);
    k.params_.push_back(dt);
    k.params_.insert(k.params_.end(), k.table_values_.begin(), k.table_values_.end());

    // natural cubic spline: solve the tridiagonal system for the second
    // derivatives at the knots (Thomas algorithm)
    const std::size_t n = k.table_values_.size();
    std::vector<double> m(n, 0.0), c_prime(n, 0.0), d_prime(n, 0.0);
    const double h = dt;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double rhs = 6.0 * (k.table_values_[i + 1] - 2.0 * k.table_values_[i] +
                                  k.table_values_[i - 1]) / (h * h);
        const double b = 4.0;
        if (i == 1) {
            c_prime[i] = 1.0 / b;
            d_prime[i] = rhs / b;
        } else {
            const double denom = b - c_prime[i - 1];
            c_prime[i] = 1.0 / denom;
            d_prime[i] = (rhs - d_prime[i - 1]) / denom;
        }
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        m[i] = d_prime[i] - c_prime[i] * m[i + 1];
        if (i == 1) break;
    }
    k.table_m_ = std::move(m);
    k.verify_derivative_consistency();
    return k;
}

double MemoryKernel::eval(double t, KernelOrder order) const {
    switch (order) {
        case KernelOrder::a: return a(t);
        case KernelOrder::a_dot: return a_dot(t);
        case KernelOrder::a_ddot: return a_ddot(t);
    }
    throw DomainError("unknown kernel order");
}

double MemoryKernel::a(double t) const {
    if (t < 0.0) throw DomainError("kernel evaluation requires t >= 0, got t = " + fmt(t));
    switch (family_) {
        case KernelFamily::zero:
            return 0.0;
        case KernelFamily::exp_integral:
            if (t == 0.0) return a0_;
            return exp_integral_a(params_[0], params_[1], params_[2], t);
        case KernelFamily::poly_exp: {
            const double alpha = params_[0], a0p = params_[1], a1p = params_[2];
            return (a0p / alpha * t + (a0p + alpha * a1p) / (alpha * alpha)) *
                   std::exp(-alpha * t);
        }
        case KernelFamily::power_law: {
            const double kk = params_[0], alpha = params_[1];
            return kk / (alpha - 1.0) * std::pow(1.0 + t, 1.0 - alpha);
        }
        case KernelFamily::custom_table: {
            if (t > t_max_ * (1.0 + 1e-12))
                throw DomainError("custom_table kernel evaluated beyond its table end t_max = " +
                                  fmt(t_max_));
            t = std::min(t, t_max_);
            const double h = table_dt_;
            const std::size_t i =
                std::min(static_cast<std::size_t>(t / h), table_values_.size() - 2);
            const double tl = static_cast<double>(i) * h, tr = tl + h;
            const double ml = table_m_[i], mr = table_m_[i + 1];
            const double yl = table_values_[i], yr = table_values_[i + 1];
            return ml * (tr - t) * (tr - t) * (tr - t) / (6.0 * h) +
                   mr * (t - tl) * (t - tl) * (t - tl) / (6.0 * h) +
                   (yl / h - ml * h / 6.0) * (tr - t) +
                   (yr / h - mr * h / 6.0) * (t - tl);
        }
    }
    throw DomainError("unknown kernel family");
}

double MemoryKernel::a_dot(double t) const {
    if (t < 0.0) throw DomainError("kernel evaluation requires t >= 0, got t = " + fmt(t));
    switch (family_) {
        case KernelFamily::zero:
            return 0.0;
        case KernelFamily::exp_integral: {
            const double a0p = params_[0], alpha = params_[1], beta = params_[2];
            if (a0p == 0.0) return 0.0;
            if (t == 0.0) {
                if (beta > 0.0)
                    throw SingularityError("exp_integral a_dot is unbounded at t = 0 for beta > 0");
                return -a0p;
            }
            return -a0p * std::exp(-alpha * t) * std::pow(t, -beta);
        }
        case KernelFamily::poly_exp: {
            const double alpha = params_[0], a0p = params_[1], a1p = params_[2];
            return -(a0p * t + a1p) * std::exp(-alpha * t);
        }
        case KernelFamily::power_law: {
            const double kk = params_[0], alpha = params_[1];
            return -kk * std::pow(1.0 + t, -alpha);
        }
        case KernelFamily::custom_table: {
            if (t > t_max_ * (1.0 + 1e-12))
                throw DomainError("custom_table kernel evaluated beyond its table end t_max = " +
                                  fmt(t_max_));
            t = std::min(t, t_max_);
            const double h = table_dt_;
            const std::size_t i =
                std::min(static_cast<std::size_t>(t / h), table_values_.size() - 2);
            const double tl = static_cast<double>(i) * h, tr = tl + h;
            const double ml = table_m_[i], mr = table_m_[i + 1];
            const double yl = table_values_[i], yr = table_values_[i + 1];
            return -ml * (tr - t) * (tr - t) / (2.0 * h) + mr * (t - tl) * (t - tl) / (2.0 * h) -
                   (yl / h - ml * h / 6.0) + (yr / h - mr * h / 6.0);
        }
    }
    throw DomainError("unknown kernel family");
}

double MemoryKernel::a_ddot(double t) const {
    if (t < 0.0) throw DomainError("kernel evaluation requires t >= 0, got t = " + fmt(t));
    switch (family_) {
        case KernelFamily::zero:
            return 0.0;
        case KernelFamily::exp_integral: {
            const double a0p = params_[0], alpha = params_[1], beta = params_[2];
            if (a0p == 0.0) return 0.0;
            if (t == 0.0) {
                if (beta > 0.0)
                    throw SingularityError("exp_integral a_ddot is unbounded at t = 0 for beta > 0");
                return a0p * alpha;
            }
            return a0p * std::exp(-alpha * t) * std::pow(t, -beta) * (alpha + beta / t);
        }
        case KernelFamily::poly_exp: {
            const double alpha = params_[0], a0p = params_[1], a1p = params_[2];
            return (alpha * a0p * t + alpha * a1p - a0p) * std::exp(-alpha * t);
        }
        case KernelFamily::power_law: {
            const double kk = params_[0], alpha = params_[1];
            return kk * alpha * std::pow(1.0 + t, -alpha - 1.0);
        }
        case KernelFamily::custom_table: {
            if (t > t_max_ * (1.0 + 1e-12))
                throw DomainError("custom_table kernel evaluated beyond its table end t_max = " +
                                  fmt(t_max_));
            t = std::min(t, t_max_);
            const double h = table_dt_;
            const std::size_t i =
                std::min(static_cast<std::size_t>(t / h), table_values_.size() - 2);
            const double tl = static_cast<double>(i) * h, tr = tl + h;
            return table_m_[i] * (tr - t) / h + table_m_[i + 1] * (t - tl) / h;
        }
    }
    throw DomainError("unknown kernel family");
}

void MemoryKernel::verify_derivative_consistency() const {
    // internal self-check: a_dot must be the derivative of a
    std::mt19937_64 rng(0x5eedULL);
    const double hi = std::min(10.0, t_max_ * 0.99);
    if (!(hi > 0.11)) return;
    std::uniform_real_distribution<double> dist(0.1, hi);
    for (int i = 0; i < 20; ++i) {
        const double t = dist(rng);
        const double eps = 1e-6 * std::max(1.0, std::abs(t));
        const double fd = (a(t + eps) - a(t - eps)) / (2.0 * eps);
        const double ad = a_dot(t);
        if (std::abs(fd - ad) > 1e-6 * (1.0 + std::abs(ad)))
            throw NumericalFailure("kernel derivative inconsistency at t = " + fmt(t) +
                                   ": finite difference " + fmt(fd) + " vs a_dot " + fmt(ad));
    }
}

PDCertificate certify_positive_definite(const std::function<double(double)>& kernel_fn,
                                        double T, int n, double tol_rel) {
    if (n < 2) throw ParameterViolation("certify_positive_definite: n >= 2 required");
    if (!(T > 0.0)) throw ParameterViolation("certify_positive_definite: T > 0 required");
    const double dt = T / static_cast<double>(n);

    std::vector<double> samples(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
        samples[static_cast<std::size_t>(m)] = kernel_fn(dt * static_cast<double>(m));
        if (!std::isfinite(samples[static_cast<std::size_t>(m)]))
            throw DomainError("certify_positive_definite: kernel_fn not finite at t = " +
                              fmt(dt * m));
    }

    // symmetrized lower-triangular discrete convolution matrix
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i) {
        M(i, i) = samples[0] * dt;
        for (int j = 0; j < i; ++j) {
            const double v = 0.5 * samples[static_cast<std::size_t>(i - j)] * dt;
            M(i, j) = v;
            M(j, i) = v;
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericalFailure("certify_positive_definite: eigenvalue solve did not converge");

    PDCertificate cert;
    cert.horizon = T;
    cert.resolution = n;
    cert.min_eigenvalue = es.eigenvalues().minCoeff();
    cert.operator_norm =
        std::max(std::abs(es.eigenvalues().minCoeff()), std::abs(es.eigenvalues().maxCoeff()));
    cert.tolerance = tol_rel * std::max(cert.operator_norm, 1e-300);
    cert.positive_definite = cert.min_eigenvalue >= -cert.tolerance;
    return cert;
}

PDCertificate certify_strongly_pd(const MemoryKernel& kernel, double T, int n,
                                  std::span<const double> delta_grid, double tol_rel) {
    if (delta_grid.empty())
        throw ParameterViolation("certify_strongly_pd: delta_grid nonempty");
    for (std::size_t i = 0; i < delta_grid.size(); ++i) {
        if (!(delta_grid[i] > 0.0))
            throw ParameterViolation("certify_strongly_pd: delta_grid positive");
        if (i > 0 && !(delta_grid[i] > delta_grid[i - 1]))
            throw ParameterViolation("certify_strongly_pd: delta_grid increasing");
    }
    PDCertificate last;
    for (std::size_t k = delta_grid.size(); k-- > 0;) {
        const double delta = delta_grid[k];
        auto fn = [&](double t) { return kernel.a(t) - delta * std::exp(-t); };
        last = certify_positive_definite(fn, T, n, tol_rel);
        if (last.positive_definite) {
            last.delta = delta;
            return last;
        }
    }
    last.delta = 0.0;
    last.positive_definite = false;
    return last;
}

SignProfileReport check_sign_profile(const MemoryKernel& kernel,
                                     std::span<const double> t_grid) {
    if (t_grid.empty()) throw ParameterViolation("check_sign_profile: t_grid nonempty");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > 0.0)) throw ParameterViolation("check_sign_profile: t_grid positive");
        if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
            throw ParameterViolation("check_sign_profile: t_grid increasing");
    }

    SignProfileReport rep;
    const double tol = 1e-14 * (1.0 + std::abs(kernel.a_at_zero()));
    for (double t : t_grid) {
        const double av = kernel.a(t);
        if (rep.a_nonneg.pass && av < -tol)
            rep.a_nonneg = {false, t, av};
        const double adv = kernel.a_dot(t);
        if (rep.a_dot_nonpos.pass && adv > tol)
            rep.a_dot_nonpos = {false, t, adv};
        const double addv = kernel.a_ddot(t);
        if (rep.a_ddot_nonneg.pass && addv < -tol)
            rep.a_ddot_nonneg = {false, t, addv};
    }
    const double adot0 =
        kernel.finite_a_dot_at_zero() ? kernel.a_dot(0.0) : kernel.a_dot(t_grid.front());
    if (!(adot0 < 0.0)) rep.a_dot0_negative = {false, 0.0, adot0};
    if (!(kernel.a_at_zero() < 1.0)) rep.a0_below_one = {false, 0.0, kernel.a_at_zero()};
    return rep;
}

bool check_exp_decay_condition(const MemoryKernel& kernel, double m,
                               std::span<const double> t_grid, double tol) {
    if (!(m > 0.0)) throw ParameterViolation("check_exp_decay_condition: m > 0 required");
    for (double t : t_grid) {
        // a_ddot <= m |a_dot|: the kernel -a_dot decays no faster than rate m
        if (kernel.a_ddot(t) > -m * kernel.a_dot(t) + tol) return false;
    }
    return true;
}

QuadratureWeights::QuadratureWeights(const std::function<double(double)>& h, double dt,
                                     std::size_t n_max)
    : dt_(dt) {
    if (!(dt > 0.0)) throw ParameterViolation("QuadratureWeights: dt > 0 required");
    samples_.resize(n_max + 1);
    for (std::size_t m = 0; m <= n_max; ++m)
        samples_[m] = h(dt * static_cast<double>(m));
}

double QuadratureWeights::weight(std::size_t n, std::size_t j) const {
    if (n == 0) return 0.0;
    const double endpoint = (j == 0 || j == n) ? 0.5 : 1.0;
    return endpoint * dt_ * samples_[n - j];
}

double QuadratureWeights::apply(std::span<const double> f, std::size_t n) const {
    if (n == 0) return 0.0;
    if (f.size() < n + 1 || samples_.size() < n + 1)
        throw LengthMismatch("QuadratureWeights::apply: series shorter than n+1");
    double acc = 0.5 * (samples_[n] * f[0] + samples_[0] * f[n]);
    for (std::size_t j = 1; j < n; ++j) acc += samples_[n - j] * f[j];
    return acc * dt_;
}

std::vector<double> convolve(const std::function<double(double)>& h,
                             std::span<const double> u, double dt) {
    if (u.empty()) return {};
    QuadratureWeights q(h, dt, u.size() - 1);
    std::vector<double> out(u.size());
    for (std::size_t n = 0; n < u.size(); ++n) out[n] = q.apply(u, n);
    return out;
}

std::vector<double> convolve(const MemoryKernel& kernel, KernelOrder order,
                             std::span<const double> u, double dt) {
    return convolve([&](double t) { return kernel.eval(t, order); }, u, dt);
}

std::vector<double> volterra_solve(const std::function<double(double)>& h,
                                   std::span<const double> rhs, double dt) {
    if (rhs.empty()) return {};
    QuadratureWeights q(h, dt, rhs.size() - 1);
    const double diag = 1.0 + 0.5 * dt * q.sample(0);
    if (std::abs(diag) < 1e-14)
        throw SingularStep("volterra_solve: diagonal factor 1 + (dt/2) h(0) vanishes");

    std::vector<double> phi(rhs.size());
    phi[0] = rhs[0];
    for (std::size_t n = 1; n < rhs.size(); ++n) {
        double acc = 0.5 * q.sample(n) * phi[0];
        for (std::size_t j = 1; j < n; ++j) acc += q.sample(n - j) * phi[j];
        phi[n] = (rhs[n] - dt * acc) / diag;
    }
    return phi;
}

} // namespace memwave
