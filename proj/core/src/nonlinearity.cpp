#include "memwave/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "memwave/domain.hpp"

namespace memwave {

namespace {

constexpr double kEps = 1e-12;

void require(bool ok, const std::string& what) {
    if (!ok) throw ParameterViolation("nonlinearity parameter constraint violated: " + what);
}

/// Composite Simpson on [a, b] with `cells` subdivisions.
double simpson(const std::function<double(double)>& f, double a, double b, int cells) {
    const double h = (b - a) / static_cast<double>(cells);
    double acc = f(a) + f(b);
    for (int i = 1; i < cells; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
    return acc * h / 3.0;
}

} // namespace

std::string to_string(NonlinearityFamily family) {
    switch (family) {
        case NonlinearityFamily::zero: return "zero";
        case NonlinearityFamily::power: return "power";
        case NonlinearityFamily::sine: return "sine";
        case NonlinearityFamily::custom: return "custom";
    }
    return "unknown";
}

NonlinearityFamily nonlinearity_family_from_string(const std::string& name) {
    if (name == "zero") return NonlinearityFamily::zero;
    if (name == "power") return NonlinearityFamily::power;
    if (name == "sine") return NonlinearityFamily::sine;
    if (name == "custom") return NonlinearityFamily::custom;
    throw ParameterViolation("unknown nonlinearity family: " + name);
}

Nonlinearity Nonlinearity::make(NonlinearityFamily family, std::span<const double> params,
                                int dimension) {
    switch (family) {
        case NonlinearityFamily::zero:
            return zero();
        case NonlinearityFamily::power:
            require(params.size() == 2, "power expects params {c, p}");
            return power(params[0], params[1], dimension);
        case NonlinearityFamily::sine:
            require(params.size() == 1, "sine expects params {c}");
            return sine(params[0]);
        case NonlinearityFamily::custom:
            throw ParameterViolation("custom nonlinearities are constructed programmatically");
    }
    throw ParameterViolation("unknown nonlinearity family");
}

Nonlinearity Nonlinearity::zero() {
    Nonlinearity n;
    n.family_ = NonlinearityFamily::zero;
    return n;
}

Nonlinearity Nonlinearity::power(double c, double p, int dimension) {
    require(c < 0.0, "power: c < 0");
    require(p >= 0.0, "power: p >= 0");
    require(p * static_cast<double>(dimension - 2) <= 2.0, "power: p(N-2) <= 2");
    Nonlinearity n;
    n.family_ = NonlinearityFamily::power;
    n.params_ = {c, p};
    n.alpha_ = p;
    n.claimed_growth_ = std::max(std::abs(c) * (p + 1.0), kEps);
    n.claimed_c0_ = kEps; // G <= 0
    return n;
}

Nonlinearity Nonlinearity::sine(double c) {
    Nonlinearity n;
    n.family_ = NonlinearityFamily::sine;
    n.params_ = {c};
    n.alpha_ = 0.0;
    n.claimed_growth_ = std::max(std::abs(c), kEps);
    n.claimed_c0_ = std::max(c > 0.0 ? c / 2.0 : 0.0, kEps);
    return n;
}

Nonlinearity Nonlinearity::custom(std::function<double(double)> g, double growth_alpha,
                                  double range) {
    require(static_cast<bool>(g), "custom: evaluator required");
    require(std::abs(g(0.0)) == 0.0, "custom: g(0) = 0");
    require(growth_alpha >= 0.0, "custom: alpha >= 0");
    require(range > 0.0, "custom: range > 0");
    Nonlinearity n;
    n.family_ = NonlinearityFamily::custom;
    n.alpha_ = growth_alpha;
    n.custom_g_ = std::move(g);
    n.build_antiderivative_table(range);
    return n;
}

void Nonlinearity::build_antiderivative_table(double range) {
    // cumulative quadrature of g on a uniform table; G between knots is
    // finished off with a local Simpson rule at evaluation time
    table_range_ = range;
    const std::size_t half = 2000;
    table_dx_ = range / static_cast<double>(half);
    table_G_.assign(2 * half + 1, 0.0);
    const std::size_t origin = half;
    for (std::size_t k = origin + 1; k < table_G_.size(); ++k) {
        const double a = table_dx_ * (static_cast<double>(k - 1) - static_cast<double>(origin));
        table_G_[k] = table_G_[k - 1] + simpson(custom_g_, a, a + table_dx_, 8);
    }
    for (std::size_t k = origin; k-- > 0;) {
        const double b = table_dx_ * (static_cast<double>(k + 1) - static_cast<double>(origin));
        table_G_[k] = table_G_[k + 1] - simpson(custom_g_, b - table_dx_, b, 8);
    }
}

double Nonlinearity::g(double x) const {
    switch (family_) {
        case NonlinearityFamily::zero:
            return 0.0;
        case NonlinearityFamily::power: {
            const double c = params_[0], p = params_[1];
            return c * std::pow(std::abs(x), p) * x;
        }
        case NonlinearityFamily::sine:
            return params_[0] * std::sin(x);
        case NonlinearityFamily::custom:
            return custom_g_(x);
    }
    return 0.0;
}

double Nonlinearity::G(double x) const {
    switch (family_) {
        case NonlinearityFamily::zero:
            return 0.0;
        case NonlinearityFamily::power: {
            const double c = params_[0], p = params_[1];
            return c * std::pow(std::abs(x), p + 2.0) / (p + 2.0);
        }
        case NonlinearityFamily::sine: {
            // c (1 - cos x), written to stay accurate near 0
            const double s = std::sin(0.5 * x);
            return 2.0 * params_[0] * s * s;
        }
        case NonlinearityFamily::custom: {
            if (std::abs(x) > table_range_)
                throw DomainError("custom nonlinearity: |x| beyond cached antiderivative range");
            const double pos = (x + table_range_) / table_dx_;
            const std::size_t k = std::min(static_cast<std::size_t>(pos), table_G_.size() - 1);
            const double xk = table_dx_ * static_cast<double>(k) - table_range_;
            if (x == xk) return table_G_[k];
            return table_G_[k] + simpson(custom_g_, xk, x, 8);
        }
    }
    return 0.0;
}

bool Nonlinearity::is_zero() const { return family_ == NonlinearityFamily::zero; }

double estimate_C0(const Nonlinearity& nl, std::span<const double> t_grid) {
    require(!t_grid.empty(), "estimate_C0: grid nonempty");
    std::vector<double> sorted(t_grid.begin(), t_grid.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        require(sorted[i] != 0.0, "estimate_C0: grid excludes 0");
        const double mirror = -sorted[sorted.size() - 1 - i];
        require(std::abs(sorted[i] - mirror) <= 1e-12 * std::max(1.0, std::abs(sorted[i])),
                "estimate_C0: grid symmetric about 0");
    }
    double sup = 0.0;
    for (double t : t_grid) sup = std::max(sup, nl.G(t) / (t * t));
    return std::max(sup, kEps);
}

std::vector<double> default_c0_grid(double far_limit) {
    std::vector<double> grid;
    for (int i = 0; i < 200; ++i) { // log-dense in (1e-8, 1]
        const double t = std::pow(10.0, -8.0 + 8.0 * static_cast<double>(i) / 199.0);
        grid.push_back(t);
    }
    for (int i = 1; i <= 200; ++i)
        grid.push_back(1.0 + (far_limit - 1.0) * static_cast<double>(i) / 200.0);
    const std::size_t half = grid.size();
    for (std::size_t i = 0; i < half; ++i) grid.push_back(-grid[i]);
    std::sort(grid.begin(), grid.end());
    return grid;
}

GrowthReport check_growth(const Nonlinearity& nl, double C, int samples, double range,
                          std::uint64_t seed) {
    if (!(C > 0.0)) throw ParameterViolation("check_growth: C > 0 required");
    if (samples < 1) throw ParameterViolation("check_growth: samples >= 1 required");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-range, range);
    GrowthReport rep;
    rep.bound = C;
    for (int s = 0; s < samples; ++s) {
        const double x = dist(rng), y = dist(rng);
        if (x == y) continue;
        const double denom =
            (1.0 + std::pow(std::abs(x), nl.alpha()) + std::pow(std::abs(y), nl.alpha())) *
            std::abs(x - y);
        const double ratio = std::abs(nl.g(x) - nl.g(y)) / denom;
        if (ratio > rep.max_ratio) {
            rep.max_ratio = ratio;
            rep.worst_x = x;
            rep.worst_y = y;
        }
    }
    rep.pass = rep.max_ratio <= C;
    return rep;
}

SmallnessReport check_smallness(const Nonlinearity& nl, const MemoryKernel& kernel,
                                double lambda) {
    if (!(lambda > 0.0)) throw ParameterViolation("check_smallness: lambda > 0 required");
    SmallnessReport rep;
    const auto grid = default_c0_grid();
    rep.C0 = estimate_C0(nl, grid);
    rep.lambda = lambda;
    rep.kernel_a0 = kernel.a_at_zero();
    rep.threshold = lambda * (1.0 - rep.kernel_a0) / 2.0;
    rep.margin = rep.threshold - rep.C0;
    rep.coercivity_C = (lambda * (1.0 - rep.kernel_a0) - 2.0 * rep.C0) / lambda;
    rep.pass = rep.C0 < rep.threshold;
    return rep;
}

H1LipschitzReport check_h1_lipschitz(const Nonlinearity& nl, const Grid& grid, int samples,
                                     std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    H1LipschitzReport rep;
    rep.samples = samples;
    std::vector<double> u(grid.interior_count()), gu(grid.interior_count());
    for (int s = 0; s < samples; ++s) {
        for (double& v : u) v = dist(rng);
        const double gn = std::sqrt(gradient_norm_sq(grid, u));
        if (gn == 0.0) continue;
        for (double& v : u) v /= gn;
        for (std::size_t k = 0; k < u.size(); ++k) gu[k] = nl.g(u[k]);
        const double ratio = norm_sq(grid, gu) / gradient_norm_sq(grid, u);
        if (!std::isfinite(ratio)) rep.finite = false;
        rep.max_ratio = std::max(rep.max_ratio, ratio);
    }
    return rep;
}

} // namespace memwave
