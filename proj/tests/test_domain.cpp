#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "memwave/domain.hpp"

using namespace memwave;
namespace nums = std::numbers;

TEST_CASE("interval grid bookkeeping") {
    const auto g = Grid::interval(1.0, 101);
    CHECK(g.spacing(0) == doctest::Approx(0.01));
    CHECK(g.interior_count() == 99);
    REQUIRE(g.boundary().size() == 2);
    CHECK(g.boundary()[0].normal[0] == -1.0);
    CHECK(g.boundary()[1].normal[0] == 1.0);
    CHECK(g.boundary()[0].weight == 1.0);

    double area = 0.0;
    for (int i = 0; i < g.nodes(0); ++i) area += g.area_weight(i);
    CHECK(area == doctest::Approx(1.0).epsilon(1e-12));

    const auto tiny = Grid::interval(2.0, 3);
    CHECK(tiny.interior_count() == 1);

    CHECK_THROWS_AS(Grid::interval(1.0, 2), ParameterViolation);
    CHECK_THROWS_AS(Grid::interval(-1.0, 11), ParameterViolation);
}

TEST_CASE("rectangle grid weights match the measures") {
    const auto g = Grid::rectangle(1.0, 1.0, 51, 51);
    double area = 0.0;
    for (int j = 0; j < g.nodes(1); ++j)
        for (int i = 0; i < g.nodes(0); ++i) area += g.area_weight(i, j);
    CHECK(area == doctest::Approx(1.0).epsilon(1e-12));

    double perimeter = 0.0;
    for (const auto& bn : g.boundary()) {
        perimeter += bn.weight;
        if (bn.corner) CHECK(bn.weight == 0.0);
        CHECK(bn.normal[0] * bn.normal[0] + bn.normal[1] * bn.normal[1] == doctest::Approx(1.0));
    }
    CHECK(perimeter == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("laplacian on eigenmodes") {
    const auto g = Grid::interval(1.0, 101);
    const auto u = sine_mode(g, 1);
    const auto lap = laplacian(g, u);
    const double mu = sine_mode_eigenvalue(g, 1);
    for (std::size_t k = 0; k < u.size(); ++k)
        CHECK(lap[k] == doctest::Approx(-mu * u[k]).epsilon(1e-11));
    // against the continuum eigenvalue the error is O(h^2)
    CHECK(mu == doctest::Approx(nums::pi * nums::pi).epsilon(1e-4));

    std::vector<double> zeros(g.interior_count(), 0.0);
    for (double v : laplacian(g, zeros)) CHECK(v == 0.0);

    const auto g2 = Grid::rectangle(1.0, 1.0, 41, 41);
    const auto u2 = sine_mode(g2, 1);
    const auto lap2 = laplacian(g2, u2);
    const double mu2 = sine_mode_eigenvalue(g2, 1);
    for (std::size_t k = 0; k < u2.size(); ++k)
        CHECK(lap2[k] == doctest::Approx(-mu2 * u2[k]).epsilon(1e-10));
    CHECK(mu2 == doctest::Approx(2.0 * nums::pi * nums::pi).epsilon(1e-3));
}

TEST_CASE("discrete integration by parts is exact") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int dim = 1; dim <= 2; ++dim) {
        const Grid g = dim == 1 ? Grid::interval(1.3, 53) : Grid::rectangle(1.1, 0.8, 19, 23);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> u(g.interior_count()), v(g.interior_count());
            for (auto& x : u) x = dist(rng);
            for (auto& x : v) x = dist(rng);
            const auto lap = laplacian(g, u);
            double lhs = 0.0;
            for (std::size_t k = 0; k < v.size(); ++k) lhs += -lap[k] * v[k];
            lhs *= g.cell_volume();
            const double rhs = gradient_inner(g, u, v);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
        }
    }
}

TEST_CASE("smallest eigenvalue by inverse power iteration") {
    const auto g1 = Grid::interval(1.0, 101);
    CHECK(smallest_eigenvalue(g1) == doctest::Approx(lambda_stencil(g1)).epsilon(1e-9));
    CHECK(lambda_stencil(g1) ==
          doctest::Approx(2.0 / (0.01 * 0.01) * (1.0 - std::cos(nums::pi * 0.01))).epsilon(1e-12));
    CHECK(smallest_eigenvalue(g1) == doctest::Approx(nums::pi * nums::pi).epsilon(1e-4));

    const auto g2 = Grid::rectangle(1.0, 1.0, 21, 21);
    CHECK(smallest_eigenvalue(g2) == doctest::Approx(lambda_stencil(g2)).epsilon(1e-9));
    CHECK(lambda_continuum(g2) == doctest::Approx(2.0 * nums::pi * nums::pi).epsilon(1e-12));
}

TEST_CASE("gradient norms and boundary normal derivative on sin(pi x)") {
    const auto g = Grid::interval(1.0, 201);
    const auto u = sine_mode(g, 1);
    CHECK(gradient_norm_sq(g, u) ==
          doctest::Approx(nums::pi * nums::pi / 2.0).epsilon(1e-4));

    const auto dnu = boundary_normal_derivative(g, u);
    REQUIRE(dnu.size() == 2);
    CHECK(dnu[0] == doctest::Approx(-nums::pi).epsilon(1e-4));
    CHECK(dnu[1] == doctest::Approx(-nums::pi).epsilon(1e-4));

    std::vector<double> zeros(g.interior_count(), 0.0);
    for (double v : boundary_normal_derivative(g, zeros)) CHECK(v == 0.0);
}

TEST_CASE("2D normal derivative on the x=0 face") {
    const auto g = Grid::rectangle(1.0, 1.0, 81, 81);
    const auto u = sine_mode(g, 1);
    const auto dnu = boundary_normal_derivative(g, u);
    const auto& bn = g.boundary();
    for (std::size_t b = 0; b < bn.size(); ++b) {
        if (bn[b].face != 0 || bn[b].corner) continue;
        const double y = g.coord_y(bn[b].ij[1]);
        CHECK(dnu[b] ==
              doctest::Approx(-nums::pi * std::sin(nums::pi * y)).epsilon(2e-3));
    }
}

TEST_CASE("discrete Poincare inequality") {
    const auto g = Grid::interval(1.0, 101);
    const double lam = smallest_eigenvalue(g);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> u(g.interior_count());
        for (auto& x : u) x = dist(rng);
        CHECK(norm_sq(g, u) <= gradient_norm_sq(g, u) / lam * (1.0 + 1e-12));
    }
}

TEST_CASE("multiplier field satisfies h.nu = 1") {
    const auto g1 = Grid::interval(1.0, 51);
    const auto f1 = make_multiplier_field(g1);
    for (double v : f1.boundary_h_dot_nu) CHECK(v == 1.0);
    CHECK(f1.jacobian_diag[0] == doctest::Approx(2.0));
    CHECK(f1.values[g1.interior_index(1)][0] == doctest::Approx(2.0 * 0.02 - 1.0));

    const auto g2 = Grid::rectangle(1.0, 1.0, 21, 21);
    const auto f2 = make_multiplier_field(g2);
    for (double v : f2.boundary_h_dot_nu) CHECK(v == 1.0);
    CHECK(f2.jacobian_abs_sum == doctest::Approx(4.0));

    const auto g3 = Grid::rectangle(2.0, 0.5, 21, 21);
    const auto f3 = make_multiplier_field(g3);
    for (double v : f3.boundary_h_dot_nu) CHECK(v == 1.0);
}

TEST_CASE("directional gradient splits the full seminorm") {
    const auto g = Grid::rectangle(1.0, 1.0, 31, 31);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> u(g.interior_count());
    for (auto& x : u) x = dist(rng);
    const double split =
        directional_gradient_norm_sq(g, u, 0) + directional_gradient_norm_sq(g, u, 1);
    CHECK(split == doctest::Approx(gradient_norm_sq(g, u)).epsilon(1e-12));
}
