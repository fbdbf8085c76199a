#include <doctest.h>

#include <random>

#include "memwave/config.hpp"

using namespace memwave;

TEST_CASE("parse accepts comments, blanks and dotted keys") {
    const std::string text = R"(# a comment
domain.dim = 1

domain.extents = [2.0]   # trailing comment
domain.nodes = [51]
kernel.family = poly_exp
kernel.params = [2, 0, 1]
solver.dt = 0.004
seed = 7
)";
    const auto cfg = RunConfig::parse(text);
    CHECK(cfg.domain.extents[0] == 2.0);
    CHECK(cfg.domain.nodes[0] == 51);
    CHECK(cfg.kernel.family == "poly_exp");
    CHECK(cfg.kernel.params == std::vector<double>{2.0, 0.0, 1.0});
    CHECK(cfg.solver.dt == 0.004);
    CHECK(cfg.seed == 7);
}

TEST_CASE("parse rejects malformed input") {
    CHECK_THROWS_AS(RunConfig::parse("nonsense line\n"), ParameterViolation);
    CHECK_THROWS_AS(RunConfig::parse("unknown.key = 1\n"), ParameterViolation);
    CHECK_THROWS_AS(RunConfig::parse("solver.dt = abc\n"), ParameterViolation);
    CHECK_THROWS_AS(RunConfig::parse("domain.nodes = 51\n"), ParameterViolation); // not a list
    CHECK_THROWS_AS(RunConfig::parse("solver.dt =\n"), ParameterViolation);
}

TEST_CASE("serialize/parse round-trips randomized valid configs") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(0.1, 0.9);
    std::uniform_int_distribution<int> nodes(11, 401);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<std::uint64_t> seeds;

    for (int trial = 0; trial < 25; ++trial) {
        RunConfig cfg;
        cfg.domain.dim = 1 + coin(rng);
        cfg.domain.extents.assign(static_cast<std::size_t>(cfg.domain.dim), 0.0);
        cfg.domain.nodes.assign(static_cast<std::size_t>(cfg.domain.dim), 0);
        for (auto& e : cfg.domain.extents) e = 0.5 + unit(rng);
        for (auto& n : cfg.domain.nodes) n = nodes(rng);
        switch (coin(rng) * 2 + coin(rng)) {
            case 0: cfg.kernel = {"zero", {}}; break;
            case 1: cfg.kernel = {"poly_exp", {2.0, unit(rng), 1.0}}; break;
            case 2: cfg.kernel = {"power_law", {unit(rng), 3.0}}; break;
            default: cfg.kernel = {"poly_exp", {1.0 + unit(rng), 0.0, unit(rng)}}; break;
        }
        cfg.nonlinearity = coin(rng) ? RunConfig::Nl{"sine", {unit(rng)}}
                                     : RunConfig::Nl{"zero", {}};
        cfg.initial.kind = coin(rng) ? "eigenmode" : "random_smooth";
        cfg.initial.mode = 1 + coin(rng);
        cfg.initial.amplitude = unit(rng);
        cfg.solver.dt = unit(rng) * 1e-3;
        cfg.solver.t_final = unit(rng) * 2.0;
        cfg.solver.history_window = coin(rng) ? 0 : 128;
        cfg.solver.snapshot_every = 1 + coin(rng) * 9;
        cfg.outputs.dir = "runs";
        cfg.seed = seeds(rng);

        const auto round = RunConfig::parse(cfg.serialize());
        CHECK(round == cfg);
    }
}

TEST_CASE("set_value drives the sweep axis") {
    RunConfig cfg;
    cfg.set_value("solver.dt", "0.002");
    CHECK(cfg.solver.dt == 0.002);
    cfg.set_value("kernel.params", "[2, 0, 1]");
    CHECK(cfg.kernel.params == std::vector<double>{2.0, 0.0, 1.0});
    cfg.set_value("solver.history_window", "inf");
    CHECK(cfg.solver.history_window == 0);
    CHECK_THROWS_AS(cfg.set_value("solver.nope", "1"), ParameterViolation);
}

TEST_CASE("validate cross-references") {
    RunConfig cfg;
    cfg.domain.dim = 2;
    CHECK_THROWS_AS(cfg.validate(), ParameterViolation); // extents/nodes sized for 1D
    cfg.domain.extents = {1.0, 1.0};
    cfg.domain.nodes = {21, 21};
    CHECK_NOTHROW(cfg.validate());
    cfg.initial.kind = "bogus";
    CHECK_THROWS_AS(cfg.validate(), ParameterViolation);
}

TEST_CASE("factories reflect the config") {
    RunConfig cfg;
    cfg.domain.dim = 1;
    cfg.domain.extents = {1.0};
    cfg.domain.nodes = {101};
    cfg.kernel = {"poly_exp", {2.0, 0.0, 1.0}};
    cfg.nonlinearity = {"sine", {1.0}};
    cfg.validate();
    const auto grid = cfg.make_grid();
    CHECK(grid.interior_count() == 99);
    CHECK(cfg.make_kernel().a_at_zero() == doctest::Approx(0.5));
    CHECK(cfg.make_nonlinearity().g(0.3) == doctest::Approx(std::sin(0.3)));
    const auto ic = cfg.make_initial(grid);
    CHECK(ic.u0.size() == grid.interior_count());
}
