#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "memwave/commands.hpp"
#include "memwave/config.hpp"
#include "memwave/run_io.hpp"

using namespace memwave;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("memwave-test-" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

fs::path write_config(const TempDir& tmp, const std::string& name, const RunConfig& cfg) {
    const auto p = tmp.path / name;
    std::ofstream(p) << cfg.serialize();
    return p;
}

RunConfig smoke_config(const TempDir& tmp) {
    RunConfig cfg;
    cfg.domain.dim = 1;
    cfg.domain.extents = {1.0};
    cfg.domain.nodes = {101};
    cfg.kernel = {"poly_exp", {2.0, 0.0, 1.0}};
    cfg.nonlinearity = {"sine", {1.0}};
    cfg.initial.kind = "eigenmode";
    cfg.solver.dt = 5e-3;
    cfg.solver.t_final = 0.5;
    cfg.solver.snapshot_every = 10;
    cfg.outputs.dir = (tmp.path / "out").string();
    cfg.seed = 42;
    return cfg;
}

fs::path first_line_path(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    return line;
}

} // namespace

TEST_CASE("cmd_run writes a sealed run directory") {
    TempDir tmp;
    const auto cfg_path = write_config(tmp, "smoke.cfg", smoke_config(tmp));
    std::ostringstream out, err;
    const int code = cmd_run(cfg_path, std::nullopt, false, out, err);
    REQUIRE(code == kExitOk);

    const fs::path dir = first_line_path(out.str());
    REQUIRE(fs::is_directory(dir));
    int files = 0;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file()) ++files;
    CHECK(files >= 4);
    for (const char* name :
         {"config.cfg", "energy.csv", "trace.csv", "summary.json", "manifest.json"})
        CHECK(fs::exists(dir / name));

    std::string mismatch;
    CHECK(verify_manifest(dir, &mismatch));
    CAPTURE(mismatch);
}

TEST_CASE("cmd_run artifacts are deterministic") {
    TempDir tmp;
    const auto cfg_path = write_config(tmp, "smoke.cfg", smoke_config(tmp));
    std::ostringstream out1, out2, err;
    REQUIRE(cmd_run(cfg_path, std::nullopt, false, out1, err) == kExitOk);
    REQUIRE(cmd_run(cfg_path, std::nullopt, false, out2, err) == kExitOk);
    const fs::path a = first_line_path(out1.str()), b = first_line_path(out2.str());
    CHECK(sha256_file(a / "energy.csv") == sha256_file(b / "energy.csv"));
    CHECK(sha256_file(a / "trace.csv") == sha256_file(b / "trace.csv"));
    CHECK(sha256_file(a / "snapshots.bin") == sha256_file(b / "snapshots.bin"));
}

TEST_CASE("cmd_run rejects a kernel with a(0) >= 1") {
    TempDir tmp;
    auto cfg = smoke_config(tmp);
    cfg.kernel = {"poly_exp", {1.0, 0.0, 1.0}}; // a(0) = 1
    const auto cfg_path = write_config(tmp, "bad.cfg", cfg);
    std::ostringstream out, err;
    CHECK(cmd_run(cfg_path, std::nullopt, false, out, err) == kExitInvalidInput);
    CHECK(err.str().find("< 1") != std::string::npos);
}

TEST_CASE("cmd_run rejects a CFL-violating dt before stepping") {
    TempDir tmp;
    auto cfg = smoke_config(tmp);
    cfg.solver.dt = 0.05;
    const auto cfg_path = write_config(tmp, "cfl.cfg", cfg);
    std::ostringstream out, err;
    CHECK(cmd_run(cfg_path, std::nullopt, false, out, err) == kExitInvalidInput);
    CHECK(err.str().find("CFL") != std::string::npos);
    // nothing was written
    const bool wrote_output = fs::exists(tmp.path / "out") && !fs::is_empty(tmp.path / "out");
    CHECK_FALSE(wrote_output);
}

TEST_CASE("cmd_run maps numerical blow-up to exit 3") {
    TempDir tmp;
    auto cfg = smoke_config(tmp);
    cfg.solver.dt = 0.05;
    cfg.solver.cfl_check = false;
    cfg.solver.t_final = 30.0;
    cfg.initial.mode = 50;
    const auto cfg_path = write_config(tmp, "blow.cfg", cfg);
    std::ostringstream out, err;
    CHECK(cmd_run(cfg_path, std::nullopt, false, out, err) == kExitNumericalFailure);
}

TEST_CASE("cmd_run honors MEMWAVE_OUT") {
    TempDir tmp;
    const auto cfg_path = write_config(tmp, "smoke.cfg", smoke_config(tmp));
    const auto env_root = tmp.path / "env-root";
    setenv("MEMWAVE_OUT", env_root.c_str(), 1);
    std::ostringstream out, err;
    REQUIRE(cmd_run(cfg_path, std::nullopt, false, out, err) == kExitOk);
    unsetenv("MEMWAVE_OUT");
    CHECK(first_line_path(out.str()).string().find(env_root.string()) == 0);
}

TEST_CASE("cmd_verify kernel suite passes on poly_exp") {
    TempDir tmp;
    const auto cfg_path = write_config(tmp, "smoke.cfg", smoke_config(tmp));
    std::ostringstream out, err;
    CHECK(cmd_verify("kernel", cfg_path, std::nullopt, out, err) == kExitOk);
    CHECK(out.str().find("[PASS]") != std::string::npos);
    CHECK(fs::exists(tmp.path / "out" / "verify_kernel.json"));
}

TEST_CASE("cmd_verify energy suite flags a sign-violating kernel") {
    TempDir tmp;
    auto cfg = smoke_config(tmp);
    // increasing table kernel: a_dot > 0 violates the dissipation profile
    std::vector<double> params{0.01};
    for (int i = 0; i <= 1500; ++i)
        params.push_back(0.2 + 0.3 * (1.0 - std::exp(-0.01 * i)));
    cfg.kernel.family = "custom_table";
    cfg.kernel.params = params;
    cfg.solver.t_final = 1.0;
    const auto cfg_path = write_config(tmp, "adversarial.cfg", cfg);
    std::ostringstream out, err;
    CHECK(cmd_verify("energy", cfg_path, std::nullopt, out, err) == kExitCheckFailed);
    CHECK(err.str().find("energy.monotone") != std::string::npos);
}

TEST_CASE("cmd_verify identity suite passes on the memory-free eigenmode") {
    TempDir tmp;
    auto cfg = smoke_config(tmp);
    cfg.kernel = {"zero", {}};
    cfg.nonlinearity = {"zero", {}};
    cfg.domain.nodes = {33};
    cfg.solver.dt = 8e-3;
    cfg.solver.t_final = 0.5;
    const auto cfg_path = write_config(tmp, "identity.cfg", cfg);
    std::ostringstream out, err;
    REQUIRE(cmd_verify("identity", cfg_path, std::nullopt, out, err) == kExitOk);

    // the verdict JSON records a convergence order of at least ~2
    std::ifstream vf(tmp.path / "out" / "verify_identity.json");
    nlohmann::json verdict;
    vf >> verdict;
    for (const auto& o : verdict["records"]["identity_orders"])
        CHECK(o.get<double>() >= 1.5);
}

TEST_CASE("cmd_verify rejects an unknown suite") {
    TempDir tmp;
    const auto cfg_path = write_config(tmp, "smoke.cfg", smoke_config(tmp));
    std::ostringstream out, err;
    CHECK(cmd_verify("bogus", cfg_path, std::nullopt, out, err) == kExitInvalidInput);
}

TEST_CASE("cmd_sweep over dt produces per-run directories and an aggregate") {
    TempDir tmp;
    auto cfg = smoke_config(tmp);
    cfg.solver.t_final = 0.25;
    cfg.solver.snapshot_every = 1;
    const auto cfg_path = write_config(tmp, "sweep.cfg", cfg);
    std::ostringstream out, err;
    const int code =
        cmd_sweep(cfg_path, "solver.dt", {"4e-3", "2e-3", "1e-3"}, 2, std::nullopt, out, err);
    REQUIRE(code == kExitOk);
    const fs::path sweep_dir = first_line_path(out.str());
    CHECK(fs::exists(sweep_dir / "run-000" / "summary.json"));
    CHECK(fs::exists(sweep_dir / "run-001" / "summary.json"));
    CHECK(fs::exists(sweep_dir / "run-002" / "summary.json"));

    std::ifstream csv(sweep_dir / "sweep.csv");
    std::string header, row;
    std::getline(csv, header);
    CHECK(header.find("order_vs_prev") != std::string::npos);
    int rows = 0;
    while (std::getline(csv, row))
        if (!row.empty()) ++rows;
    CHECK(rows == 3);
}

TEST_CASE("cmd_sweep records offending values and keeps going") {
    TempDir tmp;
    auto cfg = smoke_config(tmp);
    cfg.solver.t_final = 0.05;
    const auto cfg_path = write_config(tmp, "sweep.cfg", cfg);
    std::ostringstream out, err;
    // the middle value drives a(0) to 1, which fails kernel validation
    const int code = cmd_sweep(cfg_path, "kernel.params",
                               {"[2, 0, 1]", "[1, 0, 1]", "[2, 0, 0.5]"}, 1, std::nullopt, out,
                               err);
    CHECK(code == kExitCheckFailed);
    const fs::path sweep_dir = first_line_path(out.str());
    std::ifstream csv(sweep_dir / "sweep.csv");
    std::string content((std::istreambuf_iterator<char>(csv)), {});
    CHECK(content.find(",2,") != std::string::npos); // exit code 2 recorded
    CHECK(fs::exists(sweep_dir / "run-000" / "summary.json"));
    CHECK(fs::exists(sweep_dir / "run-002" / "summary.json"));
}

TEST_CASE("cmd_sweep rejects an empty value list") {
    TempDir tmp;
    const auto cfg_path = write_config(tmp, "smoke.cfg", smoke_config(tmp));
    std::ostringstream out, err;
    CHECK(cmd_sweep(cfg_path, "solver.dt", {}, 1, std::nullopt, out, err) == kExitInvalidInput);
}

TEST_CASE("cmd_plot emits a script referencing the CSVs") {
    TempDir tmp;
    const auto cfg_path = write_config(tmp, "smoke.cfg", smoke_config(tmp));
    std::ostringstream out, err;
    REQUIRE(cmd_run(cfg_path, std::nullopt, false, out, err) == kExitOk);
    const fs::path dir = first_line_path(out.str());

    std::ostringstream pout, perr;
    REQUIRE(cmd_plot(dir, pout, perr) == kExitOk);
    std::ifstream script(dir / "plot.gnuplot");
    std::string content((std::istreambuf_iterator<char>(script)), {});
    CHECK(content.find("energy.csv") != std::string::npos);
    CHECK(content.find("trace.csv") != std::string::npos);

    // drop the trace and expect the energy-only script plus a warning
    fs::remove(dir / "trace.csv");
    std::ostringstream pout2, perr2;
    CHECK(cmd_plot(dir, pout2, perr2) == kExitOk);
    CHECK(perr2.str().find("warning") != std::string::npos);

    // empty directory has nothing to plot
    const auto empty = tmp.path / "empty";
    fs::create_directories(empty);
    std::ostringstream pout3, perr3;
    CHECK(cmd_plot(empty, pout3, perr3) == kExitInvalidInput);
}

TEST_CASE("snapshot binary round-trip") {
    TempDir tmp;
    auto cfg = smoke_config(tmp);
    cfg.solver.t_final = 0.1;
    const auto grid = cfg.make_grid();
    const auto result = run(grid, cfg.make_kernel(), cfg.make_nonlinearity(),
                            cfg.make_initial(grid), cfg.solver_config());
    const auto path = tmp.path / "snap.bin";
    write_snapshots_binary(path, result.trajectory);
    const auto back = read_snapshots_binary(path);
    REQUIRE(back.records.size() == result.trajectory.records.size());
    CHECK(back.dt == result.trajectory.dt);
    for (std::size_t m = 0; m < back.records.size(); ++m) {
        CHECK(back.records[m].u == result.trajectory.records[m].u);
        CHECK(back.records[m].u_t == result.trajectory.records[m].u_t);
    }
}

TEST_CASE("cmd_run --check-identity writes the per-term ledger") {
    TempDir tmp;
    auto cfg = smoke_config(tmp);
    cfg.solver.snapshot_every = 1;
    cfg.solver.t_final = 0.25;
    const auto cfg_path = write_config(tmp, "ident.cfg", cfg);
    std::ostringstream out, err;
    REQUIRE(cmd_run(cfg_path, std::nullopt, true, out, err) == kExitOk);
    const fs::path dir = first_line_path(out.str());
    REQUIRE(fs::exists(dir / "identity.json"));

    std::ifstream in(dir / "identity.json");
    nlohmann::json ledger;
    in >> ledger;
    CHECK(ledger["terms"].size() == 7);
    CHECK(std::abs(ledger["residual"].get<double>()) <
          0.05 * (1.0 + std::abs(ledger["lhs_full"].get<double>())));
    std::string mismatch;
    CHECK(verify_manifest(dir, &mismatch)); // identity.json is sealed too

    // a windowed run cannot honor the request
    cfg.solver.history_window = 10;
    const auto cfg2 = write_config(tmp, "ident2.cfg", cfg);
    std::ostringstream out2, err2;
    CHECK(cmd_run(cfg2, std::nullopt, true, out2, err2) == kExitInvalidInput);
}
