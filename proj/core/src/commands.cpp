#include "memwave/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "memwave/config.hpp"
#include "memwave/diagnostics.hpp"
#include "memwave/run_io.hpp"
#include "memwave/trace.hpp"

namespace memwave {

namespace {

using nlohmann::json;

int map_error(const std::exception& e, std::ostream& err) {
    err << "error: " << e.what() << "\n";
    if (dynamic_cast<const ParameterViolation*>(&e) || dynamic_cast<const DomainError*>(&e) ||
        dynamic_cast<const CflViolation*>(&e) || dynamic_cast<const SizeMismatch*>(&e) ||
        dynamic_cast<const LengthMismatch*>(&e) || dynamic_cast<const Unsupported*>(&e) ||
        dynamic_cast<const HistoryTruncated*>(&e))
        return kExitInvalidInput;
    return kExitNumericalFailure;
}

std::filesystem::path resolve_out_root(const RunConfig& cfg,
                                       const std::optional<std::string>& out_root) {
    if (out_root && !out_root->empty()) return *out_root;
    if (const char* env = std::getenv("MEMWAVE_OUT"); env && *env) return env;
    return cfg.outputs.dir;
}

struct ComputedRun {
    RunResult result;
    EnergyReport energy;
    TraceSeries trace;
    json summary;
    json identity; // empty unless the identity ledger was requested
    std::string config_text;
    std::string started;
    Grid grid;
};

/// Solves one configured run and assembles the summary; touches no files,
/// so validation and numerical failures surface before any directory is
/// created.
ComputedRun compute_run(const RunConfig& cfg, bool check_identity = false) {
    ComputedRun out;
    out.started = utc_timestamp();
    const Grid grid = cfg.make_grid();
    const MemoryKernel kernel = cfg.make_kernel();
    const Nonlinearity nl = cfg.make_nonlinearity();
    const InitialData ic = cfg.make_initial(grid);
    const SolverConfig sc = cfg.solver_config();

    RunResult result = run(grid, kernel, nl, ic, sc);
    EnergyReport energy = build_energy_report(result.trajectory, grid, kernel, nl);
    TraceSeries trace = extract_trace(result.trajectory, grid, kernel);

    const double lambda = smallest_eigenvalue(grid);
    const SmallnessReport smallness = check_smallness(nl, kernel, lambda);
    const MonotoneReport monotone = check_monotone(energy, result.trajectory, grid, kernel);
    const CoercivityReport coercivity =
        check_coercivity_and_bounds(energy, result.trajectory, grid, kernel, nl, lambda);
    const WeakFormReport weak = check_weak_form(result.trajectory, grid, kernel, nl);

    json summary;
    summary["lambda"] = {{"discrete", lambda}, {"continuum", lambda_continuum(grid)}};
    summary["nonlinearity"] = {{"family", cfg.nonlinearity.family},
                               {"C0", smallness.C0},
                               {"threshold", smallness.threshold},
                               {"coercivity_C", smallness.coercivity_C},
                               {"pass", smallness.pass}};
    summary["energy"] = {{"E0_simple", energy.e0_simple()},
                         {"E0_history", energy.e0_history()},
                         {"E_final_history",
                          energy.records.empty() ? 0.0 : energy.records.back().e_history},
                         {"monotone_pass", monotone.monotone_pass},
                         {"worst_increase", monotone.worst_increase},
                         {"derivative_residual", monotone.max_derivative_residual}};
    summary["coercivity"] = {{"coercivity_C", coercivity.coercivity_C},
                             {"min_margin_simple", coercivity.min_margin_simple},
                             {"bound_313", coercivity.bound_constant},
                             {"measured_315", coercivity.measured_315},
                             {"pass", coercivity.coercive_pass}};
    if (energy.e0_history() > 0.0) {
        std::vector<double> ehist;
        ehist.reserve(energy.records.size());
        for (const auto& r : energy.records) ehist.push_back(r.e_history);
        const auto integ = check_integrated_energy(ehist, energy.record_dt);
        summary["integrated"] = {{"c0_420", integ.c0}, {"is_uniform", integ.is_uniform}};
    }
    summary["weak_form_residual"] = weak.max_residual;
    summary["run"] = {{"steps", result.summary.steps},
                      {"t_final", result.summary.t_final},
                      {"wall_seconds", result.summary.wall_seconds},
                      {"max_abs_u", result.summary.max_abs_u},
                      {"final_norm_u", result.summary.final_norm_u},
                      {"seed", cfg.seed}};

    if (check_identity) {
        const auto hfield = make_multiplier_field(grid);
        const double horizon = result.trajectory.records.back().t;
        const auto ledger = multiplier_identity_residual(result.trajectory, grid, kernel, nl,
                                                         hfield, 0.0, horizon);
        out.identity = {{"S", 0.0},
                        {"T", horizon},
                        {"lhs_full", ledger.lhs_full},
                        {"lhs_reduced", ledger.lhs_reduced},
                        {"terms",
                         {{"endpoint_term", ledger.endpoint_term},
                          {"divergence_velocity", ledger.divergence_velocity},
                          {"kernel_difference", ledger.kernel_difference},
                          {"adot_velocity", ledger.adot_velocity},
                          {"jacobian_quadratic", ledger.jacobian_quadratic},
                          {"divergence_gradient", ledger.divergence_gradient},
                          {"nonlinear_term", ledger.nonlinear_term}}},
                        {"rhs_total", ledger.rhs_total()},
                        {"residual", ledger.residual()}};
    }

    out.result = std::move(result);
    out.energy = std::move(energy);
    out.trace = std::move(trace);
    out.summary = std::move(summary);
    out.config_text = cfg.serialize();
    out.grid = grid;
    return out;
}

/// Writes every artifact of a computed run into `dir` (which must exist);
/// the manifest is sealed last.
void persist_run(const ComputedRun& computed, const RunConfig& cfg,
                 const std::filesystem::path& dir) {
    write_text_file(dir / "config.cfg", computed.config_text);
    write_energy_csv(dir / "energy.csv", computed.energy);
    write_trace_csv(dir / "trace.csv", computed.trace);
    const bool want_binary = std::find(cfg.outputs.formats.begin(), cfg.outputs.formats.end(),
                                       "binary") != cfg.outputs.formats.end();
    const bool want_csv = std::find(cfg.outputs.formats.begin(), cfg.outputs.formats.end(),
                                    "csv") != cfg.outputs.formats.end();
    if (want_binary) write_snapshots_binary(dir / "snapshots.bin", computed.result.trajectory);
    if (want_csv && computed.grid.interior_count() <= 512)
        write_snapshots_csv(dir / "snapshots.csv", computed.result.trajectory);
    if (!computed.identity.empty())
        write_text_file(dir / "identity.json", computed.identity.dump(2) + "\n");
    write_text_file(dir / "summary.json", computed.summary.dump(2) + "\n");
    write_manifest(dir, computed.config_text, computed.started, computed.summary.dump());
}

} // namespace

int cmd_run(const std::filesystem::path& config_path, const std::optional<std::string>& out_root,
            bool check_identity, std::ostream& out, std::ostream& err) {
    try {
        const RunConfig cfg = RunConfig::load(config_path);
        const auto computed = compute_run(cfg, check_identity);
        const auto dir = create_run_directory(resolve_out_root(cfg, out_root));
        persist_run(computed, cfg, dir);
        out << dir.string() << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        return map_error(e, err);
    }
}

namespace {

struct Check {
    std::string name;
    bool pass = false;
    std::string details;
};

class CheckList {
  public:
    void add(std::string name, bool pass, std::string details) {
        checks_.push_back({std::move(name), pass, std::move(details)});
    }
    bool all_pass() const {
        return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.pass; });
    }
    const std::vector<Check>& checks() const { return checks_; }
    const Check* first_failure() const {
        for (const auto& c : checks_)
            if (!c.pass) return &c;
        return nullptr;
    }

  private:
    std::vector<Check> checks_;
};

std::string fnum(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        g[static_cast<std::size_t>(i)] =
            lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
    return g;
}

void suite_kernel(const RunConfig& cfg, CheckList& checks, json& records) {
    const auto exp_cert =
        certify_positive_definite([](double t) { return std::exp(-t); }, 10.0, 200);
    checks.add("kernel.exp_comparator_pd", exp_cert.positive_definite,
               "min_eig=" + fnum(exp_cert.min_eigenvalue));

    const MemoryKernel kernel = cfg.make_kernel();
    json record{{"family", cfg.kernel.family},
                {"params", cfg.kernel.params}};

    const auto pd = certify_positive_definite([&](double t) { return kernel.a(t); }, 10.0, 200);
    record["verdict"] = pd.positive_definite ? "positive-definite" : "indefinite";
    record["min_eig"] = pd.min_eigenvalue;
    checks.add("kernel.positive_definite", !kernel.claims().a1 || pd.positive_definite,
               "min_eig=" + fnum(pd.min_eigenvalue));

    auto delta_grid = log_grid(1e-3, 0.512, 10);
    const auto strong = certify_strongly_pd(kernel, 10.0, 200, delta_grid);
    record["delta"] = strong.delta;
    checks.add("kernel.strongly_pd", !kernel.claims().a2 || strong.delta > 0.0,
               "delta=" + fnum(strong.delta));

    const double t_hi = std::min(1e3, kernel.t_max() * 0.999);
    const auto grid = log_grid(1e-6, std::max(t_hi, 1e-5), 200);
    const auto profile = check_sign_profile(kernel, grid);
    checks.add("kernel.sign_profile", !kernel.claims().a2 || profile.all_pass(),
               profile.all_pass() ? "all sign conditions hold"
                                  : "a sign condition failed on the sampled grid");

    if (kernel.claims().a2) {
        const bool decay2 = check_exp_decay_condition(kernel, 2.0, grid);
        record["exp_decay_m2"] = decay2;
        checks.add("kernel.exp_decay_condition", true,
                   std::string("m=2: ") + (decay2 ? "holds" : "does not hold"));
    }
    records["kernel_certificates"].push_back(record);
}

void suite_energy(const RunConfig& cfg, CheckList& checks, json& records) {
    const Grid grid = cfg.make_grid();
    const MemoryKernel kernel = cfg.make_kernel();
    const Nonlinearity nl = cfg.make_nonlinearity();
    const InitialData ic = cfg.make_initial(grid);

    const auto result = run(grid, kernel, nl, ic, cfg.solver_config());
    const auto energy = build_energy_report(result.trajectory, grid, kernel, nl);
    const auto monotone = check_monotone(energy, result.trajectory, grid, kernel);
    checks.add("energy.monotone", monotone.monotone_pass,
               "worst_increase=" + fnum(monotone.worst_increase) +
                   " tol=" + fnum(monotone.tolerance));

    const double lambda = smallest_eigenvalue(grid);
    const auto coercivity =
        check_coercivity_and_bounds(energy, result.trajectory, grid, kernel, nl, lambda);
    checks.add("energy.coercivity", !coercivity.smallness_holds || coercivity.coercive_pass,
               "min_margin=" + fnum(coercivity.min_margin_simple));

    // strong energy identity residual must shrink under dt halving
    RunConfig fine = cfg;
    fine.solver.dt = cfg.solver.dt / 2.0;
    fine.solver.snapshot_every = cfg.solver.snapshot_every * 2;
    const auto result2 = run(grid, kernel, nl, ic, fine.solver_config());
    const auto energy2 = build_energy_report(result2.trajectory, grid, kernel, nl);
    const auto id1 = check_strong_energy_identity(energy, result.trajectory, grid, kernel);
    const auto id2 = check_strong_energy_identity(energy2, result2.trajectory, grid, kernel);
    const double scale = std::abs(energy.e0_simple()) + 1e-30;
    const bool converged_floor = id2.max_residual <= 1e-12 * scale;
    const bool shrinks = converged_floor || id1.max_residual / id2.max_residual >= 1.4;
    checks.add("energy.strong_identity_refinement", shrinks,
               "residuals " + fnum(id1.max_residual) + " -> " + fnum(id2.max_residual));
    records["strong_identity"] = {{"coarse", id1.max_residual}, {"fine", id2.max_residual}};

    if (kernel.is_zero() && nl.is_zero() && cfg.solver.snapshot_every == 1) {
        const auto inv = leapfrog_invariant_series(result.trajectory, grid);
        double drift = 0.0;
        for (double v : inv) drift = std::max(drift, std::abs(v - inv.front()));
        const bool pass = drift <= 1e-9 * std::abs(inv.front());
        checks.add("energy.leapfrog_invariant", pass, "drift=" + fnum(drift));
    }
}

void suite_identity(const RunConfig& cfg, CheckList& checks, json& records) {
    // exactness on the zero trajectory
    {
        RunConfig zero_cfg = cfg;
        zero_cfg.initial.kind = "zero";
        zero_cfg.solver.t_final = 10.0 * zero_cfg.solver.dt;
        zero_cfg.solver.snapshot_every = 1;
        zero_cfg.solver.history_window = 0;
        const Grid grid = zero_cfg.make_grid();
        const MemoryKernel kernel = zero_cfg.make_kernel();
        const Nonlinearity nl = zero_cfg.make_nonlinearity();
        const auto result =
            run(grid, kernel, nl, zero_cfg.make_initial(grid), zero_cfg.solver_config());
        const auto hfield = make_multiplier_field(grid);
        const auto ledger = multiplier_identity_residual(result.trajectory, grid, kernel, nl,
                                                         hfield, 0.0,
                                                         result.summary.t_final);
        checks.add("identity.zero_trajectory_exact", ledger.residual() == 0.0,
                   "residual=" + fnum(ledger.residual()));
    }

    // refinement study at (dt, h) halvings
    std::vector<double> residuals;
    double lhs_gap = 0.0;
    for (int level = 0; level < 3; ++level) {
        RunConfig c = cfg;
        const double factor = std::pow(2.0, level);
        c.solver.dt = cfg.solver.dt / factor;
        c.solver.snapshot_every = 1;
        c.solver.history_window = 0;
        for (auto& n : c.domain.nodes) n = (n - 1) * static_cast<int>(factor) + 1;
        const Grid grid = c.make_grid();
        const MemoryKernel kernel = c.make_kernel();
        const Nonlinearity nl = c.make_nonlinearity();
        const auto result = run(grid, kernel, nl, c.make_initial(grid), c.solver_config());
        const auto hfield = make_multiplier_field(grid);
        const auto ledger = multiplier_identity_residual(result.trajectory, grid, kernel, nl,
                                                         hfield, 0.0, result.summary.t_final);
        residuals.push_back(std::abs(ledger.residual()));
        lhs_gap = std::max(lhs_gap, std::abs(ledger.lhs_full - ledger.lhs_reduced));
        records["identity_levels"].push_back({{"dt", c.solver.dt},
                                              {"nodes", c.domain.nodes},
                                              {"residual", ledger.residual()},
                                              {"lhs_full", ledger.lhs_full},
                                              {"lhs_reduced", ledger.lhs_reduced}});
    }
    const double o1 = std::log2(residuals[0] / residuals[1]);
    const double o2 = std::log2(residuals[1] / residuals[2]);
    records["identity_orders"] = {o1, o2};
    const bool tiny = residuals[2] <= 1e-12;
    checks.add("identity.refinement_order", tiny || std::min(o1, o2) >= 1.0,
               "orders " + fnum(o1) + ", " + fnum(o2));
    checks.add("identity.reduced_vs_full_lhs", lhs_gap <= 1e-9 * (1.0 + residuals[0]),
               "max gap " + fnum(lhs_gap));
}

void suite_trace(const RunConfig& cfg, CheckList& checks, json& records) {
    const MemoryKernel kernel = cfg.make_kernel();

    // synthetic deconvolution round-trip
    {
        const MemoryKernel& k =
            kernel.is_zero() ? MemoryKernel::poly_exp(2.0, 0.0, 1.0) : kernel;
        const double dt = 1e-3;
        std::vector<double> phi(2001);
        for (std::size_t i = 0; i < phi.size(); ++i)
            phi[i] = std::sin(3.0 * dt * static_cast<double>(i));
        auto rhs = convolve(k, KernelOrder::a_dot, phi, dt);
        for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += phi[i];
        const auto rec = volterra_solve([&](double t) { return k.a_dot(t); }, rhs, dt);
        double err = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i)
            err = std::max(err, std::abs(rec[i] - phi[i]));
        checks.add("trace.deconvolution_roundtrip", err <= 1e-8, "max_err=" + fnum(err));
    }

    // two paths to the raw trace on a real run
    const Grid grid = cfg.make_grid();
    const Nonlinearity nl = cfg.make_nonlinearity();
    const auto result = run(grid, kernel, nl, cfg.make_initial(grid), cfg.solver_config());
    const auto trace = extract_trace(result.trajectory, grid, kernel);
    // horizon snapped to the snapshot grid, so base and refined families
    // (dt/2 with doubled cadence) integrate over the same records
    const double rdt = cfg.solver.dt * cfg.solver.snapshot_every;
    const double T = rdt * std::floor(cfg.solver.t_final / rdt + 1e-9);
    const auto deconv = deconvolve_trace(trace, kernel);
    double num = 0.0, den = 0.0;
    for (std::size_t b = 0; b < trace.raw.size(); ++b)
        for (std::size_t m = 0; m < trace.raw[b].size(); ++m) {
            num += (deconv.raw[b][m] - trace.raw[b][m]) * (deconv.raw[b][m] - trace.raw[b][m]);
            den += trace.raw[b][m] * trace.raw[b][m];
        }
    const double rel = den > 0.0 ? std::sqrt(num / den) : 0.0;
    checks.add("trace.deconvolved_matches_raw", rel <= 1e-4, "rel_l2=" + fnum(rel));

    // direct-inequality family stability under grid refinement
    auto family_max = [&](const RunConfig& c) {
        const Grid g = c.make_grid();
        const MemoryKernel k = c.make_kernel();
        const Nonlinearity n = c.make_nonlinearity();
        std::vector<Trajectory> runs;
        for (std::uint64_t s = 1; s <= 8; ++s) {
            const auto ic = InitialData::random_smooth(g, s, 8);
            runs.push_back(run(g, k, n, ic, c.solver_config()).trajectory);
        }
        return direct_inequality_report(runs, g, k, n, T);
    };
    const auto base = family_max(cfg);
    RunConfig refined = cfg;
    for (auto& n : refined.domain.nodes) n = 2 * (n - 1) + 1;
    refined.solver.dt = cfg.solver.dt / 2.0;
    refined.solver.snapshot_every = cfg.solver.snapshot_every * 2;
    const auto fine = family_max(refined);
    const double change =
        std::abs(fine.max_ratio - base.max_ratio) / std::max(base.max_ratio, 1e-30);
    records["direct_inequality"] = {{"max_ratio", base.max_ratio},
                                    {"max_ratio_refined", fine.max_ratio},
                                    {"max_ratio_raw", base.max_ratio_raw},
                                    {"max_c0_energy", base.max_c0_energy}};
    checks.add("trace.direct_inequality_stable",
               std::isfinite(base.max_ratio) && change <= 0.25,
               "max_ratio=" + fnum(base.max_ratio) + " change=" + fnum(change));
}

} // namespace

int cmd_verify(const std::string& suite, const std::filesystem::path& config_path,
               const std::optional<std::string>& out_root, std::ostream& out,
               std::ostream& err) {
    try {
        const RunConfig cfg = RunConfig::load(config_path);
        CheckList checks;
        json records;
        if (suite == "kernel" || suite == "all") suite_kernel(cfg, checks, records);
        if (suite == "energy" || suite == "all") suite_energy(cfg, checks, records);
        if (suite == "identity" || suite == "all") suite_identity(cfg, checks, records);
        if (suite == "trace" || suite == "all") suite_trace(cfg, checks, records);
        if (checks.checks().empty())
            throw ParameterViolation("unknown verify suite '" + suite +
                                     "' (kernel|energy|identity|trace|all)");

        for (const auto& c : checks.checks())
            out << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << " — " << c.details << "\n";

        json verdict{{"suite", suite}, {"pass", checks.all_pass()}};
        for (const auto& c : checks.checks())
            verdict["checks"].push_back(
                {{"name", c.name}, {"pass", c.pass}, {"details", c.details}});
        verdict["records"] = records;
        const auto root = resolve_out_root(cfg, out_root);
        std::filesystem::create_directories(root);
        write_text_file(root / ("verify_" + suite + ".json"), verdict.dump(2) + "\n");

        if (!checks.all_pass()) {
            err << "first failing check: " << checks.first_failure()->name << "\n";
            return kExitCheckFailed;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        return map_error(e, err);
    }
}

int cmd_sweep(const std::filesystem::path& config_path, const std::string& axis,
              const std::vector<std::string>& values, int jobs,
              const std::optional<std::string>& out_root, std::ostream& out,
              std::ostream& err) {
    try {
        const RunConfig cfg = RunConfig::load(config_path);
        if (values.empty()) throw ParameterViolation("sweep: empty value list");
        {
            RunConfig probe = cfg; // validate the axis syntactically up front
            probe.set_value(axis, values.front());
        }
        const auto sweep_dir = create_run_directory(resolve_out_root(cfg, out_root), "sweep");

        struct Row {
            std::string value;
            std::string dir;
            int exit_code = kExitOk;
            json summary;
        };
        std::vector<Row> rows(values.size());
        std::mutex err_mutex;
        std::atomic<std::size_t> next{0};

        auto worker = [&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= values.size()) return;
                Row& row = rows[i];
                row.value = values[i];
                char name[32];
                std::snprintf(name, sizeof(name), "run-%03zu", i);
                const auto dir = sweep_dir / name;
                row.dir = dir.string();
                try {
                    RunConfig c = cfg;
                    c.set_value(axis, values[i]);
                    c.validate();
                    const auto computed = compute_run(c);
                    std::filesystem::create_directories(dir);
                    persist_run(computed, c, dir);
                    row.summary = computed.summary;
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    row.exit_code = map_error(e, err);
                }
            }
        };
        const int nthreads = std::max(1, std::min<int>(jobs, static_cast<int>(values.size())));
        std::vector<std::thread> pool;
        for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();

        // aggregate CSV with summary metrics and, for dt sweeps, the
        // measured convergence order of the weak-form residual
        std::string csv =
            "index,value,dir,exit_code,E0_history,E_final_history,weak_form_residual,"
            "wall_seconds,order_vs_prev\n";
        double prev_res = 0.0, prev_val = 0.0;
        bool have_prev = false;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const Row& r = rows[i];
            std::string order;
            double res = 0.0, e0 = 0.0, efin = 0.0, wall = 0.0;
            if (r.exit_code == kExitOk) {
                res = r.summary["weak_form_residual"].get<double>();
                e0 = r.summary["energy"]["E0_history"].get<double>();
                efin = r.summary["energy"]["E_final_history"].get<double>();
                wall = r.summary["run"]["wall_seconds"].get<double>();
                if (axis == "solver.dt" && have_prev && res > 0.0) {
                    const double v = std::stod(r.value);
                    if (v > 0.0 && prev_val > 0.0 && v != prev_val)
                        order = csv_number(std::log(prev_res / res) / std::log(prev_val / v));
                }
                prev_res = res;
                prev_val = axis == "solver.dt" ? std::stod(r.value) : 0.0;
                have_prev = true;
            }
            csv += std::to_string(i) + ',' + r.value + ',' + r.dir + ',' +
                   std::to_string(r.exit_code) + ',' + csv_number(e0) + ',' + csv_number(efin) +
                   ',' + csv_number(res) + ',' + csv_number(wall) + ',' + order + '\n';
        }
        write_text_file(sweep_dir / "sweep.csv", csv);
        out << sweep_dir.string() << "\n";

        const bool any_failed = std::any_of(rows.begin(), rows.end(),
                                            [](const Row& r) { return r.exit_code != kExitOk; });
        return any_failed ? kExitCheckFailed : kExitOk;
    } catch (const std::exception& e) {
        return map_error(e, err);
    }
}

int cmd_plot(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err) {
    try {
        const auto energy_csv = run_dir / "energy.csv";
        const auto trace_csv = run_dir / "trace.csv";
        if (!std::filesystem::exists(energy_csv)) {
            err << "error: " << energy_csv.string() << " not found\n";
            return kExitInvalidInput;
        }
        const bool have_trace = std::filesystem::exists(trace_csv);
        if (!have_trace) err << "warning: trace.csv missing, plotting energy only\n";

        std::string script;
        script += "# gnuplot script generated by memwave plot\n";
        script += "set datafile separator ','\n";
        script += "set key autotitle columnhead\n";
        script += "set terminal pngcairo size 1200,500\n";
        script += "set xlabel 't'\n";
        script += "set output 'energy.png'\n";
        script += "set ylabel 'energy'\n";
        script += "plot 'energy.csv' using 1:7 with lines title 'E_simple', \\\n";
        script += "     'energy.csv' using 1:8 with lines title 'E_history'\n";
        if (have_trace) {
            script += "set output 'trace.png'\n";
            script += "set ylabel 'normal derivative'\n";
            script += "plot 'trace.csv' using 1:($2==0?$3:1/0) with lines title 'node 0 raw', \\\n";
            script +=
                "     'trace.csv' using 1:($2==0?$4:1/0) with lines title 'node 0 convolved'\n";
        }
        write_text_file(run_dir / "plot.gnuplot", script);
        out << (run_dir / "plot.gnuplot").string() << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        return map_error(e, err);
    }
}

} // namespace memwave
