#include <string>
#include <vector>

#include <CLI11.hpp>

#include "memwave/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"memwave — viscoelastic wave equation simulator and verification harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_root;

    bool check_identity = false;
    auto* run_cmd = app.add_subcommand("run", "execute one configured run");
    run_cmd->add_option("config", config_path, "run configuration file")->required();
    run_cmd->add_option("--out", out_root, "output root (overrides outputs.dir)");
    run_cmd->add_flag("--check-identity", check_identity,
                      "evaluate the multiplier-identity ledger over the whole run "
                      "(needs full history) and write identity.json");

    std::string suite;
    auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
    verify_cmd->add_option("suite", suite, "kernel|energy|identity|trace|all")->required();
    verify_cmd->add_option("config", config_path, "run configuration file")->required();
    verify_cmd->add_option("--out", out_root, "output root (overrides outputs.dir)");

    std::string axis;
    std::vector<std::string> values;
    int jobs = 1;
    auto* sweep_cmd = app.add_subcommand("sweep", "sweep one config key over a value list");
    sweep_cmd->add_option("config", config_path, "template configuration file")->required();
    sweep_cmd->add_option("--axis", axis, "dotted config key, e.g. solver.dt")->required();
    sweep_cmd->add_option("--values", values, "value list (space-separated)")->required();
    sweep_cmd->add_option("--jobs", jobs, "worker pool size");
    sweep_cmd->add_option("--out", out_root, "output root (overrides outputs.dir)");

    std::string run_dir;
    auto* plot_cmd = app.add_subcommand("plot", "emit a gnuplot script for a run directory");
    plot_cmd->add_option("dir", run_dir, "completed run directory")->required();

    CLI11_PARSE(app, argc, argv);

    const std::optional<std::string> out_opt =
        out_root.empty() ? std::nullopt : std::optional<std::string>(out_root);

    if (run_cmd->parsed()) return memwave::cmd_run(config_path, out_opt, check_identity);
    if (verify_cmd->parsed()) return memwave::cmd_verify(suite, config_path, out_opt);
    if (sweep_cmd->parsed()) return memwave::cmd_sweep(config_path, axis, values, jobs, out_opt);
    if (plot_cmd->parsed()) return memwave::cmd_plot(run_dir);
    return memwave::kExitInvalidInput;
}
