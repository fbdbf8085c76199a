#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace memwave {

/// Exit-code contract shared by every subcommand:
///   0 success, 1 verification check failed, 2 invalid input
///   (config/parameter/CFL violations), 3 numerical or I/O failure.
constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInvalidInput = 2;
constexpr int kExitNumericalFailure = 3;

/// Executes one run from a config file: solves, writes energy.csv,
/// trace.csv, snapshots, summary.json and a sealed manifest.json into a
/// fresh run directory. `out_root` (or the MEMWAVE_OUT environment
/// variable) overrides the config's outputs.dir. With `check_identity` the
/// multiplier-identity ledger is evaluated over the whole run (full history
/// required) and written as identity.json. Prints the run directory on
/// success.
int cmd_run(const std::filesystem::path& config_path,
            const std::optional<std::string>& out_root = {}, bool check_identity = false,
            std::ostream& out = std::cout, std::ostream& err = std::cerr);

/// Runs a verification suite: kernel | energy | identity | trace | all.
/// Prints one line per check and writes a verdict JSON.
int cmd_verify(const std::string& suite, const std::filesystem::path& config_path,
               const std::optional<std::string>& out_root = {},
               std::ostream& out = std::cout, std::ostream& err = std::cerr);

/// Independent runs over the values of one dotted config key, plus an
/// aggregate CSV of the summary metrics.
int cmd_sweep(const std::filesystem::path& config_path, const std::string& axis,
              const std::vector<std::string>& values, int jobs = 1,
              const std::optional<std::string>& out_root = {},
              std::ostream& out = std::cout, std::ostream& err = std::cerr);

/// Emits a gnuplot script consuming the run directory's CSV files.
int cmd_plot(const std::filesystem::path& run_dir, std::ostream& out = std::cout,
             std::ostream& err = std::cerr);

} // namespace memwave
