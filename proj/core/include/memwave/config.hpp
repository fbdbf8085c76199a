#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "memwave/domain.hpp"
#include "memwave/kernels.hpp"
#include "memwave/nonlinearity.hpp"
#include "memwave/solver.hpp"

namespace memwave {

/// Run configuration, read from the line-oriented key-value format with
/// dotted section paths (see docs/config-format.md). parse and serialize
/// round-trip exactly.
struct RunConfig {
    struct Domain {
        int dim = 1;
        std::vector<double> extents{1.0};
        std::vector<int> nodes{101};
        bool operator==(const Domain&) const = default;
    } domain;

    struct Kernel {
        std::string family = "zero";
        std::vector<double> params{};
        bool operator==(const Kernel&) const = default;
    } kernel;

    struct Nl {
        std::string family = "zero";
        std::vector<double> params{};
        bool operator==(const Nl&) const = default;
    } nonlinearity;

    struct Initial {
        std::string kind = "eigenmode"; ///< eigenmode | random_smooth | zero
        int mode = 1;
        double amplitude = 1.0;
        double velocity_amplitude = 0.0;
        int cutoff = 8;
        bool operator==(const Initial&) const = default;
    } initial;

    struct Solver {
        double dt = 1e-3;
        double t_final = 1.0;
        bool cfl_check = true;
        double cfl_factor = 0.9;
        std::int64_t history_window = 0; ///< 0 = unbounded ("inf" in files)
        int snapshot_every = 10;
        bool operator==(const Solver&) const = default;
    } solver;

    struct Outputs {
        std::string dir = "runs";
        std::vector<std::string> formats{"csv", "binary"};
        bool operator==(const Outputs&) const = default;
    } outputs;

    std::uint64_t seed = 42;

    bool operator==(const RunConfig&) const = default;

    static RunConfig parse(const std::string& text);
    static RunConfig load(const std::filesystem::path& path);
    std::string serialize() const;

    /// Assigns one dotted key from its raw textual value (same syntax as a
    /// config line). Used by the sweep axis machinery.
    void set_value(const std::string& key, const std::string& raw_value);

    /// Cross-reference checks beyond per-field parsing.
    void validate() const;

    Grid make_grid() const;
    MemoryKernel make_kernel() const;
    Nonlinearity make_nonlinearity() const;
    InitialData make_initial(const Grid& grid) const;
    SolverConfig solver_config() const;
};

} // namespace memwave
