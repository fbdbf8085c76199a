#include "memwave/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace memwave {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

[[noreturn]] void bad(const std::string& what) {
    throw ParameterViolation("config: " + what);
}

std::vector<std::string> split_list(const std::string& raw) {
    std::string inner = trim(raw);
    if (inner.size() < 2 || inner.front() != '[' || inner.back() != ']')
        bad("expected a bracketed list, got '" + raw + "'");
    inner = inner.substr(1, inner.size() - 2);
    std::vector<std::string> items;
    std::string cur;
    for (char c : inner) {
        if (c == ',') {
            items.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    const std::string last = trim(cur);
    if (!last.empty()) items.push_back(last);
    for (const auto& it : items)
        if (it.empty()) bad("empty element in list '" + raw + "'");
    return items;
}

double parse_double(const std::string& s) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) bad("trailing characters in number '" + s + "'");
        return v;
    } catch (const std::invalid_argument&) {
        bad("not a number: '" + s + "'");
    } catch (const std::out_of_range&) {
        bad("number out of range: '" + s + "'");
    }
}

std::int64_t parse_int(const std::string& s) {
    std::int64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        bad("not an integer: '" + s + "'");
    return v;
}

std::uint64_t parse_uint(const std::string& s) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        bad("not an unsigned integer: '" + s + "'");
    return v;
}

bool parse_bool(const std::string& s) {
    if (s == "true") return true;
    if (s == "false") return false;
    bad("not a boolean (true/false): '" + s + "'");
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string list_of_doubles(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += num(v[i]);
    }
    return out + "]";
}

} // namespace

void RunConfig::set_value(const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    if (key == "domain.dim") domain.dim = static_cast<int>(parse_int(value));
    else if (key == "domain.extents") {
        domain.extents.clear();
        for (const auto& s : split_list(value)) domain.extents.push_back(parse_double(s));
    } else if (key == "domain.nodes") {
        domain.nodes.clear();
        for (const auto& s : split_list(value))
            domain.nodes.push_back(static_cast<int>(parse_int(s)));
    } else if (key == "kernel.family") kernel.family = value;
    else if (key == "kernel.params") {
        kernel.params.clear();
        for (const auto& s : split_list(value)) kernel.params.push_back(parse_double(s));
    } else if (key == "nonlinearity.family") nonlinearity.family = value;
    else if (key == "nonlinearity.params") {
        nonlinearity.params.clear();
        for (const auto& s : split_list(value)) nonlinearity.params.push_back(parse_double(s));
    } else if (key == "initial.kind") initial.kind = value;
    else if (key == "initial.mode") initial.mode = static_cast<int>(parse_int(value));
    else if (key == "initial.amplitude") initial.amplitude = parse_double(value);
    else if (key == "initial.velocity_amplitude") initial.velocity_amplitude = parse_double(value);
    else if (key == "initial.cutoff") initial.cutoff = static_cast<int>(parse_int(value));
    else if (key == "solver.dt") solver.dt = parse_double(value);
    else if (key == "solver.t_final") solver.t_final = parse_double(value);
    else if (key == "solver.cfl_check") solver.cfl_check = parse_bool(value);
    else if (key == "solver.cfl_factor") solver.cfl_factor = parse_double(value);
    else if (key == "solver.history_window") {
        if (value == "inf") solver.history_window = 0;
        else {
            solver.history_window = parse_int(value);
            if (solver.history_window < 0) bad("solver.history_window must be >= 0 or inf");
        }
    } else if (key == "solver.snapshot_every")
        solver.snapshot_every = static_cast<int>(parse_int(value));
    else if (key == "outputs.dir") outputs.dir = value;
    else if (key == "outputs.formats") {
        outputs.formats = split_list(value);
    } else if (key == "seed") seed = parse_uint(value);
    else bad("unknown key '" + key + "'");
}

RunConfig RunConfig::parse(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            bad("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty() || value.empty())
            bad("line " + std::to_string(lineno) + ": empty key or value");
        cfg.set_value(key, value);
    }
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) bad("cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    RunConfig cfg = parse(buf.str());
    cfg.validate();
    return cfg;
}

std::string RunConfig::serialize() const {
    std::ostringstream out;
    out << "domain.dim = " << domain.dim << "\n";
    out << "domain.extents = " << list_of_doubles(domain.extents) << "\n";
    out << "domain.nodes = [";
    for (std::size_t i = 0; i < domain.nodes.size(); ++i)
        out << (i ? ", " : "") << domain.nodes[i];
    out << "]\n";
    out << "kernel.family = " << kernel.family << "\n";
    out << "kernel.params = " << list_of_doubles(kernel.params) << "\n";
    out << "nonlinearity.family = " << nonlinearity.family << "\n";
    out << "nonlinearity.params = " << list_of_doubles(nonlinearity.params) << "\n";
    out << "initial.kind = " << initial.kind << "\n";
    out << "initial.mode = " << initial.mode << "\n";
    out << "initial.amplitude = " << num(initial.amplitude) << "\n";
    out << "initial.velocity_amplitude = " << num(initial.velocity_amplitude) << "\n";
    out << "initial.cutoff = " << initial.cutoff << "\n";
    out << "solver.dt = " << num(solver.dt) << "\n";
    out << "solver.t_final = " << num(solver.t_final) << "\n";
    out << "solver.cfl_check = " << (solver.cfl_check ? "true" : "false") << "\n";
    out << "solver.cfl_factor = " << num(solver.cfl_factor) << "\n";
    if (solver.history_window == 0) out << "solver.history_window = inf\n";
    else out << "solver.history_window = " << solver.history_window << "\n";
    out << "solver.snapshot_every = " << solver.snapshot_every << "\n";
    out << "outputs.dir = " << outputs.dir << "\n";
    out << "outputs.formats = [";
    for (std::size_t i = 0; i < outputs.formats.size(); ++i)
        out << (i ? ", " : "") << outputs.formats[i];
    out << "]\n";
    out << "seed = " << seed << "\n";
    return out.str();
}

void RunConfig::validate() const {
    if (domain.dim != 1 && domain.dim != 2) bad("domain.dim must be 1 or 2");
    if (domain.extents.size() != static_cast<std::size_t>(domain.dim))
        bad("domain.extents must have one entry per dimension");
    if (domain.nodes.size() != static_cast<std::size_t>(domain.dim))
        bad("domain.nodes must have one entry per dimension");
    if (initial.kind != "eigenmode" && initial.kind != "random_smooth" && initial.kind != "zero")
        bad("initial.kind must be eigenmode, random_smooth or zero");
    if (solver.snapshot_every < 1) bad("solver.snapshot_every must be >= 1");
    if (!(solver.dt > 0.0)) bad("solver.dt must be > 0");
    if (solver.t_final < 0.0) bad("solver.t_final must be >= 0");
    for (const auto& f : outputs.formats)
        if (f != "csv" && f != "binary") bad("outputs.formats entries must be csv or binary");
    // family names and parameter constraints are checked by the factories
    kernel_family_from_string(kernel.family);
    nonlinearity_family_from_string(nonlinearity.family);
}

Grid RunConfig::make_grid() const {
    return Grid::make(domain.dim, domain.extents, domain.nodes);
}

MemoryKernel RunConfig::make_kernel() const {
    return MemoryKernel::make(kernel_family_from_string(kernel.family), kernel.params);
}

Nonlinearity RunConfig::make_nonlinearity() const {
    return Nonlinearity::make(nonlinearity_family_from_string(nonlinearity.family),
                              nonlinearity.params, domain.dim);
}

InitialData RunConfig::make_initial(const Grid& grid) const {
    if (initial.kind == "zero") return InitialData::zero(grid);
    if (initial.kind == "eigenmode")
        return InitialData::eigenmode(grid, initial.mode, initial.amplitude,
                                      initial.velocity_amplitude);
    return InitialData::random_smooth(grid, seed, initial.cutoff);
}

SolverConfig RunConfig::solver_config() const {
    SolverConfig sc;
    sc.dt = solver.dt;
    sc.t_final = solver.t_final;
    sc.cfl_check = solver.cfl_check;
    sc.cfl_factor = solver.cfl_factor;
    sc.history_window = static_cast<std::size_t>(solver.history_window);
    sc.snapshot_every = solver.snapshot_every;
    return sc;
}

} // namespace memwave
