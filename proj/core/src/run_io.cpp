#include "memwave/run_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <chrono>
#include <cmath>
#include <ctime>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <openssl/evp.h>

#include <json.hpp>

namespace memwave {

static_assert(std::endian::native == std::endian::little,
              "snapshot binary format assumes a little-endian host");

std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PersistenceError("cannot open for digest: " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw PersistenceError("digest context allocation failed");
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        if (in.gcount() > 0)
            EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PersistenceError("cannot write " + path.string());
    out << content;
    if (!out) throw PersistenceError("write failed for " + path.string());
}

std::filesystem::path create_run_directory(const std::filesystem::path& root,
                                           const std::string& prefix) {
    std::error_code ec;
    std::filesystem::create_directories(root, ec);
    if (ec) throw PersistenceError("cannot create output root " + root.string());
    const std::string stamp = utc_timestamp();
    std::string clean;
    for (char c : stamp)
        if (std::isalnum(static_cast<unsigned char>(c))) clean += c;
    for (int k = 0; k < 10000; ++k) {
        auto dir = root / (prefix + "-" + clean + "-" + std::to_string(k));
        if (std::filesystem::create_directory(dir, ec) && !ec) return dir;
    }
    throw PersistenceError("cannot create a fresh run directory under " + root.string());
}

void write_energy_csv(const std::filesystem::path& path, const EnergyReport& report) {
    std::string out = "t,kinetic,pot_simple,pot_history,history_term,G_int,E_simple,E_history,"
                      "memory_dissipation\n";
    for (const auto& r : report.records) {
        out += csv_number(r.t) + ',' + csv_number(r.kinetic) + ',' + csv_number(r.pot_simple) +
               ',' + csv_number(r.pot_history) + ',' + csv_number(r.history_term) + ',' +
               csv_number(r.g_integral) + ',' + csv_number(r.e_simple) + ',' +
               csv_number(r.e_history) + ',' + csv_number(r.memory_dissipation) + '\n';
    }
    write_text_file(path, out);
}

void write_trace_csv(const std::filesystem::path& path, const TraceSeries& trace) {
    std::string out = "t,node,raw,convolved\n";
    for (std::size_t m = 0; m < trace.times.size(); ++m)
        for (std::size_t b = 0; b < trace.raw.size(); ++b)
            out += csv_number(trace.times[m]) + ',' + std::to_string(b) + ',' +
                   csv_number(trace.raw[b][m]) + ',' + csv_number(trace.convolved[b][m]) + '\n';
    write_text_file(path, out);
}

namespace {

constexpr char kMagic[8] = {'M', 'W', 'S', 'N', 'A', 'P', '0', '1'};

template <class T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

} // namespace

void write_snapshots_binary(const std::filesystem::path& path, const Trajectory& traj) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PersistenceError("cannot write " + path.string());
    out.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(traj.grid.dim()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(traj.grid.interior_nodes(0)));
    put<std::uint32_t>(out, traj.grid.dim() == 2
                                ? static_cast<std::uint32_t>(traj.grid.interior_nodes(1))
                                : 0u);
    put<double>(out, traj.dt);
    put<std::uint64_t>(out, static_cast<std::uint64_t>(traj.snapshot_every));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(traj.records.size()));
    for (const auto& rec : traj.records) {
        put<double>(out, rec.t);
        out.write(reinterpret_cast<const char*>(rec.u.data()),
                  static_cast<std::streamsize>(rec.u.size() * sizeof(double)));
        out.write(reinterpret_cast<const char*>(rec.u_t.data()),
                  static_cast<std::streamsize>(rec.u_t.size() * sizeof(double)));
    }
    if (!out) throw PersistenceError("write failed for " + path.string());
}

Trajectory read_snapshots_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PersistenceError("cannot read " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw PersistenceError("bad snapshot magic in " + path.string());
    const auto dim = get<std::uint32_t>(in);
    const auto mx = get<std::uint32_t>(in);
    const auto my = get<std::uint32_t>(in);
    const double dt = get<double>(in);
    const auto cadence = get<std::uint64_t>(in);
    const auto count = get<std::uint64_t>(in);

    Trajectory traj;
    traj.grid = (dim == 1) ? Grid::interval(1.0, static_cast<int>(mx) + 2)
                           : Grid::rectangle(1.0, 1.0, static_cast<int>(mx) + 2,
                                             static_cast<int>(my) + 2);
    traj.dt = dt;
    traj.snapshot_every = static_cast<int>(cadence);
    const std::size_t n = (dim == 1) ? mx : static_cast<std::size_t>(mx) * my;
    traj.records.resize(count);
    for (auto& rec : traj.records) {
        rec.t = get<double>(in);
        rec.u.resize(n);
        rec.u_t.resize(n);
        in.read(reinterpret_cast<char*>(rec.u.data()),
                static_cast<std::streamsize>(n * sizeof(double)));
        in.read(reinterpret_cast<char*>(rec.u_t.data()),
                static_cast<std::streamsize>(n * sizeof(double)));
        rec.step = std::llround(rec.t / dt);
    }
    if (!in) throw PersistenceError("truncated snapshot file " + path.string());
    return traj;
}

void write_snapshots_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::string out = "t,index,u,u_t\n";
    for (const auto& rec : traj.records)
        for (std::size_t k = 0; k < rec.u.size(); ++k)
            out += csv_number(rec.t) + ',' + std::to_string(k) + ',' + csv_number(rec.u[k]) +
                   ',' + csv_number(rec.u_t[k]) + '\n';
    write_text_file(path, out);
}

void write_manifest(const std::filesystem::path& dir, const std::string& config_text,
                    const std::string& started_utc, const std::string& summary_json) {
    nlohmann::json files = nlohmann::json::array();
    std::vector<std::filesystem::path> listed;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().filename() == "manifest.json") continue;
        listed.push_back(entry.path());
    }
    std::sort(listed.begin(), listed.end());
    for (const auto& p : listed) {
        files.push_back({{"name", p.filename().string()},
                         {"size", std::filesystem::file_size(p)},
                         {"sha256", sha256_file(p)}});
    }
    nlohmann::json manifest{{"tool_version", kToolVersion},
                            {"started_utc", started_utc},
                            {"completed_utc", utc_timestamp()},
                            {"config", config_text},
                            {"files", files}};
    if (!summary_json.empty()) manifest["summary"] = nlohmann::json::parse(summary_json);
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

bool verify_manifest(const std::filesystem::path& dir, std::string* first_mismatch) {
    std::ifstream in(dir / "manifest.json");
    if (!in) {
        if (first_mismatch) *first_mismatch = "manifest.json missing";
        return false;
    }
    nlohmann::json manifest;
    in >> manifest;
    for (const auto& f : manifest.at("files")) {
        const auto path = dir / f.at("name").get<std::string>();
        if (!std::filesystem::exists(path)) {
            if (first_mismatch) *first_mismatch = "missing file " + path.string();
            return false;
        }
        if (sha256_file(path) != f.at("sha256").get<std::string>()) {
            if (first_mismatch) *first_mismatch = "digest mismatch for " + path.string();
            return false;
        }
    }
    return true;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

} // namespace memwave
