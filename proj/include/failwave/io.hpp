#pragma once

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "analysis.hpp"
#include "scenario.hpp"
#include "solver.hpp"
#include "variational.hpp"

namespace failwave {

namespace fs = std::filesystem;

/// 17 significant digits, round-trips every double.
inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

inline std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

/// Digest of the canonical config document (sorted keys, compact dump).
inline std::string config_hash(const ScenarioConfig& cfg) { return sha256_hex(to_json(cfg).dump()); }

/// Output directory: explicit flag, then FAILWAVE_OUT, then the scenario's
/// own setting, then "failwave_out".
inline fs::path resolve_output_dir(const std::string& flag, const ScenarioConfig* cfg = nullptr) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("FAILWAVE_OUT"); env && *env) return env;
    if (cfg && !cfg->output.dir.empty()) return cfg->output.dir;
    return "failwave_out";
}

/// Small CSV writer that remembers what it wrote.
class ArtifactWriter {
public:
    explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    const fs::path& dir() const noexcept { return dir_; }
    const std::vector<std::string>& files() const noexcept { return files_; }

    void write_text(const std::string& name, const std::string& text) {
        std::ofstream out(dir_ / name, std::ios::binary);
        out << text;
        if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
        files_.push_back(name);
    }

    void write_csv(const std::string& name, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns) {
        std::string s;
        for (std::size_t c = 0; c < header.size(); ++c) s += (c ? "," : "") + header[c];
        s += '\n';
        const std::size_t rows = columns.empty() ? 0 : columns[0].size();
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < columns.size(); ++c) {
                if (c) s += ',';
                s += format_double(columns[c][r]);
            }
            s += '\n';
        }
        write_text(name, s);
    }

private:
    fs::path dir_;
    std::vector<std::string> files_;
};

inline std::string snapshot_name(long step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snap_%06ld.csv", step);
    return buf;
}

/// Columns X[,Y],U,v,gamma,S,Z.
inline void write_snapshot(ArtifactWriter& w, const Snapshot& s, const Grid& g) {
    std::vector<double> X(g.size()), Y(g.size());
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            X[g.index(i, j)] = g.x(i);
            Y[g.index(i, j)] = g.y(j);
        }
    if (g.dimension() == 1)
        w.write_csv(snapshot_name(s.step), {"X", "U", "v", "gamma", "S", "Z"}, {X, s.U, s.v, s.gamma, s.S, s.Z});
    else
        w.write_csv(snapshot_name(s.step), {"X", "Y", "U", "v", "gamma", "S", "Z"}, {X, Y, s.U, s.v, s.gamma, s.S, s.Z});
}

inline std::string gauge_name(std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "gauge_%02zu.csv", k);
    return buf;
}

inline void write_gauge(ArtifactWriter& w, const GaugeTrace& tr, std::size_t k) {
    w.write_csv(gauge_name(k), {"t", "S", "gamma", "sigma_lateral_proxy"}, {tr.t, tr.S, tr.gamma, tr.proxy});
}

inline void write_reports(ArtifactWriter& w, const std::vector<StepReport>& reports, const std::string& name = "steps.csv") {
    std::vector<std::vector<double>> c(15);
    for (const auto& r : reports) {
        const double v[] = {static_cast<double>(r.step), r.time, r.dt_used, r.max_cfl, r.max_diff, r.min_Z_gammadot,
                            r.max_abs_Z_gammadot, r.energy.kinetic, r.energy.free_energy(), r.energy.dissipated,
                            r.energy.work, r.energy.coupling, r.energy.release, r.energy.entropy, r.imbalance};
        for (std::size_t k = 0; k < c.size(); ++k) c[k].push_back(v[k]);
    }
    w.write_csv(name,
                {"step", "time", "dt", "max_cfl", "max_diff", "min_Z_gammadot", "max_abs_Z_gammadot", "kinetic",
                 "free_energy", "dissipated", "work", "coupling", "release", "entropy", "imbalance"},
                c);
}

inline void write_residuals(ArtifactWriter& w, const LagrangeResidual& r, const std::string& name) {
    w.write_csv(name, {"time", "residU_L2", "residGamma_L2"}, {r.times, r.norm_U, r.norm_G});
}

inline void write_limit_study(ArtifactWriter& w, const LimitStudy& s, const std::string& name = "clifton_study.csv") {
    std::vector<std::vector<double>> c(6);
    for (const auto& r : s.rows) {
        const double v[] = {r.lambda, r.dissipated, r.entropy, r.entropy_rate, r.energy_drift, r.sharpness};
        for (std::size_t k = 0; k < c.size(); ++k) c[k].push_back(v[k]);
    }
    w.write_csv(name, {"lambda", "dissipated", "entropy", "entropy_rate", "energy_drift", "sharpness"}, c);
}

inline std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Provenance record of one CLI invocation.
struct RunManifest {
    std::string scenario;
    std::string config_hash;
    std::string started;
    std::string finished;
    std::vector<std::string> files;
    Json metrics = Json::object();

    Json to_json() const {
        return {{"scenario", scenario}, {"config_hash", config_hash}, {"started", started},
                {"finished", finished},  {"files", files},              {"metrics", metrics}};
    }
};

/// Writes manifest.json after checking that every listed file exists.
inline void write_manifest(ArtifactWriter& w, RunManifest m) {
    m.files = w.files();
    for (const auto& f : m.files)
        if (!fs::exists(w.dir() / f)) throw std::runtime_error("manifest lists missing file " + f);
    if (m.finished.empty()) m.finished = utc_now();
    std::ofstream out(w.dir() / "manifest.json");
    out << m.to_json().dump(2) << '\n';
}

/// Dumps a state as a snapshot-like CSV (used when a run aborts).
inline void write_state(ArtifactWriter& w, const FieldState& s, const Grid& g, const std::string& name) {
    std::vector<double> X(g.size()), active(g.size());
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) X[g.index(i, j)] = g.x(i);
    for (std::size_t c = 0; c < g.size(); ++c) active[c] = s.active[c];
    w.write_csv(name, {"X", "U", "v", "gamma", "active"}, {X, s.U, s.v, s.gamma, active});
}

} // namespace failwave
