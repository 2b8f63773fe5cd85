#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "support.hpp"

using namespace fwtest;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("failwave_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult cli(const std::string& args, const fs::path& dir) {
    const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
    const std::string cmd = std::string("env -u FAILWAVE_OUT ") + FAILWAVE_CLI + " " + args + " >" + out.string() +
                            " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

void write_config(const fs::path& p, const ScenarioConfig& cfg) {
    std::ofstream(p) << to_json(cfg).dump(2);
}

} // namespace

TEST(Hash, Sha256KnownVectors) {
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Hash, ConfigHashStableAndSensitive) {
    const ScenarioConfig a = quick_scenario();
    EXPECT_EQ(config_hash(a), config_hash(build_scenario(to_json(a).dump(4))));
    ScenarioConfig b = a;
    b.material.d1 *= 1.0 + 1e-15;
    EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Format, FullPrecision) {
    EXPECT_EQ(format_double(0.1), "1.0000000000000001e-01");
    for (double x : {1.0 / 3.0, -2.5e-300, 6.02214076e23}) EXPECT_EQ(std::stod(format_double(x)), x);
}

TEST(OutputDir, Precedence) {
    ScenarioConfig cfg = quick_scenario();
    cfg.output.dir = "from_config";
    ::unsetenv("FAILWAVE_OUT");
    EXPECT_EQ(resolve_output_dir("flag", &cfg), fs::path("flag"));
    EXPECT_EQ(resolve_output_dir("", &cfg), fs::path("from_config"));
    EXPECT_EQ(resolve_output_dir(""), fs::path("failwave_out"));
    ::setenv("FAILWAVE_OUT", "from_env", 1);
    EXPECT_EQ(resolve_output_dir("", &cfg), fs::path("from_env"));
    EXPECT_EQ(resolve_output_dir("flag", &cfg), fs::path("flag"));
    ::unsetenv("FAILWAVE_OUT");
}

TEST(Artifacts, CsvBitwiseDeterministic) {
    const ScenarioConfig cfg = quick_scenario();
    std::string first;
    for (int k = 0; k < 2; ++k) {
        const fs::path dir = scratch("csv" + std::to_string(k));
        ArtifactWriter w(dir);
        RunOptions opt;
        opt.snapshot_every = 8;
        const RunResult r = run(cfg, opt);
        for (const auto& s : r.snapshots) write_snapshot(w, s, cfg.grid);
        write_reports(w, r.reports);
        std::string all;
        for (const auto& f : w.files()) all += f + "\n" + slurp(dir / f);
        if (k == 0) first = all;
        else EXPECT_EQ(all, first);
    }
}

TEST(Artifacts, SnapshotLayout) {
    const fs::path dir = scratch("layout");
    ArtifactWriter w(dir);
    const Grid g = Grid::plane(3, 3, 1.0, 1.0);
    Snapshot s{12, 0.5, Field(9, 1.0), Field(9, 2.0), Field(9, 3.0), Field(9, 4.0), Field(9, 5.0)};
    write_snapshot(w, s, g);
    ASSERT_EQ(w.files(), std::vector<std::string>{"snap_000012.csv"});
    const std::string text = slurp(dir / "snap_000012.csv");
    EXPECT_EQ(text.substr(0, text.find('\n')), "X,Y,U,v,gamma,S,Z");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 10);
}

TEST(Manifest, ListsEveryFileAndRejectsMissing) {
    const fs::path dir = scratch("manifest");
    ArtifactWriter w(dir);
    w.write_text("a.txt", "alpha");
    w.write_csv("b.csv", {"x"}, {{1.0, 2.0}});
    RunManifest m;
    m.scenario = "unit";
    m.config_hash = "abc";
    m.started = utc_now();
    write_manifest(w, m);
    const Json j = Json::parse(slurp(dir / "manifest.json"));
    EXPECT_EQ(j["files"], Json::array({"a.txt", "b.csv"}));
    EXPECT_EQ(j["scenario"], "unit");
    EXPECT_FALSE(j["finished"].get<std::string>().empty());
    fs::remove(dir / "a.txt");
    EXPECT_THROW(write_manifest(w, m), std::runtime_error);
}

TEST(Cli, MissingConfigExitsOne) {
    const fs::path dir = scratch("cli_missing");
    const CliResult r = cli("run missing.cfg --out " + dir.string(), dir);
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("config not found"), std::string::npos);
}

TEST(Cli, BadArgumentsAndConfigErrors) {
    const fs::path dir = scratch("cli_bad");
    EXPECT_EQ(cli("", dir).code, 1);
    EXPECT_EQ(cli("frobnicate", dir).code, 1);
    EXPECT_EQ(cli("convergence sideways --out " + dir.string(), dir).code, 1);
    std::ofstream(dir / "broken.json") << "{\"grid\": {\"nx\": 10, \"dx\": 0}}";
    const CliResult r = cli("run " + (dir / "broken.json").string() + " --out " + dir.string(), dir);
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("MissingKey"), std::string::npos);
    EXPECT_EQ(cli("--help", dir).code, 0);
}

TEST(Cli, RuntimeViolationExitsTwo) {
    const fs::path dir = scratch("cli_cfl");
    ScenarioConfig cfg = quick_scenario();
    cfg.dt = 2.0 * cfg.grid.dx;
    cfg.t_end = 10 * cfg.dt;
    write_config(dir / "cfl.json", cfg);
    const CliResult r = cli("run " + (dir / "cfl.json").string() + " --out " + (dir / "out").string(), dir);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("CflViolation"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "out" / "failure_state.csv"));
}

TEST(Cli, RunWritesManifestedArtifacts) {
    const fs::path dir = scratch("cli_run");
    const std::string cfg = std::string(FAILWAVE_SCENARIO_DIR) + "/kpp_front.json";
    const CliResult r = cli("run " + cfg + " --quiet --snapshots 40 --out " + (dir / "a").string(), dir);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    const Json m = Json::parse(slurp(dir / "a" / "manifest.json"));
    EXPECT_EQ(m["scenario"], "kpp_front");
    // the hash covers the effective configuration, command-line overrides included
    ScenarioConfig effective = load_scenario(cfg);
    effective.output.snapshot_every = 40;
    EXPECT_EQ(m["config_hash"], config_hash(effective));
    std::vector<std::string> files = m["files"];
    EXPECT_NE(std::find(files.begin(), files.end(), "steps.csv"), files.end());
    EXPECT_NE(std::find(files.begin(), files.end(), "gauge_00.csv"), files.end());
    EXPECT_NE(std::find(files.begin(), files.end(), "snap_000800.csv"), files.end());
    for (const auto& f : files) EXPECT_TRUE(fs::exists(dir / "a" / f)) << f;
    const double v = m["metrics"]["wave"]["v_f"];
    EXPECT_NEAR(v, 2.0, 0.2);
    EXPECT_LT(m["metrics"]["energy_closure"].get<double>(), 1e-10);

    // a second run reproduces every CSV byte for byte
    ASSERT_EQ(cli("run " + cfg + " --quiet --snapshots 40 --out " + (dir / "b").string(), dir).code, 0);
    for (const auto& f : files)
        if (f.ends_with(".csv")) EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
}

TEST(Cli, EnvironmentSelectsOutputDir) {
    const fs::path dir = scratch("cli_env");
    const std::string cmd = "FAILWAVE_OUT=" + (dir / "env").string() + " " + FAILWAVE_CLI + " tables --quiet";
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_TRUE(fs::exists(dir / "env" / "tables.csv"));
    EXPECT_TRUE(fs::exists(dir / "env" / "manifest.json"));
}

TEST(Cli, TablesReportK8) {
    const fs::path dir = scratch("cli_tables");
    const CliResult r = cli("tables --out " + dir.string(), dir);
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("K8"), std::string::npos);
    EXPECT_NE(r.out.find("5.988e-07"), std::string::npos);
    EXPECT_NE(r.out.find("7.500e-07"), std::string::npos);
    EXPECT_NE(slurp(dir / "tables.csv").find("soda-lime"), std::string::npos);
}

TEST(Cli, VerifyVariationalWritesRatios) {
    const fs::path dir = scratch("cli_var");
    const std::string cfg = std::string(FAILWAVE_SCENARIO_DIR) + "/quick.json";
    const CliResult r = cli("verify-variational " + cfg + " --quiet --out " + dir.string(), dir);
    ASSERT_EQ(r.code, 0) << r.err;
    for (int l = 0; l < 3; ++l) EXPECT_TRUE(fs::exists(dir / ("residuals_level" + std::to_string(l) + ".csv")));
    std::istringstream csv(slurp(dir / "variational_summary.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "level,nx,dt,max_residU_L2,max_residGamma_L2,ratio_U,ratio_Gamma");
    int rows = 0;
    while (std::getline(csv, line)) {
        if (rows++ == 0) continue;
        std::vector<double> v;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) v.push_back(std::stod(cell));
        EXPECT_GE(v[5], 3.5);
        EXPECT_GE(v[6], 3.5);
    }
    EXPECT_EQ(rows, 3);
}

TEST(Cli, CliftonStudyAndConvergence) {
    const fs::path dir = scratch("cli_study");
    ScenarioConfig cfg = clifton_pulse_scenario(64);
    cfg.t_end = 0.5;
    write_config(dir / "pulse.json", cfg);
    const CliResult r =
        cli("clifton-study " + (dir / "pulse.json").string() + " --lambdas 1e-2,1e-3,0 --out " + (dir / "s").string(), dir);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("log-log slope"), std::string::npos);
    const std::string csv = slurp(dir / "s" / "clifton_study.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);

    const CliResult c = cli("convergence elastic --levels 2 --out " + (dir / "c").string(), dir);
    ASSERT_EQ(c.code, 0) << c.err;
    EXPECT_TRUE(fs::exists(dir / "c" / "convergence_elastic.csv"));
}
