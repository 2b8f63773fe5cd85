// failwave: scenario runner and artifact emitter.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "failwave/failwave.hpp"

namespace fw = failwave;

namespace {

struct Common {
    std::string out;
    bool quiet = false;
};

void say(const Common& c, const std::string& msg) {
    if (!c.quiet) std::cout << msg << '\n';
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

fw::Json metrics_json(const fw::WaveMetrics& m) {
    auto num = [](double x) { return std::isfinite(x) ? fw::Json(x) : fw::Json(nullptr); };
    return {{"v_f", num(m.v_f)},
            {"fit_r2", num(m.fit_r2)},
            {"tau_10_90", num(m.tau)},
            {"tau_1_99", num(m.tau_full)},
            {"tau_predicted", num(m.tau_predicted)},
            {"speed_from_tau", num(m.speed_from_tau)},
            {"delta1", num(m.delta1)},
            {"delta2", num(m.delta2)}};
}

int cmd_run(const std::string& path, int snapshots, double level, const Common& c) {
    fw::ScenarioConfig cfg = fw::load_scenario(path);
    if (snapshots >= 0) cfg.output.snapshot_every = snapshots;
    fw::ArtifactWriter w(fw::resolve_output_dir(c.out, &cfg));
    fw::RunManifest man;
    man.scenario = cfg.name;
    man.config_hash = fw::config_hash(cfg);
    man.started = fw::utc_now();

    fw::RunOptions opt;
    opt.on_failure = [&](const fw::FieldState& s) { fw::write_state(w, s, cfg.grid, "failure_state.csv"); };
    const fw::RunResult r = fw::run_scenario(cfg, opt);

    for (const auto& s : r.snapshots) fw::write_snapshot(w, s, cfg.grid);
    for (std::size_t k = 0; k < r.gauges.size(); ++k) fw::write_gauge(w, r.gauges[k], k);
    fw::write_reports(w, r.reports);

    const fw::EnergyRecord& e = r.reports.empty() ? r.initial : r.reports.back().energy;
    man.metrics["energy_closure"] = r.closure();
    man.metrics["energy_scale"] = r.energy_scale;
    man.metrics["min_Z_gammadot"] = r.min_Z_gammadot;
    man.metrics["peak_Z_gammadot"] = r.peak_Z_gammadot;
    man.metrics["entropy_produced"] = e.entropy;
    man.metrics["entropy_monotone"] = r.entropy_monotone;
    man.metrics["steps"] = r.reports.size();
    try {
        const fw::WaveMetrics m = fw::wave_metrics(r, cfg, level);
        man.metrics["wave"] = metrics_json(m);
        say(c, "front speed " + fmt("%.6g", m.v_f) + " m/s (R^2 " + fmt("%.6f", m.fit_r2) + ")");
        if (m.tau > 0.0) say(c, "rise time 10-90 " + fmt("%.6g", m.tau) + " s, predictor d1/v^2 " + fmt("%.6g", m.tau_predicted) + " s");
    } catch (const fw::Error& err) {
        man.metrics["wave"] = {{"unavailable", err.kind()}};
    }
    fw::write_manifest(w, man);
    say(c, cfg.name + ": " + std::to_string(r.reports.size()) + " steps, energy closure " + fmt("%.3e", r.closure()) +
               ", min Z*dGamma/dt " + fmt("%.3e", r.min_Z_gammadot));
    say(c, "artifacts in " + w.dir().string());
    return 0;
}

int cmd_clifton(const std::string& path, const std::vector<double>& lambdas, const Common& c) {
    const fw::ScenarioConfig cfg = fw::load_scenario(path);
    fw::ArtifactWriter w(fw::resolve_output_dir(c.out, &cfg));
    fw::RunManifest man;
    man.scenario = cfg.name;
    man.config_hash = fw::config_hash(cfg);
    man.started = fw::utc_now();
    const fw::LimitStudy s = fw::clifton_limit_study(cfg, lambdas);
    fw::write_limit_study(w, s);
    man.metrics["dissipation_slope"] = std::isfinite(s.slope) ? fw::Json(s.slope) : fw::Json(nullptr);
    fw::write_manifest(w, man);
    if (!c.quiet) {
        std::printf("%12s %14s %14s %14s %12s %12s\n", "lambda", "dissipated", "entropy", "entropy_rate", "drift",
                    "sharpness");
        for (const auto& r : s.rows)
            std::printf("%12.4e %14.6e %14.6e %14.6e %12.3e %12.4e\n", r.lambda, r.dissipated, r.entropy,
                        r.entropy_rate, r.energy_drift, r.sharpness);
        std::printf("log-log slope of dissipation vs lambda: %.6f\n", s.slope);
    }
    return 0;
}

int cmd_tables(const Common& c) {
    const fw::TableReport rep = fw::table_report();
    fw::ArtifactWriter w(fw::resolve_output_dir(c.out));
    w.write_text("tables.csv", rep.csv());
    w.write_text("tables.txt", rep.text());
    fw::RunManifest man;
    man.scenario = "tables";
    man.started = fw::utc_now();
    fw::write_manifest(w, man);
    if (!c.quiet) std::cout << rep.text();
    return 0;
}

int cmd_variational(const std::string& path, int levels, const Common& c) {
    const fw::ScenarioConfig cfg = fw::load_scenario(path);
    fw::ArtifactWriter w(fw::resolve_output_dir(c.out, &cfg));
    fw::RunManifest man;
    man.scenario = cfg.name;
    man.config_hash = fw::config_hash(cfg);
    man.started = fw::utc_now();
    const fw::VariationalStudy s = fw::variational_refinement(cfg, levels);
    std::vector<double> lv, nx, dt, mu, mg, ru, rg;
    for (std::size_t l = 0; l < s.nx.size(); ++l) {
        fw::write_residuals(w, s.residuals[l], "residuals_level" + std::to_string(l) + ".csv");
        lv.push_back(static_cast<double>(l));
        nx.push_back(s.nx[l]);
        dt.push_back(s.dt[l]);
        mu.push_back(s.max_U[l]);
        mg.push_back(s.max_G[l]);
        ru.push_back(l ? s.ratio_U[l - 1] : std::nan(""));
        rg.push_back(l ? s.ratio_G[l - 1] : std::nan(""));
    }
    w.write_csv("variational_summary.csv",
                {"level", "nx", "dt", "max_residU_L2", "max_residGamma_L2", "ratio_U", "ratio_Gamma"},
                {lv, nx, dt, mu, mg, ru, rg});
    man.metrics["nodal_mismatch"] = s.nodal_mismatch;
    fw::write_manifest(w, man);
    if (!c.quiet) {
        std::printf("%6s %6s %12s %14s %14s %9s %9s\n", "level", "nx", "dt", "residU", "residGamma", "ratioU",
                    "ratioG");
        for (std::size_t l = 0; l < s.nx.size(); ++l)
            std::printf("%6zu %6d %12.4e %14.6e %14.6e %9.3f %9.3f\n", l, s.nx[l], s.dt[l], s.max_U[l], s.max_G[l],
                        ru[l], rg[l]);
        std::printf("nodal generalized reduction mismatch: %.3e\n", s.nodal_mismatch);
    }
    return 0;
}

int cmd_convergence(const std::string& suite, int levels, const Common& c) {
    if (suite != "elastic" && suite != "diffusion" && suite != "all")
        throw fw::InvalidValue("suite", "must be elastic, diffusion or all");
    fw::ArtifactWriter w(fw::resolve_output_dir(c.out));
    std::vector<fw::ConvergenceStudy> studies;
    if (suite != "diffusion") studies.push_back(fw::elastic_convergence(fw::standing_wave_scenario(), levels));
    if (suite != "elastic") studies.push_back(fw::diffusion_convergence(fw::heat_kernel_scenario(), levels));
    fw::RunManifest man;
    man.scenario = "convergence-" + suite;
    man.started = fw::utc_now();
    for (const auto& s : studies) {
        std::vector<double> order{std::nan("")};
        order.insert(order.end(), s.order.begin(), s.order.end());
        w.write_csv("convergence_" + s.name + ".csv", {"h", "dt", "error", "observed_order"}, {s.h, s.dt, s.error, order});
        man.metrics[s.name] = {{"min_order", s.min_order}};
        if (std::isfinite(s.variance_slope)) {
            man.metrics[s.name]["variance_slope"] = s.variance_slope;
            man.metrics[s.name]["variance_expected"] = s.variance_expected;
        }
        if (!c.quiet) {
            std::printf("%s\n", s.name.c_str());
            for (std::size_t l = 0; l < s.h.size(); ++l)
                std::printf("  h=%.6e dt=%.6e error=%.6e order=%s\n", s.h[l], s.dt[l], s.error[l],
                            l ? fmt("%.3f", s.order[l - 1]).c_str() : "-");
            if (std::isfinite(s.variance_slope))
                std::printf("  variance slope %.6f (expected %.6f)\n", s.variance_slope, s.variance_expected);
        }
    }
    fw::write_manifest(w, man);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Failure-wave simulator: runs, limit studies, tables and verification"};
    app.require_subcommand(1);
    Common c;
    app.add_option("--out", c.out, "Output directory (overrides FAILWAVE_OUT)");
    app.add_flag("--quiet", c.quiet, "Suppress progress output");

    std::string config, suite;
    int snapshots = -1, levels = 3;
    double level = 0.5;
    std::vector<double> lambdas{1e-2, 1e-3, 1e-4, 0.0};

    auto* run = app.add_subcommand("run", "Run a scenario and write snapshots, gauges and a manifest");
    run->add_option("config", config, "Scenario file")->required();
    run->add_option("--snapshots", snapshots, "Steps between snapshots (overrides the scenario)");
    run->add_option("--level", level, "Front threshold as a fraction of gamma_max");

    auto* study = app.add_subcommand("clifton-study", "Dissipation trend as lambda -> 0");
    study->add_option("config", config, "Scenario file")->required();
    study->add_option("--lambdas", lambdas, "Comma-separated lambda values")->delimiter(',');

    auto* tables = app.add_subcommand("tables", "Rise time and width predictors vs experiment");

    auto* verify = app.add_subcommand("verify-variational", "Lagrange residuals under refinement");
    verify->add_option("config", config, "Scenario file")->required();
    verify->add_option("--levels", levels, "Refinement levels")->check(CLI::Range(2, 8));

    auto* conv = app.add_subcommand("convergence", "Observed orders of the elastic and diffusion solvers");
    conv->add_option("suite", suite, "elastic, diffusion or all")->required();
    conv->add_option("--levels", levels, "Refinement levels")->check(CLI::Range(2, 8));

    for (auto* sub : {run, study, tables, verify, conv}) {
        sub->add_option("--out", c.out, "Output directory (overrides FAILWAVE_OUT)");
        sub->add_flag("--quiet", c.quiet, "Suppress progress output");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run) return cmd_run(config, snapshots, level, c);
        if (*study) return cmd_clifton(config, lambdas, c);
        if (*tables) return cmd_tables(c);
        if (*verify) return cmd_variational(config, levels, c);
        if (*conv) return cmd_convergence(suite, levels, c);
    } catch (const fw::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.error_class() == fw::ErrorClass::Config ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
