#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "solver.hpp"

namespace failwave {

/// Front metrics of a run next to the deflagration predictors.
struct WaveMetrics {
    double v_f = 0.0;
    double tau = 0.0;       // measured 10-90 rise time
    double tau_full = 0.0;  // measured 1-99 rise time
    double delta1 = 0.0;    // d1 / v_f
    double delta2 = 0.0;    // d2 / v_f
    double fit_r2 = 0.0;
    double tau_predicted = 0.0;       // d1 / v_f^2
    double speed_from_tau = 0.0;      // sqrt(d1 / tau)
    double lateral_speed_ratio = std::numeric_limits<double>::quiet_NaN();  // v_l / v0 when v0 is known
};

inline double predict_tau(double d1, double v_f) {
    if (!(v_f > 0.0)) throw NonpositiveSpeed(v_f);
    return d1 / (v_f * v_f);
}

inline double predict_width(double d, double v_f) {
    if (!(v_f > 0.0)) throw NonpositiveSpeed(v_f);
    return d / v_f;
}

/// Ratio of a lateral front speed to a crack-tip speed v0; NaN when v0 is unset.
inline double lateral_speed_ratio(double v_l, double v0) {
    return v0 > 0.0 ? v_l / v0 : std::numeric_limits<double>::quiet_NaN();
}

// ------------------------------------------------------------------- fitting

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    LineFit f;
    if (n < 2) return f;
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    if (sxx == 0.0) return f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    return f;
}

// --------------------------------------------------------------------- front

struct FrontTrack {
    std::vector<double> t;
    std::vector<double> x;
    double v_f = 0.0;
    double fit_r2 = 0.0;
};

/// Position of the rightmost crossing of `threshold` along row `row`, by
/// linear interpolation between cell centers. NaN when there is none.
inline double front_position(const Grid& g, const Field& gamma, double threshold, int row = 0) {
    for (int i = g.nx - 1; i > 0; --i) {
        const double a = gamma[g.index(i - 1, row)];
        const double b = gamma[g.index(i, row)];
        if (a >= threshold && b < threshold) return g.x(i - 1) + g.dx * (a - threshold) / (a - b);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

/// Front trajectory from Gamma snapshots; v_f is the least-squares slope over
/// the later half of the detected crossings.
inline FrontTrack track_front(const std::vector<double>& times, const std::vector<Field>& gamma, const Grid& g,
                              double gamma_max = 1.0, double level = 0.5, int row = 0) {
    FrontTrack tr;
    for (std::size_t k = 0; k < gamma.size(); ++k) {
        const double x = front_position(g, gamma[k], level * gamma_max, row);
        if (std::isnan(x)) continue;
        tr.t.push_back(times[k]);
        tr.x.push_back(x);
    }
    if (tr.t.size() < 5)
        throw NoFrontDetected("level " + std::to_string(level) + " crossed in " + std::to_string(tr.t.size()) +
                              " snapshots, need >= 5");
    const std::size_t first = tr.t.size() / 2;
    const LineFit fit = fit_line({tr.t.begin() + first, tr.t.end()}, {tr.x.begin() + first, tr.x.end()});
    tr.v_f = fit.slope;
    tr.fit_r2 = fit.r2;
    return tr;
}

inline FrontTrack track_front(const std::vector<Snapshot>& snaps, const Grid& g, double gamma_max = 1.0,
                              double level = 0.5, int row = 0) {
    std::vector<double> t;
    std::vector<Field> gam;
    for (const auto& s : snaps) {
        t.push_back(s.time);
        gam.push_back(s.gamma);
    }
    return track_front(t, gam, g, gamma_max, level, row);
}

// ----------------------------------------------------------------- rise time

struct RiseTime {
    double tau = 0.0;       // t(hi) - t(lo)
    double tau_full = 0.0;  // t(0.99) - t(0.01)
    double plateau = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
};

namespace detail {

/// First time the signal reaches `level`, interpolated; NaN if never.
inline double first_crossing(const std::vector<double>& t, const std::vector<double>& y, double level) {
    if (!y.empty() && y[0] >= level) return t[0];
    for (std::size_t k = 1; k < y.size(); ++k)
        if (y[k] >= level) return t[k - 1] + (level - y[k - 1]) / (y[k] - y[k - 1]) * (t[k] - t[k - 1]);
    return std::numeric_limits<double>::quiet_NaN();
}

} // namespace detail

/// Rise time of a signal toward its final plateau (mean of the last 10% of
/// samples). The 1-99 bracket stands in for 0-100, whose ends are asymptotic.
inline RiseTime measure_rise_time(const std::vector<double>& t, const std::vector<double>& y, double lo = 0.1,
                                  double hi = 0.9) {
    const std::size_t n = y.size();
    if (n < 2) throw NoPlateau("trace has fewer than two samples");
    const std::size_t tail = std::max<std::size_t>(1, n / 10);
    double mean = 0.0, mn = std::numeric_limits<double>::infinity(), mx = -mn;
    for (std::size_t k = n - tail; k < n; ++k) {
        mean += y[k];
        mn = std::min(mn, y[k]);
        mx = std::max(mx, y[k]);
    }
    mean /= static_cast<double>(tail);
    if (!(mean > 0.0)) throw NoPlateau("final plateau is not positive");
    if (mx - mn > 0.05 * mean) throw NoPlateau("last 10% of the trace varies by more than 5%");

    RiseTime r;
    r.plateau = mean;
    r.t_lo = detail::first_crossing(t, y, lo * mean);
    r.t_hi = detail::first_crossing(t, y, hi * mean);
    if (std::isnan(r.t_lo) || std::isnan(r.t_hi)) throw NoPlateau("signal does not rise through the bracket");
    r.tau = r.t_hi - r.t_lo;
    const double f0 = detail::first_crossing(t, y, 0.01 * mean);
    const double f1 = detail::first_crossing(t, y, 0.99 * mean);
    r.tau_full = std::isnan(f1) ? std::numeric_limits<double>::quiet_NaN() : f1 - f0;
    return r;
}

/// Rise of the lateral-stress proxy at a gauge.
inline RiseTime measure_rise_time(const GaugeTrace& trace, double lo = 0.1, double hi = 0.9) {
    return measure_rise_time(trace.t, trace.proxy, lo, hi);
}

/// First time the gauge proxy reaches `level`; NaN if never.
inline double arrival_time(const GaugeTrace& trace, double level = 0.5) {
    return detail::first_crossing(trace.t, trace.proxy, level);
}

/// Front speed from snapshots and rise time at `gauge`, with predictors.
inline WaveMetrics wave_metrics(const RunResult& r, const ScenarioConfig& cfg, double level = 0.5,
                                std::size_t gauge = 0, int row = 0) {
    WaveMetrics m;
    const FrontTrack tr = track_front(r.snapshots, cfg.grid, cfg.material.gamma_max, level, row);
    m.v_f = tr.v_f;
    m.fit_r2 = tr.fit_r2;
    m.delta1 = predict_width(cfg.material.d1, m.v_f);
    m.delta2 = predict_width(cfg.material.d2, m.v_f);
    m.tau_predicted = predict_tau(cfg.material.d1, m.v_f);
    if (gauge < r.gauges.size()) {
        const RiseTime rt = measure_rise_time(r.gauges[gauge]);
        m.tau = rt.tau;
        m.tau_full = rt.tau_full;
        if (m.tau > 0.0) m.speed_from_tau = std::sqrt(cfg.material.d1 / m.tau);
    }
    return m;
}

// -------------------------------------------------------------- clifton study

struct LimitRow {
    double lambda = 0.0;
    double dissipated = 0.0;     // cumulative, J
    double entropy = 0.0;        // cumulative, J/K
    double entropy_rate = 0.0;   // over the last step, W/K
    double energy_drift = 0.0;   // max |budget imbalance| / energy scale
    double sharpness = 0.0;      // max |dGamma/dX| at t_end, 1/m
};

struct LimitStudy {
    std::vector<LimitRow> rows;
    double slope = std::numeric_limits<double>::quiet_NaN();  // d log(dissipated) / d log(lambda)
};

inline double front_sharpness(const Grid& g, const Field& gamma) {
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) s = std::max(s, std::abs(gamma[g.index(i, j)] - gamma[g.index(i - 1, j)]) / g.dx);
    return s;
}

inline LimitRow limit_row(const ScenarioConfig& base, double lambda) {
    ScenarioConfig cfg = base;
    cfg.material.lambda = lambda;
    RunOptions opt;
    opt.snapshot_every = 0;
    const RunResult r = lambda == 0.0 ? run_clifton(cfg, opt) : run(cfg, opt);
    LimitRow row;
    row.lambda = lambda;
    const EnergyRecord& e = r.reports.empty() ? r.initial : r.reports.back().energy;
    row.dissipated = e.dissipated;
    row.entropy = e.entropy;
    if (r.reports.size() >= 2) {
        const auto& a = r.reports[r.reports.size() - 2].energy;
        row.entropy_rate = (e.entropy - a.entropy) / r.reports.back().dt_used;
    }
    row.energy_drift = r.closure();
    row.sharpness = front_sharpness(cfg.grid, r.state.gamma);
    return row;
}

/// Runs the scenario for each lambda (K = lambda D follows) concurrently and
/// fits the log-log slope of cumulative dissipation over the positive lambdas.
inline LimitStudy clifton_limit_study(const ScenarioConfig& base, const std::vector<double>& lambdas) {
    LimitStudy study;
    std::vector<std::future<LimitRow>> jobs;
    for (double l : lambdas) jobs.push_back(std::async(std::launch::async, [&base, l] { return limit_row(base, l); }));
    for (auto& j : jobs) study.rows.push_back(j.get());
    std::vector<double> x, y;
    for (const auto& r : study.rows)
        if (r.lambda > 0.0 && r.dissipated > 0.0) {
            x.push_back(std::log(r.lambda));
            y.push_back(std::log(r.dissipated));
        }
    if (x.size() >= 2) study.slope = fit_line(x, y).slope;
    return study;
}

// -------------------------------------------------------------------- tables

struct MaterialPreset {
    std::string name;
    double v_f = 0.0;         // m/s
    double d1 = 0.0;          // m^2/s
    double exp_tau = 0.0;     // s
    double exp_delta1 = 0.0;  // m
};

inline std::vector<MaterialPreset> default_presets() {
    return {{"K8", 3320.0, 6.6, 0.75e-6, 2.49e-3}, {"soda-lime", 3090.0, 7.4, 0.9e-6, 2.8e-3}};
}

struct TableRow {
    MaterialPreset preset;
    double tau = 0.0;
    double delta1 = 0.0;
    double tau_rel_diff = 0.0;     // (exp - predicted) / exp
    double delta1_rel_diff = 0.0;
};

struct TableReport {
    std::vector<TableRow> rows;

    std::string csv() const {
        std::ostringstream os;
        os << "material,v_f,d1,tau_experimental,tau_predicted,tau_rel_diff,delta1_experimental,delta1_predicted,"
              "delta1_rel_diff\n";
        char buf[512];
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof buf, "%s,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e\n",
                          r.preset.name.c_str(), r.preset.v_f, r.preset.d1, r.preset.exp_tau, r.tau,
                          r.tau_rel_diff, r.preset.exp_delta1, r.delta1, r.delta1_rel_diff);
            os << buf;
        }
        return os.str();
    }

    std::string text() const {
        std::ostringstream os;
        char buf[512];
        os << "Failure-wave rise time and width: experiment vs deflagration predictor\n";
        os << "  tau = d1 / v_f^2, delta1 = d1 / v_f\n\n";
        std::snprintf(buf, sizeof buf, "%-10s %9s %7s | %12s %12s %8s | %12s %12s %8s\n", "material", "v_f[m/s]",
                      "d1", "tau_exp[s]", "tau_pred[s]", "diff", "d1_exp[m]", "d1_pred[m]", "diff");
        os << buf;
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof buf, "%-10s %9.0f %7.2f | %12.3e %12.3e %7.1f%% | %12.3e %12.3e %7.1f%%\n",
                          r.preset.name.c_str(), r.preset.v_f, r.preset.d1, r.preset.exp_tau, r.tau,
                          100.0 * r.tau_rel_diff, r.preset.exp_delta1, r.delta1, 100.0 * r.delta1_rel_diff);
            os << buf;
        }
        return os.str();
    }
};

inline TableReport table_report(const std::vector<MaterialPreset>& presets = default_presets()) {
    TableReport rep;
    for (const auto& p : presets) {
        TableRow r;
        r.preset = p;
        r.tau = predict_tau(p.d1, p.v_f);
        r.delta1 = predict_width(p.d1, p.v_f);
        r.tau_rel_diff = p.exp_tau > 0.0 ? (p.exp_tau - r.tau) / p.exp_tau : 0.0;
        r.delta1_rel_diff = p.exp_delta1 > 0.0 ? (p.exp_delta1 - r.delta1) / p.exp_delta1 : 0.0;
        rep.rows.push_back(r);
    }
    return rep;
}

} // namespace failwave
