#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "analysis.hpp"
#include "solver.hpp"
#include "variational.hpp"

namespace failwave {

/// run() for dissipative scenarios, run_clifton() when lambda = 0.
inline RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opt = {}) {
    return cfg.material.lambda == 0.0 ? run_clifton(cfg, opt) : run(cfg, opt);
}

/// Same scenario with cells and time step divided by `factor`.
inline ScenarioConfig refine(const ScenarioConfig& base, int factor) {
    ScenarioConfig cfg = base;
    for (const Profile* p : {&base.u0, &base.v0, &base.gamma0})
        if (std::holds_alternative<TableProfile>(*p))
            throw InvalidValue("initial", "tabulated profiles cannot be refined");
    cfg.grid.nx *= factor;
    cfg.grid.dx /= factor;
    if (cfg.grid.dimension() == 2) {
        cfg.grid.ny *= factor;
        cfg.grid.dy /= factor;
    }
    cfg.dt /= factor;
    cfg.output.snapshot_every *= factor;
    return cfg;
}

// ------------------------------------------------------------ scenarios

namespace detail {

inline ScenarioConfig unit_line(int nx, double length, double x0 = 0.0) {
    ScenarioConfig cfg;
    cfg.grid = Grid::line(nx, length / nx, x0);
    cfg.material.rho0 = 1.0;
    cfg.material.theta0 = 300.0;
    cfg.material.c1 = 1.0;
    cfg.material.lambda = 1.0;
    return cfg;
}

} // namespace detail

/// sin(pi X) on [0,1] with fixed ends and unit wave speed; period 2.
inline ScenarioConfig standing_wave_scenario(int nx = 64) {
    ScenarioConfig cfg = detail::unit_line(nx, 1.0);
    cfg.name = "standing_wave";
    cfg.dt = 0.5 / nx;
    cfg.t_end = 2.0;
    cfg.u0 = SineProfile{1.0, std::numbers::pi, 0.0};
    return cfg;
}

/// Gaussian release of damage on [-20, 20] with d1 = 1 and no stiffness.
inline ScenarioConfig heat_kernel_scenario(int nx = 80) {
    ScenarioConfig cfg = detail::unit_line(nx, 40.0, -20.0);
    cfg.name = "heat_kernel";
    cfg.material.d1 = cfg.material.d2 = 1.0;
    cfg.dt = 20.0 / nx;
    cfg.t_end = 2.0;
    cfg.gamma0 = GaussianProfile{1.0, 0.0, 0.0, 1.0, 1.0};
    cfg.output.snapshot_every = 1;
    return cfg;
}

/// Short smooth coupled run used by the variational checks.
inline ScenarioConfig quick_scenario(int nx = 32) {
    ScenarioConfig cfg = detail::unit_line(nx, 1.0);
    cfg.name = "quick";
    auto& m = cfg.material;
    m.c3 = 0.5;
    m.c2 = 1.0;
    m.d1 = m.d2 = 0.01;
    cfg.dt = 0.5 / nx;
    cfg.t_end = 0.25;
    cfg.u0 = SineProfile{0.1, std::numbers::pi, 0.0};
    cfg.gamma0 = GaussianProfile{1.0, 0.5, 0.0, 0.1, 0.1};
    return cfg;
}

/// Logistic front with d1 = 1, r = 1: pulled speed 2.
inline ScenarioConfig kpp_front_scenario() {
    ScenarioConfig cfg = detail::unit_line(1200, 120.0);
    cfg.name = "kpp_front";
    auto& m = cfg.material;
    m.d1 = m.d2 = 1.0;
    m.source_law = SourceLaw::Logistic;
    m.source_rate = 1.0;
    cfg.dt = 0.05;
    cfg.t_end = 40.0;
    cfg.gamma0 = StepProfile{1.0, 5.0, 1.0};
    cfg.gauges = {{60.0, 0.0}};
    cfg.output.snapshot_every = 20;
    return cfg;
}

/// Periodic smooth pulse for the conservative limit; lambda = 0 runs the
/// clifton integrator, lambda > 0 grows a logistic damage bump.
inline ScenarioConfig clifton_pulse_scenario(int nx = 1024) {
    ScenarioConfig cfg = detail::unit_line(nx, 1.0);
    cfg.name = "clifton_pulse";
    auto& m = cfg.material;
    m.lambda = 0.0;
    m.c3 = 0.0;
    m.d1 = m.d2 = 1e-3;
    m.source_law = SourceLaw::Logistic;
    m.source_rate = 1.0;
    cfg.dt = 0.5 / nx;
    cfg.t_end = 10.0;
    cfg.u0 = GaussianProfile{1e-3, 0.5, 0.0, 0.05, 0.05};
    cfg.gamma0 = GaussianProfile{0.2, 0.5, 0.0, 0.05, 0.05};
    cfg.elastic_left.kind = cfg.elastic_right.kind = ElasticBcKind::Periodic;
    cfg.damage_left.kind = cfg.damage_right.kind = DamageBcKind::Periodic;
    return cfg;
}

/// K8 glass under a 2 GPa compressive impact; the logistic rate is set so
/// the pulled-front speed 2 sqrt(d1 r) equals 3320 m/s.
inline ScenarioConfig impact_k8_scenario() {
    ScenarioConfig cfg;
    cfg.name = "impact_k8";
    cfg.grid = Grid::line(750, 2e-4);
    auto& m = cfg.material;
    m.rho0 = 2500.0;
    m.theta0 = 300.0;
    m.c1 = 7.0e10;
    m.lambda = 1.0;
    m.d1 = 6.6;
    m.d2 = 13.2;
    m.sigma0 = 1.0e9;
    m.source_law = SourceLaw::Logistic;
    m.source_rate = 3320.0 * 3320.0 / (4.0 * 6.6);
    cfg.dt = 2e-8;
    cfg.t_end = 4e-5;
    cfg.gamma0 = StepProfile{1.0, 1e-3, 2e-4};
    cfg.elastic_left = {ElasticBcKind::Stress, -2.0e9, 1e-7};
    cfg.elastic_right = {ElasticBcKind::Fixed, 0.0, 0.0};
    cfg.gauges = {{0.03, 0.0}, {0.05, 0.0}};
    cfg.output.snapshot_every = 50;
    return cfg;
}

/// Same impact without a damage seed. sigma0 sits well above the doubled stress
/// reflected from the fixed wall, including the discrete overshoot of the ramp.
inline ScenarioConfig subthreshold_scenario() {
    ScenarioConfig cfg = impact_k8_scenario();
    cfg.name = "subthreshold";
    cfg.material.sigma0 = 1.0e10;
    cfg.gamma0 = ZeroProfile{};
    return cfg;
}

/// 2D logistic release with faster transverse diffusion (d2 = 4 d1).
inline ScenarioConfig lateral_2d_scenario() {
    ScenarioConfig cfg;
    cfg.name = "lateral_2d";
    cfg.grid = Grid::plane(61, 61, 0.5, 0.5, -15.25, -15.25);
    auto& m = cfg.material;
    m.rho0 = 1.0;
    m.theta0 = 300.0;
    m.c1 = 1.0;
    m.lambda = 1.0;
    m.d1 = 1.0;
    m.d2 = 4.0;
    m.source_law = SourceLaw::Logistic;
    m.source_rate = 1.0;
    cfg.dt = 0.1;
    cfg.t_end = 6.0;
    cfg.gamma0 = GaussianProfile{1.0, 0.0, 0.0, 1.0, 1.0};
    cfg.gauges = {{6.0, 0.0}, {0.0, 6.0}};
    cfg.output.snapshot_every = 10;
    return cfg;
}

/// Two-way coupled quadratic model with b != 0.
inline ScenarioConfig linear_coupled_scenario() {
    ScenarioConfig cfg = detail::unit_line(64, 1.0);
    cfg.name = "linear_coupled";
    cfg.model = ModelKind::Linear;
    auto& m = cfg.material;
    m.b = 0.5;
    m.c2 = 1.0;
    m.d1 = m.d2 = 0.01;
    cfg.dt = 0.5 / 64;
    cfg.t_end = 2.0;
    cfg.u0 = SineProfile{0.1, std::numbers::pi, 0.0};
    cfg.gamma0 = GaussianProfile{0.5, 0.5, 0.0, 0.1, 0.1};
    cfg.gauges = {{0.5, 0.0}};
    return cfg;
}

inline std::vector<ScenarioConfig> shipped_scenarios() {
    return {impact_k8_scenario(),     subthreshold_scenario(),   kpp_front_scenario(),
            standing_wave_scenario(), heat_kernel_scenario(),    clifton_pulse_scenario(),
            lateral_2d_scenario(),    linear_coupled_scenario(), quick_scenario()};
}

// ---------------------------------------------------------- convergence

struct ConvergenceStudy {
    std::string name;
    std::vector<double> h;
    std::vector<double> dt;
    std::vector<double> error;
    std::vector<double> order;  // between consecutive levels
    double min_order = std::numeric_limits<double>::quiet_NaN();
    double variance_slope = std::numeric_limits<double>::quiet_NaN();     // diffusion only
    double variance_expected = std::numeric_limits<double>::quiet_NaN();  // 2 d1
};

namespace detail {

inline void finish(ConvergenceStudy& s) {
    for (std::size_t k = 1; k < s.error.size(); ++k) {
        s.order.push_back(std::log(s.error[k - 1] / s.error[k]) / std::log(s.h[k - 1] / s.h[k]));
        s.min_order = k == 1 ? s.order.back() : std::min(s.min_order, s.order.back());
    }
}

inline double l2(const Grid& g, const Field& a, const Field& b) {
    double e = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) e += (a[c] - b[c]) * (a[c] - b[c]);
    return std::sqrt(e * g.cell_volume());
}

} // namespace detail

/// U error at t_end against A sin(kX + phase) cos(k c t); needs a sine U0,
/// zero v0, c3 = 0 and matching fixed ends.
inline double standing_wave_error(const ScenarioConfig& cfg, const RunResult& r) {
    const auto& s = std::get<SineProfile>(cfg.u0);
    const double c = std::sqrt(cfg.material.c1 / cfg.material.rho0);
    Field exact(cfg.grid.size());
    for (int j = 0; j < cfg.grid.ny; ++j)
        for (int i = 0; i < cfg.grid.nx; ++i)
            exact[cfg.grid.index(i, j)] =
                s.amplitude * std::sin(s.wavenumber * cfg.grid.x(i) + s.phase) * std::cos(s.wavenumber * c * r.state.time);
    return detail::l2(cfg.grid, r.state.U, exact);
}

inline ConvergenceStudy elastic_convergence(const ScenarioConfig& base = standing_wave_scenario(), int levels = 3) {
    ConvergenceStudy s;
    s.name = "elastic";
    for (int l = 0; l < levels; ++l) {
        const ScenarioConfig cfg = refine(base, 1 << l);
        RunOptions opt;
        opt.snapshot_every = 0;
        const RunResult r = run_scenario(cfg, opt);
        s.h.push_back(cfg.grid.dx);
        s.dt.push_back(cfg.dt);
        s.error.push_back(standing_wave_error(cfg, r));
    }
    detail::finish(s);
    return s;
}

/// Spatial variance sum (X - mean)^2 G / sum G of a 1D damage field.
inline double gaussian_variance(const Grid& g, const Field& gamma) {
    double m0 = 0.0, m1 = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        m0 += gamma[i];
        m1 += gamma[i] * g.x(i);
    }
    const double mean = m1 / m0;
    double v = 0.0;
    for (int i = 0; i < g.nx; ++i) v += gamma[i] * (g.x(i) - mean) * (g.x(i) - mean);
    return v / m0;
}

/// Damage error at t_end against the spreading Gaussian
/// A w / sigma exp(-(X - c)^2 / (2 sigma^2)), sigma^2 = w^2 + 2 d1 t, and the
/// variance growth rate on the finest level.
inline ConvergenceStudy diffusion_convergence(const ScenarioConfig& base = heat_kernel_scenario(), int levels = 3) {
    ConvergenceStudy s;
    s.name = "diffusion";
    const auto& gp = std::get<GaussianProfile>(base.gamma0);
    const double d1 = base.material.d1;
    s.variance_expected = 2.0 * d1;
    for (int l = 0; l < levels; ++l) {
        const ScenarioConfig cfg = refine(base, 1 << l);
        const RunResult r = run_scenario(cfg);
        const double t = r.state.time;
        const double sig = std::sqrt(gp.width_x * gp.width_x + 2.0 * d1 * t);
        Field exact(cfg.grid.size());
        for (int i = 0; i < cfg.grid.nx; ++i) {
            const double z = (cfg.grid.x(i) - gp.center_x) / sig;
            exact[i] = gp.amplitude * gp.width_x / sig * std::exp(-0.5 * z * z);
        }
        s.h.push_back(cfg.grid.dx);
        s.dt.push_back(cfg.dt);
        s.error.push_back(detail::l2(cfg.grid, r.state.gamma, exact));
        if (l + 1 == levels) {
            std::vector<double> tt, vv;
            for (const auto& snap : r.snapshots) {
                tt.push_back(snap.time);
                vv.push_back(gaussian_variance(cfg.grid, snap.gamma));
            }
            s.variance_slope = fit_line(tt, vv).slope;
        }
    }
    detail::finish(s);
    return s;
}

struct VariationalStudy {
    std::vector<int> nx;
    std::vector<double> dt;
    std::vector<double> max_U;
    std::vector<double> max_G;
    std::vector<double> ratio_U;  // previous level / this level
    std::vector<double> ratio_G;
    std::vector<LagrangeResidual> residuals;
    double nodal_mismatch = std::numeric_limits<double>::quiet_NaN();  // max relative, first level
};

/// Lagrange residuals under simultaneous halving of dx and dt, plus the nodal
/// generalized reduction on the coarsest level.
inline VariationalStudy variational_refinement(const ScenarioConfig& base = quick_scenario(), int levels = 3) {
    VariationalStudy s;
    for (int l = 0; l < levels; ++l) {
        const ScenarioConfig cfg = refine(base, 1 << l);
        const DiscreteTrajectory tr = record_trajectory(cfg);
        LagrangeResidual r = lagrange_residual(tr);
        if (l == 0) {
            const GeneralizedResidual gr = generalized_residual(reduce_to_generalized(tr, nodal_basis(cfg.grid)));
            double worst = 0.0;
            for (std::size_t n = 0; n < gr.norm.size(); ++n) {
                const double ref = std::max(r.norm_all[n], std::numeric_limits<double>::min());
                worst = std::max(worst, std::abs(gr.norm[n] - r.norm_all[n]) / ref);
            }
            s.nodal_mismatch = worst;
        }
        s.nx.push_back(cfg.grid.nx);
        s.dt.push_back(cfg.dt);
        s.max_U.push_back(r.max_norm_U);
        s.max_G.push_back(r.max_norm_G);
        if (l > 0) {
            s.ratio_U.push_back(s.max_U[l - 1] / s.max_U[l]);
            s.ratio_G.push_back(s.max_G[l - 1] / s.max_G[l]);
        }
        s.residuals.push_back(std::move(r));
    }
    return s;
}

} // namespace failwave
