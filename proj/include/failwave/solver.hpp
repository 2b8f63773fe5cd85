#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "discretization.hpp"
#include "field_state.hpp"
#include "tridiagonal.hpp"

namespace failwave {

/// Cumulative energy bookkeeping, all in J (per unit cross-section in 1D).
struct EnergyRecord {
    double kinetic = 0.0;     // leapfrog kinetic energy
    double elastic = 0.0;     // stored strain energy
    double damage = 0.0;      // damage part of the free energy (incl. b eps Gamma)
    double dissipated = 0.0;  // integral of sum Z Gamma_dot dV
    double work = 0.0;        // boundary tractions, moving walls, body force
    double coupling = 0.0;    // b Gamma d(eps) exchanged during elastic steps
    double release = 0.0;     // integral of H dt through prescribed-flux faces
    double entropy = 0.0;     // integral of sum Z Gamma_dot / Theta0 dV

    double free_energy() const noexcept { return elastic + damage; }
    double total() const noexcept { return kinetic + elastic + damage; }
};

struct StepReport {
    long step = 0;
    double time = 0.0;
    double dt_used = 0.0;
    double max_cfl = 0.0;
    double max_diff = 0.0;
    double min_Z_gammadot = 0.0;
    double max_abs_Z_gammadot = 0.0;
    int newton_iterations = 0;
    EnergyRecord energy;
    double imbalance = 0.0;  // E - E0 + dissipated - work - coupling + release
};

struct GaugeTrace {
    Gauge position;
    std::vector<double> t;
    std::vector<double> S;
    std::vector<double> gamma;
    std::vector<double> proxy;  // Gamma / Gamma_max; see README
};

struct Snapshot {
    long step = 0;
    double time = 0.0;
    Field U, v, gamma, S, Z;
};

struct RunOptions {
    int snapshot_every = -1;  // < 0: use the scenario's cadence
    bool check_admissibility = true;
    /// Called with the initial state and after every step.
    std::function<void(const FieldState&)> on_step;
    /// Called with the state at which a step error was raised, before rethrow.
    std::function<void(const FieldState&)> on_failure;
};

struct RunResult {
    FieldState state;
    std::vector<StepReport> reports;
    std::vector<GaugeTrace> gauges;
    std::vector<Snapshot> snapshots;
    EnergyRecord initial;
    double energy_scale = 0.0;      // largest magnitude of any budget term
    double max_imbalance = 0.0;     // largest |imbalance| over steps
    double min_Z_gammadot = 0.0;    // over all cells and steps
    double peak_Z_gammadot = 0.0;   // max |Z Gamma_dot| over all cells and steps
    bool entropy_monotone = true;

    double closure() const noexcept { return energy_scale > 0.0 ? max_imbalance / energy_scale : 0.0; }
};

// ------------------------------------------------------------------ elastic

/// Velocity Verlet for rho0 U_tt = div S + rho0 r. Keeps the acceleration
/// between steps so each step costs one force evaluation.
class ElasticIntegrator {
public:
    explicit ElasticIntegrator(const Discretization& d) : d_(d) {}

    struct Info {
        double cfl = 0.0;
        double work = 0.0;
    };

    const Field& acceleration() const noexcept { return a_; }

    void prime(const FieldState& s) {
        a_ = d_.acceleration(s.U, s.time);
        primed_ = true;
    }

    Info step(FieldState& s, double dt) {
        const Grid& g = d_.grid();
        Info info;
        const double c = d_.max_wave_speed(s.U, s.time);
        info.cfl = c * dt / g.dx;
        if (info.cfl > 1.0 + 1e-12) throw CflViolation(dt, g.dx, c);
        if (!primed_) prime(s);

        const double t0 = s.time, t1 = s.time + dt;
        const double p0 = wall_power(s.U, t0);
        Field vh(s.v.size());
        for (std::size_t c2 = 0; c2 < vh.size(); ++c2) {
            vh[c2] = s.v[c2] + 0.5 * dt * a_[c2];
            s.U[c2] += dt * vh[c2];
        }
        s.time = t1;
        a_ = d_.acceleration(s.U, t1);
        for (std::size_t c2 = 0; c2 < vh.size(); ++c2) s.v[c2] = vh[c2] + 0.5 * dt * a_[c2];

        // external forces on cells: body force and prescribed tractions
        const double dV = g.cell_volume();
        const double rho0 = d_.material().rho0;
        double w = 0.0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) w += vh[g.index(i, j)] * rho0 * d_.config().body_force.at(g.x(i)) * dV;
        w *= dt;
        if (d_.elastic_axis().left() == AxisBcKind::Prescribed) {
            const double f = -0.5 * (d_.boundary_stress_left(t0) + d_.boundary_stress_left(t1)) * g.dy;
            for (int j = 0; j < g.ny; ++j) w += dt * vh[g.index(0, j)] * f;
        }
        if (d_.elastic_axis().right() == AxisBcKind::Prescribed) {
            const double f = 0.5 * (d_.boundary_stress_right(t0) + d_.boundary_stress_right(t1)) * g.dy;
            for (int j = 0; j < g.ny; ++j) w += dt * vh[g.index(g.nx - 1, j)] * f;
        }
        info.work = w + 0.5 * dt * (p0 + wall_power(s.U, t1));
        return info;
    }

    /// Leapfrog kinetic energy sum rho0/2 (v^2 - (dt/2)^2 a^2) dV; with the
    /// strain energy it is conserved exactly by the scheme in the linear case.
    double kinetic_energy(const FieldState& s, double dt) const {
        double k = 0.0;
        const double h = 0.5 * dt;
        for (std::size_t c = 0; c < s.v.size(); ++c) {
            const double a = primed_ ? a_[c] : 0.0;
            k += s.v[c] * s.v[c] - h * h * a * a;
        }
        return 0.5 * d_.material().rho0 * k * d_.grid().cell_volume();
    }

private:
    /// Power delivered by moving displacement-controlled walls.
    double wall_power(const Field& U, double t) const {
        const auto& cfg = d_.config();
        const double rl = cfg.elastic_left.is_dirichlet() ? cfg.elastic_left.displacement_rate() : 0.0;
        const double rr = cfg.elastic_right.is_dirichlet() ? cfg.elastic_right.displacement_rate() : 0.0;
        if (rl == 0.0 && rr == 0.0) return 0.0;
        const FaceField S = d_.stresses(d_.strains(U, t));
        const Grid& g = d_.grid();
        double p = 0.0;
        for (int j = 0; j < g.ny; ++j)
            p += (-d_.end_face_stress(S, j, false, t) * rl + d_.end_face_stress(S, j, true, t) * rr) * g.dy;
        return p;
    }

    const Discretization& d_;
    Field a_;
    bool primed_ = false;
};

// ------------------------------------------------------------------- damage

/// Advances lambda dGamma/dt = Z on active cells.
///
/// The Crank-Nicolson variant uses a discrete gradient: diffusion at the
/// midpoint and the secant of the local potential, so that
/// sum Z (Gamma^{n+1} - Gamma^n) dV equals the drop in free energy exactly
/// and Z Gamma_dot = lambda Gamma_dot^2 >= 0 up to the Newton residual.
class DamageIntegrator {
public:
    explicit DamageIntegrator(const Discretization& d) : d_(d) {
        d_.diffusion_matrix([&](std::size_t r, std::size_t c, double v) { L_.push_back({r, c, v}); });
    }

    struct Info {
        double max_diff = 0.0;
        double min_z_gdot = 0.0;
        double max_abs_z_gdot = 0.0;
        double dissipated = 0.0;  // sum Z (b - a) dV
        double released = 0.0;    // H dt
        int iterations = 0;
    };

    /// `eps_cell` is the cell strain entering the Linear-model coupling.
    Info step(FieldState& s, const Field& eps_cell, double dt) {
        const auto& p = d_.material();
        if (p.lambda == 0.0) throw SingularLambda();
        const Grid& g = d_.grid();
        Info info;
        info.max_diff = dt * (p.d1 / (g.dx * g.dx) + (g.dimension() == 2 ? p.d2 / (g.dy * g.dy) : 0.0));

        const Field a = s.gamma;
        Field coupling(a.size(), 0.0);
        if (d_.model() == ModelKind::Linear)
            for (std::size_t c = 0; c < a.size(); ++c) coupling[c] = -p.b * eps_cell[c];

        Field b = a;
        Field Z(a.size());
        if (d_.config().damage_scheme == DamageScheme::Explicit) {
            if (info.max_diff > 0.5) throw DiffusionStabilityViolation(info.max_diff);
            const Field diff = d_.diffusion(a);
            for (std::size_t c = 0; c < a.size(); ++c) {
                if (!s.active[c]) continue;
                Z[c] = diff[c] + damage_force(a[c], p) + coupling[c];
                b[c] = a[c] + dt * Z[c] / p.lambda;
            }
            info.iterations = 1;
        } else {
            info.iterations = newton(s, a, b, coupling, dt);
            secant_force(a, b, coupling, Z);
        }

        const double dV = g.cell_volume();
        info.min_z_gdot = std::numeric_limits<double>::infinity();
        Field gdot(a.size(), 0.0);
        for (std::size_t c = 0; c < a.size(); ++c) {
            if (!s.active[c]) {
                info.min_z_gdot = std::min(info.min_z_gdot, 0.0);
                continue;
            }
            gdot[c] = (b[c] - a[c]) / dt;
            const double zg = Z[c] * gdot[c];
            info.min_z_gdot = std::min(info.min_z_gdot, zg);
            info.max_abs_z_gdot = std::max(info.max_abs_z_gdot, std::abs(zg));
            info.dissipated += Z[c] * (b[c] - a[c]) * dV;
        }
        if (a.empty()) info.min_z_gdot = 0.0;
        info.released = d_.boundary_energy_release(gdot) * dt;

        if (p.source_law == SourceLaw::Logistic) {
            const double floor = -1e-10 * p.gamma_max;
            for (double& x : b) {
                if (x >= 0.0) continue;
                if (x < floor) throw PositivityViolation(x);
                x = 0.0;
            }
        }
        s.gamma = std::move(b);
        return info;
    }

private:
    struct Triplet {
        std::size_t r, c;
        double v;
    };

    void secant_force(const Field& a, const Field& b, const Field& coupling, Field& Z) const {
        Field m(a.size());
        for (std::size_t c = 0; c < a.size(); ++c) m[c] = 0.5 * (a[c] + b[c]);
        const Field diff = d_.diffusion(m);
        for (std::size_t c = 0; c < a.size(); ++c)
            Z[c] = diff[c] + damage_force_secant(a[c], b[c], d_.material()) + coupling[c];
    }

    int newton(const FieldState& s, const Field& a, Field& b, const Field& coupling, double dt) {
        const auto& p = d_.material();
        const std::size_t n = a.size();
        const double mass = p.lambda / dt;
        Field Z(n), R(n);
        double last = std::numeric_limits<double>::infinity();
        int it = 0;
        for (; it < 30; ++it) {
            secant_force(a, b, coupling, Z);
            for (std::size_t c = 0; c < n; ++c) R[c] = s.active[c] ? mass * (b[c] - a[c]) - Z[c] : 0.0;
            Field delta = solve(s, a, b, R, mass);
            double step = 0.0, scale = 0.0;
            for (std::size_t c = 0; c < n; ++c) {
                b[c] -= delta[c];
                step = std::max(step, std::abs(delta[c]));
                scale = std::max(scale, std::abs(b[c]));
            }
            // stop once the update is at roundoff or has stopped shrinking
            if (step <= 1e-15 * std::max(scale, 1e-300) || (it > 0 && step >= last)) {
                ++it;
                break;
            }
            last = step;
        }
        return it;
    }

    /// Solves J delta = R with J = mass - L/2 - diag(secant slope) on active
    /// rows and identity on frozen rows.
    Field solve(const FieldState& s, const Field& a, const Field& b, const Field& R, double mass) const {
        const Grid& g = d_.grid();
        const std::size_t n = a.size();
        Field diag(n);
        for (std::size_t c = 0; c < n; ++c)
            diag[c] = s.active[c] ? mass - damage_force_secant_slope(a[c], b[c], d_.material()) : 1.0;

        if (g.dimension() == 1) {
            std::vector<double> lo(n, 0.0), up(n, 0.0), md = diag;
            for (const auto& t : L_) {
                if (!s.active[t.r] || !s.active[t.c]) continue;
                const double v = -0.5 * t.v;
                if (t.r == t.c) md[t.r] += v;
                else if (t.c + 1 == t.r || (t.r == 0 && t.c == n - 1)) lo[t.r] += v;
                else up[t.r] += v;
            }
            if (lo[0] != 0.0 || up[n - 1] != 0.0) return solve_cyclic_tridiagonal(lo, md, up, R);
            return solve_tridiagonal(lo, md, up, R);
        }

        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(L_.size() + n);
        for (std::size_t c = 0; c < n; ++c) trip.emplace_back(static_cast<int>(c), static_cast<int>(c), diag[c]);
        for (const auto& t : L_)
            if (s.active[t.r] && s.active[t.c])
                trip.emplace_back(static_cast<int>(t.r), static_cast<int>(t.c), -0.5 * t.v);
        Eigen::SparseMatrix<double> J(static_cast<int>(n), static_cast<int>(n));
        J.setFromTriplets(trip.begin(), trip.end());
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(J);
        Eigen::Map<const Eigen::VectorXd> rhs(R.data(), static_cast<Eigen::Index>(n));
        Eigen::VectorXd x = ldlt.solve(rhs);
        return Field(x.data(), x.data() + n);
    }

    const Discretization& d_;
    std::vector<Triplet> L_;
};

// ---------------------------------------------------------------- free steps

/// One velocity-Verlet step of (U, v).
inline ElasticIntegrator::Info step_elastic(FieldState& s, const ScenarioConfig& cfg, double dt = 0.0) {
    const Discretization d(cfg);
    ElasticIntegrator e(d);
    return e.step(s, dt > 0.0 ? dt : cfg.dt);
}

/// One damage step using the current U for the Linear-model coupling.
inline DamageIntegrator::Info step_damage(FieldState& s, const ScenarioConfig& cfg, double dt = 0.0) {
    const Discretization d(cfg);
    DamageIntegrator di(d);
    const Field eps = cfg.model == ModelKind::Linear ? d.cell_strain(s.U, s.time) : Field(s.U.size(), 0.0);
    const double h = dt > 0.0 ? dt : cfg.dt;
    auto info = di.step(s, eps, h);
    return info;
}

// ---------------------------------------------------------------------- run

namespace detail {

inline double interpolate(const Grid& g, const Field& f, const Gauge& p) {
    auto bracket = [](double s, int n, int& i0, double& w) {
        s = std::clamp(s, 0.0, static_cast<double>(n - 1));
        i0 = std::min(static_cast<int>(std::floor(s)), n - 2);
        w = s - i0;
    };
    int i0, j0 = 0;
    double wx, wy = 0.0;
    bracket((p.x - g.x0) / g.dx - 0.5, g.nx, i0, wx);
    if (g.dimension() == 1) return (1.0 - wx) * f[g.index(i0)] + wx * f[g.index(i0 + 1)];
    bracket((p.y - g.y0) / g.dy - 0.5, g.ny, j0, wy);
    return (1.0 - wy) * ((1.0 - wx) * f[g.index(i0, j0)] + wx * f[g.index(i0 + 1, j0)]) +
           wy * ((1.0 - wx) * f[g.index(i0, j0 + 1)] + wx * f[g.index(i0 + 1, j0 + 1)]);
}

inline RunResult run_impl(const ScenarioConfig& cfg, const RunOptions& opt, bool clifton) {
    const Discretization d(cfg);
    const Grid& g = d.grid();
    const auto& p = cfg.material;
    const bool linear = cfg.model == ModelKind::Linear;
    if (!clifton && p.lambda == 0.0) throw SingularLambda();

    RunResult res;
    FieldState& s = res.state;
    s = initialize_state(cfg);

    ElasticIntegrator el(d);
    DamageIntegrator dm(d);
    el.prime(s);

    const double dV = g.cell_volume();
    const Field zero(g.size(), 0.0);
    Field eps = linear ? d.cell_strain(s.U, 0.0) : zero;
    Field S = d.cell_stress(s.U, 0.0);

    auto energies = [&](EnergyRecord e, double dt) {
        e.kinetic = el.kinetic_energy(s, dt);
        e.elastic = d.elastic_energy(s.U, s.time);
        e.damage = clifton ? 0.0 : d.damage_energy(s.gamma, eps);
        return e;
    };

    res.initial = energies({}, cfg.dt);
    EnergyRecord cur = res.initial;
    const double e0 = res.initial.total();
    auto track_scale = [&](const EnergyRecord& e) {
        for (double x : {e.kinetic, e.elastic, e.damage, e.dissipated, e.work, e.coupling, e.release})
            res.energy_scale = std::max(res.energy_scale, std::abs(x));
    };
    track_scale(cur);

    for (const auto& gp : cfg.gauges) res.gauges.push_back({gp, {}, {}, {}, {}});
    auto record_gauges = [&] {
        for (auto& tr : res.gauges) {
            tr.t.push_back(s.time);
            tr.S.push_back(interpolate(g, S, tr.position));
            const double gam = interpolate(g, s.gamma, tr.position);
            tr.gamma.push_back(gam);
            tr.proxy.push_back(gam / p.gamma_max);
        }
    };
    const int every = opt.snapshot_every >= 0 ? opt.snapshot_every : cfg.output.snapshot_every;
    auto snapshot = [&](long step) {
        Snapshot snap{step, s.time, s.U, s.v, s.gamma, S, {}};
        snap.Z = clifton ? zero : d.internal_forces(s.gamma, eps).Z;
        res.snapshots.push_back(std::move(snap));
    };

    record_gauges();
    if (every > 0) snapshot(0);
    if (opt.on_step) opt.on_step(s);

    const long n = cfg.steps();
    res.reports.reserve(static_cast<std::size_t>(n));
    res.peak_Z_gammadot = 0.0;
    res.min_Z_gammadot = 0.0;
    try {
        for (long k = 0; k < n; ++k) {
            const double dt = std::min(cfg.dt, cfg.t_end - k * cfg.dt);
            StepReport rep;
            rep.step = k + 1;
            rep.dt_used = dt;

            const auto ei = el.step(s, dt);
            s.time = (k + 1 == n) ? cfg.t_end : (k + 1) * cfg.dt;
            rep.max_cfl = ei.cfl;
            cur.work += ei.work;
            S = d.cell_stress(s.U, s.time);
            update_activation(s, S, p.sigma0);
            if (linear) {
                const Field eps_new = d.cell_strain(s.U, s.time);
                double cw = 0.0;
                for (std::size_t c = 0; c < eps.size(); ++c) cw += p.b * s.gamma[c] * (eps_new[c] - eps[c]);
                cur.coupling += cw * dV;
                eps = eps_new;
            }

            if (!clifton) {
                const auto di = dm.step(s, eps, dt);
                rep.max_diff = di.max_diff;
                rep.min_Z_gammadot = di.min_z_gdot;
                rep.max_abs_Z_gammadot = di.max_abs_z_gdot;
                rep.newton_iterations = di.iterations;
                cur.dissipated += di.dissipated;
                cur.release += di.released;
                const double ds = di.dissipated / p.theta0;
                if (ds < 0.0) res.entropy_monotone = false;
                cur.entropy += ds;
                if (opt.check_admissibility && di.min_z_gdot < -1e-12 * di.max_abs_z_gdot)
                    throw AdmissibilityViolation(s.time, di.min_z_gdot, 1e-12 * di.max_abs_z_gdot);
                res.min_Z_gammadot = std::min(res.min_Z_gammadot, di.min_z_gdot);
                res.peak_Z_gammadot = std::max(res.peak_Z_gammadot, di.max_abs_z_gdot);
            }

            cur = energies(cur, dt);
            rep.time = s.time;
            rep.energy = cur;
            rep.imbalance = cur.total() - e0 + cur.dissipated - cur.work - cur.coupling + cur.release;
            track_scale(cur);
            res.max_imbalance = std::max(res.max_imbalance, std::abs(rep.imbalance));
            res.reports.push_back(rep);

            record_gauges();
            if (every > 0 && (k + 1) % every == 0) snapshot(k + 1);
            if (opt.on_step) opt.on_step(s);
        }
    } catch (const Error&) {
        if (opt.on_failure) opt.on_failure(s);
        throw;
    }
    return res;
}

} // namespace detail

/// Lie-split run: elastic step, activation update, damage step.
inline RunResult run(const ScenarioConfig& cfg, const RunOptions& opt = {}) { return detail::run_impl(cfg, opt, false); }

/// Conservative limit: lambda = 0 with no damage stiffness or coupling, so
/// only the (uX, v) conservation system is integrated and Gamma is inert.
/// K = lambda D and the logistic source r lambda G (1 - G/Gmax) vanish with lambda.
inline RunResult run_clifton(const ScenarioConfig& cfg, const RunOptions& opt = {}) {
    const auto& p = cfg.material;
    if (p.lambda != 0.0) throw ConfigConflict("clifton mode requires lambda = 0");
    if (p.c2 != 0.0) throw ConfigConflict("clifton mode requires c2 = 0");
    if (p.b != 0.0) throw ConfigConflict("clifton mode requires b = 0");
    return detail::run_impl(cfg, opt, true);
}

} // namespace failwave
