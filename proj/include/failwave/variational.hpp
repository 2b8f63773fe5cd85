#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "solver.hpp"

namespace failwave {

/// Stored solver states at uniformly spaced times.
struct DiscreteTrajectory {
    ScenarioConfig cfg;
    std::vector<double> times;
    std::vector<FieldState> states;

    double dt() const { return times.size() >= 2 ? times[1] - times[0] : 0.0; }

    void validate() const {
        if (states.size() < 3 || times.size() != states.size()) throw TooFewLevels(states.size());
        const double h = dt();
        for (std::size_t n = 1; n < times.size(); ++n)
            if (std::abs((times[n] - times[n - 1]) - h) > 1e-9 * h)
                throw InvalidValue("trajectory.times", "must be uniformly spaced");
    }
};

/// Runs the scenario and keeps every time level.
inline DiscreteTrajectory record_trajectory(const ScenarioConfig& cfg) {
    DiscreteTrajectory tr;
    tr.cfg = cfg;
    RunOptions opt;
    opt.snapshot_every = 0;
    opt.on_step = [&](const FieldState& s) {
        tr.times.push_back(s.time);
        tr.states.push_back(s);
    };
    run(cfg, opt);
    return tr;
}

// --------------------------------------------------------------- functionals

struct Functionals {
    double psi = 0.0;
    double kinetic = 0.0;
    double dissipation = 0.0;
};

/// psi = sum rho0 Psi dV, K = sum rho0/2 v^2 dV and, when gamma_dot is given,
/// D = sum lambda/2 gamma_dot^2 dV.
inline Functionals total_functionals(const ScenarioConfig& cfg, const FieldState& s, const Field* gamma_dot = nullptr,
                                     int order = 2) {
    const Discretization d(cfg, order);
    const double dV = cfg.grid.cell_volume();
    Functionals f;
    const Field eps = cfg.model == ModelKind::Linear ? d.cell_strain(s.U, s.time) : Field(s.U.size(), 0.0);
    f.psi = d.elastic_energy(s.U, s.time) + d.damage_energy(s.gamma, eps);
    for (double v : s.v) f.kinetic += 0.5 * cfg.material.rho0 * v * v * dV;
    if (gamma_dot)
        for (double g : *gamma_dot) f.dissipation += 0.5 * cfg.material.lambda * g * g * dV;
    return f;
}

namespace detail {

inline Field centered_rate(const DiscreteTrajectory& tr, std::size_t n) {
    const std::size_t lo = n == 0 ? 0 : n - 1;
    const std::size_t hi = n + 1 == tr.states.size() ? n : n + 1;
    const double h = tr.times[hi] - tr.times[lo];
    Field r(tr.states[n].gamma.size());
    for (std::size_t c = 0; c < r.size(); ++c) r[c] = (tr.states[hi].gamma[c] - tr.states[lo].gamma[c]) / h;
    return r;
}

} // namespace detail

/// Functionals at one level, with Gamma_dot from centered differences
/// (one-sided at the ends).
inline Functionals total_functionals(const DiscreteTrajectory& tr, std::size_t level) {
    const Field gd = detail::centered_rate(tr, level);
    return total_functionals(tr.cfg, tr.states[level], &gd);
}

// ---------------------------------------------------------- Lagrange residual

/// Discrete L2 norm sqrt(sum f^2 dV), skipping `margin` cells next to every
/// non-periodic side.
inline double field_norm(const ScenarioConfig& cfg, const Field& f, int margin) {
    const Grid& g = cfg.grid;
    const int mx = cfg.elastic_periodic() && cfg.damage_left.kind == DamageBcKind::Periodic ? 0 : margin;
    const int my = g.dimension() == 1 || cfg.damage_bottom.kind == DamageBcKind::Periodic ? 0 : margin;
    double s = 0.0;
    for (int j = my; j < g.ny - my; ++j)
        for (int i = mx; i < g.nx - mx; ++i) s += f[g.index(i, j)] * f[g.index(i, j)];
    return std::sqrt(s * g.cell_volume());
}

struct LagrangeResidual {
    std::vector<double> times;   // interior levels
    std::vector<Field> resid_U;  // rho0 U_tt - div S - rho0 r
    std::vector<Field> resid_G;  // lambda Gamma_dot - Z on active cells
    std::vector<double> norm_U;  // boundary cells excluded
    std::vector<double> norm_G;
    std::vector<double> norm_all;  // sqrt(|rU|^2 + |rG|^2) over every cell
    double max_norm_U = 0.0;
    double max_norm_G = 0.0;
};

/// Cells excluded from residual norms next to non-periodic boundaries.
inline constexpr int kResidualMargin = 3;

/// Evaluates the Lagrange equations with dissipation on a trajectory. Time
/// derivatives are centered differences; spatial operators come from a
/// fourth-order reference discretization of the same free energy, so the
/// residual measures the consistency error of the solver.
inline LagrangeResidual lagrange_residual(const DiscreteTrajectory& tr, int order = 4) {
    tr.validate();
    const ScenarioConfig& cfg = tr.cfg;
    const Discretization ref(cfg, order);
    const auto& p = cfg.material;
    const double h = tr.dt();
    const bool linear = cfg.model == ModelKind::Linear;
    LagrangeResidual out;
    for (std::size_t n = 1; n + 1 < tr.states.size(); ++n) {
        const FieldState& a = tr.states[n - 1];
        const FieldState& s = tr.states[n];
        const FieldState& b = tr.states[n + 1];
        const Field acc = ref.acceleration(s.U, s.time);
        Field rU(s.U.size()), rG(s.U.size(), 0.0);
        for (std::size_t c = 0; c < rU.size(); ++c)
            rU[c] = p.rho0 * ((b.U[c] - 2.0 * s.U[c] + a.U[c]) / (h * h) - acc[c]);
        const Field eps = linear ? ref.cell_strain(s.U, s.time) : Field(s.U.size(), 0.0);
        const Field Z = ref.internal_forces(s.gamma, eps).Z;
        for (std::size_t c = 0; c < rG.size(); ++c)
            if (a.active[c]) rG[c] = p.lambda * (b.gamma[c] - a.gamma[c]) / (2.0 * h) - Z[c];
        out.times.push_back(s.time);
        out.norm_U.push_back(field_norm(cfg, rU, kResidualMargin));
        out.norm_G.push_back(field_norm(cfg, rG, kResidualMargin));
        const double au = field_norm(cfg, rU, 0), ag = field_norm(cfg, rG, 0);
        out.norm_all.push_back(std::sqrt(au * au + ag * ag));
        out.max_norm_U = std::max(out.max_norm_U, out.norm_U.back());
        out.max_norm_G = std::max(out.max_norm_G, out.norm_G.back());
        out.resid_U.push_back(std::move(rU));
        out.resid_G.push_back(std::move(rG));
    }
    return out;
}

/// Biot variation sum lambda Gamma_dot dGamma dV at every interior level.
inline std::vector<double> dissipation_variation(const DiscreteTrajectory& tr, const Field& delta_gamma) {
    tr.validate();
    if (delta_gamma.size() != tr.cfg.grid.size())
        throw ShapeMismatch("variation has " + std::to_string(delta_gamma.size()) + " entries, grid has " +
                            std::to_string(tr.cfg.grid.size()));
    const double dV = tr.cfg.grid.cell_volume();
    std::vector<double> out;
    for (std::size_t n = 1; n + 1 < tr.states.size(); ++n) {
        const Field gd = detail::centered_rate(tr, n);
        double s = 0.0;
        for (std::size_t c = 0; c < gd.size(); ++c) s += tr.cfg.material.lambda * gd[c] * delta_gamma[c] * dV;
        out.push_back(s);
    }
    return out;
}

/// Discrete integral of L = psi - K over the trajectory, with kinetic energy
/// on the intervals and the reference free energy at the levels.
inline double action_integral(const ScenarioConfig& cfg, const std::vector<FieldState>& states, double dt,
                              int order = 4) {
    const Discretization ref(cfg, order);
    const double dV = cfg.grid.cell_volume();
    double I = 0.0;
    for (const auto& s : states) {
        const Field eps = cfg.model == ModelKind::Linear ? ref.cell_strain(s.U, s.time) : Field(s.U.size(), 0.0);
        I += dt * (ref.elastic_energy(s.U, s.time) + ref.damage_energy(s.gamma, eps));
    }
    for (std::size_t n = 0; n + 1 < states.size(); ++n)
        for (std::size_t c = 0; c < states[n].U.size(); ++c) {
            const double v = (states[n + 1].U[c] - states[n].U[c]) / dt;
            I -= dt * 0.5 * cfg.material.rho0 * v * v * dV;
        }
    return I;
}

// -------------------------------------------------------- generalized system

/// k modes; coordinate m moves U along u_modes[m] and Gamma along g_modes[m].
struct Basis {
    std::vector<Field> u_modes;
    std::vector<Field> g_modes;
    std::size_t size() const noexcept { return u_modes.size(); }
};

/// One coordinate per cell value of U and of Gamma (k = 2N).
inline Basis nodal_basis(const Grid& g) {
    const std::size_t n = g.size();
    Basis b;
    for (std::size_t c = 0; c < 2 * n; ++c) {
        Field u(n, 0.0), v(n, 0.0);
        (c < n ? u[c] : v[c - n]) = 1.0;
        b.u_modes.push_back(std::move(u));
        b.g_modes.push_back(std::move(v));
    }
    return b;
}

namespace detail {

template <class F>
Field mode_of_x(const Grid& g, F&& f) {
    Field m(g.size());
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) m[g.index(i, j)] = f((g.x(i) - g.x0) / g.length_x());
    return m;
}

} // namespace detail

/// Fixed-end eigenmodes sin(m pi X/L), m = 1..u_count, for U, then zero-flux
/// modes cos(m pi X/L), m = 0..g_count-1, for Gamma.
inline Basis sine_basis(const Grid& g, int u_count, int g_count = 0) {
    Basis b;
    const Field zero(g.size(), 0.0);
    for (int m = 1; m <= u_count; ++m) {
        b.u_modes.push_back(detail::mode_of_x(g, [m](double s) { return std::sin(m * std::numbers::pi * s); }));
        b.g_modes.push_back(zero);
    }
    for (int m = 0; m < g_count; ++m) {
        b.u_modes.push_back(zero);
        b.g_modes.push_back(detail::mode_of_x(g, [m](double s) { return std::cos(m * std::numbers::pi * s); }));
    }
    return b;
}

/// Free-end modes cos(m pi X/L), m = 0..u_count-1, for U, and likewise for Gamma.
inline Basis cosine_basis(const Grid& g, int u_count, int g_count = 0) {
    Basis b;
    const Field zero(g.size(), 0.0);
    for (int m = 0; m < u_count; ++m) {
        b.u_modes.push_back(detail::mode_of_x(g, [m](double s) { return std::cos(m * std::numbers::pi * s); }));
        b.g_modes.push_back(zero);
    }
    for (int m = 0; m < g_count; ++m) {
        b.u_modes.push_back(zero);
        b.g_modes.push_back(detail::mode_of_x(g, [m](double s) { return std::cos(m * std::numbers::pi * s); }));
    }
    return b;
}

struct GeneralizedSystem {
    std::size_t k = 0;
    Basis basis;
    double dt = 0.0;
    double dV = 0.0;
    double condition = 1.0;              // of the Gram matrix
    std::vector<double> times;
    Eigen::MatrixXd gram;                // Phi^T Phi
    Eigen::MatrixXd mass;                // rho0 dV PhiU^T PhiU
    std::vector<Eigen::MatrixXd> damping;  // lambda dV PhiG^T diag(active) PhiG, per level
    std::vector<Eigen::VectorXd> q;      // coordinates per level
    std::vector<Eigen::VectorXd> grad_psi;  // d psi / dq per level
    std::vector<Eigen::VectorXd> Q;      // generalized forces per level
};

/// Projects the trajectory onto the basis (least squares) and assembles the
/// generalized mass, damping, free-energy gradient and forces. Q collects the
/// boundary traction, prescribed damage flux and body force.
inline GeneralizedSystem reduce_to_generalized(const DiscreteTrajectory& tr, const Basis& basis, int order = 4) {
    tr.validate();
    const ScenarioConfig& cfg = tr.cfg;
    const std::size_t n = cfg.grid.size();
    const std::size_t k = basis.size();
    if (k == 0 || basis.g_modes.size() != k) throw ShapeMismatch("basis needs matching U and Gamma modes");
    Eigen::MatrixXd PU(n, k), PG(n, k);
    for (std::size_t m = 0; m < k; ++m) {
        if (basis.u_modes[m].size() != n || basis.g_modes[m].size() != n)
            throw ShapeMismatch("basis mode " + std::to_string(m) + " does not match the grid");
        PU.col(m) = Eigen::Map<const Eigen::VectorXd>(basis.u_modes[m].data(), n);
        PG.col(m) = Eigen::Map<const Eigen::VectorXd>(basis.g_modes[m].data(), n);
    }

    GeneralizedSystem sys;
    sys.k = k;
    sys.basis = basis;
    sys.dt = tr.dt();
    sys.dV = cfg.grid.cell_volume();
    sys.times = tr.times;
    sys.gram = PU.transpose() * PU + PG.transpose() * PG;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sys.gram, Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues().minCoeff(), lmax = eig.eigenvalues().maxCoeff();
    sys.condition = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
    if (!(sys.condition <= 1e12)) throw SingularBasis(sys.condition);
    const Eigen::LDLT<Eigen::MatrixXd> G(sys.gram);

    const auto& p = cfg.material;
    sys.mass = p.rho0 * sys.dV * (PU.transpose() * PU);
    const Discretization ref(cfg, order);
    const bool linear = cfg.model == ModelKind::Linear;

    for (std::size_t lev = 0; lev < tr.states.size(); ++lev) {
        const FieldState& s = tr.states[lev];
        const auto& mask = tr.states[lev == 0 ? 0 : lev - 1].active;
        Eigen::Map<const Eigen::VectorXd> U(s.U.data(), n), Gm(s.gamma.data(), n);
        const Eigen::VectorXd q = G.solve(PU.transpose() * U + PG.transpose() * Gm);
        sys.q.push_back(q);

        Eigen::VectorXd act(n);
        for (std::size_t c = 0; c < n; ++c) act[c] = mask[c] ? 1.0 : 0.0;
        sys.damping.push_back(p.lambda * sys.dV * (PG.transpose() * act.asDiagonal() * PG));

        // fields rebuilt from q, so psi is a function of the coordinates
        const Eigen::VectorXd Uq = PU * q, Gq = PG * q;
        const Field uf(Uq.data(), Uq.data() + n), gf(Gq.data(), Gq.data() + n);
        const Field eps = linear ? ref.cell_strain(uf, s.time) : Field(n, 0.0);
        const Field a_int = ref.acceleration(uf, s.time, false);
        const Field a_ext = ref.acceleration(uf, s.time, true);
        const Field z_int = ref.internal_forces(gf, eps, false).Z;
        const Field z_ext = ref.internal_forces(gf, eps, true).Z;
        Eigen::VectorXd dpsi_u(n), dpsi_g(n), f_u(n), f_g(n);
        for (std::size_t c = 0; c < n; ++c) {
            dpsi_u[c] = -p.rho0 * a_int[c] * sys.dV;
            f_u[c] = p.rho0 * (a_ext[c] - a_int[c]) * sys.dV;
            dpsi_g[c] = -z_int[c] * sys.dV * act[c];
            f_g[c] = (z_ext[c] - z_int[c]) * sys.dV * act[c];
        }
        sys.grad_psi.push_back(PU.transpose() * dpsi_u + PG.transpose() * dpsi_g);
        sys.Q.push_back(PU.transpose() * f_u + PG.transpose() * f_g);
    }
    return sys;
}

struct GeneralizedResidual {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> R;
    std::vector<double> norm;  // sqrt(R^T Gram^-1 R / dV)
    double max_norm = 0.0;
};

/// d/dt(dK/dq_dot) - dK/dq + dD/dq_dot + dpsi/dq - Q at interior levels.
/// `with_forces = false` drops Q, for checking the boundary bookkeeping.
inline GeneralizedResidual generalized_residual(const GeneralizedSystem& sys, bool with_forces = true) {
    GeneralizedResidual out;
    const Eigen::LDLT<Eigen::MatrixXd> G(sys.gram);
    const double h = sys.dt;
    for (std::size_t n = 1; n + 1 < sys.q.size(); ++n) {
        const Eigen::VectorXd qdd = (sys.q[n + 1] - 2.0 * sys.q[n] + sys.q[n - 1]) / (h * h);
        const Eigen::VectorXd qd = (sys.q[n + 1] - sys.q[n - 1]) / (2.0 * h);
        Eigen::VectorXd R = sys.mass * qdd + sys.damping[n] * qd + sys.grad_psi[n];
        if (with_forces) R -= sys.Q[n];
        const double nr = std::sqrt(std::max(0.0, R.dot(G.solve(R)) / sys.dV));
        out.times.push_back(sys.times[n]);
        out.norm.push_back(nr);
        out.max_norm = std::max(out.max_norm, nr);
        out.R.push_back(std::move(R));
    }
    return out;
}

} // namespace failwave
