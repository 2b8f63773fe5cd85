#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "constitutive.hpp"
#include "scenario.hpp"
#include "stencil.hpp"

namespace failwave {

inline AxisBcKind axis_kind(const ElasticBc& bc) {
    switch (bc.kind) {
    case ElasticBcKind::Fixed:
    case ElasticBcKind::Velocity: return AxisBcKind::Odd;
    case ElasticBcKind::Periodic: return AxisBcKind::Periodic;
    default: return AxisBcKind::Prescribed;
    }
}

inline AxisBcKind axis_kind(const DamageBc& bc) {
    switch (bc.kind) {
    case DamageBcKind::Dirichlet: return AxisBcKind::Odd;
    case DamageBcKind::ZeroFlux: return AxisBcKind::Even;
    case DamageBcKind::Periodic: return AxisBcKind::Periodic;
    default: return AxisBcKind::Prescribed;
    }
}

/// Face-centered flux values, one block of `per_line` faces per grid line.
struct FaceField {
    std::size_t per_line = 0;
    std::vector<double> values;
    double* line(std::size_t l) { return values.data() + l * per_line; }
    const double* line(std::size_t l) const { return values.data() + l * per_line; }
};

/// Internal forces of the damage field: A (local), B (face fluxes) and
/// Z = A - div B at cell centers.
struct InternalForces {
    Field A;
    FaceField Bx;
    FaceField By;
    Field Z;
};

/// Discrete operators of a scenario on its grid. Displacement is a function
/// of X only along each grid row; damage diffuses along both axes.
/// The free energy is a sum of face terms (strain, damage gradient) and cell
/// terms (local damage potential), and every force used by the solver is its
/// exact discrete variational derivative.
class Discretization {
public:
    explicit Discretization(const ScenarioConfig& cfg, int order = 2)
        : cfg_(cfg), grid_(cfg.grid), p_(cfg.material), model_(cfg.model),
          ex_(grid_.nx, grid_.dx, axis_kind(cfg.elastic_left), axis_kind(cfg.elastic_right), order),
          gx_(grid_.nx, grid_.dx, axis_kind(cfg.damage_left), axis_kind(cfg.damage_right), order) {
        if (grid_.dimension() == 2)
            gy_ = AxisOperator(grid_.ny, grid_.dy, axis_kind(cfg.damage_bottom), axis_kind(cfg.damage_top), order);
        face_slot_.assign(static_cast<std::size_t>(grid_.nx) + 1, -1);
        for (std::size_t q = 0; q < ex_.faces().size(); ++q) face_slot_[ex_.faces()[q].position] = static_cast<int>(q);
        if (cfg.elastic_periodic()) face_slot_[grid_.nx] = face_slot_[0];
    }

    const ScenarioConfig& config() const noexcept { return cfg_; }
    const Grid& grid() const noexcept { return grid_; }
    const MaterialParams& material() const noexcept { return p_; }
    ModelKind model() const noexcept { return model_; }
    const AxisOperator& elastic_axis() const noexcept { return ex_; }
    const AxisOperator& damage_x() const noexcept { return gx_; }
    const AxisOperator& damage_y() const noexcept { return gy_; }

    // ---------------------------------------------------------------- elastic

    double boundary_stress_left(double t) const { return cfg_.elastic_left.stress(t); }
    double boundary_stress_right(double t) const { return cfg_.elastic_right.stress(t); }

    /// Strain at every elastic face of every row.
    FaceField strains(const Field& U, double t) const {
        FaceField eps{ex_.faces().size(), {}};
        eps.values.resize(eps.per_line * grid_.ny);
        const double gl = cfg_.elastic_left.displacement(t);
        const double gr = cfg_.elastic_right.displacement(t);
        for (int j = 0; j < grid_.ny; ++j) {
            const double* row = U.data() + grid_.index(0, j);
            double* out = eps.line(j);
            for (std::size_t q = 0; q < eps.per_line; ++q) out[q] = ex_.gradient(ex_.faces()[q], row, 1, gl, gr);
        }
        return eps;
    }

    FaceField stresses(const FaceField& eps) const {
        FaceField s = eps;
        for (double& v : s.values) v = stress(v, 0.0, p_, model_);
        return s;
    }

    /// rho0 * acceleration = div S + rho0 r, with S at Gamma = 0. Without
    /// `external` only internal faces contribute (no traction, no body force).
    Field acceleration(const Field& U, double t, bool external = true) const {
        const FaceField S = stresses(strains(U, t));
        Field a(grid_.size(), 0.0);
        const double sl = boundary_stress_left(t), sr = boundary_stress_right(t);
        std::vector<double> line(S.per_line);
        for (int j = 0; j < grid_.ny; ++j) {
            double* arow = a.data() + grid_.index(0, j);
            std::copy(S.line(j), S.line(j) + S.per_line, line.begin());
            ex_.accumulate_divergence(line, arow, 1);
            if (external) {
                if (ex_.left() == AxisBcKind::Prescribed) arow[0] -= sl / grid_.dx;
                if (ex_.right() == AxisBcKind::Prescribed) arow[grid_.nx - 1] += sr / grid_.dx;
            }
            for (int i = 0; i < grid_.nx; ++i)
                arow[i] = arow[i] / p_.rho0 + (external ? cfg_.body_force.at(grid_.x(i)) : 0.0);
        }
        return a;
    }

    /// Stored elastic energy sum_f w_f W(eps_f) dV.
    double elastic_energy(const Field& U, double t) const {
        const FaceField eps = strains(U, t);
        double e = 0.0;
        const Gradient zero{};
        for (int j = 0; j < grid_.ny; ++j) {
            const double* row = eps.line(j);
            for (std::size_t q = 0; q < eps.per_line; ++q)
                e += ex_.faces()[q].weight * free_energy(model_, row[q], 0.0, zero, p_);
        }
        return e * grid_.cell_volume();
    }

    /// Strain that produces boundary stress s (inverts S(uX) by Newton).
    double strain_for_stress(double s) const {
        double e = s / p_.c1;
        if (model_ == ModelKind::Feng && p_.c3 != 0.0) {
            for (int it = 0; it < 50; ++it) {
                const double r = stress(e, 0.0, p_, model_) - s;
                const double k = tangent_modulus(e, p_, model_);
                if (k == 0.0) break;
                const double de = r / k;
                e -= de;
                if (std::abs(de) <= 1e-15 * std::max(1.0, std::abs(e))) break;
            }
        }
        return e;
    }

    /// Cell-centered average of the two adjacent face values of `faces`.
    /// Prescribed-end faces take `left_value` / `right_value`.
    Field cell_average(const FaceField& faces, double left_value, double right_value) const {
        Field out(grid_.size());
        for (int j = 0; j < grid_.ny; ++j) {
            const double* row = faces.line(j);
            for (int i = 0; i < grid_.nx; ++i) {
                const double lo = face_value(row, i, left_value, right_value);
                const double hi = face_value(row, i + 1, left_value, right_value);
                out[grid_.index(i, j)] = 0.5 * (lo + hi);
            }
        }
        return out;
    }

    Field cell_stress(const Field& U, double t) const {
        return cell_average(stresses(strains(U, t)), boundary_stress_left(t), boundary_stress_right(t));
    }

    Field cell_strain(const Field& U, double t) const {
        return cell_average(strains(U, t), strain_for_stress(boundary_stress_left(t)),
                            strain_for_stress(boundary_stress_right(t)));
    }

    /// Largest characteristic speed sqrt(dS/duX / rho0) over all faces.
    double max_wave_speed(const Field& U, double t) const {
        const FaceField eps = strains(U, t);
        double kmax = tangent_modulus(0.0, p_, model_);
        for (double e : eps.values) kmax = std::max(kmax, tangent_modulus(e, p_, model_));
        if (ex_.left() == AxisBcKind::Prescribed)
            kmax = std::max(kmax, tangent_modulus(strain_for_stress(boundary_stress_left(t)), p_, model_));
        if (ex_.right() == AxisBcKind::Prescribed)
            kmax = std::max(kmax, tangent_modulus(strain_for_stress(boundary_stress_right(t)), p_, model_));
        return std::sqrt(std::max(kmax, 0.0) / p_.rho0);
    }

    /// Stress on the boundary face at the given end (prescribed or computed).
    double end_face_stress(const FaceField& S, int row, bool right, double t) const {
        const int k = right ? grid_.nx : 0;
        const int slot = face_slot_[k];
        if (slot >= 0) return S.line(row)[slot];
        return right ? boundary_stress_right(t) : boundary_stress_left(t);
    }

    // ----------------------------------------------------------------- damage

    double kx() const noexcept { return p_.k1(); }
    double ky() const noexcept { return p_.k2(); }

    /// Local force A per cell: source-law term plus, in the Linear model, -b*eps.
    Field local_force(const Field& G, const Field& eps_cell) const {
        Field A(grid_.size());
        for (std::size_t c = 0; c < A.size(); ++c) {
            A[c] = damage_force(G[c], p_);
            if (model_ == ModelKind::Linear) A[c] -= p_.b * eps_cell[c];
        }
        return A;
    }

    /// B = -K grad Gamma on x faces (per row) and y faces (per column).
    void fluxes(const Field& G, FaceField& Bx, FaceField& By) const {
        Bx.per_line = gx_.faces().size();
        Bx.values.assign(Bx.per_line * grid_.ny, 0.0);
        const double l = cfg_.damage_left.value, r = cfg_.damage_right.value;
        for (int j = 0; j < grid_.ny; ++j) {
            const double* row = G.data() + grid_.index(0, j);
            double* out = Bx.line(j);
            for (std::size_t q = 0; q < Bx.per_line; ++q) out[q] = -kx() * gx_.gradient(gx_.faces()[q], row, 1, l, r);
        }
        By.per_line = 0;
        By.values.clear();
        if (grid_.dimension() == 2) {
            By.per_line = gy_.faces().size();
            By.values.assign(By.per_line * grid_.nx, 0.0);
            const double b = cfg_.damage_bottom.value, t = cfg_.damage_top.value;
            for (int i = 0; i < grid_.nx; ++i) {
                const double* col = G.data() + i;
                double* out = By.line(i);
                for (std::size_t q = 0; q < By.per_line; ++q)
                    out[q] = -ky() * gy_.gradient(gy_.faces()[q], col, grid_.nx, b, t);
            }
        }
    }

    /// div B, including prescribed boundary fluxes when `external`.
    Field divergence(const FaceField& Bx, const FaceField& By, bool external = true) const {
        Field div(grid_.size(), 0.0);
        std::vector<double> line(Bx.per_line);
        const double fl = -cfg_.damage_left.value;  // B_x on the left face from B.n = value
        const double fr = cfg_.damage_right.value;
        for (int j = 0; j < grid_.ny; ++j) {
            std::copy(Bx.line(j), Bx.line(j) + Bx.per_line, line.begin());
            double* row = div.data() + grid_.index(0, j);
            gx_.accumulate_divergence(line, row, 1);
            if (external && gx_.left() == AxisBcKind::Prescribed) row[0] -= fl / grid_.dx;
            if (external && gx_.right() == AxisBcKind::Prescribed) row[grid_.nx - 1] += fr / grid_.dx;
        }
        if (grid_.dimension() == 2) {
            line.assign(By.per_line, 0.0);
            const double fb = -cfg_.damage_bottom.value;
            const double ft = cfg_.damage_top.value;
            for (int i = 0; i < grid_.nx; ++i) {
                std::copy(By.line(i), By.line(i) + By.per_line, line.begin());
                double* col = div.data() + i;
                gy_.accumulate_divergence(line, col, grid_.nx);
                if (external && gy_.left() == AxisBcKind::Prescribed) col[0] -= fb / grid_.dy;
                if (external && gy_.right() == AxisBcKind::Prescribed)
                    col[static_cast<std::size_t>(grid_.ny - 1) * grid_.nx] += ft / grid_.dy;
            }
        }
        return div;
    }

    /// A, B and Z = A - div B for a damage field and cell strain.
    InternalForces internal_forces(const Field& G, const Field& eps_cell, bool external = true) const {
        InternalForces f;
        f.A = local_force(G, eps_cell);
        fluxes(G, f.Bx, f.By);
        const Field div = divergence(f.Bx, f.By, external);
        f.Z.resize(grid_.size());
        for (std::size_t c = 0; c < f.Z.size(); ++c) f.Z[c] = f.A[c] - div[c];
        return f;
    }

    /// Diffusive part -div B only (affine in G through Dirichlet data).
    Field diffusion(const Field& G) const {
        FaceField Bx, By;
        fluxes(G, Bx, By);
        Field d = divergence(Bx, By);
        for (double& v : d) v = -v;
        return d;
    }

    /// sum over faces of w K/2 (grad G)^2 dV.
    double gradient_energy(const Field& G) const {
        FaceField Bx, By;
        fluxes(G, Bx, By);
        double e = 0.0;
        if (kx() > 0.0)
            for (int j = 0; j < grid_.ny; ++j)
                for (std::size_t q = 0; q < Bx.per_line; ++q) {
                    const double b = Bx.line(j)[q];
                    e += gx_.faces()[q].weight * 0.5 * b * b / kx();
                }
        if (grid_.dimension() == 2 && ky() > 0.0)
            for (int i = 0; i < grid_.nx; ++i)
                for (std::size_t q = 0; q < By.per_line; ++q) {
                    const double b = By.line(i)[q];
                    e += gy_.faces()[q].weight * 0.5 * b * b / ky();
                }
        return e * grid_.cell_volume();
    }

    /// sum over cells of (phi(G) [+ b eps G]) dV.
    double local_energy(const Field& G, const Field& eps_cell) const {
        double e = 0.0;
        for (std::size_t c = 0; c < G.size(); ++c) {
            e += damage_potential(G[c], p_);
            if (model_ == ModelKind::Linear) e += p_.b * eps_cell[c] * G[c];
        }
        return e * grid_.cell_volume();
    }

    double damage_energy(const Field& G, const Field& eps_cell) const {
        return gradient_energy(G) + local_energy(G, eps_cell);
    }

    /// Entries of -div(K grad .) as (row, col, value); affine parts excluded.
    template <class Sink>
    void diffusion_matrix(Sink&& add) const {
        auto emit = [&](const AxisOperator& op, double K, std::size_t base, std::size_t stride) {
            for (const auto& f : op.faces()) {
                for (int a = 0; a < f.count; ++a)
                    for (int b = 0; b < f.count; ++b) {
                        const double v = -f.weight * K * f.terms[a].coef * f.terms[b].coef;
                        if (v != 0.0)
                            add(base + f.terms[a].cell * stride, base + f.terms[b].cell * stride, v);
                    }
            }
        };
        if (kx() > 0.0)
            for (int j = 0; j < grid_.ny; ++j) emit(gx_, kx(), grid_.index(0, j), 1);
        if (grid_.dimension() == 2 && ky() > 0.0)
            for (int i = 0; i < grid_.nx; ++i) emit(gy_, ky(), static_cast<std::size_t>(i), grid_.nx);
    }

    /// H = sum over boundary faces of (B.n) Gamma_dot dA. Only prescribed-flux
    /// faces contribute: Dirichlet faces have Gamma_dot = 0, zero-flux faces B.n = 0.
    double boundary_energy_release(const Field& gamma_dot) const {
        double h = 0.0;
        if (gx_.left() == AxisBcKind::Prescribed)
            for (int j = 0; j < grid_.ny; ++j) h += cfg_.damage_left.value * gamma_dot[grid_.index(0, j)] * grid_.dy;
        if (gx_.right() == AxisBcKind::Prescribed)
            for (int j = 0; j < grid_.ny; ++j)
                h += cfg_.damage_right.value * gamma_dot[grid_.index(grid_.nx - 1, j)] * grid_.dy;
        if (grid_.dimension() == 2) {
            if (gy_.left() == AxisBcKind::Prescribed)
                for (int i = 0; i < grid_.nx; ++i) h += cfg_.damage_bottom.value * gamma_dot[grid_.index(i, 0)] * grid_.dx;
            if (gy_.right() == AxisBcKind::Prescribed)
                for (int i = 0; i < grid_.nx; ++i)
                    h += cfg_.damage_top.value * gamma_dot[grid_.index(i, grid_.ny - 1)] * grid_.dx;
        }
        return h;
    }

private:
    double face_value(const double* row, int k, double left_value, double right_value) const {
        const int slot = face_slot_[k];
        if (slot >= 0) return row[slot];
        return k == 0 ? left_value : right_value;
    }

    ScenarioConfig cfg_;
    Grid grid_;
    MaterialParams p_;
    ModelKind model_;
    AxisOperator ex_;
    AxisOperator gx_;
    AxisOperator gy_;
    std::vector<int> face_slot_;
};

} // namespace failwave
