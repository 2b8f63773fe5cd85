#pragma once

#include <array>
#include <cmath>

#include "material.hpp"

namespace failwave {

/// Damage gradient; the second component is the transverse (Y) derivative and
/// is zero on 1D grids.
using Gradient = std::array<double, 2>;

/// Pointwise constitutive quantities at one material point.
struct ConstitutiveEval {
    double psi = 0.0;      // rho0*Psi, J/m^3
    double S = 0.0;        // longitudinal first Piola-Kirchhoff stress, Pa
    double A = 0.0;        // -rho0 dPsi/dGamma, Pa
    Gradient B{};          // -rho0 dPsi/d(grad Gamma), Pa*m
    double Z = 0.0;        // A - div B (needs neighbours; filled by field routines)
    double D_val = 0.0;    // rho0*D, W/m^3
    double sdot_i = 0.0;   // rho0*s_dot^(i), W/(m^3 K)
};

/// rho0*Psi_F = c1/2 uX^2 + c2/2 G^2 + 1/2 K grad G . grad G + c3/4 uX^4, with K = lambda*diag(d1, d2).
inline double free_energy_feng(double ux, double gamma, const Gradient& grad, const MaterialParams& p) {
    const double ux2 = ux * ux;
    return 0.5 * p.c1 * ux2 + 0.5 * p.c2 * gamma * gamma + 0.5 * p.k1() * grad[0] * grad[0] +
           0.5 * p.k2() * grad[1] * grad[1] + 0.25 * p.c3 * ux2 * ux2;
}

/// Quadratic form a/2 uX^2 + b uX G + c/2 G^2 + 1/2 K grad G . grad G, with a = c1 and c = c2.
inline double free_energy_linear(double ux, double gamma, const Gradient& grad, const MaterialParams& p) {
    return 0.5 * p.c1 * ux * ux + p.b * ux * gamma + 0.5 * p.c2 * gamma * gamma +
           0.5 * p.k1() * grad[0] * grad[0] + 0.5 * p.k2() * grad[1] * grad[1];
}

inline double free_energy(ModelKind model, double ux, double gamma, const Gradient& grad, const MaterialParams& p) {
    return model == ModelKind::Feng ? free_energy_feng(ux, gamma, grad, p) : free_energy_linear(ux, gamma, grad, p);
}

/// S = rho0 dPsi/duX. The solver evaluates it at gamma = 0.
inline double stress(double ux, double gamma, const MaterialParams& p, ModelKind model) {
    if (model == ModelKind::Feng) return p.c1 * ux + p.c3 * ux * ux * ux;
    return p.c1 * ux + p.b * gamma;
}

/// dS/duX, used for the wave speed.
inline double tangent_modulus(double ux, const MaterialParams& p, ModelKind model) {
    if (model == ModelKind::Feng) return p.c1 + 3.0 * p.c3 * ux * ux;
    return p.c1;
}

/// A = -rho0 dPsi/dGamma for the closed-form models.
inline double internal_force(double ux, double gamma, const MaterialParams& p, ModelKind model) {
    if (model == ModelKind::Feng) return -p.c2 * gamma;
    return -(p.b * ux + p.c2 * gamma);
}

/// B = -rho0 dPsi/d(grad Gamma) = -K grad Gamma.
inline Gradient flux(const Gradient& grad, const MaterialParams& p) {
    return {-p.k1() * grad[0], -p.k2() * grad[1]};
}

/// rho0*D = lambda/2 Gamma_dot^2.
inline double dissipation(double gamma_dot, const MaterialParams& p) { return 0.5 * p.lambda * gamma_dot * gamma_dot; }

/// rho0*s_dot^(i) = lambda Gamma_dot^2 / Theta0 = 2 rho0 D / Theta0.
inline double entropy_production(double gamma_dot, const MaterialParams& p) {
    return p.lambda * gamma_dot * gamma_dot / p.theta0;
}

/// rho0 dD/dGamma_dot = lambda Gamma_dot.
inline double dissipative_force(double gamma_dot, const MaterialParams& p) { return p.lambda * gamma_dot; }

/// Evolution law Gamma_dot = Lambda^{-1} Z.
inline double evolution_rate(double Z, const MaterialParams& p) { return Z / p.lambda; }

/// Entropy flux -B Gamma_dot / Theta0.
inline Gradient entropy_flux(double gamma_dot, const Gradient& B, const MaterialParams& p) {
    return {-B[0] * gamma_dot / p.theta0, -B[1] * gamma_dot / p.theta0};
}

/// H on a 1D segment: (B Gamma_dot) n summed over both ends, n = -1 on the left.
inline double boundary_energy_release(double B_left, double gamma_dot_left, double B_right, double gamma_dot_right) {
    return B_right * gamma_dot_right - B_left * gamma_dot_left;
}

inline ConstitutiveEval evaluate(ModelKind model, double ux, double gamma, const Gradient& grad, double gamma_dot,
                                 const MaterialParams& p) {
    ConstitutiveEval e;
    e.psi = free_energy(model, ux, gamma, grad, p);
    e.S = stress(ux, gamma, p, model);
    e.A = internal_force(ux, gamma, p, model);
    e.B = flux(grad, p);
    e.D_val = dissipation(gamma_dot, p);
    e.sdot_i = entropy_production(gamma_dot, p);
    return e;
}

// Local damage potential used by the solver. LinearDecay is the c2/2 G^2 term
// of both models. Logistic replaces it with a cubic potential whose negative
// derivative is the KPP source r lambda G (1 - G/Gmax).

inline double damage_potential(double gamma, const MaterialParams& p) {
    if (p.source_law == SourceLaw::LinearDecay) return 0.5 * p.c2 * gamma * gamma;
    const double k = p.source_rate * p.lambda;
    return -k * (0.5 * gamma * gamma - gamma * gamma * gamma / (3.0 * p.gamma_max));
}

inline double damage_force(double gamma, const MaterialParams& p) {
    if (p.source_law == SourceLaw::LinearDecay) return -p.c2 * gamma;
    return p.source_rate * p.lambda * gamma * (1.0 - gamma / p.gamma_max);
}

/// Discrete gradient -(phi(b) - phi(a))/(b - a) of the local potential, in
/// closed form so that a == b is regular.
inline double damage_force_secant(double a, double b, const MaterialParams& p) {
    if (p.source_law == SourceLaw::LinearDecay) return -0.5 * p.c2 * (a + b);
    const double k = p.source_rate * p.lambda;
    return k * (0.5 * (a + b) - (a * a + a * b + b * b) / (3.0 * p.gamma_max));
}

/// d/db of damage_force_secant(a, b).
inline double damage_force_secant_slope(double a, double b, const MaterialParams& p) {
    if (p.source_law == SourceLaw::LinearDecay) return -0.5 * p.c2;
    const double k = p.source_rate * p.lambda;
    return k * (0.5 - (a + 2.0 * b) / (3.0 * p.gamma_max));
}

} // namespace failwave
