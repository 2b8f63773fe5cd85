#pragma once

#include <cmath>
#include <string_view>

#include "error.hpp"

namespace failwave {

/// Constitutive family: Feng's quartic elastic energy with uncoupled damage,
/// or the quadratic form with a strain/damage coupling coefficient b.
enum class ModelKind { Feng, Linear };

/// Local damage source. LinearDecay is the -c2*Gamma term; Logistic is a
/// KPP-type self-sustaining source r*lambda*Gamma*(1 - Gamma/Gamma_max).
enum class SourceLaw { LinearDecay, Logistic };

constexpr std::string_view to_string(ModelKind m) noexcept {
    return m == ModelKind::Feng ? "feng" : "linear";
}

constexpr std::string_view to_string(SourceLaw s) noexcept {
    return s == SourceLaw::LinearDecay ? "linear_decay" : "logistic";
}

/// Material constants, SI units. Gamma is dimensionless, so c2 and lambda
/// carry Pa and Pa*s; K = lambda*diag(d1, d2) then has units Pa*m^2.
/// In the Linear model a = c1 and c = c2.
struct MaterialParams {
    double rho0 = 1.0;
    double theta0 = 300.0;
    double c1 = 1.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double b = 0.0;
    double lambda = 1.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double sigma0 = 0.0;
    SourceLaw source_law = SourceLaw::LinearDecay;
    double source_rate = 0.0;
    double gamma_max = 1.0;

    double k1() const noexcept { return lambda * d1; }
    double k2() const noexcept { return lambda * d2; }

    void validate() const {
        if (!(rho0 > 0.0)) throw InvalidValue("material.rho0", "must be > 0");
        if (!(theta0 > 0.0)) throw InvalidValue("material.theta0", "must be > 0");
        if (!(c1 > 0.0)) throw InvalidValue("material.c1", "must be > 0");
        if (!(c2 >= 0.0)) throw InvalidValue("material.c2", "must be >= 0");
        if (!(lambda >= 0.0)) throw InvalidValue("material.lambda", "must be >= 0");
        if (!(d1 >= 0.0)) throw InvalidValue("material.d1", "must be >= 0");
        if (!(d2 >= 0.0)) throw InvalidValue("material.d2", "must be >= 0");
        if (!(sigma0 >= 0.0)) throw InvalidValue("material.sigma0", "must be >= 0");
        if (!std::isfinite(c3)) throw InvalidValue("material.c3", "must be finite");
        if (!std::isfinite(b)) throw InvalidValue("material.b", "must be finite");
        if (source_law == SourceLaw::Logistic) {
            if (!(source_rate >= 0.0)) throw InvalidValue("material.source_rate", "must be >= 0");
            if (!(gamma_max > 0.0)) throw InvalidValue("material.gamma_max", "must be > 0");
        }
    }

    bool operator==(const MaterialParams&) const = default;
};

} // namespace failwave
