#pragma once

#include <cmath>
#include <random>
#include <string>

#include "failwave/failwave.hpp"

namespace fwtest {

using namespace failwave;

/// Unit line with rho0 = c1 = lambda = 1 and fixed, zero-flux ends.
inline ScenarioConfig line(int nx = 16, double length = 1.0) {
    ScenarioConfig cfg;
    cfg.name = "test";
    cfg.grid = Grid::line(nx, length / nx);
    cfg.material.rho0 = 1.0;
    cfg.material.c1 = 1.0;
    cfg.material.lambda = 1.0;
    cfg.dt = 0.5 * cfg.grid.dx;
    cfg.t_end = 10 * cfg.dt;
    return cfg;
}

inline Field random_field(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Field f(n);
    for (double& x : f) x = u(rng);
    return f;
}

inline double max_abs(const Field& f) {
    double m = 0.0;
    for (double x : f) m = std::max(m, std::abs(x));
    return m;
}

inline double max_abs_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) m = std::max(m, std::abs(a[c] - b[c]));
    return m;
}

/// Runs `fn` and returns the kind of the failwave::Error it throws ("" if none).
template <class F>
std::string error_kind(F&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return "";
}

} // namespace fwtest
