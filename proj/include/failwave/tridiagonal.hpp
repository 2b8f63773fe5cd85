#pragma once

#include <cstddef>
#include <vector>

namespace failwave {

/// Thomas algorithm for a[i] x[i-1] + b[i] x[i] + c[i] x[i+1] = d[i]
/// (a[0] and c[n-1] ignored). No pivoting; intended for the diagonally
/// dominant systems of implicit diffusion.
inline std::vector<double> solve_tridiagonal(const std::vector<double>& a, const std::vector<double>& b,
                                             const std::vector<double>& c, std::vector<double> d) {
    const std::size_t n = b.size();
    std::vector<double> cp(n);
    double beta = b[0];
    cp[0] = n > 1 ? c[0] / beta : 0.0;
    d[0] /= beta;
    for (std::size_t i = 1; i < n; ++i) {
        beta = b[i] - a[i] * cp[i - 1];
        cp[i] = i + 1 < n ? c[i] / beta : 0.0;
        d[i] = (d[i] - a[i] * d[i - 1]) / beta;
    }
    for (std::size_t i = n - 1; i-- > 0;) d[i] -= cp[i] * d[i + 1];
    return d;
}

/// Periodic variant: a[0] couples x[n-1] into row 0 and c[n-1] couples x[0]
/// into row n-1. Sherman-Morrison on top of two Thomas solves.
inline std::vector<double> solve_cyclic_tridiagonal(const std::vector<double>& a, const std::vector<double>& b,
                                                    const std::vector<double>& c, const std::vector<double>& d) {
    const std::size_t n = b.size();
    const double alpha = c[n - 1];
    const double beta = a[0];
    const double gamma = -b[0];
    std::vector<double> bb = b;
    bb[0] -= gamma;
    bb[n - 1] -= alpha * beta / gamma;
    std::vector<double> x = solve_tridiagonal(a, bb, c, d);
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = alpha;
    const std::vector<double> z = solve_tridiagonal(a, bb, c, u);
    const double fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
    return x;
}

} // namespace failwave
