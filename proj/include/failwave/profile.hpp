#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "grid.hpp"

namespace failwave {

// Initial-data descriptors. Each is sampled at cell centers.

struct ZeroProfile {
    bool operator==(const ZeroProfile&) const = default;
};

struct ConstantProfile {
    double value = 0.0;
    bool operator==(const ConstantProfile&) const = default;
};

/// amplitude * exp(-(X-cx)^2/(2 wx^2)) [* exp(-(Y-cy)^2/(2 wy^2)) in 2D]
struct GaussianProfile {
    double amplitude = 1.0;
    double center_x = 0.0;
    double center_y = 0.0;
    double width_x = 1.0;
    double width_y = 1.0;
    bool operator==(const GaussianProfile&) const = default;
};

/// amplitude * sin(wavenumber * X + phase), constant along Y.
struct SineProfile {
    double amplitude = 1.0;
    double wavenumber = std::numbers::pi;
    double phase = 0.0;
    bool operator==(const SineProfile&) const = default;
};

/// value for X < position, 0 beyond; a positive width smooths the edge with tanh.
struct StepProfile {
    double value = 1.0;
    double position = 0.0;
    double width = 0.0;
    bool operator==(const StepProfile&) const = default;
};

/// Tabulated cell values in storage order; length must match the grid.
struct TableProfile {
    std::vector<double> values;
    bool operator==(const TableProfile&) const = default;
};

using Profile = std::variant<ZeroProfile, ConstantProfile, GaussianProfile, SineProfile, StepProfile, TableProfile>;

inline double evaluate(const Profile& p, double x, double y, int dim) {
    return std::visit(
        [&](const auto& q) -> double {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, ZeroProfile>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, ConstantProfile>) {
                return q.value;
            } else if constexpr (std::is_same_v<T, GaussianProfile>) {
                const double ax = (x - q.center_x) / q.width_x;
                double e = 0.5 * ax * ax;
                if (dim == 2) {
                    const double ay = (y - q.center_y) / q.width_y;
                    e += 0.5 * ay * ay;
                }
                return q.amplitude * std::exp(-e);
            } else if constexpr (std::is_same_v<T, SineProfile>) {
                return q.amplitude * std::sin(q.wavenumber * x + q.phase);
            } else if constexpr (std::is_same_v<T, StepProfile>) {
                if (q.width > 0.0) return q.value * 0.5 * (1.0 - std::tanh((x - q.position) / q.width));
                return x < q.position ? q.value : 0.0;
            } else {
                return 0.0; // tables are handled by sample()
            }
        },
        p);
}

/// Samples a profile at the cell centers of `grid`. `what` names the field in
/// the ShapeMismatch message.
inline Field sample(const Profile& p, const Grid& grid, const std::string& what) {
    if (const auto* table = std::get_if<TableProfile>(&p)) {
        if (table->values.size() != grid.size())
            throw ShapeMismatch(what + " table has " + std::to_string(table->values.size()) +
                                " entries, grid has " + std::to_string(grid.size()));
        return table->values;
    }
    Field f(grid.size());
    const int dim = grid.dimension();
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) f[grid.index(i, j)] = evaluate(p, grid.x(i), grid.y(j), dim);
    return f;
}

} // namespace failwave
