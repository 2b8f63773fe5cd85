#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "discretization.hpp"

namespace failwave {

/// Discrete fields at one time level. `active` marks cells whose damage
/// evolves; it only ever grows.
struct FieldState {
    double time = 0.0;
    Field U;
    Field v;
    Field gamma;
    std::vector<std::uint8_t> active;

    bool operator==(const FieldState&) const = default;
};

/// Marks cells whose |S| reaches sigma0. Already active cells stay active.
inline void update_activation(FieldState& s, const Field& cell_stress, double sigma0) {
    for (std::size_t c = 0; c < s.active.size(); ++c)
        if (std::abs(cell_stress[c]) >= sigma0) s.active[c] = 1;
}

inline FieldState initialize_state(const ScenarioConfig& cfg) {
    FieldState s;
    s.U = sample(cfg.u0, cfg.grid, "initial.U");
    s.v = sample(cfg.v0, cfg.grid, "initial.v");
    s.gamma = sample(cfg.gamma0, cfg.grid, "initial.gamma");
    s.active.assign(cfg.grid.size(), 0);
    for (std::size_t c = 0; c < s.gamma.size(); ++c)
        if (s.gamma[c] > 0.0) s.active[c] = 1;
    const Discretization disc(cfg);
    update_activation(s, disc.cell_stress(s.U, 0.0), cfg.material.sigma0);
    return s;
}

} // namespace failwave
