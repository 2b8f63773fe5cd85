#pragma once

#include <cstddef>
#include <vector>

#include "error.hpp"

namespace failwave {

/// Cell-centered field storage, row-major with X fastest: index = j*nx + i.
using Field = std::vector<double>;

/// Structured cell-centered grid in material coordinates. One-dimensional
/// grids carry ny == 1 and dy == 1 (unit cross-section), so cell volumes and
/// face areas are uniform across both cases.
struct Grid {
    int nx = 3;
    int ny = 1;
    double dx = 1.0;
    double dy = 1.0;
    double x0 = 0.0;
    double y0 = 0.0;

    static Grid line(int nx, double dx, double x0 = 0.0) {
        Grid g{nx, 1, dx, 1.0, x0, 0.0};
        g.validate();
        return g;
    }

    static Grid plane(int nx, int ny, double dx, double dy, double x0 = 0.0, double y0 = 0.0) {
        Grid g{nx, ny, dx, dy, x0, y0};
        g.validate();
        return g;
    }

    void validate() const {
        if (nx < 3) throw InvalidValue("grid.nx", "must be >= 3");
        if (!(dx > 0.0)) throw InvalidValue("grid.dx", "must be > 0");
        if (ny != 1) {
            if (ny < 3) throw InvalidValue("grid.ny", "must be >= 3");
            if (!(dy > 0.0)) throw InvalidValue("grid.dy", "must be > 0");
        }
    }

    int dimension() const noexcept { return ny == 1 ? 1 : 2; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    std::size_t index(int i, int j = 0) const noexcept {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
    }

    double x(int i) const noexcept { return x0 + (i + 0.5) * dx; }
    double y(int j) const noexcept { return ny == 1 ? 0.0 : y0 + (j + 0.5) * dy; }
    double length_x() const noexcept { return nx * dx; }
    double length_y() const noexcept { return ny == 1 ? 1.0 : ny * dy; }
    double cell_volume() const noexcept { return ny == 1 ? dx : dx * dy; }

    Field zeros() const { return Field(size(), 0.0); }

    bool operator==(const Grid&) const = default;
};

} // namespace failwave
