#pragma once

/// Uniform staggered (MAC) grid over a rectangle [0,lx] x [0,ly].
///
/// Pressure, penalization and all cell-wise scalars live at cell centers
/// ((i+1/2)dx, (j+1/2)dy).  The x velocity component lives on vertical
/// faces (i dx, (j+1/2)dy), the y component on horizontal faces
/// ((i+1/2)dx, j dy).

#include <cmath>

#include "topoflow/errors.hpp"

namespace topoflow {

struct Grid {
    int nx = 0, ny = 0;
    double lx = 0.0, ly = 0.0;
    double dx = 0.0, dy = 0.0;

    int cell_count() const { return nx * ny; }
    int xface_count() const { return (nx + 1) * ny; }
    int yface_count() const { return nx * (ny + 1); }

    int cell(int i, int j) const { return i + nx * j; }
    int xface(int i, int j) const { return i + (nx + 1) * j; }
    int yface(int i, int j) const { return i + nx * j; }

    double xc(int i) const { return (i + 0.5) * dx; }
    double yc(int j) const { return (j + 0.5) * dy; }
    double xf(int i) const { return i * dx; }
    double yf(int j) const { return j * dy; }

    double cell_volume() const { return dx * dy; }
    double max_spacing() const { return dx > dy ? dx : dy; }
    double min_spacing() const { return dx < dy ? dx : dy; }

    bool operator==(const Grid& o) const {
        return nx == o.nx && ny == o.ny && lx == o.lx && ly == o.ly;
    }
};

/// Builds a grid, validating nx, ny >= 4 and positive extents.
Grid build_grid(int nx, int ny, double lx, double ly);

} // namespace topoflow
