#include "topoflow/grid.hpp"

namespace topoflow {

Grid build_grid(int nx, int ny, double lx, double ly) {
    if (nx < 4 || ny < 4)
        throw Error("grid resolution must be at least 4x4, got " + std::to_string(nx) + "x" +
                    std::to_string(ny));
    if (!(lx > 0.0) || !(ly > 0.0)) throw Error("grid extents must be positive");
    Grid g;
    g.nx = nx;
    g.ny = ny;
    g.lx = lx;
    g.ly = ly;
    g.dx = lx / nx;
    g.dy = ly / ny;
    return g;
}

} // namespace topoflow
