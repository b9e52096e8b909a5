#pragma once

/// Field containers tied to a Grid: cell-centered scalars, cell-centered
/// {0,1} masks, and face-staggered velocities.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "topoflow/grid.hpp"

namespace topoflow {

struct ScalarField {
    Grid grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0) : grid(g), v(g.cell_count(), fill) {}

    double& at(int i, int j) { return v[grid.cell(i, j)]; }
    double at(int i, int j) const { return v[grid.cell(i, j)]; }
};

struct MaskField {
    Grid grid;
    std::vector<std::uint8_t> v;

    MaskField() = default;
    explicit MaskField(const Grid& g, std::uint8_t fill = 0) : grid(g), v(g.cell_count(), fill) {}

    std::uint8_t& at(int i, int j) { return v[grid.cell(i, j)]; }
    std::uint8_t at(int i, int j) const { return v[grid.cell(i, j)]; }

    int count() const {
        int n = 0;
        for (auto c : v) n += c;
        return n;
    }
    double area() const { return count() * grid.cell_volume(); }
};

/// MAC velocity: ux on the (nx+1)*ny vertical faces, uy on the nx*(ny+1)
/// horizontal faces.
struct StaggeredVelocity {
    Grid grid;
    std::vector<double> ux, uy;

    StaggeredVelocity() = default;
    explicit StaggeredVelocity(const Grid& g)
        : grid(g), ux(g.xface_count(), 0.0), uy(g.yface_count(), 0.0) {}

    double& x(int i, int j) { return ux[grid.xface(i, j)]; }
    double x(int i, int j) const { return ux[grid.xface(i, j)]; }
    double& y(int i, int j) { return uy[grid.yface(i, j)]; }
    double y(int i, int j) const { return uy[grid.yface(i, j)]; }

    void fill(double a) {
        std::fill(ux.begin(), ux.end(), a);
        std::fill(uy.begin(), uy.end(), a);
    }

    /// Velocity vector linearly interpolated to the center of cell (i,j).
    void at_center(int i, int j, double& vx, double& vy) const {
        vx = 0.5 * (x(i, j) + x(i + 1, j));
        vy = 0.5 * (y(i, j) + y(i, j + 1));
    }

    double max_abs() const {
        double m = 0.0;
        for (double a : ux) m = std::max(m, std::abs(a));
        for (double a : uy) m = std::max(m, std::abs(a));
        return m;
    }
};

} // namespace topoflow
