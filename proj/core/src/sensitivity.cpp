#include "topoflow/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "topoflow/errors.hpp"

namespace topoflow {

namespace {

void check_compatible(const WindowSamples& a, const WindowSamples& b) {
    if (!(a.grid == b.grid)) throw SolverError("cost: sample grids differ");
    if (a.window_cells != b.window_cells)
        throw SolverError("cost: observation windows differ between samples and measurements");
    if (a.times.size() != b.times.size()) throw SolverError("cost: time grids differ");
    const double tol = 1e-12 * std::max(1.0, a.times.empty() ? 0.0 : a.times.back());
    for (std::size_t n = 0; n < a.times.size(); ++n)
        if (std::abs(a.times[n] - b.times[n]) > tol) throw SolverError("cost: time grids differ");
}

double trapezoid_weight(std::size_t n, std::size_t count, double dt) {
    return (n == 0 || n + 1 == count) ? 0.5 * dt : dt;
}

} // namespace

double cost(const WindowSamples& u, const MeasurementSet& meas) {
    const WindowSamples& m = meas.samples;
    check_compatible(u, m);
    const Grid& g = u.grid;
    const int total = u.total_cells();
    const std::size_t nw = u.window_cells.size();
    const std::size_t nt = u.times.size();
    const double dt = u.dt();
    const double vol = g.cell_volume();

    // canonical window order: by smallest cell id, so that relabeling the
    // windows cannot change the floating-point sum
    std::vector<std::size_t> order(nw), offset(nw, 0);
    std::iota(order.begin(), order.end(), std::size_t{0});
    {
        int off = 0;
        for (std::size_t w = 0; w < nw; ++w) {
            offset[w] = off;
            off += static_cast<int>(u.window_cells[w].size());
        }
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const int ka = u.window_cells[a].empty() ? -1 : u.window_cells[a].front();
            const int kb = u.window_cells[b].empty() ? -1 : u.window_cells[b].front();
            return ka < kb;
        });
    }

    double k = 0.0;
    for (std::size_t n = 0; n < nt; ++n) {
        double st = 0.0;
        for (std::size_t w : order) {
            double sw = 0.0;
            const std::size_t base = n * total + offset[w];
            for (std::size_t c = 0; c < u.window_cells[w].size(); ++c) {
                const double ex = u.ux[base + c] - m.ux[base + c];
                const double ey = u.uy[base + c] - m.uy[base + c];
                sw += ex * ex + ey * ey;
            }
            st += sw;
        }
        k += trapezoid_weight(n, nt, dt) * st * vol;
    }
    return k;
}

double cost_regularized(const WindowSamples& u, const MeasurementSet& meas,
                        const ShapeSpec& candidate, double gamma) {
    return cost(u, meas) + gamma * perimeter(candidate);
}

SensitivityField topological_gradient(const Trajectory& u0, const AdjointTrajectory& v0,
                                      double per_constant) {
    const Grid& g = u0.grid;
    if (!(g == v0.grid)) throw SolverError("topological_gradient: grid mismatch");
    if (u0.times != v0.times)
        throw SolverError("topological_gradient: time grids differ");

    SensitivityField out;
    out.dk = ScalarField(g);
    out.per_constant = per_constant;
    const std::size_t nt = u0.times.size();
    const double dt = u0.dt();

    for (std::size_t n = 0; n < nt; ++n) {
        const double w = trapezoid_weight(n, nt, dt);
        const StaggeredVelocity& a = u0.u[n];
        const StaggeredVelocity& b = v0.v[n];
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                double ax, ay, bx, by;
                a.at_center(i, j, ax, ay);
                b.at_center(i, j, bx, by);
                out.dk.at(i, j) += w * (ax * bx + ay * by);
            }
        }
    }
    if (per_constant != 0.0)
        for (double& a : out.dk.v) a += per_constant;
    return out;
}

} // namespace topoflow
