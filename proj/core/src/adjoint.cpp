#include "topoflow/adjoint.hpp"

#include <cmath>

#include "topoflow/errors.hpp"

namespace topoflow {

namespace {

// Distributes a cell-centered vector field onto interior faces by two-cell
// averaging and adds it, scaled, to out.
void add_cell_field_to_faces(const Grid& g, const std::vector<double>& cx,
                             const std::vector<double>& cy, double coef, StaggeredVelocity& out) {
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            out.x(i, j) += coef * 0.5 * (cx[g.cell(i - 1, j)] + cx[g.cell(i, j)]);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out.y(i, j) += coef * 0.5 * (cy[g.cell(i, j - 1)] + cy[g.cell(i, j)]);
}

// out += coef * (grad u0)^T v with the product formed at cell centers and
// redistributed to faces.
void add_transpose_gradient(const StaggeredVelocity& u0, const StaggeredVelocity& v, double coef,
                            std::vector<double>& wx, std::vector<double>& wy,
                            StaggeredVelocity& out) {
    const Grid& g = u0.grid;
    const int nx = g.nx, ny = g.ny;
    const double idx = 1.0 / g.dx, idy = 1.0 / g.dy;

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            // diagonal entries are natural face differences at the center
            const double dudx = (u0.x(i + 1, j) - u0.x(i, j)) * idx;
            const double dvdy = (u0.y(i, j + 1) - u0.y(i, j)) * idy;
            // off-diagonal entries from center-interpolated components,
            // central inside, one-sided at the walls
            double dudy, dvdx;
            {
                const double uc = 0.5 * (u0.x(i, j) + u0.x(i + 1, j));
                const double un =
                    (j + 1 < ny) ? 0.5 * (u0.x(i, j + 1) + u0.x(i + 1, j + 1)) : uc;
                const double us = (j > 0) ? 0.5 * (u0.x(i, j - 1) + u0.x(i + 1, j - 1)) : uc;
                dudy = (un - us) * idy / ((j > 0 && j + 1 < ny) ? 2.0 : 1.0);
            }
            {
                const double vc = 0.5 * (u0.y(i, j) + u0.y(i, j + 1));
                const double ve =
                    (i + 1 < nx) ? 0.5 * (u0.y(i + 1, j) + u0.y(i + 1, j + 1)) : vc;
                const double vw = (i > 0) ? 0.5 * (u0.y(i - 1, j) + u0.y(i - 1, j + 1)) : vc;
                dvdx = (ve - vw) * idx / ((i > 0 && i + 1 < nx) ? 2.0 : 1.0);
            }
            double vxc, vyc;
            v.at_center(i, j, vxc, vyc);
            const int c = g.cell(i, j);
            wx[c] = dudx * vxc + dvdx * vyc;
            wy[c] = dudy * vxc + dvdy * vyc;
        }
    }
    add_cell_field_to_faces(g, wx, wy, coef, out);
}

void check_measurements(const Trajectory& u0, const MeasurementSet& meas) {
    const WindowSamples& s = meas.samples;
    if (!(s.grid == u0.grid)) throw SolverError("measurement grid does not match the trajectory");
    if (s.times.size() != u0.times.size())
        throw SolverError("measurement time grid does not match the forward trajectory");
    const double tol = 1e-12 * (u0.times.empty() ? 1.0 : std::max(1.0, u0.times.back()));
    for (std::size_t n = 0; n < s.times.size(); ++n)
        if (std::abs(s.times[n] - u0.times[n]) > tol)
            throw SolverError("measurement time grid does not match the forward trajectory");
}

} // namespace

StaggeredVelocity misfit_source(const StaggeredVelocity& u, const WindowSamples& meas,
                                int t_index) {
    const Grid& g = u.grid;
    std::vector<double> cx(g.cell_count(), 0.0), cy(g.cell_count(), 0.0);
    const int total = meas.total_cells();
    int k = static_cast<int>(t_index) * total;
    for (const auto& cells : meas.window_cells) {
        for (int c : cells) {
            const int i = c % g.nx, j = c / g.nx;
            double uxc, uyc;
            u.at_center(i, j, uxc, uyc);
            cx[c] = -2.0 * (uxc - meas.ux[k]);
            cy[c] = -2.0 * (uyc - meas.uy[k]);
            ++k;
        }
    }
    StaggeredVelocity s(g);
    add_cell_field_to_faces(g, cx, cy, 1.0, s);
    return s;
}

AdjointTrajectory solve_adjoint(const Trajectory& u0, const MeasurementSet& meas,
                                const SolverConfig& cfg) {
    const Grid& g = u0.grid;
    check_measurements(u0, meas);
    const int N = u0.steps();
    if (N < 1) throw SolverError("trajectory has no steps");
    const double dt = u0.dt();

    // explicit stability against the strongest transport in the trajectory
    double umax = 0.0;
    for (const auto& u : u0.u) umax = std::max(umax, u.max_abs());
    double lim = 1.0 / (2.0 * cfg.nu * (1.0 / (g.dx * g.dx) + 1.0 / (g.dy * g.dy)));
    if (umax > 0.0) lim = std::min(lim, g.min_spacing() / umax);
    if (dt > lim * (1.0 + 1e-9))
        throw SolverError("adjoint CFL violation: dt exceeds the stable limit for max|u0|");

    AdjointTrajectory adj;
    adj.grid = g;
    adj.times = u0.times;
    adj.v.assign(N + 1, StaggeredVelocity(g)); // v[N] stays zero

    const WallSpeeds wall; // adjoint walls are homogeneous Dirichlet
    StaggeredVelocity v = adj.v[N];
    StaggeredVelocity work(g);
    ScalarField p(g);
    std::vector<double> wx(g.cell_count()), wy(g.cell_count());
    const int total = meas.samples.total_cells();

    // cell-centered misfit source at one time level
    std::vector<double> sx(g.cell_count()), sy(g.cell_count());
    std::vector<double> px(g.cell_count()), py(g.cell_count());
    auto misfit_at = [&](int n, std::vector<double>& ox, std::vector<double>& oy) {
        std::fill(ox.begin(), ox.end(), 0.0);
        std::fill(oy.begin(), oy.end(), 0.0);
        int k = n * total;
        for (const auto& cells : meas.samples.window_cells) {
            for (int c : cells) {
                const int i = c % g.nx, j = c / g.nx;
                double uxc, uyc;
                u0.u[n].at_center(i, j, uxc, uyc);
                ox[c] = -2.0 * (uxc - meas.samples.ux[k]);
                oy[c] = -2.0 * (uyc - meas.samples.uy[k]);
                ++k;
            }
        }
    };
    misfit_at(N, px, py);

    for (int n = N - 1; n >= 0; --n) {
        // transport and diffusion of v, linearized about u0 at the step's
        // left endpoint (the forward stepper's linearization point)
        std::fill(work.ux.begin(), work.ux.end(), 0.0);
        std::fill(work.uy.begin(), work.uy.end(), 0.0);
        add_diffusion(v, wall, cfg.nu, work);
        add_advection(u0.u[n], v, wall, 1.0, work);
        add_transpose_gradient(u0.u[n], v, -1.0, wx, wy, work);

        for (int j = 0; j < g.ny; ++j)
            for (int i = 1; i < g.nx; ++i) v.x(i, j) += dt * work.x(i, j);
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) v.y(i, j) += dt * work.y(i, j);

        // misfit source on the windows, trapezoidal over the step so the
        // accumulated weights match the cost functional's time quadrature
        misfit_at(n, sx, sy);
        add_cell_field_to_faces(g, px, py, 0.5 * dt, v);
        add_cell_field_to_faces(g, sx, sy, 0.5 * dt, v);
        std::swap(px, sx);
        std::swap(py, sy);

        const PoissonResult pres = project(v, dt, cfg, p);
        p = pres.p;

        if (!std::isfinite(v.max_abs()))
            throw SolverError("adjoint solution blew up (non-finite values)");
        adj.v[n] = v;
    }
    return adj;
}

} // namespace topoflow
