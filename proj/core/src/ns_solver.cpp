#include "topoflow/ns_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "topoflow/errors.hpp"

namespace topoflow {

double ForcingSpec::fx(double x, double y, const Grid& g) const {
    switch (kind) {
        case Kind::Zero: return 0.0;
        case Kind::Constant: return gx;
        case Kind::Vortex:
            return amplitude * std::sin(kx * M_PI * x / g.lx) * std::cos(ky * M_PI * y / g.ly);
    }
    return 0.0;
}

double ForcingSpec::fy(double x, double y, const Grid& g) const {
    switch (kind) {
        case Kind::Zero: return 0.0;
        case Kind::Constant: return gy;
        case Kind::Vortex:
            return -amplitude * std::cos(kx * M_PI * x / g.lx) * std::sin(ky * M_PI * y / g.ly);
    }
    return 0.0;
}

double BoundarySpec::phi(double t) const {
    if (kind != Kind::Lid) return 0.0;
    const double ramp = (t_ramp > 0.0) ? std::min(1.0, t / t_ramp) : 1.0;
    return lid_speed * std::max(0.0, ramp);
}

WallSpeeds BoundarySpec::walls(double t) const {
    WallSpeeds w;
    if (kind != Kind::Lid) return w;
    const double s = phi(t);
    switch (side) {
        case Side::Bottom: w.u_bottom = s; break;
        case Side::Top: w.u_top = s; break;
        case Side::Left: w.v_left = s; break;
        case Side::Right: w.v_right = s; break;
    }
    return w;
}

double WindowSamples::max_abs() const {
    double m = 0.0;
    for (double a : ux) m = std::max(m, std::abs(a));
    for (double a : uy) m = std::max(m, std::abs(a));
    return m;
}

void add_advection(const StaggeredVelocity& U, const StaggeredVelocity& v, const WallSpeeds& wall,
                   double sign, StaggeredVelocity& out) {
    const Grid& g = U.grid;
    const int nx = g.nx, ny = g.ny;
    const double idx = 1.0 / g.dx, idy = 1.0 / g.dy;
    const double h = 0.5 * sign;

    // x momentum: the divergence and advective forms are exact negative
    // transposes of each other, so their average conserves sum(u.x^2).
    for (int j = 0; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            const double Ue = 0.5 * (U.x(i, j) + U.x(i + 1, j));     // center (i,j)
            const double Uw = 0.5 * (U.x(i - 1, j) + U.x(i, j));     // center (i-1,j)
            const double Vn = 0.5 * (U.y(i - 1, j + 1) + U.y(i, j + 1)); // corner (i,j+1)
            const double Vs = 0.5 * (U.y(i - 1, j) + U.y(i, j));     // corner (i,j)
            const double vc = v.x(i, j);
            const double ve = v.x(i + 1, j), vw = v.x(i - 1, j);
            const double vn = (j + 1 < ny) ? v.x(i, j + 1) : 2.0 * wall.u_top - vc;
            const double vs = (j > 0) ? v.x(i, j - 1) : 2.0 * wall.u_bottom - vc;
            const double div = (Ue * 0.5 * (vc + ve) - Uw * 0.5 * (vw + vc)) * idx +
                               (Vn * 0.5 * (vc + vn) - Vs * 0.5 * (vs + vc)) * idy;
            const double adv = 0.5 * (Ue * (ve - vc) + Uw * (vc - vw)) * idx +
                               0.5 * (Vn * (vn - vc) + Vs * (vc - vs)) * idy;
            out.x(i, j) += h * (div + adv);
        }
    }
    // y momentum
    for (int j = 1; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double Vn = 0.5 * (U.y(i, j) + U.y(i, j + 1));     // center (i,j)
            const double Vs = 0.5 * (U.y(i, j - 1) + U.y(i, j));     // center (i,j-1)
            const double Ue = 0.5 * (U.x(i + 1, j - 1) + U.x(i + 1, j)); // corner (i+1,j)
            const double Uw = 0.5 * (U.x(i, j - 1) + U.x(i, j));     // corner (i,j)
            const double vc = v.y(i, j);
            const double vn = v.y(i, j + 1), vs = v.y(i, j - 1);
            const double ve = (i + 1 < nx) ? v.y(i + 1, j) : 2.0 * wall.v_right - vc;
            const double vw = (i > 0) ? v.y(i - 1, j) : 2.0 * wall.v_left - vc;
            const double div = (Vn * 0.5 * (vc + vn) - Vs * 0.5 * (vs + vc)) * idy +
                               (Ue * 0.5 * (vc + ve) - Uw * 0.5 * (vw + vc)) * idx;
            const double adv = 0.5 * (Vn * (vn - vc) + Vs * (vc - vs)) * idy +
                               0.5 * (Ue * (ve - vc) + Uw * (vc - vw)) * idx;
            out.y(i, j) += h * (div + adv);
        }
    }
}

void add_diffusion(const StaggeredVelocity& v, const WallSpeeds& wall, double coef,
                   StaggeredVelocity& out) {
    const Grid& g = v.grid;
    const int nx = g.nx, ny = g.ny;
    const double ax = coef / (g.dx * g.dx), ay = coef / (g.dy * g.dy);
    for (int j = 0; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            const double vc = v.x(i, j);
            const double vn = (j + 1 < ny) ? v.x(i, j + 1) : 2.0 * wall.u_top - vc;
            const double vs = (j > 0) ? v.x(i, j - 1) : 2.0 * wall.u_bottom - vc;
            out.x(i, j) +=
                ax * (v.x(i + 1, j) - 2.0 * vc + v.x(i - 1, j)) + ay * (vn - 2.0 * vc + vs);
        }
    }
    for (int j = 1; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double vc = v.y(i, j);
            const double ve = (i + 1 < nx) ? v.y(i + 1, j) : 2.0 * wall.v_right - vc;
            const double vw = (i > 0) ? v.y(i - 1, j) : 2.0 * wall.v_left - vc;
            out.y(i, j) +=
                ay * (v.y(i, j + 1) - 2.0 * vc + v.y(i, j - 1)) + ax * (ve - 2.0 * vc + vw);
        }
    }
}

void add_forcing(const ForcingSpec& f, const Grid& g, double coef, StaggeredVelocity& out) {
    if (f.kind == ForcingSpec::Kind::Zero) return;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) out.x(i, j) += coef * f.fx(g.xf(i), g.yc(j), g);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) out.y(i, j) += coef * f.fy(g.xc(i), g.yf(j), g);
}

void apply_penalization(StaggeredVelocity& v, const ScalarField& kappa, double dt) {
    const Grid& g = v.grid;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const double kf = 0.5 * (kappa.at(i - 1, j) + kappa.at(i, j));
            if (kf != 0.0) v.x(i, j) /= 1.0 + dt * kf;
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double kf = 0.5 * (kappa.at(i, j - 1) + kappa.at(i, j));
            if (kf != 0.0) v.y(i, j) /= 1.0 + dt * kf;
        }
}

ScalarField divergence(const StaggeredVelocity& v) {
    const Grid& g = v.grid;
    ScalarField d(g);
    const double idx = 1.0 / g.dx, idy = 1.0 / g.dy;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            d.at(i, j) =
                (v.x(i + 1, j) - v.x(i, j)) * idx + (v.y(i, j + 1) - v.y(i, j)) * idy;
    return d;
}

double max_divergence(const StaggeredVelocity& v) {
    const Grid& g = v.grid;
    const double idx = 1.0 / g.dx, idy = 1.0 / g.dy;
    double m = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double d =
                (v.x(i + 1, j) - v.x(i, j)) * idx + (v.y(i, j + 1) - v.y(i, j)) * idy;
            m = std::max(m, std::abs(d));
        }
    return m;
}

double kinetic_energy(const StaggeredVelocity& v) {
    const Grid& g = v.grid;
    double e = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double cx, cy;
            v.at_center(i, j, cx, cy);
            e += cx * cx + cy * cy;
        }
    return 0.5 * e * g.cell_volume();
}

namespace {

double diffusive_limit(const Grid& g, double nu) {
    if (nu <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / (2.0 * nu * (1.0 / (g.dx * g.dx) + 1.0 / (g.dy * g.dy)));
}

double advective_limit(const StaggeredVelocity& v) {
    const Grid& g = v.grid;
    double mx = 0.0, my = 0.0;
    for (double a : v.ux) mx = std::max(mx, std::abs(a));
    for (double a : v.uy) my = std::max(my, std::abs(a));
    double lim = std::numeric_limits<double>::infinity();
    if (mx > 0.0) lim = std::min(lim, g.dx / mx);
    if (my > 0.0) lim = std::min(lim, g.dy / my);
    return lim;
}

} // namespace

double cfl_dt(const StaggeredVelocity& v, const SolverConfig& cfg) {
    return cfg.cfl_safety * std::min(advective_limit(v), diffusive_limit(v.grid, cfg.nu));
}

ScalarField penalty_field(const MaskField& mask, double k) {
    ScalarField f(mask.grid);
    for (int c = 0; c < mask.grid.cell_count(); ++c) f.v[c] = mask.v[c] ? k : 0.0;
    return f;
}

namespace {

void check_step_inputs(const Grid& g, const ScalarField& kappa, const SolverConfig& cfg) {
    if (!(kappa.grid == g)) throw SolverError("kappa grid does not match the velocity grid");
    if (cfg.nu < 0.0) throw SolverError("nu must be nonnegative");
    if (!(cfg.poisson_tol > 0.0) || cfg.poisson_max_iter < 1)
        throw SolverError("invalid pressure-solve settings");
}

// Shared single-step kernel; p carries the warm-start guess in and the
// step pressure out.
void step_kernel(StaggeredVelocity& u, ScalarField& p, const ScalarField& kappa,
                 const ForcingSpec& forcing, const BoundarySpec& bc, double t, double dt,
                 const SolverConfig& cfg, StaggeredVelocity& work) {
    const Grid& g = u.grid;

    const double lim = std::min(advective_limit(u), diffusive_limit(g, cfg.nu));
    if (dt > lim * (1.0 + 1e-9))
        throw SolverError("CFL violation: dt=" + std::to_string(dt) + " exceeds the stable limit " +
                          std::to_string(lim));

    const WallSpeeds wall = bc.walls(t);
    std::fill(work.ux.begin(), work.ux.end(), 0.0);
    std::fill(work.uy.begin(), work.uy.end(), 0.0);
    add_advection(u, u, wall, -1.0, work);
    add_diffusion(u, wall, cfg.nu, work);

    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) u.x(i, j) += dt * work.x(i, j);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) u.y(i, j) += dt * work.y(i, j);
    add_forcing(forcing, g, dt, u);

    apply_penalization(u, kappa, dt);

    const PoissonResult pres = project(u, dt, cfg, p);
    p = pres.p;

    const double mdiv = max_divergence(u);
    if (!std::isfinite(mdiv) || !std::isfinite(u.max_abs()))
        throw SolverError("solution blew up (non-finite values) at t=" + std::to_string(t));
    if (mdiv > cfg.div_tol)
        throw SolverError("projection left max|div u|=" + std::to_string(mdiv) +
                          " above div_tol at t=" + std::to_string(t));
}

} // namespace

PoissonResult project(StaggeredVelocity& v, double dt, const SolverConfig& cfg,
                      const ScalarField& p_guess) {
    const Grid& g = v.grid;
    ScalarField rhs = divergence(v);
    const double s = -1.0 / dt;
    for (double& a : rhs.v) a *= s;
    PoissonResult res = poisson_solve(rhs, cfg.poisson_tol, cfg.poisson_max_iter, p_guess);
    const ScalarField& p = res.p;
    const double cx = dt / g.dx, cy = dt / g.dy;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) v.x(i, j) -= cx * (p.at(i, j) - p.at(i - 1, j));
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) v.y(i, j) -= cy * (p.at(i, j) - p.at(i, j - 1));
    return res;
}

std::pair<StaggeredVelocity, ScalarField> step_forward(const StaggeredVelocity& state,
                                                       const ScalarField& kappa,
                                                       const ForcingSpec& forcing,
                                                       const BoundarySpec& bc, double t, double dt,
                                                       const SolverConfig& cfg) {
    check_step_inputs(state.grid, kappa, cfg);
    StaggeredVelocity u = state;
    StaggeredVelocity work(state.grid);
    ScalarField p(state.grid);
    step_kernel(u, p, kappa, forcing, bc, t, dt, cfg, work);
    return {std::move(u), std::move(p)};
}

ForwardSolver::ForwardSolver(const Grid& g, const SolverConfig& cfg, const ScalarField& kappa,
                             const ForcingSpec& forcing, const BoundarySpec& bc)
    : grid_(g), cfg_(cfg), forcing_(forcing), bc_(bc), u_(g), work_(g), p_(g) {
    check_step_inputs(g, kappa, cfg);
    if (!(cfg.T > 0.0)) throw SolverError("final time T must be positive");
    if (!(cfg.cfl_safety > 0.0) || cfg.cfl_safety > 1.0)
        throw SolverError("cfl_safety must lie in (0, 1]");

    diff_limit_ = diffusive_limit(g, cfg.nu);
    double dt_req = cfg.dt;
    if (dt_req <= 0.0) {
        // a-priori step from the diffusive limit and the boundary speed scale
        double lim = diff_limit_;
        const double speed = std::abs(bc.kind == BoundarySpec::Kind::Lid ? bc.lid_speed : 0.0);
        if (speed > 0.0) lim = std::min(lim, g.min_spacing() / speed);
        if (!std::isfinite(lim))
            throw SolverError("cannot derive a step size (nu = 0 and no boundary speed); "
                              "set dt explicitly");
        dt_req = cfg.cfl_safety * lim;
    }
    nsteps_ = std::max(1, static_cast<int>(std::ceil(cfg.T / dt_req - 1e-9)));
    dt_ = cfg.T / nsteps_;
    times_.resize(nsteps_ + 1);
    for (int n = 0; n <= nsteps_; ++n) times_[n] = cfg.T * n / nsteps_;

    kappa_ = kappa;
}

void ForwardSolver::advance() {
    if (done()) throw SolverError("advance() past the final time");
    step_kernel(u_, p_, kappa_, forcing_, bc_, times_[step_], dt_, cfg_, work_);
    ++step_;
}

Trajectory solve_forward(const Grid& g, const SolverConfig& cfg, const ScalarField& kappa,
                         const ForcingSpec& forcing, const BoundarySpec& bc) {
    ForwardSolver solver(g, cfg, kappa, forcing, bc);
    Trajectory traj;
    traj.grid = g;
    traj.times.assign(solver.total_steps() + 1, 0.0);
    for (int n = 0; n <= solver.total_steps(); ++n) traj.times[n] = solver.time_at(n);
    traj.u.reserve(solver.total_steps() + 1);
    traj.u.push_back(solver.state());
    while (!solver.done()) {
        solver.advance();
        traj.u.push_back(solver.state());
    }
    return traj;
}

namespace {

std::vector<std::vector<int>> window_cell_lists(const Grid& g,
                                                const std::vector<MaskField>& windows) {
    std::vector<std::vector<int>> lists;
    lists.reserve(windows.size());
    for (const auto& w : windows) {
        if (!(w.grid == g)) throw SolverError("window mask grid mismatch");
        std::vector<int> cells;
        for (int c = 0; c < g.cell_count(); ++c)
            if (w.v[c]) cells.push_back(c);
        lists.push_back(std::move(cells));
    }
    return lists;
}

void append_samples(const StaggeredVelocity& u, const std::vector<std::vector<int>>& lists,
                    WindowSamples& out) {
    const Grid& g = u.grid;
    for (const auto& cells : lists) {
        for (int c : cells) {
            const int i = c % g.nx, j = c / g.nx;
            double cx, cy;
            u.at_center(i, j, cx, cy);
            out.ux.push_back(cx);
            out.uy.push_back(cy);
        }
    }
}

} // namespace

WindowSamples solve_forward(const Grid& g, const SolverConfig& cfg, const ScalarField& kappa,
                            const ForcingSpec& forcing, const BoundarySpec& bc,
                            const std::vector<MaskField>& windows) {
    ForwardSolver solver(g, cfg, kappa, forcing, bc);
    WindowSamples s;
    s.grid = g;
    s.window_cells = window_cell_lists(g, windows);
    s.times.assign(solver.total_steps() + 1, 0.0);
    for (int n = 0; n <= solver.total_steps(); ++n) s.times[n] = solver.time_at(n);
    const std::size_t total = static_cast<std::size_t>(s.total_cells()) * s.times.size();
    s.ux.reserve(total);
    s.uy.reserve(total);
    append_samples(solver.state(), s.window_cells, s);
    while (!solver.done()) {
        solver.advance();
        append_samples(solver.state(), s.window_cells, s);
    }
    return s;
}

WindowSamples sample_windows(const Trajectory& traj, const std::vector<MaskField>& windows) {
    WindowSamples s;
    s.grid = traj.grid;
    s.window_cells = window_cell_lists(traj.grid, windows);
    s.times = traj.times;
    const std::size_t total = static_cast<std::size_t>(s.total_cells()) * s.times.size();
    s.ux.reserve(total);
    s.uy.reserve(total);
    for (const auto& u : traj.u) append_samples(u, s.window_cells, s);
    return s;
}

} // namespace topoflow
