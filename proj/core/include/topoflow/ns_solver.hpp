#pragma once

/// Unsteady incompressible Navier-Stokes on the staggered grid with Brinkman
/// penalization of obstacles. Explicit skew-symmetric advection, explicit
/// diffusion, implicit penalization, first-order pressure projection.

#include <utility>
#include <vector>

#include "topoflow/fields.hpp"
#include "topoflow/poisson.hpp"

namespace topoflow {

struct ForcingSpec {
    enum class Kind { Zero, Constant, Vortex };

    Kind kind = Kind::Zero;
    double gx = 0.0, gy = 0.0;  // constant body force
    double amplitude = 0.0;     // vortex strength
    int kx = 1, ky = 1;         // vortex wavenumbers

    static ForcingSpec zero() { return {}; }
    static ForcingSpec constant(double gx, double gy) {
        ForcingSpec f;
        f.kind = Kind::Constant;
        f.gx = gx;
        f.gy = gy;
        return f;
    }
    static ForcingSpec vortex(double amplitude, int kx, int ky) {
        ForcingSpec f;
        f.kind = Kind::Vortex;
        f.amplitude = amplitude;
        f.kx = kx;
        f.ky = ky;
        return f;
    }

    double fx(double x, double y, const Grid& g) const;
    double fy(double x, double y, const Grid& g) const;
};

/// Tangential wall speeds at a given time (normal components are always 0).
struct WallSpeeds {
    double u_bottom = 0.0, u_top = 0.0; // x velocity at y = 0 / y = ly
    double v_left = 0.0, v_right = 0.0; // y velocity at x = 0 / x = lx
};

struct BoundarySpec {
    enum class Kind { NoSlip, Lid };
    enum class Side { Bottom, Top, Left, Right };

    Kind kind = Kind::NoSlip;
    Side side = Side::Top;
    double lid_speed = 0.0; // peak tangential speed
    double t_ramp = 0.0;    // linear ramp-up time; lid speed is 0 at t = 0

    static BoundarySpec no_slip() { return {}; }
    static BoundarySpec lid(double speed, double t_ramp, Side side = Side::Top) {
        BoundarySpec b;
        b.kind = Kind::Lid;
        b.side = side;
        b.lid_speed = speed;
        b.t_ramp = t_ramp;
        return b;
    }

    double phi(double t) const;
    WallSpeeds walls(double t) const;
};

struct SolverConfig {
    double nu = 0.01;
    double k_penalty = 1e6;
    double T = 2.0;
    double dt = 0.0; // fixed step; 0 selects one from cfl_safety at t = 0
    double cfl_safety = 0.5;
    double poisson_tol = 1e-10;
    int poisson_max_iter = 50000;
    double div_tol = 1e-8;
};

/// Sequence of full velocity snapshots on a shared uniform time grid.
/// u[0] is the zero initial state.
struct Trajectory {
    Grid grid;
    std::vector<double> times;
    std::vector<StaggeredVelocity> u;

    int steps() const { return static_cast<int>(times.size()) - 1; }
    double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

/// Center-interpolated velocity samples restricted to observation windows,
/// one row of cells per window, every time level.
struct WindowSamples {
    Grid grid;
    std::vector<std::vector<int>> window_cells; // ascending linear cell ids per window
    std::vector<double> times;
    std::vector<double> ux, uy; // [time * total_cells + k] in window-major cell order

    int total_cells() const {
        int n = 0;
        for (const auto& w : window_cells) n += static_cast<int>(w.size());
        return n;
    }
    double max_abs() const;
    double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

// --- discrete operators (exposed for verification and the adjoint) ---

/// out += sign * A(U)v on interior faces, where A is the skew-symmetric
/// (energy-conserving) advection form: the average of the divergence and
/// advective discretizations with matched interpolations.
void add_advection(const StaggeredVelocity& U, const StaggeredVelocity& v, const WallSpeeds& wall,
                   double sign, StaggeredVelocity& out);

/// out += coef * Lap(v) on interior faces; wall tangential values enter
/// through reflected ghosts, normal values are read off the boundary faces.
void add_diffusion(const StaggeredVelocity& v, const WallSpeeds& wall, double coef,
                   StaggeredVelocity& out);

/// out += coef * G evaluated at interior face centers.
void add_forcing(const ForcingSpec& f, const Grid& g, double coef, StaggeredVelocity& out);

/// Implicit Brinkman step: each interior face value is divided by
/// (1 + dt * kappa_face), kappa_face being the two-cell average of kappa.
void apply_penalization(StaggeredVelocity& v, const ScalarField& kappa, double dt);

/// Projects v onto the discretely divergence-free space (interior faces
/// corrected by dt * grad p). Returns the pressure.
PoissonResult project(StaggeredVelocity& v, double dt, const SolverConfig& cfg,
                      const ScalarField& p_guess);

ScalarField divergence(const StaggeredVelocity& v);
double max_divergence(const StaggeredVelocity& v);

/// 0.5 * sum_cells |u_center|^2 dx dy.
double kinetic_energy(const StaggeredVelocity& v);

/// Largest stable step for the explicit terms, scaled by the safety factor:
/// cfl_safety * min(advective limit, diffusive limit).
double cfl_dt(const StaggeredVelocity& v, const SolverConfig& cfg);

/// kappa = k * mask.
ScalarField penalty_field(const MaskField& mask, double k);

/// One projection step from `state` at time t. Returns the end-of-step
/// velocity and the pressure. Throws SolverError on CFL violation, blow-up,
/// or pressure-solve failure.
std::pair<StaggeredVelocity, ScalarField> step_forward(const StaggeredVelocity& state,
                                                       const ScalarField& kappa,
                                                       const ForcingSpec& forcing,
                                                       const BoundarySpec& bc, double t, double dt,
                                                       const SolverConfig& cfg);

/// Incremental forward integrator with preallocated workspace and a
/// warm-started pressure solve. The step size is frozen at construction so
/// that runs with different kappa share the same time grid.
class ForwardSolver {
  public:
    ForwardSolver(const Grid& g, const SolverConfig& cfg, const ScalarField& kappa,
                  const ForcingSpec& forcing, const BoundarySpec& bc);

    void advance();
    const StaggeredVelocity& state() const { return u_; }
    const ScalarField& pressure() const { return p_; }
    const Grid& grid() const { return grid_; }
    double time() const { return times_[step_]; }
    double time_at(int n) const { return times_[n]; }
    double dt() const { return dt_; }
    int step() const { return step_; }
    int total_steps() const { return nsteps_; }
    bool done() const { return step_ >= nsteps_; }

  private:
    void compute_rhs(StaggeredVelocity& out) const;

    Grid grid_;
    SolverConfig cfg_;
    ForcingSpec forcing_;
    BoundarySpec bc_;
    ScalarField kappa_;
    double dt_ = 0.0;
    int nsteps_ = 0;
    int step_ = 0;
    std::vector<double> times_;
    StaggeredVelocity u_, work_;
    ScalarField p_;
    double diff_limit_ = 0.0;
};

/// Integrates from rest to T recording every snapshot.
Trajectory solve_forward(const Grid& g, const SolverConfig& cfg, const ScalarField& kappa,
                         const ForcingSpec& forcing, const BoundarySpec& bc);

/// Integrates from rest to T recording window samples only.
WindowSamples solve_forward(const Grid& g, const SolverConfig& cfg, const ScalarField& kappa,
                            const ForcingSpec& forcing, const BoundarySpec& bc,
                            const std::vector<MaskField>& windows);

/// Window sampling of an existing trajectory (same layout as solve_forward).
WindowSamples sample_windows(const Trajectory& traj, const std::vector<MaskField>& windows);

} // namespace topoflow
