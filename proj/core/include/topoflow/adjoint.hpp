#pragma once

/// Backward-in-time adjoint of the measurement misfit. The adjoint state v
/// satisfies, on the same grid and time step as the forward run,
///
///   -dv/dt - nu Lap(v) + grad(u0)^T v - (u0 . grad) v + grad(q) = -2 (u0 - u_meas) X_windows
///   div v = 0,  v = 0 on the walls,  v(T) = 0,
///
/// marched from T down to 0 with the explicit transport/diffusion/source
/// update and the same pressure projection as the forward solver.

#include <cstdint>

#include "topoflow/ns_solver.hpp"

namespace topoflow {

/// Interior velocity measurements on observation windows: noiseless window
/// samples plus the noise model that produced them.
struct MeasurementSet {
    WindowSamples samples;
    double sigma = 0.0; // relative noise level
    std::uint64_t seed = 0;
};

struct AdjointTrajectory {
    Grid grid;
    std::vector<double> times;
    std::vector<StaggeredVelocity> v; // v[n] at times[n]; v[N] is identically zero

    int steps() const { return static_cast<int>(times.size()) - 1; }
};

/// Misfit source at one time level: the cell-centered vector -2 (u - m) on
/// window cells, averaged onto faces (a face flanked by one window cell and
/// one outside cell receives half the cell value).
StaggeredVelocity misfit_source(const StaggeredVelocity& u, const WindowSamples& meas,
                                int t_index);

/// Solves the adjoint problem backward along the forward trajectory.
/// Throws SolverError on time-grid mismatch, CFL violation against
/// max |u0|, or non-finite values.
AdjointTrajectory solve_adjoint(const Trajectory& u0, const MeasurementSet& meas,
                                const SolverConfig& cfg);

} // namespace topoflow
