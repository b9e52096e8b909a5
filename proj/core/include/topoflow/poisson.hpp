#pragma once

/// Cell-centered Poisson solver for the pressure projection:
/// -Lap(p) = rhs with homogeneous Neumann walls, zero-mean solution.

#include "topoflow/fields.hpp"

namespace topoflow {

struct PoissonResult {
    ScalarField p;
    int iterations = 0;
    double rel_residual = 0.0;
    bool mean_removed = false; // rhs had a nonzero mean that was projected out
};

/// Unpreconditioned conjugate gradient on the 5-point Neumann Laplacian.
/// Stops when ||rhs - A p||_2 <= tol * ||rhs||_2. Throws SolverError if
/// max_iter is exhausted first.
PoissonResult poisson_solve(const ScalarField& rhs, double tol, int max_iter);

/// Same, warm-started from an initial guess.
PoissonResult poisson_solve(const ScalarField& rhs, double tol, int max_iter,
                            const ScalarField& guess);

} // namespace topoflow
