#pragma once

/// Measurement misfit functional and the topological gradient
/// D_K(x) = int_0^T u0(x,t) . v0(x,t) dt.

#include <string>

#include "topoflow/adjoint.hpp"
#include "topoflow/shapes.hpp"

namespace topoflow {

struct SensitivityField {
    ScalarField dk;
    std::string quadrature = "trapezoid";
    double per_constant = 0.0; // optional uniform reference-perimeter offset
};

/// K = sum_t w_t sum_windows sum_cells |u - m|^2 dx dy with trapezoid
/// weights w_t. The window partial sums are accumulated in a canonical
/// order so the value is independent of window labeling.
double cost(const WindowSamples& u, const MeasurementSet& meas);

/// K plus gamma times the analytic perimeter of the candidate shape.
double cost_regularized(const WindowSamples& u, const MeasurementSet& meas,
                        const ShapeSpec& candidate, double gamma);

/// Trapezoid-in-time accumulation of the center-interpolated product
/// u0 . v0 per cell. per_constant, when nonzero, is added uniformly.
SensitivityField topological_gradient(const Trajectory& u0, const AdjointTrajectory& v0,
                                      double per_constant = 0.0);

} // namespace topoflow
