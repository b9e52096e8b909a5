#pragma once

/// JSON run configuration.
///
/// Schema (all keys optional except grid.nx / grid.ny; unknown keys are
/// rejected):
///
///   {
///     "grid":      {"nx": 96, "ny": 96, "lx": 1.0, "ly": 1.0},
///     "solver":    {"nu": 0.01, "k_penalty": 1e6, "T": 2.0, "dt": 0.0,
///                   "cfl_safety": 0.5, "poisson_tol": 1e-10,
///                   "poisson_max_iter": 50000, "div_tol": 1e-8},
///     "forcing":   {"kind": "zero"}
///                | {"kind": "constant", "g": [gx, gy]}
///                | {"kind": "vortex", "amplitude": a, "wavenumbers": [kx, ky]},
///     "boundary":  {"kind": "no_slip"}
///                | {"kind": "lid", "speed": 1.0, "t_ramp": 0.2, "side": "top"},
///     "holdall":   <shape>,            // default: centered box lx/4 x ly/4
///     "obstacles": [<shape>, ...],
///     "windows":   [<shape>, ...],
///     "noise_sigma": 0.0,              // in [0, 1)
///     "seed": 1234,
///     "detection": {"alpha": 0.5, "beta": 0.5, "match_radius": 0.0}
///   }
///
/// A <shape> is one of
///   {"kind": "disk", "center": [x, y], "radius": r}
///   {"kind": "box",  "center": [x, y], "half_widths": [hx, hy]}
///   {"kind": "box",  "cells": "i0:i1,j0:j1"}
/// The "cells" form is a grid-node span: the box covers
/// [i0 dx, i1 dx] x [j0 dy, j1 dy].

#include <string>

#include "topoflow/experiments.hpp"

namespace topoflow {

struct DetectionParams {
    double alpha = 0.5;
    double beta = 0.5;
    double match_radius = 0.0; // 0 selects 3 * max(dx, dy)
};

struct RunConfig {
    Grid grid;
    SolverConfig solver;
    ForcingSpec forcing;
    BoundarySpec boundary;
    ShapeSpec holdall;
    std::vector<ShapeSpec> obstacles;
    std::vector<ShapeSpec> windows;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    DetectionParams detection;
};

/// Parses and validates a JSON document. Throws ConfigError naming the
/// offending key on schema violations and carrying nlohmann's line/column
/// diagnostics on syntax errors; layout violations surface as LayoutError.
RunConfig parse_config(const std::string& text);

/// parse_config(file contents). Throws IoError when the file cannot be read.
RunConfig load_config(const std::string& path);

/// Canonical serialization: every field present, fixed key order, shapes in
/// center/half-width form. serialize(parse(s)) is a fixed point.
std::string serialize_config(const RunConfig& cfg);

TwinSpec to_twin(const RunConfig& cfg);

} // namespace topoflow
