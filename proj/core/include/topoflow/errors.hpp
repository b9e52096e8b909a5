#pragma once

#include <stdexcept>
#include <string>

namespace topoflow {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Geometry layout violations detected by validate_layout().
struct LayoutError : Error {
    enum class Code {
        ObstacleOutsideHoldall,
        WindowIntersectsHoldall,
        ShapeTouchesBoundary,
    };

    LayoutError(Code c, const std::string& msg) : Error(msg), code(c) {}
    Code code;
};

/// Configuration parse or schema violations. Carries the offending key when known.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg, std::string key = {})
        : Error(key.empty() ? msg : msg + " (key: " + key + ")"), offending_key(std::move(key)) {}
    std::string offending_key;
};

/// Numerical failures: Poisson non-convergence, CFL violation, blow-up, grid mismatch.
struct SolverError : Error {
    explicit SolverError(const std::string& msg) : Error(msg) {}
};

/// Filesystem / serialization failures.
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

} // namespace topoflow
