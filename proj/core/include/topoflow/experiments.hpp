#pragma once

/// Twin-experiment harness: synthetic measurements from a known obstacle
/// layout, the end-to-end detection pipeline, and the quantitative
/// validation drivers (penalization rate, perturbation decay, first-order
/// expansion, adjoint-gradient consistency, separation resolution).

#include <cstdint>
#include <random>

#include "topoflow/detection.hpp"
#include "topoflow/sensitivity.hpp"

namespace topoflow {

/// Seeded standard-normal stream (Box-Muller over mt19937_64), so noise
/// draws are identical bit-for-bit for a given seed on every platform.
class GaussianRng {
  public:
    explicit GaussianRng(std::uint64_t seed) : eng_(seed) {}
    double operator()();

  private:
    std::mt19937_64 eng_;
    bool have_ = false;
    double spare_ = 0.0;
};

struct TwinSpec {
    Grid grid;
    SolverConfig solver;
    ForcingSpec forcing;
    BoundarySpec boundary;
    ShapeSpec holdall;
    std::vector<ShapeSpec> obstacles;
    std::vector<ShapeSpec> windows;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    double alpha = 0.5, beta = 0.5;
    double match_radius = 0.0; // 0 selects 3 * max(dx, dy)

    double resolved_match_radius() const {
        return match_radius > 0.0 ? match_radius : 3.0 * grid.max_spacing();
    }
};

/// Desk-scale reference configuration: unit square at n x n, nu = 0.01,
/// lid speed 1 ramped over 0.1, T = 2, k = 1e6, hold-all box of
/// half-widths (0.25, 0.25) at the center, one box obstacle at the
/// hold-all center, one observation window box of half-widths (0.1, 0.1)
/// below the lid, alpha = beta = 0.5.
TwinSpec canonical_twin(int n = 96);

/// Penalized forward run of the true layout sampled on the windows, plus
/// seeded Gaussian noise: m = u + sigma * max|u| * xi per sample.
MeasurementSet synth_measurements(const TwinSpec& spec);

struct DetectionResult {
    MeasurementSet meas;
    SensitivityField sensitivity;
    DetectionReport report;
};

/// measurements -> u0 -> adjoint -> D_K -> clusters -> score.
DetectionResult run_detection(const TwinSpec& spec);

struct LogLogFit {
    double slope = 0.0, intercept = 0.0;
    std::vector<double> residuals; // per point, log10 units
    double max_residual = 0.0;
};

/// Least squares of log10(y) against log10(x). Requires positive data.
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct RateResult {
    std::vector<double> values;
    std::vector<double> norms;
    LogLogFit fit;
};

/// ||u_k||_{L2((0,T) x C)} for ascending penalties k (>= 4 values, all
/// positive). Throws if the norms fail to decrease strictly or the fit
/// residual exceeds 0.3.
RateResult verify_penalization_rate(const TwinSpec& spec, const MaskField& region,
                                    const std::vector<double>& k_values);

/// ||u_eps - u0||_{Linf(0,T;L2)} + ||u_eps - u0||_{L2(0,T;H1)} for box
/// inclusions z + eps [-1,1]^2 penalized with spec.solver.k_penalty, eps
/// strictly decreasing (>= 4 values). Throws on non-decreasing norms or
/// fit residual above 0.3.
RateResult verify_perturbation_decay(const TwinSpec& spec, double zx, double zy,
                                     const std::vector<double>& eps_values);

struct ExpansionResult {
    int zi = 0, zj = 0;       // detected minimizer cell
    double dk_at_z = 0.0;
    double k_probe = 0.0;
    std::vector<double> eps;
    std::vector<double> ratios;     // [K_eps - K_0] / (k_probe * eps^2 |C|)
    std::vector<double> rel_errors; // against dk_at_z
};

/// Validates K_eps - K_0 ~ k |C_eps| D_K(z) at the detected minimizer with
/// box inclusions z + eps [-1,1]^2 (|C| = 4). k_probe must keep the
/// perturbation in the linear-response regime; eps of the form
/// (m - 1/2) dx make the rasterized area equal eps^2 |C| exactly.
ExpansionResult verify_expansion(const TwinSpec& spec, const std::vector<double>& eps_values,
                                 double k_probe);

struct GradientProbe {
    int cell = -1;
    double vc_dk = 0.0;            // V_c * D_K(c)
    std::vector<double> a;         // probe amplitudes, descending
    std::vector<double> fd;        // [K(a 1_c) - K(0)] / a
    std::vector<double> rel_error; // per amplitude
};

struct GradientCheckResult {
    std::vector<GradientProbe> probes;
    double max_final_error = 0.0; // worst probe error at the smallest a
};

/// Finite-difference check of V_c D_K(c) against [K(kappa = a 1_c) - K(0)]/a.
/// With an empty cell list, picks `count` deep-|D_K| interior cells outside
/// the windows. When both sides are below 1e-8 in absolute value the probe
/// counts as matched (error 0).
GradientCheckResult adjoint_gradient_check(const TwinSpec& spec, std::vector<int> cells,
                                           const std::vector<double>& a_values, int count = 5);

struct SeparationRow {
    int separation_cells = 0;
    int clusters = 0;
    int n_matched = 0;
    int n_spurious = 0;
};

/// Replaces the obstacles with two 4x4-cell boxes at the given horizontal
/// edge-to-edge separations (in cells) and reports the cluster count per
/// separation.
std::vector<SeparationRow> separation_study(const TwinSpec& base,
                                            const std::vector<int>& separations);

} // namespace topoflow
