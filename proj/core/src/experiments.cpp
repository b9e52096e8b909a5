#include "topoflow/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "topoflow/errors.hpp"

namespace topoflow {

double GaussianRng::operator()() {
    if (have_) {
        have_ = false;
        return spare_;
    }
    // Box-Muller; fixed formula keeps draws identical across library
    // implementations for a given engine state.
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double u1 = 0.0;
    do {
        u1 = unit(eng_);
    } while (u1 <= 0.0);
    const double u2 = unit(eng_);
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_ = true;
    return r * std::cos(2.0 * M_PI * u2);
}

TwinSpec canonical_twin(int n) {
    TwinSpec s;
    s.grid = build_grid(n, n, 1.0, 1.0);
    s.solver = SolverConfig{};
    s.boundary = BoundarySpec::lid(1.0, 0.1);
    s.forcing = ForcingSpec::zero();
    s.holdall = ShapeSpec::box(0.5, 0.5, 0.25, 0.25);
    // near the top of the hold-all, adjacent to the observation window:
    // detection resolves window-adjacent obstacles, distant ones smear out
    s.obstacles = {ShapeSpec::box(0.5, 0.725, 0.02, 0.02)};
    s.windows = {ShapeSpec::box(0.5, 0.86, 0.1, 0.1)};
    s.noise_sigma = 0.0;
    s.seed = 1234;
    return s;
}

namespace {

std::vector<MaskField> window_masks(const TwinSpec& spec) {
    std::vector<MaskField> masks;
    masks.reserve(spec.windows.size());
    for (const auto& w : spec.windows) masks.push_back(rasterize(spec.grid, w));
    return masks;
}

double trapezoid_weight(std::size_t n, std::size_t count, double dt) {
    return (n == 0 || n + 1 == count) ? 0.5 * dt : dt;
}

// sqrt( sum_t w_t sum_cells |u|^2 dx dy ) of window samples
double spacetime_l2(const WindowSamples& s) {
    const std::size_t nt = s.times.size();
    const int total = s.total_cells();
    const double dt = s.dt();
    double acc = 0.0;
    for (std::size_t n = 0; n < nt; ++n) {
        double st = 0.0;
        const std::size_t base = n * total;
        for (int c = 0; c < total; ++c) {
            st += s.ux[base + c] * s.ux[base + c] + s.uy[base + c] * s.uy[base + c];
        }
        acc += trapezoid_weight(n, nt, dt) * st;
    }
    return std::sqrt(acc * s.grid.cell_volume());
}

// ||w||_L2 and |w|_H1 of a staggered field via cell-center interpolation
// (one-sided gradients at boundary cells).
void center_norms(const StaggeredVelocity& w, std::vector<double>& cx, std::vector<double>& cy,
                  double& l2, double& h1) {
    const Grid& g = w.grid;
    const int nx = g.nx, ny = g.ny;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) w.at_center(i, j, cx[g.cell(i, j)], cy[g.cell(i, j)]);

    double sl = 0.0, sh = 0.0;
    const double idx = 1.0 / g.dx, idy = 1.0 / g.dy;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int c = g.cell(i, j);
            sl += cx[c] * cx[c] + cy[c] * cy[c];
            const int ie = (i + 1 < nx) ? c + 1 : c, iw = (i > 0) ? c - 1 : c;
            const int jn = (j + 1 < ny) ? c + nx : c, js = (j > 0) ? c - nx : c;
            const double fx = (i > 0 && i + 1 < nx) ? 0.5 : 1.0;
            const double fy = (j > 0 && j + 1 < ny) ? 0.5 : 1.0;
            const double dxu = (cx[ie] - cx[iw]) * idx * fx, dyu = (cx[jn] - cx[js]) * idy * fy;
            const double dxv = (cy[ie] - cy[iw]) * idx * fx, dyv = (cy[jn] - cy[js]) * idy * fy;
            sh += dxu * dxu + dyu * dyu + dxv * dxv + dyv * dyv;
        }
    }
    l2 = std::sqrt(sl * g.cell_volume());
    h1 = std::sqrt(sh * g.cell_volume());
}

struct Pipeline {
    MeasurementSet meas;
    Trajectory u0;
    SensitivityField dk;
};

Pipeline run_pipeline(const TwinSpec& spec) {
    Pipeline p;
    p.meas = synth_measurements(spec);
    p.u0 = solve_forward(spec.grid, spec.solver, ScalarField(spec.grid), spec.forcing,
                         spec.boundary);
    {
        AdjointTrajectory v0 = solve_adjoint(p.u0, p.meas, spec.solver);
        p.dk = topological_gradient(p.u0, v0);
    }
    return p;
}

// Candidate obstacle locations are confined to the hold-all, so the cluster
// search reads the sensitivity field restricted to it (zero elsewhere).
ScalarField restrict_to_holdall(const TwinSpec& spec, const ScalarField& f) {
    const Grid& g = spec.grid;
    ScalarField out = f;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (!spec.holdall.contains(g.xc(i), g.yc(j))) out.at(i, j) = 0.0;
    return out;
}

DetectionReport report_from_field(const TwinSpec& spec, const SensitivityField& dk) {
    const ScalarField admissible = restrict_to_holdall(spec, dk.dk);
    DetectionReport rep = find_clusters(admissible, spec.alpha);
    rep.beta = spec.beta;
    rep.noise_sigma = spec.noise_sigma;
    rep.seed = spec.seed;
    for (auto& cl : rep.clusters) estimate_extent(admissible, cl, spec.beta);
    score(rep, spec.grid, spec.obstacles, spec.resolved_match_radius());
    return rep;
}

} // namespace

MeasurementSet synth_measurements(const TwinSpec& spec) {
    validate_layout(spec.grid, spec.holdall, spec.obstacles, spec.windows);
    if (!(spec.noise_sigma >= 0.0) || spec.noise_sigma >= 1.0)
        throw Error("noise_sigma must lie in [0, 1)");

    const MaskField truth = rasterize(spec.grid, spec.obstacles);
    const ScalarField kappa = penalty_field(truth, spec.solver.k_penalty);

    MeasurementSet meas;
    meas.samples =
        solve_forward(spec.grid, spec.solver, kappa, spec.forcing, spec.boundary, window_masks(spec));
    meas.sigma = spec.noise_sigma;
    meas.seed = spec.seed;

    if (spec.noise_sigma > 0.0) {
        const double scale = spec.noise_sigma * meas.samples.max_abs();
        GaussianRng rng(spec.seed);
        for (std::size_t k = 0; k < meas.samples.ux.size(); ++k) {
            meas.samples.ux[k] += scale * rng();
            meas.samples.uy[k] += scale * rng();
        }
    }
    return meas;
}

DetectionResult run_detection(const TwinSpec& spec) {
    Pipeline p = run_pipeline(spec);
    DetectionResult res;
    res.report = report_from_field(spec, p.dk);
    res.meas = std::move(p.meas);
    res.sensitivity = std::move(p.dk);
    return res;
}

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw Error("fit_loglog: need >= 2 samples");
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw Error("fit_loglog: data must be positive");
        lx[k] = std::log10(x[k]);
        ly[k] = std::log10(y[k]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mx += lx[k];
        my += ly[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += (lx[k] - mx) * (lx[k] - mx);
        sxy += (lx[k] - mx) * (ly[k] - my);
    }
    if (sxx == 0.0) throw Error("fit_loglog: degenerate abscissae");
    LogLogFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.residuals.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        fit.residuals[k] = ly[k] - (fit.intercept + fit.slope * lx[k]);
        fit.max_residual = std::max(fit.max_residual, std::abs(fit.residuals[k]));
    }
    return fit;
}

RateResult verify_penalization_rate(const TwinSpec& spec, const MaskField& region,
                                    const std::vector<double>& k_values) {
    if (k_values.size() < 4) throw Error("penalization sweep needs at least 4 k values");
    for (std::size_t n = 0; n < k_values.size(); ++n) {
        if (!(k_values[n] > 0.0)) throw Error("penalization sweep needs positive k");
        if (n > 0 && k_values[n] <= k_values[n - 1])
            throw Error("penalization sweep needs strictly increasing k");
    }
    if (region.count() == 0) throw Error("penalization region is empty");

    RateResult res;
    res.values = k_values;
    for (double k : k_values) {
        const WindowSamples s = solve_forward(spec.grid, spec.solver, penalty_field(region, k),
                                              spec.forcing, spec.boundary, {region});
        res.norms.push_back(spacetime_l2(s));
    }
    for (std::size_t n = 1; n < res.norms.size(); ++n)
        if (!(res.norms[n] < res.norms[n - 1]))
            throw SolverError("penalization sweep: interior norm failed to decrease at k=" +
                              std::to_string(k_values[n]));
    res.fit = fit_loglog(res.values, res.norms);
    if (res.fit.max_residual > 0.3)
        throw SolverError("penalization sweep: log-log fit rejected (max residual " +
                          std::to_string(res.fit.max_residual) + ")");
    return res;
}

RateResult verify_perturbation_decay(const TwinSpec& spec, double zx, double zy,
                                     const std::vector<double>& eps_values) {
    if (eps_values.size() < 4) throw Error("perturbation sweep needs at least 4 eps values");
    for (std::size_t n = 0; n < eps_values.size(); ++n) {
        if (!(eps_values[n] > 0.0)) throw Error("perturbation sweep needs positive eps");
        if (n > 0 && eps_values[n] >= eps_values[n - 1])
            throw Error("perturbation sweep needs strictly decreasing eps");
    }

    const Grid& g = spec.grid;
    const Trajectory u0 =
        solve_forward(g, spec.solver, ScalarField(g), spec.forcing, spec.boundary);
    const std::size_t nt = u0.times.size();
    const double dt = u0.dt();

    RateResult res;
    res.values = eps_values;
    std::vector<double> cx(g.cell_count()), cy(g.cell_count());
    StaggeredVelocity diff(g);

    for (double eps : eps_values) {
        const MaskField inc = rasterize(g, ShapeSpec::box(zx, zy, eps, eps));
        if (inc.count() == 0)
            throw Error("inclusion eps=" + std::to_string(eps) + " rasterizes to no cells");
        ForwardSolver solver(g, spec.solver, penalty_field(inc, spec.solver.k_penalty),
                             spec.forcing, spec.boundary);
        double linf_l2 = 0.0, l2h1_acc = 0.0;
        for (std::size_t n = 1; n < nt; ++n) {
            solver.advance();
            const StaggeredVelocity& ue = solver.state();
            const StaggeredVelocity& ub = u0.u[n];
            for (std::size_t f = 0; f < diff.ux.size(); ++f) diff.ux[f] = ue.ux[f] - ub.ux[f];
            for (std::size_t f = 0; f < diff.uy.size(); ++f) diff.uy[f] = ue.uy[f] - ub.uy[f];
            double l2 = 0.0, h1 = 0.0;
            center_norms(diff, cx, cy, l2, h1);
            linf_l2 = std::max(linf_l2, l2);
            l2h1_acc += trapezoid_weight(n, nt, dt) * h1 * h1;
        }
        res.norms.push_back(linf_l2 + std::sqrt(l2h1_acc));
    }
    for (std::size_t n = 1; n < res.norms.size(); ++n)
        if (!(res.norms[n] < res.norms[n - 1]))
            throw SolverError("perturbation sweep: norm failed to decrease at eps=" +
                              std::to_string(eps_values[n]));
    res.fit = fit_loglog(res.values, res.norms);
    if (res.fit.max_residual > 0.3)
        throw SolverError("perturbation sweep: log-log fit rejected (max residual " +
                          std::to_string(res.fit.max_residual) + ")");
    return res;
}

ExpansionResult verify_expansion(const TwinSpec& spec, const std::vector<double>& eps_values,
                                 double k_probe) {
    if (eps_values.empty()) throw Error("expansion sweep needs eps values");
    if (!(k_probe > 0.0)) throw Error("expansion probe penalty must be positive");

    Pipeline p = run_pipeline(spec);
    const Grid& g = spec.grid;

    // probe point: deepest admissible cell (inside the hold-all, outside
    // every window) so the expansion compares like with like
    std::vector<std::uint8_t> in_window(g.cell_count(), 0);
    for (const auto& m : window_masks(spec))
        for (int c = 0; c < g.cell_count(); ++c)
            if (m.v[c]) in_window[c] = 1;
    int argmin = -1;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int c = g.cell(i, j);
            if (in_window[c] || !spec.holdall.contains(g.xc(i), g.yc(j))) continue;
            if (argmin < 0 || p.dk.dk.v[c] < p.dk.dk.v[argmin]) argmin = c;
        }
    if (argmin < 0) throw Error("no admissible probe cell inside the hold-all");

    ExpansionResult res;
    res.zi = argmin % g.nx;
    res.zj = argmin / g.nx;
    res.dk_at_z = p.dk.dk.v[argmin];
    res.k_probe = k_probe;
    const double zx = g.xc(res.zi), zy = g.yc(res.zj);

    const auto masks = window_masks(spec);
    const double k0 = cost(sample_windows(p.u0, masks), p.meas);
    p.u0 = Trajectory{}; // free the trajectory before the sweep

    for (double eps : eps_values) {
        const MaskField inc = rasterize(g, ShapeSpec::box(zx, zy, eps, eps));
        if (inc.count() == 0)
            throw Error("inclusion eps=" + std::to_string(eps) + " rasterizes to no cells");
        const WindowSamples s = solve_forward(g, spec.solver, penalty_field(inc, k_probe),
                                              spec.forcing, spec.boundary, masks);
        const double keps = cost(s, p.meas);
        const double ratio = (keps - k0) / (k_probe * 4.0 * eps * eps);
        res.eps.push_back(eps);
        res.ratios.push_back(ratio);
        const double denom = std::max(std::abs(res.dk_at_z), 1e-300);
        res.rel_errors.push_back(std::abs(ratio - res.dk_at_z) / denom);
    }
    return res;
}

GradientCheckResult adjoint_gradient_check(const TwinSpec& spec, std::vector<int> cells,
                                           const std::vector<double>& a_values, int count) {
    if (a_values.empty()) throw Error("gradient check needs probe amplitudes");
    for (std::size_t n = 0; n < a_values.size(); ++n) {
        if (!(a_values[n] > 0.0)) throw Error("gradient check needs positive amplitudes");
        if (n > 0 && a_values[n] >= a_values[n - 1])
            throw Error("gradient check amplitudes must decrease strictly");
    }

    Pipeline p = run_pipeline(spec);
    const Grid& g = spec.grid;
    const auto masks = window_masks(spec);
    const double k0 = cost(sample_windows(p.u0, masks), p.meas);
    p.u0 = Trajectory{};

    if (cells.empty()) {
        // deepest-|D_K| cells inside the hold-all (where the map is
        // consumed), outside the windows, pairwise separated
        std::vector<std::uint8_t> in_window(g.cell_count(), 0);
        for (const auto& m : masks)
            for (int c = 0; c < g.cell_count(); ++c)
                if (m.v[c]) in_window[c] = 1;
        std::vector<int> order(g.cell_count());
        for (int c = 0; c < g.cell_count(); ++c) order[c] = c;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const double da = std::abs(p.dk.dk.v[a]), db = std::abs(p.dk.dk.v[b]);
            if (da != db) return da > db;
            return a < b;
        });
        const int border = 6, min_sep = 4;
        for (int c : order) {
            if (static_cast<int>(cells.size()) >= count) break;
            const int i = c % g.nx, j = c / g.nx;
            if (i < border || i >= g.nx - border || j < border || j >= g.ny - border) continue;
            if (in_window[c]) continue;
            if (!spec.holdall.contains(g.xc(i), g.yc(j))) continue;
            bool far = true;
            for (int prev : cells) {
                const int pi = prev % g.nx, pj = prev / g.nx;
                if (std::abs(pi - i) < min_sep && std::abs(pj - j) < min_sep) far = false;
            }
            if (far) cells.push_back(c);
        }
        if (static_cast<int>(cells.size()) < count)
            throw Error("could not pick enough probe cells");
    }

    GradientCheckResult res;
    const double vc = g.cell_volume();
    for (int cell : cells) {
        GradientProbe probe;
        probe.cell = cell;
        probe.vc_dk = vc * p.dk.dk.v[cell];
        for (double a : a_values) {
            ScalarField kappa(g);
            kappa.v[cell] = a;
            const WindowSamples s =
                solve_forward(g, spec.solver, kappa, spec.forcing, spec.boundary, masks);
            const double fd = (cost(s, p.meas) - k0) / a;
            probe.a.push_back(a);
            probe.fd.push_back(fd);
            double err;
            if (std::abs(fd) < 1e-8 && std::abs(probe.vc_dk) < 1e-8)
                err = 0.0; // flat cost and zero gradient: degenerate match
            else
                err = std::abs(fd - probe.vc_dk) / std::max(std::abs(probe.vc_dk), 1e-300);
            probe.rel_error.push_back(err);
        }
        res.max_final_error = std::max(res.max_final_error, probe.rel_error.back());
        res.probes.push_back(std::move(probe));
    }
    return res;
}

std::vector<SeparationRow> separation_study(const TwinSpec& base,
                                            const std::vector<int>& separations) {
    const Grid& g = base.grid;
    const double dx = g.dx;
    std::vector<SeparationRow> rows;
    const double row = base.obstacles.empty() ? 0.5 * g.ly : base.obstacles.front().cy;
    for (int d : separations) {
        if (d < 1) throw Error("separation must be at least 1 cell");
        // two 4x4-cell boxes on the template's obstacle row, edge-to-edge
        // separation d cells, symmetric about the domain center
        const double off = (0.5 * d + 2.0) * dx;
        TwinSpec spec = base;
        spec.obstacles = {
            ShapeSpec::box(0.5 * g.lx - off, row, 2.0 * dx, 2.0 * dx),
            ShapeSpec::box(0.5 * g.lx + off, row, 2.0 * dx, 2.0 * dx),
        };
        const DetectionResult det = run_detection(spec);
        SeparationRow out;
        out.separation_cells = d;
        out.clusters = static_cast<int>(det.report.clusters.size());
        out.n_matched = det.report.n_matched;
        out.n_spurious = det.report.n_spurious;
        rows.push_back(out);
    }
    return rows;
}

} // namespace topoflow
