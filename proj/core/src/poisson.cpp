#include "topoflow/poisson.hpp"

#include <cmath>

#include "topoflow/errors.hpp"

namespace topoflow {

namespace {

// y = -Lap(x) with homogeneous Neumann walls (missing neighbors drop out).
void apply_neg_laplacian(const Grid& g, const std::vector<double>& x, std::vector<double>& y) {
    const double ax = 1.0 / (g.dx * g.dx), ay = 1.0 / (g.dy * g.dy);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const int c = g.cell(i, j);
            double s = 0.0;
            if (i > 0) s += ax * (x[c] - x[c - 1]);
            if (i < g.nx - 1) s += ax * (x[c] - x[c + 1]);
            if (j > 0) s += ay * (x[c] - x[c - g.nx]);
            if (j < g.ny - 1) s += ay * (x[c] - x[c + g.nx]);
            y[c] = s;
        }
    }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) s += a[n] * b[n];
    return s;
}

void subtract_mean(std::vector<double>& v) {
    double m = 0.0;
    for (double a : v) m += a;
    m /= static_cast<double>(v.size());
    for (double& a : v) a -= m;
}

} // namespace

PoissonResult poisson_solve(const ScalarField& rhs, double tol, int max_iter,
                            const ScalarField& guess) {
    const Grid& g = rhs.grid;
    if (!(guess.grid == g)) throw SolverError("poisson_solve: guess grid mismatch");
    const int n = g.cell_count();

    PoissonResult res;
    res.p = ScalarField(g);

    // The pure-Neumann operator only determines p up to a constant and only
    // for zero-mean data; project the rhs onto the solvable subspace.
    std::vector<double> b = rhs.v;
    double mean = 0.0, amax = 0.0;
    for (double a : b) {
        mean += a;
        amax = std::max(amax, std::abs(a));
    }
    mean /= static_cast<double>(n);
    if (std::abs(mean) > 1e-13 * std::max(1.0, amax)) res.mean_removed = true;
    for (double& a : b) a -= mean;

    const double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) return res; // zero-mean rhs of zeros: p = 0 exactly

    std::vector<double>& x = res.p.v;
    x = guess.v;
    subtract_mean(x);

    std::vector<double> r(n), q(n), d(n);
    apply_neg_laplacian(g, x, q);
    for (int c = 0; c < n; ++c) r[c] = b[c] - q[c];
    d = r;
    double rr = dot(r, r);
    const double stop = tol * bnorm;

    int it = 0;
    while (std::sqrt(rr) > stop) {
        if (it++ >= max_iter)
            throw SolverError("poisson_solve: CG failed to reach tol=" + std::to_string(tol) +
                              " within " + std::to_string(max_iter) + " iterations");
        apply_neg_laplacian(g, d, q);
        const double alpha = rr / dot(d, q);
        for (int c = 0; c < n; ++c) x[c] += alpha * d[c];
        for (int c = 0; c < n; ++c) r[c] -= alpha * q[c];
        const double rr_new = dot(r, r);
        for (int c = 0; c < n; ++c) d[c] = r[c] + (rr_new / rr) * d[c];
        rr = rr_new;
    }

    subtract_mean(x);
    res.iterations = it;
    res.rel_residual = std::sqrt(rr) / bnorm;
    return res;
}

PoissonResult poisson_solve(const ScalarField& rhs, double tol, int max_iter) {
    return poisson_solve(rhs, tol, max_iter, ScalarField(rhs.grid));
}

} // namespace topoflow
