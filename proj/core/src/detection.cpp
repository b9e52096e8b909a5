#include "topoflow/detection.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "topoflow/errors.hpp"

namespace topoflow {

DetectionReport find_clusters(const ScalarField& dk, double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0) throw Error("alpha must lie in (0, 1]");
    const Grid& g = dk.grid;
    DetectionReport rep;
    rep.alpha = alpha;

    double dkmin = dk.v.empty() ? 0.0 : dk.v[0];
    for (double a : dk.v) dkmin = std::min(dkmin, a);
    rep.min_value = dkmin;
    if (!(dkmin < 0.0)) {
        rep.no_detection = true;
        return rep;
    }

    const double threshold = alpha * dkmin; // negative; dk <= threshold implies dk < 0
    const int n = g.cell_count();
    std::vector<std::uint8_t> cand(n, 0), seen(n, 0);
    for (int c = 0; c < n; ++c) cand[c] = dk.v[c] <= threshold;

    for (int c0 = 0; c0 < n; ++c0) {
        if (!cand[c0] || seen[c0]) continue;
        Cluster cl;
        std::queue<int> q;
        q.push(c0);
        seen[c0] = 1;
        while (!q.empty()) {
            const int c = q.front();
            q.pop();
            cl.cells.push_back(c);
            const int i = c % g.nx, j = c / g.nx;
            const int nb[4] = {i > 0 ? c - 1 : -1, i + 1 < g.nx ? c + 1 : -1,
                               j > 0 ? c - g.nx : -1, j + 1 < g.ny ? c + g.nx : -1};
            for (int b : nb)
                if (b >= 0 && cand[b] && !seen[b]) {
                    seen[b] = 1;
                    q.push(b);
                }
        }
        std::sort(cl.cells.begin(), cl.cells.end());
        cl.argmin_cell = cl.cells.front();
        cl.min_value = dk.v[cl.argmin_cell];
        for (int c : cl.cells)
            if (dk.v[c] < cl.min_value) {
                cl.min_value = dk.v[c];
                cl.argmin_cell = c;
            }
        rep.clusters.push_back(std::move(cl));
    }
    return rep;
}

void estimate_extent(const ScalarField& dk, Cluster& c, double beta) {
    if (!(beta > 0.0) || beta > 1.0) throw Error("beta must lie in (0, 1]");
    const Grid& g = dk.grid;
    const double level = beta * c.min_value;
    c.extent_cells.clear();
    c.i0 = g.nx;
    c.j0 = g.ny;
    c.i1 = -1;
    c.j1 = -1;
    for (int cell : c.cells) {
        if (dk.v[cell] > level) continue;
        c.extent_cells.push_back(cell);
        const int i = cell % g.nx, j = cell / g.nx;
        c.i0 = std::min(c.i0, i);
        c.i1 = std::max(c.i1, i);
        c.j0 = std::min(c.j0, j);
        c.j1 = std::max(c.j1, j);
    }
    c.extent_area = static_cast<double>(c.extent_cells.size()) * g.cell_volume();
}

void score(DetectionReport& rep, const Grid& g, const std::vector<ShapeSpec>& truth,
           double match_radius) {
    rep.match_radius = match_radius;
    rep.n_true = static_cast<int>(truth.size());
    rep.matches.clear();

    struct Pair {
        double d;
        int t, c;
    };
    std::vector<Pair> pairs;
    for (int t = 0; t < static_cast<int>(truth.size()); ++t) {
        for (int c = 0; c < static_cast<int>(rep.clusters.size()); ++c) {
            const int cell = rep.clusters[c].argmin_cell;
            const double x = g.xc(cell % g.nx), y = g.yc(cell / g.nx);
            const double d = std::hypot(x - truth[t].cx, y - truth[t].cy);
            if (d <= match_radius) pairs.push_back({d, t, c});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.d != b.d) return a.d < b.d;
        if (a.t != b.t) return a.t < b.t;
        return a.c < b.c;
    });

    std::vector<std::uint8_t> tdone(truth.size(), 0), cdone(rep.clusters.size(), 0);
    for (const Pair& p : pairs) {
        if (tdone[p.t] || cdone[p.c]) continue;
        tdone[p.t] = 1;
        cdone[p.c] = 1;
        rep.matches.push_back({p.t, p.c, p.d});
    }
    rep.n_matched = static_cast<int>(rep.matches.size());
    rep.n_missed = rep.n_true - rep.n_matched;
    rep.n_spurious = static_cast<int>(rep.clusters.size()) - rep.n_matched;
}

} // namespace topoflow
