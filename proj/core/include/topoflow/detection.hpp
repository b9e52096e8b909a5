#pragma once

/// Obstacle read-out from a sensitivity map: thresholded negative minima,
/// 4-connected clustering, level-set extent, and matching against a known
/// layout.

#include <cstdint>
#include <vector>

#include "topoflow/fields.hpp"
#include "topoflow/shapes.hpp"

namespace topoflow {

struct Cluster {
    std::vector<int> cells; // ascending linear ids
    int argmin_cell = -1;   // deepest cell; ties resolve to the lowest id
    double min_value = 0.0;
    // level-set extent, filled by estimate_extent
    std::vector<int> extent_cells;
    int i0 = 0, i1 = -1, j0 = 0, j1 = -1; // extent bounding box, inclusive
    double extent_area = 0.0;
};

struct Match {
    int truth_index = -1;
    int cluster_index = -1;
    double distance = 0.0;
};

struct DetectionReport {
    double alpha = 0.0, beta = 0.0, match_radius = 0.0;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    bool no_detection = false;
    double min_value = 0.0;
    std::vector<Cluster> clusters;
    // scoring against a known layout (filled by score)
    int n_true = 0, n_matched = 0, n_missed = 0, n_spurious = 0;
    std::vector<Match> matches;
};

/// Thresholds the field at alpha * min(dk) (alpha in (0,1]), keeping only
/// strictly negative cells, and groups candidates into 4-connected
/// components in ascending linear-id order. Sets no_detection when the
/// field has no negative value.
DetectionReport find_clusters(const ScalarField& dk, double alpha);

/// Members at or below beta * cluster minimum; records cell list, bounding
/// box and area.
void estimate_extent(const ScalarField& dk, Cluster& c, double beta);

/// Greedy nearest-first matching of cluster argmin centers to true shape
/// centers within match_radius.
void score(DetectionReport& rep, const Grid& g, const std::vector<ShapeSpec>& truth,
           double match_radius);

} // namespace topoflow
