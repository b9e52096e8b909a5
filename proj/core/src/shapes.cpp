#include "topoflow/shapes.hpp"

#include <cmath>

namespace topoflow {

bool ShapeSpec::contains(double x, double y) const {
    if (kind == Kind::Disk) {
        const double ddx = x - cx, ddy = y - cy;
        return ddx * ddx + ddy * ddy < r * r;
    }
    return std::abs(x - cx) < hx && std::abs(y - cy) < hy;
}

double ShapeSpec::area() const {
    if (kind == Kind::Disk) return M_PI * r * r;
    return 4.0 * hx * hy;
}

MaskField rasterize(const Grid& g, const ShapeSpec& s) {
    MaskField m(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (s.contains(g.xc(i), g.yc(j))) m.at(i, j) = 1;
    return m;
}

MaskField rasterize(const Grid& g, const std::vector<ShapeSpec>& shapes) {
    MaskField m(g);
    for (const auto& s : shapes) {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                if (s.contains(g.xc(i), g.yc(j))) m.at(i, j) = 1;
    }
    return m;
}

double perimeter(const ShapeSpec& s) {
    if (s.kind == ShapeSpec::Kind::Disk) return 2.0 * M_PI * s.r;
    return 4.0 * (s.hx + s.hy);
}

double mask_perimeter(const MaskField& m) {
    const Grid& g = m.grid;
    double per = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (!m.at(i, j)) continue;
            // a cell edge counts when the neighbor across it is outside the mask
            if (i == 0 || !m.at(i - 1, j)) per += g.dy;
            if (i == g.nx - 1 || !m.at(i + 1, j)) per += g.dy;
            if (j == 0 || !m.at(i, j - 1)) per += g.dx;
            if (j == g.ny - 1 || !m.at(i, j + 1)) per += g.dx;
        }
    }
    return per;
}

namespace {

// Largest distance from a point to a box's corners.
double max_corner_dist(double px, double py, const ShapeSpec& box) {
    const double ex = std::abs(px - box.cx) + box.hx;
    const double ey = std::abs(py - box.cy) + box.hy;
    return std::hypot(ex, ey);
}

// Euclidean distance from a point to a box (0 if inside).
double point_box_dist(double px, double py, const ShapeSpec& box) {
    const double ex = std::max(std::abs(px - box.cx) - box.hx, 0.0);
    const double ey = std::max(std::abs(py - box.cy) - box.hy, 0.0);
    return std::hypot(ex, ey);
}

} // namespace

bool shape_inside(const ShapeSpec& a, const ShapeSpec& b) {
    using K = ShapeSpec::Kind;
    if (b.kind == K::Box) {
        const double ax = (a.kind == K::Disk) ? a.r : a.hx;
        const double ay = (a.kind == K::Disk) ? a.r : a.hy;
        return std::abs(a.cx - b.cx) + ax < b.hx && std::abs(a.cy - b.cy) + ay < b.hy;
    }
    if (a.kind == K::Disk) return std::hypot(a.cx - b.cx, a.cy - b.cy) + a.r < b.r;
    return max_corner_dist(b.cx, b.cy, a) < b.r;
}

bool shapes_disjoint(const ShapeSpec& a, const ShapeSpec& b) {
    using K = ShapeSpec::Kind;
    if (a.kind == K::Box && b.kind == K::Box)
        return std::abs(a.cx - b.cx) > a.hx + b.hx || std::abs(a.cy - b.cy) > a.hy + b.hy;
    if (a.kind == K::Disk && b.kind == K::Disk)
        return std::hypot(a.cx - b.cx, a.cy - b.cy) > a.r + b.r;
    const ShapeSpec& disk = (a.kind == K::Disk) ? a : b;
    const ShapeSpec& box = (a.kind == K::Disk) ? b : a;
    return point_box_dist(disk.cx, disk.cy, box) > disk.r;
}

bool shape_within_domain(const ShapeSpec& s, const Grid& g, double margin) {
    const double ex = (s.kind == ShapeSpec::Kind::Disk) ? s.r : s.hx;
    const double ey = (s.kind == ShapeSpec::Kind::Disk) ? s.r : s.hy;
    return s.cx - ex >= margin && s.cx + ex <= g.lx - margin && s.cy - ey >= margin &&
           s.cy + ey <= g.ly - margin;
}

void validate_layout(const Grid& g, const ShapeSpec& holdall,
                     const std::vector<ShapeSpec>& obstacles,
                     const std::vector<ShapeSpec>& windows) {
    const double margin = 2.0 * g.max_spacing();
    if (!shape_within_domain(holdall, g, margin))
        throw LayoutError(LayoutError::Code::ShapeTouchesBoundary,
                          "hold-all region too close to the domain boundary");
    for (std::size_t n = 0; n < obstacles.size(); ++n) {
        if (!shape_within_domain(obstacles[n], g, margin))
            throw LayoutError(LayoutError::Code::ShapeTouchesBoundary,
                              "obstacle " + std::to_string(n) + " too close to the domain boundary");
        if (!shape_inside(obstacles[n], holdall))
            throw LayoutError(LayoutError::Code::ObstacleOutsideHoldall,
                              "obstacle " + std::to_string(n) + " not inside the hold-all region");
    }
    for (std::size_t n = 0; n < windows.size(); ++n) {
        if (!shape_within_domain(windows[n], g, margin))
            throw LayoutError(LayoutError::Code::ShapeTouchesBoundary,
                              "observation window " + std::to_string(n) +
                                  " too close to the domain boundary");
        if (!shapes_disjoint(windows[n], holdall))
            throw LayoutError(LayoutError::Code::WindowIntersectsHoldall,
                              "observation window " + std::to_string(n) +
                                  " intersects the hold-all region");
    }
}

} // namespace topoflow
