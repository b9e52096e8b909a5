#pragma once

/// Parametric obstacle / window shapes and their rasterization onto a grid.

#include <vector>

#include "topoflow/fields.hpp"

namespace topoflow {

struct ShapeSpec {
    enum class Kind { Disk, Box };

    Kind kind = Kind::Disk;
    double cx = 0.0, cy = 0.0;
    double r = 0.0;            // disk radius
    double hx = 0.0, hy = 0.0; // box half-widths

    static ShapeSpec disk(double cx, double cy, double r) {
        ShapeSpec s;
        s.kind = Kind::Disk;
        s.cx = cx;
        s.cy = cy;
        s.r = r;
        return s;
    }
    static ShapeSpec box(double cx, double cy, double hx, double hy) {
        ShapeSpec s;
        s.kind = Kind::Box;
        s.cx = cx;
        s.cy = cy;
        s.hx = hx;
        s.hy = hy;
        return s;
    }

    /// Strict interior test.
    bool contains(double x, double y) const;

    /// Analytic area.
    double area() const;
};

/// Flags every cell whose center lies inside the shape.
MaskField rasterize(const Grid& g, const ShapeSpec& s);

/// Union of rasterizations.
MaskField rasterize(const Grid& g, const std::vector<ShapeSpec>& shapes);

/// Analytic perimeter: 2*pi*r for a disk, 4*(hx+hy) for a box.
double perimeter(const ShapeSpec& s);

/// Perimeter of a rasterized mask: interface edge count (mask/non-mask or
/// mask/domain-boundary) weighted by the edge lengths.
double mask_perimeter(const MaskField& m);

/// True if a's closure lies strictly inside b.
bool shape_inside(const ShapeSpec& a, const ShapeSpec& b);

/// True if the closures of a and b do not intersect.
bool shapes_disjoint(const ShapeSpec& a, const ShapeSpec& b);

/// True if the shape's closure stays at least `margin` away from the
/// domain boundary.
bool shape_within_domain(const ShapeSpec& s, const Grid& g, double margin);

/// Checks the detection geometry: every obstacle strictly inside the
/// hold-all, every window disjoint from the hold-all, and the hold-all,
/// obstacles and windows all strictly inside the domain with a margin of
/// two cells. Throws LayoutError on violation.
void validate_layout(const Grid& g, const ShapeSpec& holdall,
                     const std::vector<ShapeSpec>& obstacles,
                     const std::vector<ShapeSpec>& windows);

} // namespace topoflow
