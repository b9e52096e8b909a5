#include "doctest.h"

#include <cmath>

#include "topoflow/shapes.hpp"

using namespace topoflow;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("box rasterization flags exactly the interior cell centers") {
    Grid g = build_grid(8, 8, 1.0, 1.0);
    // centers (i+1/2)/8 lie in (0.25, 0.75) for i = 2..5 -> a 4x4 block
    MaskField m = rasterize(g, ShapeSpec::box(0.5, 0.5, 0.25, 0.25));
    CHECK(m.count() == 16);
    CHECK(m.area() == doctest::Approx(0.25).epsilon(1e-15));
    for (int j = 0; j < 8; ++j)
        for (int i = 0; i < 8; ++i) {
            bool inside = i >= 2 && i <= 5 && j >= 2 && j <= 5;
            CHECK(m.at(i, j) == (inside ? 1 : 0));
        }
}

TEST_CASE("disk rasterization keeps centers strictly inside the radius") {
    Grid g = build_grid(8, 8, 1.0, 1.0);
    // center offsets are (i-3.5, j-3.5)/8; only offsets {0.5, 1.5} satisfy
    // (di^2+dj^2) < (0.3*8)^2 = 5.76 -> again the middle 4x4 block
    MaskField m = rasterize(g, ShapeSpec::disk(0.5, 0.5, 0.3));
    CHECK(m.count() == 16);
    CHECK(m.at(1, 3) == 0); // offset (-2.5, -0.5): 6.5 > 5.76
    CHECK(m.at(2, 2) == 1); // offset (-1.5, -1.5): 4.5 < 5.76
}

TEST_CASE("union rasterization merges shapes") {
    Grid g = build_grid(8, 8, 1.0, 1.0);
    std::vector<ShapeSpec> shapes = {ShapeSpec::box(0.25, 0.25, 0.1, 0.1),
                                     ShapeSpec::box(0.75, 0.75, 0.1, 0.1)};
    MaskField m = rasterize(g, shapes);
    // each box covers (0.15,0.35)^2 resp. (0.65,0.85)^2: centers i=1,2 resp. 5,6
    CHECK(m.count() == 8);
    CHECK(m.at(1, 2) == 1);
    CHECK(m.at(5, 6) == 1);
    CHECK(m.at(3, 3) == 0);
}

TEST_CASE("containment is strict on the boundary") {
    ShapeSpec b = ShapeSpec::box(0.5, 0.5, 0.25, 0.25);
    CHECK(b.contains(0.5, 0.5));
    CHECK_FALSE(b.contains(0.25, 0.5));
    CHECK_FALSE(b.contains(0.5, 0.75));
    ShapeSpec d = ShapeSpec::disk(0.5, 0.5, 0.3);
    CHECK(d.contains(0.5, 0.79));
    CHECK_FALSE(d.contains(0.5, 0.8));
    CHECK_FALSE(d.contains(0.8, 0.5));
}

TEST_CASE("analytic area and perimeter") {
    CHECK(ShapeSpec::box(0.1, 0.2, 0.25, 0.1).area() == doctest::Approx(0.5 * 0.2).epsilon(1e-15));
    CHECK(ShapeSpec::disk(0.0, 0.0, 0.3).area() == doctest::Approx(kPi * 0.09).epsilon(1e-15));
    CHECK(perimeter(ShapeSpec::box(0.5, 0.5, 0.25, 0.25)) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(perimeter(ShapeSpec::disk(0.5, 0.5, 0.3)) ==
          doctest::Approx(2.0 * kPi * 0.3).epsilon(1e-15));
}

TEST_CASE("mask perimeter counts interface and wall edges") {
    Grid g = build_grid(8, 8, 1.0, 1.0);
    // grid-aligned box: 4 sides x 4 edges x dx matches the analytic perimeter
    MaskField box = rasterize(g, ShapeSpec::box(0.5, 0.5, 0.25, 0.25));
    CHECK(mask_perimeter(box) == doctest::Approx(2.0).epsilon(1e-15));
    MaskField one(g);
    one.at(3, 3) = 1;
    CHECK(mask_perimeter(one) == doctest::Approx(4.0 / 8).epsilon(1e-15));
    // a mask hugging the domain boundary counts the wall edges too
    MaskField all(g, 1);
    CHECK(mask_perimeter(all) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("strict inclusion and disjointness predicates") {
    ShapeSpec hold = ShapeSpec::box(0.5, 0.5, 0.25, 0.25);
    CHECK(shape_inside(ShapeSpec::box(0.5, 0.5, 0.1, 0.1), hold));
    CHECK_FALSE(shape_inside(hold, hold)); // closure not strictly inside itself
    CHECK(shape_inside(ShapeSpec::disk(0.5, 0.5, 0.2), hold));
    CHECK_FALSE(shape_inside(ShapeSpec::disk(0.5, 0.5, 0.25), hold));
    CHECK_FALSE(shape_inside(ShapeSpec::box(0.7, 0.5, 0.1, 0.1), hold));

    CHECK(shapes_disjoint(ShapeSpec::box(0.2, 0.2, 0.1, 0.1), ShapeSpec::box(0.6, 0.2, 0.1, 0.1)));
    // closures sharing the x = 0.4 edge are not disjoint
    CHECK_FALSE(
        shapes_disjoint(ShapeSpec::box(0.3, 0.2, 0.1, 0.1), ShapeSpec::box(0.5, 0.2, 0.1, 0.1)));
    CHECK(shapes_disjoint(ShapeSpec::disk(0.2, 0.2, 0.1), ShapeSpec::disk(0.5, 0.2, 0.15)));
}

TEST_CASE("shape_within_domain honours the margin") {
    Grid g = build_grid(64, 64, 1.0, 1.0);
    double margin = 2.0 * g.max_spacing();
    CHECK(shape_within_domain(ShapeSpec::box(0.5, 0.5, 0.25, 0.25), g, margin));
    CHECK_FALSE(shape_within_domain(ShapeSpec::box(0.04, 0.5, 0.02, 0.02), g, margin));
}

TEST_CASE("validate_layout enforces the detection geometry") {
    Grid g = build_grid(64, 64, 1.0, 1.0);
    ShapeSpec hold = ShapeSpec::box(0.5, 0.5, 0.25, 0.25);
    std::vector<ShapeSpec> obstacles = {ShapeSpec::box(0.5, 0.6, 0.05, 0.05)};
    std::vector<ShapeSpec> windows = {ShapeSpec::box(0.5, 0.86, 0.1, 0.1)};
    CHECK_NOTHROW(validate_layout(g, hold, obstacles, windows));

    SUBCASE("obstacle leaking out of the hold-all") {
        obstacles[0] = ShapeSpec::box(0.72, 0.5, 0.05, 0.05);
        try {
            validate_layout(g, hold, obstacles, windows);
            FAIL("expected LayoutError");
        } catch (const LayoutError& e) {
            CHECK(e.code == LayoutError::Code::ObstacleOutsideHoldall);
        }
    }
    SUBCASE("window overlapping the hold-all") {
        windows[0] = ShapeSpec::box(0.5, 0.74, 0.1, 0.1);
        try {
            validate_layout(g, hold, obstacles, windows);
            FAIL("expected LayoutError");
        } catch (const LayoutError& e) {
            CHECK(e.code == LayoutError::Code::WindowIntersectsHoldall);
        }
    }
    SUBCASE("window pressed against the domain wall") {
        windows[0] = ShapeSpec::box(0.5, 0.95, 0.1, 0.05);
        try {
            validate_layout(g, hold, obstacles, windows);
            FAIL("expected LayoutError");
        } catch (const LayoutError& e) {
            CHECK(e.code == LayoutError::Code::ShapeTouchesBoundary);
        }
    }
}
