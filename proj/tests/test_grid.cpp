#include "doctest.h"

#include "topoflow/grid.hpp"

using namespace topoflow;

TEST_CASE("build_grid sets spacings and counts") {
    Grid g = build_grid(96, 96, 1.0, 1.0);
    CHECK(g.dx == 1.0 / 96);
    CHECK(g.dy == 1.0 / 96);
    CHECK(g.cell_count() == 96 * 96);
    CHECK(g.xface_count() == 97 * 96);
    CHECK(g.yface_count() == 96 * 97);
    CHECK(g.cell_volume() == doctest::Approx(1.0 / 9216).epsilon(1e-15));
}

TEST_CASE("grid indexing and staggered coordinates") {
    Grid g = build_grid(8, 16, 2.0, 1.0);
    CHECK(g.dx == 0.25);
    CHECK(g.dy == doctest::Approx(1.0 / 16).epsilon(1e-15));
    CHECK(g.cell(0, 0) == 0);
    CHECK(g.cell(1, 2) == 1 + 8 * 2);
    CHECK(g.xface(8, 0) == 8);        // last vertical face of row 0
    CHECK(g.yface(0, 16) == 8 * 16);  // first horizontal face of the top row
    // centers sit half a cell in, faces on the lines
    CHECK(g.xc(0) == 0.125);
    CHECK(g.yc(0) == doctest::Approx(0.03125));
    CHECK(g.xf(0) == 0.0);
    CHECK(g.xf(8) == 2.0);
    CHECK(g.yf(16) == 1.0);
    CHECK(g.max_spacing() == 0.25);
    CHECK(g.min_spacing() == doctest::Approx(1.0 / 16));
}

TEST_CASE("grid equality compares shape and extent") {
    Grid a = build_grid(8, 8, 1.0, 1.0);
    Grid b = build_grid(8, 8, 1.0, 1.0);
    Grid c = build_grid(8, 8, 2.0, 1.0);
    CHECK(a == b);
    CHECK_FALSE(a == c);
}

TEST_CASE("build_grid rejects degenerate input") {
    CHECK_THROWS_AS(build_grid(3, 8, 1.0, 1.0), Error);
    CHECK_THROWS_AS(build_grid(8, 3, 1.0, 1.0), Error);
    CHECK_THROWS_AS(build_grid(8, 8, 0.0, 1.0), Error);
    CHECK_THROWS_AS(build_grid(8, 8, 1.0, -1.0), Error);
}
