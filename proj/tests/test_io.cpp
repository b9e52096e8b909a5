#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "topoflow/config.hpp"
#include "topoflow/errors.hpp"
#include "topoflow/export.hpp"

using namespace topoflow;

namespace {

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("topoflow_" + name)).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE_MESSAGE(bool(in), "cannot read " << path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream out(path);
    for (const auto& l : lines) out << l << '\n';
}

// the key parse_config blames for a schema violation
std::string key_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.offending_key;
    }
    return "<no error>";
}

const char* kExample = R"({
  "grid": {"nx": 64, "ny": 64},
  "solver": {"nu": 0.02, "T": 1.5, "poisson_tol": 1e-11},
  "forcing": {"kind": "vortex", "amplitude": 0.3, "wavenumbers": [2, 1]},
  "boundary": {"kind": "lid", "speed": 1.25, "t_ramp": 0.2, "side": "left"},
  "obstacles": [{"kind": "disk", "center": [0.45, 0.5], "radius": 0.05}],
  "windows": [{"kind": "box", "center": [0.5, 0.86], "half_widths": [0.08, 0.08]}],
  "noise_sigma": 0.01,
  "seed": 7,
  "detection": {"alpha": 0.6, "beta": 0.4, "match_radius": 0.05}
})";

} // namespace

TEST_CASE("config parse fills fields and serialization is a fixed point") {
    const RunConfig cfg = parse_config(kExample);
    CHECK(cfg.grid.nx == 64);
    CHECK(cfg.grid.ny == 64);
    CHECK(cfg.grid.lx == 1.0);
    CHECK(cfg.solver.nu == 0.02);
    CHECK(cfg.solver.T == 1.5);
    CHECK(cfg.solver.poisson_tol == 1e-11);
    CHECK(cfg.solver.k_penalty == 1e6);
    CHECK(cfg.forcing.kind == ForcingSpec::Kind::Vortex);
    CHECK(cfg.forcing.amplitude == 0.3);
    CHECK(cfg.forcing.kx == 2);
    CHECK(cfg.forcing.ky == 1);
    CHECK(cfg.boundary.kind == BoundarySpec::Kind::Lid);
    CHECK(cfg.boundary.side == BoundarySpec::Side::Left);
    CHECK(cfg.boundary.lid_speed == 1.25);
    CHECK(cfg.boundary.t_ramp == 0.2);
    // omitted hold-all defaults to the centered quarter-extent box
    CHECK(cfg.holdall.kind == ShapeSpec::Kind::Box);
    CHECK(cfg.holdall.cx == 0.5);
    CHECK(cfg.holdall.hx == 0.25);
    REQUIRE(cfg.obstacles.size() == 1);
    CHECK(cfg.obstacles[0].kind == ShapeSpec::Kind::Disk);
    CHECK(cfg.obstacles[0].r == 0.05);
    REQUIRE(cfg.windows.size() == 1);
    CHECK(cfg.windows[0].hx == 0.08);
    CHECK(cfg.noise_sigma == 0.01);
    CHECK(cfg.seed == 7);
    CHECK(cfg.detection.alpha == 0.6);
    CHECK(cfg.detection.beta == 0.4);
    CHECK(cfg.detection.match_radius == 0.05);

    const std::string s1 = serialize_config(cfg);
    const std::string s2 = serialize_config(parse_config(s1));
    CHECK(s1 == s2);
}

TEST_CASE("minimal config applies documented defaults") {
    const RunConfig cfg = parse_config(R"({"grid": {"nx": 8, "ny": 8}})");
    CHECK(cfg.grid.lx == 1.0);
    CHECK(cfg.grid.ly == 1.0);
    CHECK(cfg.solver.nu == 0.01);
    CHECK(cfg.solver.T == 2.0);
    CHECK(cfg.boundary.kind == BoundarySpec::Kind::Lid);
    CHECK(cfg.boundary.side == BoundarySpec::Side::Top);
    CHECK(cfg.boundary.lid_speed == 1.0);
    CHECK(cfg.boundary.t_ramp == 0.2); // a tenth of the default horizon
    CHECK(cfg.holdall.cx == 0.5);
    CHECK(cfg.holdall.hy == 0.25);
    CHECK(cfg.obstacles.empty());
    CHECK(cfg.windows.empty());
    CHECK(cfg.noise_sigma == 0.0);
    CHECK(cfg.seed == 0);
    CHECK(cfg.detection.alpha == 0.5);
    CHECK(cfg.detection.beta == 0.5);
    CHECK(cfg.detection.match_radius == 0.0);
}

TEST_CASE("node-span boxes resolve to exact physical extents") {
    const RunConfig cfg = parse_config(R"({
      "grid": {"nx": 350, "ny": 300, "lx": 700000.0, "ly": 600000.0},
      "holdall": {"kind": "box", "cells": "201:205,271:275"}
    })");
    CHECK(cfg.grid.dx == 2000.0);
    CHECK(cfg.grid.dy == 2000.0);
    CHECK(cfg.holdall.cx == 406000.0);
    CHECK(cfg.holdall.cy == 546000.0);
    CHECK(cfg.holdall.hx == 4000.0);
    CHECK(cfg.holdall.hy == 4000.0);

    // node-span boxes serialize in center/half-width form and round-trip
    const std::string s1 = serialize_config(cfg);
    CHECK(serialize_config(parse_config(s1)) == s1);
}

TEST_CASE("config schema violations name the offending key") {
    CHECK(key_of(R"({"grid": {"nx": 8, "ny": 8}, "fo": 1})") == "fo");
    CHECK(key_of(R"({"grid": {"nx": 8, "ny": 8}, "solver": {"nux": 1.0}})") == "solver.nux");
    CHECK(key_of(R"({})") == "grid");
    CHECK(key_of(R"({"grid": {"ny": 8}})") == "grid.nx");
    CHECK(key_of(R"({"grid": {"nx": 8, "ny": 8}, "noise_sigma": 1.0})") == "noise_sigma");
    CHECK(key_of(R"({"grid": {"nx": 8, "ny": 8}, "solver": {"cfl_safety": 1.5}})") ==
          "solver.cfl_safety");
    CHECK(key_of(R"({"grid": {"nx": 8, "ny": 8}, "detection": {"alpha": 0.0}})") ==
          "detection.alpha");
    CHECK(key_of(R"({"grid": {"nx": 8, "ny": 8}, "boundary": {"kind": "lid", "side": "north"}})") ==
          "boundary.side");
    CHECK(key_of(R"({"grid": {"nx": 8, "ny": 8}, "seed": -3})") == "seed");
    CHECK(key_of(
              R"({"grid": {"nx": 8, "ny": 8},
                  "forcing": {"kind": "vortex", "amplitude": 1.0, "wavenumbers": [0, 2]}})") ==
          "forcing.wavenumbers");
    CHECK(key_of(R"({"grid": {"nx": 8, "ny": 8}, "obstacles": 3})") == "obstacles");
    CHECK(key_of(
              R"({"grid": {"nx": 8, "ny": 8},
                  "obstacles": [{"kind": "disk", "center": [0.5, 0.5], "radius": -1.0}]})") ==
          "obstacles[0].radius");
    CHECK(key_of(R"({"grid": {"nx": 8, "ny": 8}, "holdall": {"kind": "box", "cells": "5:5,0:4"}})") ==
          "holdall.cells");
    CHECK(key_of(R"({"grid": {"nx": 8, "ny": 8}, "holdall": {"kind": "box", "cells": "0:4"}})") ==
          "holdall.cells");
    CHECK(key_of(R"({"grid": {"nx": 8, "ny": 8}, "holdall": {"kind": "box", "cells": "0:4,0:9"}})") ==
          "holdall.cells");
    CHECK(key_of(R"({"grid": {"nx": 8, "ny": 8}, "holdall": {"kind": "ball"}})") == "holdall.kind");
}

TEST_CASE("config syntax errors surface as config errors without a key") {
    try {
        parse_config("{ nope");
        FAIL("expected a parse failure");
    } catch (const ConfigError& e) {
        CHECK(e.offending_key.empty());
        CHECK(std::string(e.what()).size() > 0);
    }
}

TEST_CASE("config layout violations surface as layout errors") {
    // obstacle far outside the default centered hold-all
    CHECK_THROWS_AS(parse_config(R"({
        "grid": {"nx": 64, "ny": 64},
        "obstacles": [{"kind": "disk", "center": [0.1, 0.1], "radius": 0.03}]
    })"),
                    LayoutError);
}

TEST_CASE("config loads from disk and missing files raise io errors") {
    const std::string path = tmp_path("config.json");
    {
        std::ofstream out(path);
        out << kExample;
    }
    const RunConfig cfg = load_config(path);
    CHECK(serialize_config(cfg) == serialize_config(parse_config(kExample)));
    CHECK_THROWS_AS(load_config(tmp_path("no_such_config.json")), IoError);
}

TEST_CASE("config converts to a twin specification") {
    const TwinSpec twin = to_twin(parse_config(kExample));
    CHECK(twin.grid.nx == 64);
    CHECK(twin.solver.nu == 0.02);
    CHECK(twin.boundary.side == BoundarySpec::Side::Left);
    CHECK(twin.obstacles.size() == 1);
    CHECK(twin.windows.size() == 1);
    CHECK(twin.noise_sigma == 0.01);
    CHECK(twin.seed == 7);
    CHECK(twin.alpha == 0.6);
    CHECK(twin.beta == 0.4);
    CHECK(twin.match_radius == 0.05);
    CHECK(twin.resolved_match_radius() == 0.05);
}

TEST_CASE("scalar csv round-trips doubles exactly") {
    const Grid g = build_grid(5, 4, 2.0, 1.0);
    ScalarField f(g);
    const std::vector<double> specials = {1e-300,
                                          -3.141592653589793,
                                          0.0,
                                          1e300,
                                          1.0 / 3.0,
                                          -2.2250738585072014e-308,
                                          6.02214076e23};
    for (int c = 0; c < g.cell_count(); ++c) {
        f.v[c] = c < static_cast<int>(specials.size())
                     ? specials[c]
                     : std::sin(0.7 * c) * std::pow(10.0, (c % 13) - 6);
    }

    const std::string path = tmp_path("field.csv");
    export_scalar_csv(path, f);
    const ScalarField r = import_scalar_csv(path);
    CHECK(r.grid.nx == g.nx);
    CHECK(r.grid.ny == g.ny);
    CHECK(r.grid.lx == g.lx);
    CHECK(r.grid.ly == g.ly);
    CHECK(r.v == f.v);
}

TEST_CASE("csv import rejects damaged files") {
    const Grid g = build_grid(4, 4, 1.0, 1.0);
    ScalarField f(g);
    for (int c = 0; c < g.cell_count(); ++c) f.v[c] = 0.5 * c;
    const std::string path = tmp_path("damaged.csv");
    export_scalar_csv(path, f);
    const std::vector<std::string> good = lines_of(slurp(path));
    REQUIRE(good.size() == 2 + 16);

    CHECK_THROWS_AS(import_scalar_csv(tmp_path("no_such_field.csv")), IoError);

    write_lines(path, {});
    CHECK_THROWS_AS(import_scalar_csv(path), IoError);

    auto bad = good;
    bad[0] = "# grd 4 4 1 1";
    write_lines(path, bad);
    CHECK_THROWS_AS(import_scalar_csv(path), IoError);

    bad = good;
    bad[1] = "i,j,value";
    write_lines(path, bad);
    CHECK_THROWS_AS(import_scalar_csv(path), IoError);

    bad = good;
    bad.resize(2 + 5); // truncated body
    write_lines(path, bad);
    CHECK_THROWS_AS(import_scalar_csv(path), IoError);

    bad = good;
    bad[5] = "oops";
    write_lines(path, bad);
    CHECK_THROWS_AS(import_scalar_csv(path), IoError);

    bad = good;
    bad[5] = "9,0,0.5,0.5,1.0"; // index outside the grid
    write_lines(path, bad);
    CHECK_THROWS_AS(import_scalar_csv(path), IoError);

    bad = good;
    bad[5] = bad[6]; // duplicate row shadows a missing cell
    write_lines(path, bad);
    CHECK_THROWS_AS(import_scalar_csv(path), IoError);
}

TEST_CASE("vtk exports are structured-points files") {
    const Grid g = build_grid(6, 5, 1.0, 1.0);
    ScalarField f(g);
    for (int c = 0; c < g.cell_count(); ++c) f.v[c] = 0.25 * c;

    const std::string spath = tmp_path("field.vtk");
    export_vtk(spath, f, "sensitivity");
    const std::string stext = slurp(spath);
    CHECK(stext.rfind("# vtk DataFile Version", 0) == 0);
    CHECK(stext.find("DATASET STRUCTURED_POINTS") != std::string::npos);
    CHECK(stext.find("DIMENSIONS 6 5 1") != std::string::npos);
    CHECK(stext.find("POINT_DATA 30") != std::string::npos);
    CHECK(stext.find("SCALARS sensitivity double 1") != std::string::npos);
    CHECK(stext.find("LOOKUP_TABLE default") != std::string::npos);

    const std::string vpath = tmp_path("velocity.vtk");
    StaggeredVelocity u(g);
    export_vtk(vpath, u, "velocity");
    const std::string vtext = slurp(vpath);
    CHECK(vtext.find("DATASET STRUCTURED_POINTS") != std::string::npos);
    CHECK(vtext.find("VECTORS velocity double") != std::string::npos);
}

TEST_CASE("detection report serializes to parseable json") {
    const Grid g = build_grid(10, 10, 1.0, 1.0);
    DetectionReport rep;
    rep.alpha = 0.5;
    rep.beta = 0.25;
    rep.match_radius = 0.3;
    rep.noise_sigma = 0.01;
    rep.seed = 42;
    rep.min_value = -2.5;
    Cluster c;
    c.cells = {33, 34, 43, 44};
    c.argmin_cell = 33; // i = 3, j = 3
    c.min_value = -2.5;
    c.extent_cells = {33, 34};
    c.i0 = 3;
    c.i1 = 4;
    c.j0 = 3;
    c.j1 = 4;
    c.extent_area = 0.02;
    rep.clusters = {c};
    rep.n_true = 2;
    rep.n_matched = 1;
    rep.n_missed = 1;
    rep.n_spurious = 0;
    Match m;
    m.truth_index = 0;
    m.cluster_index = 0;
    m.distance = 0.05;
    rep.matches = {m};

    const std::string text = report_to_json(rep, g);
    const nlohmann::json j = nlohmann::json::parse(text);
    CHECK(j["thresholds"]["alpha"] == 0.5);
    CHECK(j["thresholds"]["beta"] == 0.25);
    CHECK(j["thresholds"]["match_radius"] == 0.3);
    CHECK(j["noise"]["sigma"] == 0.01);
    CHECK(j["noise"]["seed"] == 42);
    CHECK(j["no_detection"] == false);
    CHECK(j["min_value"] == -2.5);
    REQUIRE(j["clusters"].size() == 1);
    CHECK(j["clusters"][0]["argmin"]["i"] == 3);
    CHECK(j["clusters"][0]["argmin"]["j"] == 3);
    CHECK(j["clusters"][0]["argmin"]["x"] == g.xc(3));
    CHECK(j["clusters"][0]["argmin"]["y"] == g.yc(3));
    CHECK(j["clusters"][0]["min_value"] == -2.5);
    CHECK(j["clusters"][0]["cells"] == 4);
    CHECK(j["clusters"][0]["extent"]["cells"] == 2);
    CHECK(j["clusters"][0]["extent"]["bbox"] == nlohmann::json::array({3, 4, 3, 4}));
    CHECK(j["clusters"][0]["extent"]["area"] == 0.02);
    CHECK(j["score"]["n_true"] == 2);
    CHECK(j["score"]["n_matched"] == 1);
    CHECK(j["score"]["n_missed"] == 1);
    CHECK(j["score"]["n_spurious"] == 0);
    REQUIRE(j["score"]["matches"].size() == 1);
    CHECK(j["score"]["matches"][0]["truth"] == 0);
    CHECK(j["score"]["matches"][0]["cluster"] == 0);
    CHECK(j["score"]["matches"][0]["distance"] == 0.05);

    const std::string path = tmp_path("report.json");
    write_report_json(path, rep, g);
    CHECK(slurp(path) == text);
}
