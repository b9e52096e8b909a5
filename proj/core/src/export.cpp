#include "topoflow/export.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "topoflow/errors.hpp"

namespace topoflow {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

void vtk_header(std::ofstream& out, const Grid& g, const std::string& title) {
    out << "# vtk DataFile Version 3.0\n"
        << title << "\nASCII\nDATASET STRUCTURED_POINTS\n"
        << "DIMENSIONS " << g.nx << ' ' << g.ny << " 1\n"
        << "ORIGIN " << fmt(0.5 * g.dx) << ' ' << fmt(0.5 * g.dy) << " 0\n"
        << "SPACING " << fmt(g.dx) << ' ' << fmt(g.dy) << " 1\n"
        << "POINT_DATA " << g.cell_count() << '\n';
}

} // namespace

void export_scalar_csv(const std::string& path, const ScalarField& f) {
    std::ofstream out = open_out(path);
    const Grid& g = f.grid;
    out << "# grid " << g.nx << ' ' << g.ny << ' ' << fmt(g.lx) << ' ' << fmt(g.ly) << '\n';
    out << "i,j,x,y,value\n";
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out << i << ',' << j << ',' << fmt(g.xc(i)) << ',' << fmt(g.yc(j)) << ','
                << fmt(f.at(i, j)) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

ScalarField import_scalar_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty file: " + path);
    int nx = 0, ny = 0;
    double lx = 0.0, ly = 0.0;
    if (std::sscanf(line.c_str(), "# grid %d %d %lf %lf", &nx, &ny, &lx, &ly) != 4)
        throw IoError("missing \"# grid\" line: " + path);
    ScalarField f(build_grid(nx, ny, lx, ly));
    if (!std::getline(in, line) || line != "i,j,x,y,value")
        throw IoError("missing column header: " + path);
    std::vector<bool> seen(f.v.size(), false);
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        int i = 0, j = 0;
        double x = 0.0, y = 0.0, value = 0.0;
        if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%lf", &i, &j, &x, &y, &value) != 5)
            throw IoError("malformed row \"" + line + "\": " + path);
        if (i < 0 || i >= nx || j < 0 || j >= ny)
            throw IoError("cell index out of range in \"" + line + "\": " + path);
        f.at(i, j) = value;
        seen[f.grid.cell(i, j)] = true;
        ++rows;
    }
    if (rows != nx * ny) throw IoError("expected " + std::to_string(nx * ny) + " rows: " + path);
    for (bool s : seen)
        if (!s) throw IoError("duplicate and missing cells: " + path);
    return f;
}

void export_vtk(const std::string& path, const ScalarField& f, const std::string& name) {
    std::ofstream out = open_out(path);
    vtk_header(out, f.grid, name);
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : f.v) out << fmt(v) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

void export_vtk(const std::string& path, const StaggeredVelocity& u, const std::string& name) {
    std::ofstream out = open_out(path);
    const Grid& g = u.grid;
    vtk_header(out, g, name);
    out << "VECTORS " << name << " double\n";
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double vx = 0.0, vy = 0.0;
            u.at_center(i, j, vx, vy);
            out << fmt(vx) << ' ' << fmt(vy) << " 0\n";
        }
    if (!out) throw IoError("write failed: " + path);
}

std::string report_to_json(const DetectionReport& rep, const Grid& g) {
    using json = nlohmann::ordered_json;
    json root;
    root["thresholds"] = {{"alpha", rep.alpha},
                          {"beta", rep.beta},
                          {"match_radius", rep.match_radius}};
    root["noise"] = {{"sigma", rep.noise_sigma}, {"seed", rep.seed}};
    root["no_detection"] = rep.no_detection;
    root["min_value"] = rep.min_value;
    root["clusters"] = json::array();
    for (const auto& c : rep.clusters) {
        const int i = c.argmin_cell % g.nx, j = c.argmin_cell / g.nx;
        json jc;
        jc["argmin"] = {{"i", i}, {"j", j}, {"x", g.xc(i)}, {"y", g.yc(j)}};
        jc["min_value"] = c.min_value;
        jc["cells"] = c.cells.size();
        jc["extent"] = {{"cells", c.extent_cells.size()},
                        {"bbox", {c.i0, c.i1, c.j0, c.j1}},
                        {"area", c.extent_area}};
        root["clusters"].push_back(std::move(jc));
    }
    root["score"] = {{"n_true", rep.n_true},
                     {"n_matched", rep.n_matched},
                     {"n_missed", rep.n_missed},
                     {"n_spurious", rep.n_spurious}};
    json matches = json::array();
    for (const auto& m : rep.matches)
        matches.push_back(
            {{"truth", m.truth_index}, {"cluster", m.cluster_index}, {"distance", m.distance}});
    root["score"]["matches"] = std::move(matches);
    return root.dump(2) + "\n";
}

void write_report_json(const std::string& path, const DetectionReport& rep, const Grid& g) {
    std::ofstream out = open_out(path);
    out << report_to_json(rep, g);
    if (!out) throw IoError("write failed: " + path);
}

} // namespace topoflow
