#include "topoflow/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "topoflow/errors.hpp"

namespace topoflow {

namespace {

using json = nlohmann::ordered_json;

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

void check_keys(const json& obj, const std::string& prefix,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) ok = true;
        if (!ok) throw ConfigError("unknown key", join(prefix, item.key()));
    }
}

const json& expect_object(const json& v, const std::string& key) {
    if (!v.is_object()) throw ConfigError("expected an object", key);
    return v;
}

double get_double(const json& obj, const char* key, const std::string& prefix, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError("expected a number", join(prefix, key));
    return v.get<double>();
}

int get_int(const json& obj, const char* key, const std::string& prefix, int fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError("expected an integer", join(prefix, key));
    return v.get<int>();
}

std::string get_string(const json& obj, const char* key, const std::string& prefix,
                       const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) throw ConfigError("expected a string", join(prefix, key));
    return v.get<std::string>();
}

void get_pair(const json& obj, const char* key, const std::string& prefix, double& a, double& b) {
    const std::string full = join(prefix, key);
    if (!obj.contains(key)) throw ConfigError("missing key", full);
    const json& v = obj.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError("expected an array of two numbers", full);
    a = v[0].get<double>();
    b = v[1].get<double>();
}

void require_positive(double v, const std::string& key) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("must be positive", key);
}

ShapeSpec parse_shape(const json& v, const Grid& g, const std::string& prefix) {
    expect_object(v, prefix);
    const std::string kind = get_string(v, "kind", prefix, "");
    if (kind == "disk") {
        check_keys(v, prefix, {"kind", "center", "radius"});
        double cx = 0.0, cy = 0.0;
        get_pair(v, "center", prefix, cx, cy);
        if (!v.contains("radius")) throw ConfigError("missing key", join(prefix, "radius"));
        const double r = get_double(v, "radius", prefix, 0.0);
        require_positive(r, join(prefix, "radius"));
        return ShapeSpec::disk(cx, cy, r);
    }
    if (kind == "box") {
        if (v.contains("cells")) {
            check_keys(v, prefix, {"kind", "cells"});
            const std::string span = get_string(v, "cells", prefix, "");
            int i0 = 0, i1 = 0, j0 = 0, j1 = 0, used = 0;
            if (std::sscanf(span.c_str(), "%d:%d,%d:%d%n", &i0, &i1, &j0, &j1, &used) != 4 ||
                used != static_cast<int>(span.size()))
                throw ConfigError("expected \"i0:i1,j0:j1\"", join(prefix, "cells"));
            if (i0 < 0 || i1 <= i0 || i1 > g.nx || j0 < 0 || j1 <= j0 || j1 > g.ny)
                throw ConfigError("node span out of range", join(prefix, "cells"));
            return ShapeSpec::box(0.5 * (i0 + i1) * g.dx, 0.5 * (j0 + j1) * g.dy,
                                  0.5 * (i1 - i0) * g.dx, 0.5 * (j1 - j0) * g.dy);
        }
        check_keys(v, prefix, {"kind", "center", "half_widths"});
        double cx = 0.0, cy = 0.0, hx = 0.0, hy = 0.0;
        get_pair(v, "center", prefix, cx, cy);
        get_pair(v, "half_widths", prefix, hx, hy);
        require_positive(hx, join(prefix, "half_widths"));
        require_positive(hy, join(prefix, "half_widths"));
        return ShapeSpec::box(cx, cy, hx, hy);
    }
    throw ConfigError("shape kind must be \"disk\" or \"box\"", join(prefix, "kind"));
}

std::vector<ShapeSpec> parse_shape_list(const json& root, const char* key, const Grid& g) {
    std::vector<ShapeSpec> shapes;
    if (!root.contains(key)) return shapes;
    const json& v = root.at(key);
    if (!v.is_array()) throw ConfigError("expected an array of shapes", key);
    for (std::size_t n = 0; n < v.size(); ++n)
        shapes.push_back(parse_shape(v[n], g, std::string(key) + "[" + std::to_string(n) + "]"));
    return shapes;
}

json shape_to_json(const ShapeSpec& s) {
    json v;
    if (s.kind == ShapeSpec::Kind::Disk) {
        v["kind"] = "disk";
        v["center"] = {s.cx, s.cy};
        v["radius"] = s.r;
    } else {
        v["kind"] = "box";
        v["center"] = {s.cx, s.cy};
        v["half_widths"] = {s.hx, s.hy};
    }
    return v;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(e.what());
    }
    expect_object(root, "<document>");
    check_keys(root, "", {"grid", "solver", "forcing", "boundary", "holdall", "obstacles",
                          "windows", "noise_sigma", "seed", "detection"});

    RunConfig cfg;

    if (!root.contains("grid")) throw ConfigError("missing key", "grid");
    {
        const json& g = expect_object(root.at("grid"), "grid");
        check_keys(g, "grid", {"nx", "ny", "lx", "ly"});
        const int nx = get_int(g, "nx", "grid", 0);
        const int ny = get_int(g, "ny", "grid", 0);
        if (nx < 4) throw ConfigError("must be an integer >= 4", "grid.nx");
        if (ny < 4) throw ConfigError("must be an integer >= 4", "grid.ny");
        const double lx = get_double(g, "lx", "grid", 1.0);
        const double ly = get_double(g, "ly", "grid", 1.0);
        require_positive(lx, "grid.lx");
        require_positive(ly, "grid.ly");
        cfg.grid = build_grid(nx, ny, lx, ly);
    }

    if (root.contains("solver")) {
        const json& s = expect_object(root.at("solver"), "solver");
        check_keys(s, "solver",
                   {"nu", "k_penalty", "T", "dt", "cfl_safety", "poisson_tol",
                    "poisson_max_iter", "div_tol"});
        cfg.solver.nu = get_double(s, "nu", "solver", cfg.solver.nu);
        cfg.solver.k_penalty = get_double(s, "k_penalty", "solver", cfg.solver.k_penalty);
        cfg.solver.T = get_double(s, "T", "solver", cfg.solver.T);
        cfg.solver.dt = get_double(s, "dt", "solver", cfg.solver.dt);
        cfg.solver.cfl_safety = get_double(s, "cfl_safety", "solver", cfg.solver.cfl_safety);
        cfg.solver.poisson_tol = get_double(s, "poisson_tol", "solver", cfg.solver.poisson_tol);
        cfg.solver.poisson_max_iter =
            get_int(s, "poisson_max_iter", "solver", cfg.solver.poisson_max_iter);
        cfg.solver.div_tol = get_double(s, "div_tol", "solver", cfg.solver.div_tol);
    }
    require_positive(cfg.solver.nu, "solver.nu");
    require_positive(cfg.solver.k_penalty, "solver.k_penalty");
    require_positive(cfg.solver.T, "solver.T");
    if (cfg.solver.dt < 0.0) throw ConfigError("must be >= 0", "solver.dt");
    if (!(cfg.solver.cfl_safety > 0.0) || cfg.solver.cfl_safety > 1.0)
        throw ConfigError("must lie in (0, 1]", "solver.cfl_safety");
    require_positive(cfg.solver.poisson_tol, "solver.poisson_tol");
    if (cfg.solver.poisson_max_iter < 1) throw ConfigError("must be >= 1", "solver.poisson_max_iter");
    require_positive(cfg.solver.div_tol, "solver.div_tol");

    if (root.contains("forcing")) {
        const json& f = expect_object(root.at("forcing"), "forcing");
        const std::string kind = get_string(f, "kind", "forcing", "zero");
        if (kind == "zero") {
            check_keys(f, "forcing", {"kind"});
            cfg.forcing = ForcingSpec::zero();
        } else if (kind == "constant") {
            check_keys(f, "forcing", {"kind", "g"});
            double gx = 0.0, gy = 0.0;
            get_pair(f, "g", "forcing", gx, gy);
            cfg.forcing = ForcingSpec::constant(gx, gy);
        } else if (kind == "vortex") {
            check_keys(f, "forcing", {"kind", "amplitude", "wavenumbers"});
            if (!f.contains("amplitude")) throw ConfigError("missing key", "forcing.amplitude");
            const double amp = get_double(f, "amplitude", "forcing", 0.0);
            double kx = 0.0, ky = 0.0;
            get_pair(f, "wavenumbers", "forcing", kx, ky);
            if (kx != std::floor(kx) || ky != std::floor(ky) || kx < 1 || ky < 1)
                throw ConfigError("wavenumbers must be integers >= 1", "forcing.wavenumbers");
            cfg.forcing = ForcingSpec::vortex(amp, static_cast<int>(kx), static_cast<int>(ky));
        } else {
            throw ConfigError("forcing kind must be \"zero\", \"constant\" or \"vortex\"",
                              "forcing.kind");
        }
    }

    if (root.contains("boundary")) {
        const json& b = expect_object(root.at("boundary"), "boundary");
        const std::string kind = get_string(b, "kind", "boundary", "lid");
        if (kind == "no_slip") {
            check_keys(b, "boundary", {"kind"});
            cfg.boundary = BoundarySpec::no_slip();
        } else if (kind == "lid") {
            check_keys(b, "boundary", {"kind", "speed", "t_ramp", "side"});
            const double speed = get_double(b, "speed", "boundary", 1.0);
            const double t_ramp = get_double(b, "t_ramp", "boundary", 0.1 * cfg.solver.T);
            if (t_ramp < 0.0) throw ConfigError("must be >= 0", "boundary.t_ramp");
            const std::string side = get_string(b, "side", "boundary", "top");
            BoundarySpec::Side s;
            if (side == "top")
                s = BoundarySpec::Side::Top;
            else if (side == "bottom")
                s = BoundarySpec::Side::Bottom;
            else if (side == "left")
                s = BoundarySpec::Side::Left;
            else if (side == "right")
                s = BoundarySpec::Side::Right;
            else
                throw ConfigError("side must be \"top\", \"bottom\", \"left\" or \"right\"",
                                  "boundary.side");
            cfg.boundary = BoundarySpec::lid(speed, t_ramp, s);
        } else {
            throw ConfigError("boundary kind must be \"no_slip\" or \"lid\"", "boundary.kind");
        }
    } else {
        cfg.boundary = BoundarySpec::lid(1.0, 0.1 * cfg.solver.T);
    }

    if (root.contains("holdall"))
        cfg.holdall = parse_shape(root.at("holdall"), cfg.grid, "holdall");
    else
        cfg.holdall = ShapeSpec::box(0.5 * cfg.grid.lx, 0.5 * cfg.grid.ly, 0.25 * cfg.grid.lx,
                                     0.25 * cfg.grid.ly);

    cfg.obstacles = parse_shape_list(root, "obstacles", cfg.grid);
    cfg.windows = parse_shape_list(root, "windows", cfg.grid);

    cfg.noise_sigma = get_double(root, "noise_sigma", "", 0.0);
    if (!(cfg.noise_sigma >= 0.0) || cfg.noise_sigma >= 1.0)
        throw ConfigError("must lie in [0, 1)", "noise_sigma");

    if (root.contains("seed")) {
        const json& v = root.at("seed");
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0))
            throw ConfigError("expected a non-negative integer", "seed");
        cfg.seed = v.get<std::uint64_t>();
    }

    if (root.contains("detection")) {
        const json& d = expect_object(root.at("detection"), "detection");
        check_keys(d, "detection", {"alpha", "beta", "match_radius"});
        cfg.detection.alpha = get_double(d, "alpha", "detection", cfg.detection.alpha);
        cfg.detection.beta = get_double(d, "beta", "detection", cfg.detection.beta);
        cfg.detection.match_radius =
            get_double(d, "match_radius", "detection", cfg.detection.match_radius);
    }
    if (!(cfg.detection.alpha > 0.0) || cfg.detection.alpha > 1.0)
        throw ConfigError("must lie in (0, 1]", "detection.alpha");
    if (!(cfg.detection.beta > 0.0) || cfg.detection.beta > 1.0)
        throw ConfigError("must lie in (0, 1]", "detection.beta");
    if (cfg.detection.match_radius < 0.0) throw ConfigError("must be >= 0", "detection.match_radius");

    validate_layout(cfg.grid, cfg.holdall, cfg.obstacles, cfg.windows);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
    json root;
    root["grid"] = {{"nx", cfg.grid.nx}, {"ny", cfg.grid.ny}, {"lx", cfg.grid.lx},
                    {"ly", cfg.grid.ly}};
    root["solver"] = {{"nu", cfg.solver.nu},
                      {"k_penalty", cfg.solver.k_penalty},
                      {"T", cfg.solver.T},
                      {"dt", cfg.solver.dt},
                      {"cfl_safety", cfg.solver.cfl_safety},
                      {"poisson_tol", cfg.solver.poisson_tol},
                      {"poisson_max_iter", cfg.solver.poisson_max_iter},
                      {"div_tol", cfg.solver.div_tol}};
    switch (cfg.forcing.kind) {
        case ForcingSpec::Kind::Zero:
            root["forcing"] = {{"kind", "zero"}};
            break;
        case ForcingSpec::Kind::Constant:
            root["forcing"] = {{"kind", "constant"}, {"g", {cfg.forcing.gx, cfg.forcing.gy}}};
            break;
        case ForcingSpec::Kind::Vortex:
            root["forcing"] = {{"kind", "vortex"},
                               {"amplitude", cfg.forcing.amplitude},
                               {"wavenumbers", {cfg.forcing.kx, cfg.forcing.ky}}};
            break;
    }
    if (cfg.boundary.kind == BoundarySpec::Kind::NoSlip) {
        root["boundary"] = {{"kind", "no_slip"}};
    } else {
        const char* side = "top";
        switch (cfg.boundary.side) {
            case BoundarySpec::Side::Top: side = "top"; break;
            case BoundarySpec::Side::Bottom: side = "bottom"; break;
            case BoundarySpec::Side::Left: side = "left"; break;
            case BoundarySpec::Side::Right: side = "right"; break;
        }
        root["boundary"] = {{"kind", "lid"},
                            {"speed", cfg.boundary.lid_speed},
                            {"t_ramp", cfg.boundary.t_ramp},
                            {"side", side}};
    }
    root["holdall"] = shape_to_json(cfg.holdall);
    root["obstacles"] = json::array();
    for (const auto& s : cfg.obstacles) root["obstacles"].push_back(shape_to_json(s));
    root["windows"] = json::array();
    for (const auto& s : cfg.windows) root["windows"].push_back(shape_to_json(s));
    root["noise_sigma"] = cfg.noise_sigma;
    root["seed"] = cfg.seed;
    root["detection"] = {{"alpha", cfg.detection.alpha},
                         {"beta", cfg.detection.beta},
                         {"match_radius", cfg.detection.match_radius}};
    return root.dump(2) + "\n";
}

TwinSpec to_twin(const RunConfig& cfg) {
    TwinSpec spec;
    spec.grid = cfg.grid;
    spec.solver = cfg.solver;
    spec.forcing = cfg.forcing;
    spec.boundary = cfg.boundary;
    spec.holdall = cfg.holdall;
    spec.obstacles = cfg.obstacles;
    spec.windows = cfg.windows;
    spec.noise_sigma = cfg.noise_sigma;
    spec.seed = cfg.seed;
    spec.alpha = cfg.detection.alpha;
    spec.beta = cfg.detection.beta;
    spec.match_radius = cfg.detection.match_radius;
    return spec;
}

} // namespace topoflow
