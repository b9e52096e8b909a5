#include "doctest.h"

#include <cmath>
#include <random>

#include "topoflow/ns_solver.hpp"
#include "topoflow/shapes.hpp"

using namespace topoflow;

namespace {

constexpr double kPi = 3.14159265358979323846;

SolverConfig lid_config(double T = 0.5) {
    SolverConfig cfg;
    cfg.T = T;
    return cfg;
}

// Exactly divergence-free MAC field from a discrete stream function that
// vanishes on the walls.
StaggeredVelocity stream_field(const Grid& g) {
    auto psi = [&](int i, int j) {
        double sx = std::sin(kPi * g.xf(i)), sy = std::sin(kPi * g.yf(j));
        return sx * sx * sy * sy;
    };
    StaggeredVelocity u(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) u.x(i, j) = (psi(i, j + 1) - psi(i, j)) / g.dy;
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) u.y(i, j) = -(psi(i + 1, j) - psi(i, j)) / g.dx;
    return u;
}

} // namespace

TEST_CASE("automatic step size honours lid speed and diffusion") {
    Grid g = build_grid(8, 8, 1.0, 1.0);
    SolverConfig cfg;
    cfg.nu = 0.01;
    cfg.T = 2.0;
    cfg.cfl_safety = 0.5;
    // diffusive limit 1/(2*0.01*(64+64)) = 0.390625, lid limit 0.125/2
    ForwardSolver solver(g, cfg, ScalarField(g), ForcingSpec::zero(),
                         BoundarySpec::lid(2.0, 0.2));
    CHECK(solver.dt() == doctest::Approx(0.03125).epsilon(1e-14));
    CHECK(solver.total_steps() == 64);

    StaggeredVelocity rest(g);
    CHECK(cfl_dt(rest, cfg) == doctest::Approx(0.5 * 0.390625).epsilon(1e-14));
    StaggeredVelocity moving(g);
    moving.fill(2.0);
    CHECK(cfl_dt(moving, cfg) == doctest::Approx(0.03125).epsilon(1e-14));
}

TEST_CASE("zero data keeps the flow exactly at rest") {
    Grid g = build_grid(16, 16, 1.0, 1.0);
    Trajectory traj =
        solve_forward(g, lid_config(), ScalarField(g), ForcingSpec::zero(), BoundarySpec::no_slip());
    CHECK(traj.steps() >= 1);
    for (const auto& u : traj.u) CHECK(u.max_abs() == 0.0);
}

TEST_CASE("divergence drops to the projection tolerance every step") {
    Grid g = build_grid(16, 16, 1.0, 1.0);
    Trajectory traj =
        solve_forward(g, lid_config(), ScalarField(g), ForcingSpec::zero(), BoundarySpec::lid(1.0, 0.1));
    CHECK(traj.u.back().max_abs() > 0.01); // flow actually developed
    for (const auto& u : traj.u) CHECK(max_divergence(u) <= 1e-8);
}

TEST_CASE("divergence of a linear-in-x field is one") {
    Grid g = build_grid(16, 16, 1.0, 1.0);
    StaggeredVelocity u(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) u.x(i, j) = g.xf(i);
    ScalarField div = divergence(u);
    for (double v : div.v) CHECK(v == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(max_divergence(u) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("implicit penalization divides interior faces by 1 + dt kappa") {
    Grid g = build_grid(8, 8, 1.0, 1.0);
    StaggeredVelocity v(g);
    v.fill(1.0);
    ScalarField kappa(g, 1e6);
    apply_penalization(v, kappa, 0.001);
    CHECK(v.x(3, 3) == 1.0 / 1001.0);
    CHECK(v.y(4, 4) == 1.0 / 1001.0);
    // boundary faces are carried by the boundary conditions, not the drag
    CHECK(v.x(0, 3) == 1.0);
    CHECK(v.x(8, 3) == 1.0);
    CHECK(v.y(4, 0) == 1.0);

    // a face flanked by one penalized cell sees the two-cell average
    StaggeredVelocity w(g);
    w.fill(1.0);
    ScalarField single(g);
    single.at(2, 2) = 1000.0;
    apply_penalization(w, single, 0.001);
    CHECK(w.x(2, 2) == doctest::Approx(1.0 / 1.5).epsilon(1e-15));
    CHECK(w.x(3, 2) == doctest::Approx(1.0 / 1.5).epsilon(1e-15));
    CHECK(w.y(2, 3) == doctest::Approx(1.0 / 1.5).epsilon(1e-15));
    CHECK(w.x(5, 5) == 1.0);
}

TEST_CASE("penalty_field scales the mask") {
    Grid g = build_grid(8, 8, 1.0, 1.0);
    MaskField m = rasterize(g, ShapeSpec::box(0.5, 0.5, 0.25, 0.25));
    ScalarField kappa = penalty_field(m, 1e6);
    CHECK(kappa.at(3, 3) == 1e6);
    CHECK(kappa.at(0, 0) == 0.0);
}

TEST_CASE("penalized obstacle region carries almost no flow") {
    Grid g = build_grid(32, 32, 1.0, 1.0);
    ShapeSpec obstacle = ShapeSpec::box(0.5, 0.5, 0.12, 0.12);
    ScalarField kappa = penalty_field(rasterize(g, obstacle), 1e6);
    Trajectory traj =
        solve_forward(g, lid_config(1.0), kappa, ForcingSpec::zero(), BoundarySpec::lid(1.0, 0.1));
    const StaggeredVelocity& u = traj.u.back();
    double inside = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!obstacle.contains(g.xc(i), g.yc(j))) continue;
            double vx, vy;
            u.at_center(i, j, vx, vy);
            inside = std::max(inside, std::hypot(vx, vy));
        }
    CHECK(u.max_abs() > 0.1);
    CHECK(inside < 0.02 * u.max_abs());
}

TEST_CASE("advection is skew-symmetric for a divergence-free carrier") {
    Grid g = build_grid(16, 16, 1.0, 1.0);
    StaggeredVelocity U = stream_field(g);
    CHECK(max_divergence(U) < 1e-12);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    StaggeredVelocity v(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) v.x(i, j) = dist(rng);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) v.y(i, j) = dist(rng);

    StaggeredVelocity Av(g);
    add_advection(U, v, WallSpeeds{}, 1.0, Av);
    double dot = 0.0, na = 0.0, nv = 0.0;
    for (size_t k = 0; k < Av.ux.size(); ++k) {
        dot += Av.ux[k] * v.ux[k];
        na += Av.ux[k] * Av.ux[k];
        nv += v.ux[k] * v.ux[k];
    }
    for (size_t k = 0; k < Av.uy.size(); ++k) {
        dot += Av.uy[k] * v.uy[k];
        na += Av.uy[k] * Av.uy[k];
        nv += v.uy[k] * v.uy[k];
    }
    CHECK(na > 0.0);
    CHECK(std::abs(dot) <= 1e-11 * std::sqrt(na * nv));
}

TEST_CASE("advection sign flag flips the increment") {
    Grid g = build_grid(16, 16, 1.0, 1.0);
    StaggeredVelocity U = stream_field(g);
    StaggeredVelocity plus(g), minus(g);
    add_advection(U, U, WallSpeeds{}, 1.0, plus);
    add_advection(U, U, WallSpeeds{}, -1.0, minus);
    for (size_t k = 0; k < plus.ux.size(); ++k) CHECK(plus.ux[k] == -minus.ux[k]);
    for (size_t k = 0; k < plus.uy.size(); ++k) CHECK(plus.uy[k] == -minus.uy[k]);
}

TEST_CASE("constant forcing raises interior faces only") {
    Grid g = build_grid(8, 8, 1.0, 1.0);
    StaggeredVelocity out(g);
    add_forcing(ForcingSpec::constant(0.3, -0.1), g, 2.0, out);
    CHECK(out.x(3, 3) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(out.y(3, 3) == doctest::Approx(-0.2).epsilon(1e-15));
    CHECK(out.x(0, 3) == 0.0);
    CHECK(out.x(8, 3) == 0.0);
    CHECK(out.y(3, 0) == 0.0);
    CHECK(out.y(3, 8) == 0.0);
}

TEST_CASE("lid ramp and wall speed placement") {
    BoundarySpec top = BoundarySpec::lid(1.0, 0.1);
    CHECK(top.phi(0.0) == 0.0);
    CHECK(top.phi(0.05) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(top.phi(0.1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(top.phi(1.7) == doctest::Approx(1.0).epsilon(1e-15));
    WallSpeeds w = top.walls(0.05);
    CHECK(w.u_top == doctest::Approx(0.5));
    CHECK(w.u_bottom == 0.0);
    CHECK(w.v_left == 0.0);

    BoundarySpec left = BoundarySpec::lid(2.0, 0.0, BoundarySpec::Side::Left);
    WallSpeeds wl = left.walls(1.0);
    CHECK(wl.v_left == doctest::Approx(2.0));
    CHECK(wl.u_top == 0.0);

    WallSpeeds none = BoundarySpec::no_slip().walls(1.0);
    CHECK(none.u_top == 0.0);
}

TEST_CASE("kinetic energy of the lid flow stays under the lid bound") {
    Grid g = build_grid(32, 32, 1.0, 1.0);
    Trajectory traj =
        solve_forward(g, lid_config(1.0), ScalarField(g), ForcingSpec::zero(), BoundarySpec::lid(1.0, 0.1));
    double ke = kinetic_energy(traj.u.back());
    CHECK(ke > 0.0);
    CHECK(ke < 0.5); // 0.5 * |Omega| * lid_speed^2
}

TEST_CASE("trajectory time grid is uniform and kappa-independent") {
    Grid g = build_grid(16, 16, 1.0, 1.0);
    SolverConfig cfg = lid_config(1.0);
    BoundarySpec bc = BoundarySpec::lid(1.0, 0.1);
    ForwardSolver a(g, cfg, ScalarField(g), ForcingSpec::zero(), bc);
    ForwardSolver b(g, cfg, penalty_field(rasterize(g, ShapeSpec::box(0.5, 0.5, 0.1, 0.1)), 1e6),
                    ForcingSpec::zero(), bc);
    CHECK(a.dt() == b.dt());
    CHECK(a.total_steps() == b.total_steps());

    Trajectory traj = solve_forward(g, cfg, ScalarField(g), ForcingSpec::zero(), bc);
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times.back() == doctest::Approx(1.0).epsilon(1e-12));
    for (int n = 1; n <= traj.steps(); ++n)
        CHECK(traj.times[n] - traj.times[n - 1] == doctest::Approx(traj.dt()).epsilon(1e-12));
}

TEST_CASE("oversized explicit step is rejected") {
    Grid g = build_grid(32, 32, 1.0, 1.0);
    SolverConfig cfg = lid_config(1.0);
    cfg.dt = 0.5; // far above the diffusive limit
    CHECK_THROWS_AS(
        solve_forward(g, cfg, ScalarField(g), ForcingSpec::zero(), BoundarySpec::lid(1.0, 0.1)),
        SolverError);
}

TEST_CASE("window sampling matches the sampling of the stored trajectory") {
    Grid g = build_grid(24, 24, 1.0, 1.0);
    SolverConfig cfg = lid_config(0.5);
    BoundarySpec bc = BoundarySpec::lid(1.0, 0.1);
    std::vector<MaskField> windows = {rasterize(g, ShapeSpec::box(0.5, 0.8, 0.15, 0.1))};

    WindowSamples direct = solve_forward(g, cfg, ScalarField(g), ForcingSpec::zero(), bc, windows);
    Trajectory traj = solve_forward(g, cfg, ScalarField(g), ForcingSpec::zero(), bc);
    WindowSamples resampled = sample_windows(traj, windows);

    REQUIRE(direct.times.size() == resampled.times.size());
    REQUIRE(direct.window_cells == resampled.window_cells);
    CHECK(direct.total_cells() > 0);
    CHECK(direct.ux == resampled.ux);
    CHECK(direct.uy == resampled.uy);
}
