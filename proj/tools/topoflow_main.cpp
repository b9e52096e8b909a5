// Command-line front end: forward runs, synthetic measurements, obstacle
// detection, the quantitative verification sweeps, and the two-obstacle
// separation study. Exit codes: 0 success, 1 usage/config error,
// 2 numerical failure, 3 I/O error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "topoflow/config.hpp"
#include "topoflow/export.hpp"

namespace tf = topoflow;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw tf::IoError("cannot open for writing: " + path.string());
    return out;
}

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    double noise_override = -1.0;  // negative: keep the configured value
    long long seed_override = -1;  // negative: keep the configured value

    tf::RunConfig load() const {
        tf::RunConfig cfg = tf::load_config(config_path);
        if (noise_override >= 0.0) cfg.noise_sigma = noise_override;
        if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
        return cfg;
    }
    std::filesystem::path out(const std::string& name) const {
        std::filesystem::create_directories(out_dir);
        return std::filesystem::path(out_dir) / name;
    }
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_dir, "output directory (created if missing)");
    cmd->add_option("--noise", args.noise_override, "override noise_sigma");
    cmd->add_option("--seed", args.seed_override, "override noise seed");
}

void write_rate_csv(const std::filesystem::path& path, const char* abscissa,
                    const tf::RateResult& res) {
    std::ofstream out = open_out(path);
    out << abscissa << ",norm\n";
    for (std::size_t n = 0; n < res.values.size(); ++n)
        out << fmt(res.values[n]) << ',' << fmt(res.norms[n]) << '\n';
    out << "# fitted_slope," << fmt(res.fit.slope) << ",intercept," << fmt(res.fit.intercept)
        << ",max_residual," << fmt(res.fit.max_residual) << '\n';
}

int run_forward(const CommonArgs& args) {
    const tf::RunConfig cfg = args.load();
    const tf::ScalarField kappa =
        tf::penalty_field(tf::rasterize(cfg.grid, cfg.obstacles), cfg.solver.k_penalty);
    tf::ForwardSolver solver(cfg.grid, cfg.solver, kappa, cfg.forcing, cfg.boundary);

    std::ofstream energy = open_out(args.out("energy.csv"));
    energy << "t,kinetic_energy,max_divergence\n";
    energy << fmt(0.0) << ',' << fmt(0.0) << ',' << fmt(0.0) << '\n';
    while (!solver.done()) {
        solver.advance();
        energy << fmt(solver.time()) << ',' << fmt(tf::kinetic_energy(solver.state())) << ','
               << fmt(tf::max_divergence(solver.state())) << '\n';
    }
    tf::export_vtk(args.out("velocity.vtk").string(), solver.state(), "velocity");
    std::cout << "forward: " << solver.total_steps() << " steps, dt " << solver.dt()
              << ", final KE " << tf::kinetic_energy(solver.state()) << "\n";
    return 0;
}

int run_synth(const CommonArgs& args) {
    const tf::RunConfig cfg = args.load();
    const tf::TwinSpec spec = tf::to_twin(cfg);
    if (spec.windows.empty()) throw tf::Error("config has no observation windows");
    const tf::MeasurementSet meas = tf::synth_measurements(spec);

    std::ofstream out = open_out(args.out("measurements.csv"));
    const tf::WindowSamples& s = meas.samples;
    out << "# sigma " << fmt(meas.sigma) << " seed " << meas.seed << '\n';
    out << "t,window,i,j,ux,uy\n";
    const int total = s.total_cells();
    for (std::size_t n = 0; n < s.times.size(); ++n) {
        int k = 0;
        for (std::size_t w = 0; w < s.window_cells.size(); ++w)
            for (int cell : s.window_cells[w]) {
                out << fmt(s.times[n]) << ',' << w << ',' << cell % s.grid.nx << ','
                    << cell / s.grid.nx << ',' << fmt(s.ux[n * total + k]) << ','
                    << fmt(s.uy[n * total + k]) << '\n';
                ++k;
            }
    }
    std::cout << "synth: " << total << " window cells x " << s.times.size() << " time levels\n";
    return 0;
}

int run_detect(const CommonArgs& args) {
    tf::RunConfig cfg = args.load();
    tf::TwinSpec spec = tf::to_twin(cfg);
    if (spec.windows.empty()) throw tf::Error("config has no observation windows");

    const tf::DetectionResult det = tf::run_detection(spec);
    tf::export_scalar_csv(args.out("dk.csv").string(), det.sensitivity.dk);
    tf::export_vtk(args.out("dk.vtk").string(), det.sensitivity.dk, "topological_gradient");
    tf::write_report_json(args.out("report.json").string(), det.report, spec.grid);
    std::cout << "detect: " << det.report.clusters.size() << " cluster(s), "
              << det.report.n_matched << '/' << det.report.n_true << " matched, "
              << det.report.n_spurious << " spurious\n";
    return 0;
}

int run_separation(const CommonArgs& args, const std::vector<int>& separations) {
    const tf::RunConfig cfg = args.load();
    tf::TwinSpec spec = tf::to_twin(cfg);
    if (spec.windows.empty()) throw tf::Error("config has no observation windows");
    const auto rows = tf::separation_study(spec, separations);

    std::ofstream out = open_out(args.out("separation.csv"));
    out << "separation_cells,clusters,n_matched,n_spurious\n";
    for (const auto& r : rows) {
        out << r.separation_cells << ',' << r.clusters << ',' << r.n_matched << ','
            << r.n_spurious << '\n';
        std::cout << "separation " << r.separation_cells << ": " << r.clusters << " cluster(s)\n";
    }
    return 0;
}

int run_verify_penalization(const CommonArgs& args, const std::vector<double>& k_values) {
    const tf::RunConfig cfg = args.load();
    const tf::MaskField region = tf::rasterize(cfg.grid, cfg.obstacles);
    if (region.count() == 0) throw tf::Error("config has no obstacles to penalize");
    const tf::RateResult res =
        tf::verify_penalization_rate(tf::to_twin(cfg), region, k_values);
    write_rate_csv(args.out("penalization_rate.csv"), "k", res);
    std::cout << "penalization: slope " << res.fit.slope << " (expected near -0.5)\n";
    return 0;
}

int run_verify_decay(const CommonArgs& args, std::vector<double> eps_values,
                     std::vector<double> z) {
    const tf::RunConfig cfg = args.load();
    if (eps_values.empty())
        for (double m : {15.5, 7.5, 3.5, 1.5}) eps_values.push_back(m * cfg.grid.dx);
    double zx, zy;
    if (z.size() == 2) {
        zx = z[0];
        zy = z[1];
    } else if (!cfg.obstacles.empty()) {
        zx = cfg.obstacles[0].cx;
        zy = cfg.obstacles[0].cy;
    } else {
        zx = cfg.holdall.cx;
        zy = cfg.holdall.cy;
    }
    const tf::RateResult res = tf::verify_perturbation_decay(tf::to_twin(cfg), zx, zy, eps_values);
    write_rate_csv(args.out("decay.csv"), "eps", res);
    std::cout << "decay: slope " << res.fit.slope << " (expected > 1)\n";
    return 0;
}

int run_verify_expansion(const CommonArgs& args, std::vector<double> eps_values, double k_probe) {
    const tf::RunConfig cfg = args.load();
    if (eps_values.empty())
        for (double m : {7.5, 5.5, 3.5, 1.5}) eps_values.push_back(m * cfg.grid.dx);
    const tf::ExpansionResult res = tf::verify_expansion(tf::to_twin(cfg), eps_values, k_probe);

    std::ofstream out = open_out(args.out("expansion.csv"));
    out << "eps,ratio,rel_error\n";
    for (std::size_t n = 0; n < res.eps.size(); ++n)
        out << fmt(res.eps[n]) << ',' << fmt(res.ratios[n]) << ',' << fmt(res.rel_errors[n])
            << '\n';
    out << "# dk_at_z," << fmt(res.dk_at_z) << ",zi," << res.zi << ",zj," << res.zj
        << ",k_probe," << fmt(res.k_probe) << '\n';
    std::cout << "expansion: rel error " << res.rel_errors.back() << " at eps "
              << res.eps.back() << '\n';
    return 0;
}

int run_verify_adjoint(const CommonArgs& args, const std::vector<double>& a_values, int count) {
    const tf::RunConfig cfg = args.load();
    const tf::GradientCheckResult res =
        tf::adjoint_gradient_check(tf::to_twin(cfg), {}, a_values, count);

    std::ofstream out = open_out(args.out("adjoint.csv"));
    out << "cell,i,j,a,vc_dk,fd,rel_error\n";
    for (const auto& p : res.probes)
        for (std::size_t n = 0; n < p.a.size(); ++n)
            out << p.cell << ',' << p.cell % cfg.grid.nx << ',' << p.cell / cfg.grid.nx << ','
                << fmt(p.a[n]) << ',' << fmt(p.vc_dk) << ',' << fmt(p.fd[n]) << ','
                << fmt(p.rel_error[n]) << '\n';
    out << "# max_final_error," << fmt(res.max_final_error) << '\n';
    std::cout << "adjoint: max rel error " << res.max_final_error << " at a "
              << a_values.back() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Obstacle detection in unsteady incompressible flow via the "
                 "topological gradient of a velocity-misfit functional"};
    app.require_subcommand(1);

    CommonArgs fwd_args;
    add_common(app.add_subcommand("forward", "integrate the penalized flow, write energy.csv "
                                             "and velocity.vtk"),
               fwd_args);

    CommonArgs synth_args;
    add_common(app.add_subcommand("synth", "synthesize window measurements of the true layout"),
               synth_args);

    CommonArgs det_args;
    add_common(app.add_subcommand("detect", "measurements -> sensitivity map -> clusters; "
                                            "writes dk.csv, dk.vtk, report.json"),
               det_args);

    CommonArgs sep_args;
    std::vector<int> separations = {20, 10, 4, 1};
    {
        CLI::App* c = app.add_subcommand("separation", "two-obstacle resolution study");
        add_common(c, sep_args);
        c->add_option("--separations", separations, "edge-to-edge gaps in cells")
            ->delimiter(',');
    }

    CLI::App* verify = app.add_subcommand("verify", "quantitative model checks");
    verify->require_subcommand(1);

    CommonArgs pen_args;
    std::vector<double> k_values = {1e2, 1e3, 1e4, 1e5, 1e6};
    {
        CLI::App* c = verify->add_subcommand("penalization",
                                             "interior-velocity decay rate in the penalty k");
        add_common(c, pen_args);
        c->add_option("--k", k_values, "ascending penalty values")->delimiter(',');
    }

    CommonArgs dec_args;
    std::vector<double> dec_eps, dec_z;
    {
        CLI::App* c = verify->add_subcommand("decay",
                                             "flow perturbation decay as the inclusion shrinks");
        add_common(c, dec_args);
        c->add_option("--eps", dec_eps, "descending inclusion half-widths")->delimiter(',');
        c->add_option("--z", dec_z, "inclusion center x y")->expected(2);
    }

    CommonArgs exp_args;
    std::vector<double> exp_eps;
    double k_probe = 10.0;
    {
        CLI::App* c = verify->add_subcommand("expansion",
                                             "first-order cost expansion at the map minimizer");
        add_common(c, exp_args);
        c->add_option("--eps", exp_eps, "inclusion half-widths")->delimiter(',');
        c->add_option("--k-probe", k_probe, "probe penalty (linear-response regime)");
    }

    CommonArgs adj_args;
    std::vector<double> a_values = {1e-1, 1e-2, 1e-3};
    int probe_count = 5;
    {
        CLI::App* c = verify->add_subcommand("adjoint",
                                             "finite-difference check of the adjoint gradient");
        add_common(c, adj_args);
        c->add_option("--amplitudes", a_values, "descending probe amplitudes")->delimiter(',');
        c->add_option("--cells", probe_count, "number of probe cells");
    }

    try {
        app.parse(argc, argv);
        if (app.got_subcommand("forward")) return run_forward(fwd_args);
        if (app.got_subcommand("synth")) return run_synth(synth_args);
        if (app.got_subcommand("detect")) return run_detect(det_args);
        if (app.got_subcommand("separation")) return run_separation(sep_args, separations);
        if (verify->got_subcommand("penalization"))
            return run_verify_penalization(pen_args, k_values);
        if (verify->got_subcommand("decay")) return run_verify_decay(dec_args, dec_eps, dec_z);
        if (verify->got_subcommand("expansion"))
            return run_verify_expansion(exp_args, exp_eps, k_probe);
        if (verify->got_subcommand("adjoint"))
            return run_verify_adjoint(adj_args, a_values, probe_count);
        std::cerr << "error: no subcommand\n";
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const tf::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 3;
    } catch (const tf::SolverError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 2;
    } catch (const tf::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
