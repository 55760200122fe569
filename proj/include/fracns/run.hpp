#pragma once

#include <chrono>

#include "fracns/config.hpp"
#include "fracns/io.hpp"

namespace fracns {

struct RunPaths {
    std::filesystem::path out_dir;
    bool dump_fields = false;
    bool traces = false;
};

// Exit code contract: 0 covers both success and completed runs whose checks
// report failures (the reports carry the verdict); 2 flags configuration or
// usage errors; 3 flags a numerical breakdown, with whatever partial output
// existed already on disk.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_numerical_error = 3;

namespace detail {

inline EnergyContext make_solve_context(const RunConfig& cfg, const Grid& grid) {
    if (cfg.solve.mode == "autonomous")
        return EnergyContext::autonomous(grid, cfg.problem.s, cfg.nonlinearity,
                                         cfg.autonomous.eta, cfg.autonomous.mu);
    if (cfg.solve.mode == "frozen")
        return EnergyContext::frozen(grid, cfg.problem.s, cfg.nonlinearity, cfg.solve.alpha_h,
                                     cfg.solve.beta_V);
    return EnergyContext::nonautonomous(grid, cfg.problem.s, cfg.nonlinearity, *cfg.potential,
                                        cfg.solve.eps);
}

// Grid for one eps in a sweep: the configured grid belongs to the smallest
// eps (the widest window); larger eps shrink the box at fixed spacing.  The
// shrunken point count must stay a power of two, so eps ratios must be too.
inline Grid sweep_grid(const ProblemConfig& problem, double eps, double eps_min) {
    double scale = eps_min / eps;
    double raw_points = problem.points * scale;
    int points = static_cast<int>(std::lround(raw_points));
    if (std::abs(raw_points - points) > 1e-9 || !is_power_of_two(points) || points < 8)
        throw std::invalid_argument(
            "landscape: eps_list ratios must scale the grid to a power of two >= 8; offending eps " +
            std::to_string(eps));
    return Grid::uniform(problem.dim, problem.box_length * scale, points);
}

}  // namespace detail

inline ordered_json validate_report(const RunConfig& cfg) {
    ordered_json j;
    auto growth = check_growth_conditions(cfg.nonlinearity, cfg.problem.s, cfg.problem.dim);
    ordered_json gj;
    gj["alpha"] = growth.alpha;
    gj["beta"] = growth.beta;
    gj["critical_exponent"] = growth.p_bar;
    gj["gns_exponent"] = gns_exponent(growth.alpha, cfg.problem.s, cfg.problem.dim);
    ordered_json checks = ordered_json::array();
    for (const auto& c : growth.checks) {
        ordered_json cj;
        cj["name"] = c.name;
        cj["passed"] = c.passed;
        cj["detail"] = c.detail;
        checks.push_back(std::move(cj));
    }
    gj["checks"] = std::move(checks);
    gj["passed"] = growth.passed();
    j["growth"] = std::move(gj);

    bool all = growth.passed();
    if (cfg.potential) {
        auto pot = check_A1_A2(*cfg.potential);
        ordered_json pj;
        ordered_json pchecks = ordered_json::array();
        for (const auto& c : pot.checks) {
            ordered_json cj;
            cj["name"] = c.name;
            cj["passed"] = c.passed;
            cj["detail"] = c.detail;
            pchecks.push_back(std::move(cj));
        }
        pj["checks"] = std::move(pchecks);
        pj["passed"] = pot.passed();
        all = all && pot.passed();
        j["potential"] = std::move(pj);
    }
    j["passed"] = all;
    return j;
}

inline int run_validate(const RunConfig& cfg, const RunPaths& paths) {
    write_json(paths.out_dir / "validation.json", validate_report(cfg));
    return exit_ok;
}

// One constrained minimization in the configured variant.  The autonomous and
// frozen modes start from the negative-energy dilation seed plus any random
// restarts; the nonautonomous mode first solves the problem frozen at the
// first center and translates that profile to every rescaled center.
inline SolveResult solve_once(const RunConfig& cfg) {
    Grid grid = cfg.problem.make_grid();
    auto ctx = detail::make_solve_context(cfg, grid);
    SolverOptions opts = cfg.solver;

    std::vector<Field> seeds;
    if (ctx.constant_coefficients()) {
        seeds.push_back(seed_negative_energy(ctx, cfg.mass, opts));
        for (int r = 0; r < cfg.solve.restarts; ++r)
            seeds.push_back(random_sphere_field(grid, cfg.mass, opts.rng_seed + 1 + r));
    } else {
        if (ctx.center_outside_box())
            throw std::invalid_argument("solve: a rescaled center a_i/eps falls outside the box; "
                                        "enlarge the box or increase eps");
        const auto& c0 = cfg.potential->centers.front();
        auto frozen_ctx = EnergyContext::frozen(grid, cfg.problem.s, cfg.nonlinearity,
                                                cfg.potential->h_at(c0), cfg.potential->V_at(c0));
        auto u0 = minimize_on_sphere(frozen_ctx, cfg.mass,
                                     seed_negative_energy(frozen_ctx, cfg.mass, opts), opts);
        for (const auto& c : cfg.potential->centers) {
            std::array<double, 3> shift{0, 0, 0};
            for (int d = 0; d < grid.dim(); ++d) shift[d] = c[d] / cfg.solve.eps;
            seeds.push_back(translate(u0.u, shift));
        }
        for (int r = 0; r < cfg.solve.restarts; ++r)
            seeds.push_back(random_sphere_field(grid, cfg.mass, opts.rng_seed + 1 + r));
    }

    auto results = multistart(ctx, cfg.mass, seeds, opts);
    auto best = std::find_if(results.begin(), results.end(),
                             [](const SolveResult& r) { return !r.failed && r.converged; });
    if (best == results.end())
        best = std::find_if(results.begin(), results.end(),
                            [](const SolveResult& r) { return !r.failed; });
    if (best == results.end())
        throw NumericalFailure("solve: every start failed", results.front().u);
    return *best;
}

inline int run_solve(const RunConfig& cfg, const RunPaths& paths) {
    RunConfig local = cfg;
    local.solver.record_trace = paths.traces;
    SolveResult res = solve_once(local);
    write_json(paths.out_dir / "result.json", solve_result_json(res));
    if (paths.traces) write_text(paths.out_dir / "trace.csv", trace_csv(res.trace));
    if (paths.dump_fields) write_field(paths.out_dir / "u", res.u);
    return exit_ok;
}

inline int run_landscape(const RunConfig& cfg, const RunPaths& paths) {
    if (cfg.landscape.masses.empty())
        throw std::invalid_argument("landscape: config needs landscape.masses");
    Grid grid = cfg.problem.make_grid();
    auto ctx = EnergyContext::autonomous(grid, cfg.problem.s, cfg.nonlinearity,
                                         cfg.autonomous.eta, cfg.autonomous.mu);
    auto curve = energy_curve(ctx, cfg.landscape.masses, cfg.solver);
    write_text(paths.out_dir / "curve.csv", curve_csv(curve));
    auto report = check_landscape(curve, cfg.landscape.pairs, cfg.landscape.thetas,
                                  cfg.landscape.tol);
    write_json(paths.out_dir / "landscape.json", landscape_report_json(report));
    if (paths.dump_fields)
        for (const auto& p : curve.points)
            write_field(paths.out_dir / ("curve_mass_" + format_double(p.mass)), p.result.u);

    if (!cfg.landscape.eps_list.empty()) {
        if (!cfg.potential)
            throw std::invalid_argument("landscape: eps_list needs a potential block");
        double eps_min = *std::min_element(cfg.landscape.eps_list.begin(),
                                           cfg.landscape.eps_list.end());
        ordered_json levels = ordered_json::array();
        std::string trend = "eps,E_full,E_frozen_min,E_background,gap\n";
        for (double eps : cfg.landscape.eps_list) {
            Grid g = detail::sweep_grid(cfg.problem, eps, eps_min);
            auto lv = comparison_levels(*cfg.potential, cfg.nonlinearity, cfg.problem.s, cfg.mass,
                                        eps, g, cfg.solver);
            levels.push_back(comparison_levels_json(lv));
            trend += format_double(eps) + ',' + format_double(lv.E_full) + ',' +
                     format_double(lv.min_frozen()) + ',' + format_double(lv.E_background) + ',' +
                     format_double(lv.E_full - lv.min_frozen()) + '\n';
        }
        write_json(paths.out_dir / "levels.json", levels);
        write_text(paths.out_dir / "eps_trend.csv", trend);
    }
    return exit_ok;
}

inline int run_multiplicity(const RunConfig& cfg, const RunPaths& paths) {
    if (!cfg.potential)
        throw std::invalid_argument("multiplicity: config needs a potential block");
    Grid grid = cfg.problem.make_grid();
    auto rep = multiplicity_experiment(*cfg.potential, cfg.nonlinearity, cfg.problem.s, cfg.mass,
                                       cfg.multiplicity.eps, grid, cfg.solver,
                                       cfg.multiplicity.rho0_fraction);
    write_json(paths.out_dir / "experiment.json", multiplicity_report_json(rep));
    if (paths.dump_fields)
        for (std::size_t i = 0; i < rep.solutions.size(); ++i)
            write_field(paths.out_dir / ("solution_" + std::to_string(i + 1)), rep.solutions[i].u);
    return exit_ok;
}

// Dispatch plus manifest; returns the exit code instead of throwing.
inline int run_command(const std::string& command, const RunConfig& cfg, const RunPaths& paths,
                       std::string& error) {
    std::filesystem::create_directories(paths.out_dir);
    std::string started = iso8601_utc_now();
    auto t0 = std::chrono::steady_clock::now();
    int code = exit_ok;
    try {
        if (command == "validate")
            code = run_validate(cfg, paths);
        else if (command == "solve")
            code = run_solve(cfg, paths);
        else if (command == "landscape")
            code = run_landscape(cfg, paths);
        else if (command == "multiplicity")
            code = run_multiplicity(cfg, paths);
        else {
            error = "unknown command: " + command;
            return exit_config_error;
        }
    } catch (const NumericalFailure& e) {
        error = e.what();
        code = exit_numerical_error;
    } catch (const std::invalid_argument& e) {
        error = e.what();
        code = exit_config_error;
    } catch (const std::domain_error& e) {
        error = e.what();
        code = exit_numerical_error;
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    try {
        write_json(paths.out_dir / "manifest.json", manifest_json(cfg.echo, started, elapsed));
        if (code != exit_ok) {
            ordered_json fail;
            fail["command"] = command;
            fail["error"] = error;
            fail["exit_code"] = code;
            write_json(paths.out_dir / "failure.json", fail);
        }
    } catch (const std::exception& e) {
        if (error.empty()) error = e.what();
        if (code == exit_ok) code = exit_config_error;
    }
    return code;
}

}  // namespace fracns
