#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "chemostat/asymptotics.hpp"
#include "chemostat/builtin_models.hpp"
#include "chemostat/csv.hpp"
#include "chemostat/equilibria.hpp"
#include "chemostat/sim.hpp"
#include "chemostat/util.hpp"
#include "parallel.hpp"

namespace chemostat::cli {

namespace {

GridAxis parse_axis(const std::string& spec) {
    GridAxis axis;
    char extra = 0;
    unsigned long long count = 0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%llu%c", &axis.lo, &axis.hi, &count, &extra) != 3)
        throw ConfigError("grid axis '" + spec + "' is not of the form lo:hi:count");
    axis.count = static_cast<std::size_t>(count);
    if (axis.count < 1) throw ConfigError("grid axis '" + spec + "' needs at least one point");
    if (!(axis.lo <= axis.hi)) throw ConfigError("grid axis '" + spec + "' has lo > hi");
    return axis;
}

std::string sanitize(std::string text) {
    for (char& c : text)
        if (c == ',' || c == '\n') c = ';';
    return text;
}

}  // namespace

std::vector<GridAxis> parse_grid(const std::string& spec) {
    std::vector<GridAxis> axes;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) axes.push_back(parse_axis(part));
    if (axes.empty()) throw ConfigError("empty grid specification");
    return axes;
}

std::vector<double> axis_points(const GridAxis& axis) {
    return linspace(axis.lo, axis.hi, axis.count);
}

void RunConfig::validate() const {
    if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
    if (horizon < 0.0) throw ConfigError("horizon must be nonnegative");
    if (gas_ensemble < 0) throw ConfigError("gas ensemble size must be nonnegative");
    if (!grid.empty()) parse_grid(grid);
}

ChemostatModel resolve_model(const RunConfig& config) {
    std::optional<ChemostatModel> model = builtin_model(config.model_spec);
    if (!model) model = load_model(config.model_spec);
    if (config.epsilon_override) model = model->with_epsilon(*config.epsilon_override);
    if (config.u_override) model = model->with_u(*config.u_override);
    return *model;
}

int cmd_steady(const RunConfig& config) {
    config.validate();
    const ChemostatModel model = resolve_model(config);
    const Classification cls = classify(model);
    const Equilibrium eq = solve_equilibrium(model);

    EquilibriumRow row{model.epsilon(), model.u(), eq};
    write_equilibrium_csv(config.out_dir / "equilibrium.csv", model.species_count(),
                          std::span<const EquilibriumRow>(&row, 1));

    std::cout << "regime=" << to_string(cls.regime)
              << " kind=" << (eq.kind == EquilibriumKind::coexistence ? "coexistence" : "washout")
              << " s=" << csv::field(eq.s) << " lambda_at_one=" << csv::field(eq.lambda_at_one)
              << " verdict=" << to_string(eq.stability->verdict)
              << " abscissa=" << csv::field(eq.stability->jacobian_abscissa) << "\n";
    return cls.regime == Regime::critical ? 2 : 0;
}

int cmd_uc(const RunConfig& config) {
    config.validate();
    const ChemostatModel model = resolve_model(config);
    const auto axes = parse_grid(config.grid.empty() ? "0:2:101" : config.grid);
    const auto eps = axis_points(axes.front());
    write_uc_curve_csv(config.out_dir / "uc_curve.csv", model.kinetics(), eps);
    std::cout << "u_c(" << csv::field(eps.front())
              << ")=" << csv::field(critical_dilution(model.kinetics(), eps.front())) << " u_c("
              << csv::field(eps.back())
              << ")=" << csv::field(critical_dilution(model.kinetics(), eps.back())) << "\n";
    return 0;
}

int cmd_fig1(const RunConfig& config) {
    config.validate();
    const ChemostatModel base = fig1_model(0.0, 0.2);
    const auto axes = parse_grid(config.grid.empty() ? "0:2:201" : config.grid);
    const auto eps_grid = axis_points(axes.front());

    struct Row {
        double eps, s, x1, x2;
    };
    std::vector<Row> rows(eps_grid.size());
    parallel_for(eps_grid.size(), config.threads, [&](std::size_t k) {
        const double eps = eps_grid[k];
        if (eps == 0.0) {
            // competitive-exclusion endpoint of the curve
            const std::size_t w = winner_index(base.kinetics(), base.u());
            const double lam = *break_even(base.kinetics(), w, base.u());
            rows[k] = {eps, lam, w == 0 ? 1.0 - lam : 0.0, w == 1 ? 1.0 - lam : 0.0};
        } else {
            const Equilibrium eq = coexistence_equilibrium(base.with_epsilon(eps));
            rows[k] = {eps, eq.s, eq.x[0], eq.x[1]};
        }
    });

    csv::Table curves(config.out_dir / "fig1_curves.csv", {"epsilon", "s", "x1", "x2"});
    double worst_mass = 0.0;
    for (const Row& r : rows) {
        worst_mass = std::max(worst_mass, std::abs(r.s + r.x1 + r.x2 - 1.0));
        curves.add_row({csv::field(r.eps), csv::field(r.s), csv::field(r.x1), csv::field(r.x2)});
    }
    curves.close();
    write_uc_curve_csv(config.out_dir / "uc_curve.csv", base.kinetics(), eps_grid);

    if (config.emit_gnuplot) {
        std::ofstream gp(config.out_dir / "fig1.gp");
        gp << "set datafile separator ','\nset key autotitle columnhead\n"
           << "plot 'fig1_curves.csv' using 1:2 with lines, \\\n"
           << "     'fig1_curves.csv' using 1:3 with lines, \\\n"
           << "     'fig1_curves.csv' using 1:4 with lines, \\\n"
           << "     'uc_curve.csv' using 1:2 with lines\n";
    }

    std::cout << "rows=" << rows.size() << " s(first)=" << csv::field(rows.front().s)
              << " s(last)=" << csv::field(rows.back().s)
              << " max|x1+x2+s-1|=" << csv::field(worst_mass) << "\n";
    return worst_mass <= 1e-12 ? 0 : 3;
}

int cmd_fig2(const RunConfig& config) {
    config.validate();
    const ChemostatModel model = fig2_model();
    const double horizon = config.horizon > 0.0 ? config.horizon : 200.0;
    const Equilibrium eq = coexistence_equilibrium(model);

    SplitMix64 rng = SplitMix64::stream(config.seed, 0);
    const State initial = sample_initial_condition(model.species_count(), rng, false);
    IntegrateOptions opts;
    opts.tol = config.tol;
    const Trajectory traj = integrate(model, initial, horizon, opts);

    write_trajectory_csv(config.out_dir / "trajectory.csv", traj);

    csv::Table err_table(config.out_dir / "error_norm.csv", {"t", "err_inf"});
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        double err = std::abs(traj.states[k].s - eq.s);
        for (std::size_t i = 0; i < eq.x.size(); ++i)
            err = std::max(err, std::abs(traj.states[k].x[i] - eq.x[i]));
        err_table.add_row({csv::field(traj.times[k]), csv::field(err)});
    }
    err_table.close();

    csv::Table profile(config.out_dir / "final_profile.csv", {"species", "x_final", "x_eq"});
    const State& last = traj.final_state();
    double min_final = last.x[0];
    for (std::size_t i = 0; i < last.x.size(); ++i) {
        profile.add_row({csv::field(static_cast<std::uint64_t>(i + 1)), csv::field(last.x[i]),
                         csv::field(eq.x[i])});
        min_final = std::min(min_final, last.x[i]);
    }
    profile.close();

    if (config.emit_gnuplot) {
        std::ofstream gp(config.out_dir / "fig2.gp");
        gp << "set datafile separator ','\nset key autotitle columnhead\n"
           << "set logscale y\nplot 'error_norm.csv' using 1:2 with lines\n";
    }

    const ConvergenceReport conv = convergence_check(traj, eq, 1e-6);
    const double mass = traj.max_mass_balance_error();
    std::cout << "converged=" << (conv.converged ? 1 : 0)
              << " final_err=" << csv::field(conv.final_distance)
              << " mass_err=" << csv::field(mass) << " min_final=" << csv::field(min_final)
              << "\n";
    const bool ok = conv.final_distance <= 1e-6 && mass <= 100.0 * config.tol && min_final > 0.0;
    return ok ? 0 : 3;
}

int cmd_simulate(const RunConfig& config) {
    config.validate();
    const ChemostatModel model = resolve_model(config);
    const std::size_t n = model.species_count();

    State initial;
    if (config.x0) {
        if (config.x0->size() != n)
            throw ConfigError("x0 must list exactly " + std::to_string(n) + " concentrations");
        initial.x = *config.x0;
        initial.s = config.s0.value_or(std::max(0.0, 1.0 - initial.total_mass()));
        if (config.s0) initial.s = *config.s0;
    } else {
        SplitMix64 rng = SplitMix64::stream(config.seed, 0);
        initial = sample_initial_condition(n, rng, false);
    }

    const double horizon = config.horizon > 0.0 ? config.horizon : 200.0;
    IntegrateOptions opts;
    opts.tol = config.tol;
    const Trajectory traj = integrate(model, initial, horizon, opts);
    write_trajectory_csv(config.out_dir / "trajectory.csv", traj);

    const State& last = traj.final_state();
    std::cout << "t_end=" << csv::field(traj.times.back()) << " s=" << csv::field(last.s)
              << " biomass=" << csv::field(last.total_mass() - last.s)
              << " mass_err=" << csv::field(traj.max_mass_balance_error())
              << " samples=" << traj.times.size() << "\n";
    return 0;
}

int cmd_sweep(const RunConfig& config) {
    config.validate();
    const ChemostatModel base = resolve_model(config);

    std::string grid_spec = config.grid;
    if (grid_spec.empty()) {
        const double umax = 1.1 * critical_dilution(base.kinetics(), 0.0);
        grid_spec = "0:2:9,0:" + csv::field(umax) + ":13";
    }
    const auto axes = parse_grid(grid_spec);
    if (axes.size() != 2) throw ConfigError("sweep needs a two-axis grid (epsilon, u)");
    const auto eps_grid = axis_points(axes[0]);
    const auto u_grid = axis_points(axes[1]);

    struct Row {
        double eps = 0.0, u = 0.0;
        std::string classification, verdict, gas, status = "ok";
        double s = 0.0, lambda_at_one = 0.0, jac_abscissa = 0.0, washout_abscissa = 0.0;
    };
    std::vector<Row> rows(eps_grid.size() * u_grid.size());

    parallel_for(rows.size(), config.threads, [&](std::size_t idx) {
        Row& row = rows[idx];
        row.eps = eps_grid[idx / u_grid.size()];
        row.u = u_grid[idx % u_grid.size()];
        try {
            const ChemostatModel model = base.with_epsilon(row.eps).with_u(row.u);
            const Classification cls = classify(model);
            row.classification = to_string(cls.regime);
            row.lambda_at_one = cls.lambda_at_one;

            const Equilibrium washout = washout_equilibrium(model);
            row.washout_abscissa = stability_report(model, washout).jacobian_abscissa;

            const Equilibrium eq = solve_equilibrium(model);
            row.s = eq.s;
            row.jac_abscissa = eq.stability->jacobian_abscissa;
            row.verdict = to_string(eq.stability->verdict);

            if (config.gas_ensemble > 0 && cls.regime == Regime::coexistence && row.u > 0.0) {
                const double horizon =
                    config.horizon > 0.0 ? config.horizon : std::max(200.0, 30.0 / row.u);
                IntegrateOptions opts;
                opts.tol = config.tol;
                bool all_ok = true;
                for (int j = 0; j < config.gas_ensemble; ++j) {
                    SplitMix64 rng = SplitMix64::stream(
                        config.seed, idx * static_cast<std::uint64_t>(config.gas_ensemble) + j);
                    const State init =
                        sample_initial_condition(model.species_count(), rng, j % 2 == 1);
                    const Trajectory traj = integrate(model, init, horizon, opts);
                    if (!convergence_check(traj, eq, 1e-6).converged) {
                        all_ok = false;
                        break;
                    }
                }
                row.gas = all_ok ? "1" : "0";
            }
        } catch (const std::exception& e) {
            row.status = "error: " + sanitize(e.what());
        }
    });

    csv::Table table(config.out_dir / "atlas.csv",
                     {"epsilon", "u", "classification", "s", "lambda_at_one", "jacobian_abscissa",
                      "washout_abscissa", "verdict", "gas", "status"});
    for (const Row& row : rows)
        table.add_row({csv::field(row.eps), csv::field(row.u), row.classification,
                       csv::field(row.s), csv::field(row.lambda_at_one),
                       csv::field(row.jac_abscissa), csv::field(row.washout_abscissa), row.verdict,
                       row.gas, row.status});
    table.close();

    std::size_t failures = 0;
    for (const Row& row : rows)
        if (row.status != "ok") ++failures;
    std::cout << "points=" << rows.size() << " failures=" << failures << "\n";
    return 0;
}

int cmd_expand(const RunConfig& config) {
    config.validate();
    const ChemostatModel model = resolve_model(config);

    std::string grid_spec = config.grid;
    if (grid_spec.empty()) {
        const double m = model.kinetics().rate_stats(1.0).max;
        grid_spec = csv::field(0.1 * m) + ":" + csv::field(0.9 * m) + ":9";
    }
    const auto axes = parse_grid(grid_spec);
    const auto u_grid = axis_points(axes.front());
    write_expansion_csv(config.out_dir / "expansion.csv", model.kinetics(), u_grid);

    const ExpansionResult head = first_order_expansion(model.kinetics(), u_grid.front());
    std::cout << "u=" << csv::field(u_grid.front()) << " i0=" << (head.winner + 1)
              << " sigma=" << csv::field(head.sigma) << "\n";
    return 0;
}

}  // namespace chemostat::cli
