#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "chemostat/model.hpp"
#include "commands.hpp"

namespace {

using chemostat::cli::RunConfig;

void add_common_options(CLI::App* cmd, RunConfig& config) {
    cmd->add_option("--model", config.model_spec, "model JSON file or builtin name (fig1, fig2)");
    cmd->add_option("--out", config.out_dir, "output directory for CSV files");
    cmd->add_option("--tol", config.tol, "integration / local error tolerance");
    cmd->add_option("--seed", config.seed, "base seed for random initial conditions");
    cmd->add_option("--horizon", config.horizon, "integration horizon (0 = command default)");
    cmd->add_option("--grid", config.grid, "grid spec emin:emax:n[,umin:umax:n]");
    cmd->add_option("--threads", config.threads, "worker threads (0 = hardware)");
    cmd->add_option("--u", config.u_override, "override the dilution rate");
    cmd->add_option("--epsilon", config.epsilon_override, "override the mutation rate");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for the chemostat with neighbor mutation"};
    app.require_subcommand(1);

    RunConfig config;

    CLI::App* steady = app.add_subcommand("steady", "compute and classify the steady state");
    add_common_options(steady, config);

    CLI::App* uc = app.add_subcommand("uc", "critical dilution curve over a mutation-rate grid");
    add_common_options(uc, config);

    CLI::App* fig1 = app.add_subcommand(
        "fig1", "two-species equilibrium curves over epsilon in [0,2] plus the u_c curve");
    add_common_options(fig1, config);
    fig1->add_flag("--gnuplot", config.emit_gnuplot, "emit a gnuplot script for the CSVs");

    CLI::App* fig2 = app.add_subcommand(
        "fig2", "twenty-species convergence run: trajectory, error norm, final profile");
    add_common_options(fig2, config);
    fig2->add_flag("--gnuplot", config.emit_gnuplot, "emit a gnuplot script for the CSVs");

    CLI::App* simulate = app.add_subcommand("simulate", "integrate a model from an initial state");
    add_common_options(simulate, config);
    std::vector<double> x0;
    simulate->add_option("--x0", x0, "initial concentrations (defaults to a seeded sample)");
    double s0 = -1.0;
    simulate->add_option("--s0", s0, "initial substrate level");

    CLI::App* sweep = app.add_subcommand("sweep", "classify an (epsilon, u) grid into an atlas");
    add_common_options(sweep, config);
    sweep->add_option("--gas-ensemble", config.gas_ensemble,
                      "trajectories per coexistence point for the empirical GAS flag");

    CLI::App* expand = app.add_subcommand(
        "expand", "small-mutation expansion coefficients against the finite-difference oracle");
    add_common_options(expand, config);

    CLI::App* verify = app.add_subcommand("verify", "run the full property battery");
    add_common_options(verify, config);
    verify->add_flag("--quick", config.quick, "reduced ensemble sizes");
    verify->add_flag("--selftest-corrupt", config.corrupt_selftest,
                     "inject a failing check to exercise the harness");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (simulate->parsed()) {
            if (!x0.empty()) config.x0 = x0;
            if (s0 >= 0.0) config.s0 = s0;
        }
        if (steady->parsed()) return chemostat::cli::cmd_steady(config);
        if (uc->parsed()) return chemostat::cli::cmd_uc(config);
        if (fig1->parsed()) return chemostat::cli::cmd_fig1(config);
        if (fig2->parsed()) return chemostat::cli::cmd_fig2(config);
        if (simulate->parsed()) return chemostat::cli::cmd_simulate(config);
        if (sweep->parsed()) return chemostat::cli::cmd_sweep(config);
        if (expand->parsed()) return chemostat::cli::cmd_expand(config);
        if (verify->parsed()) return chemostat::cli::cmd_verify(config);
    } catch (const chemostat::ModelFormatError& e) {
        std::cerr << "error: invalid model (" << e.field() << "): " << e.what() << "\n";
        return 1;
    } catch (const chemostat::cli::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
