#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <vector>

#include "chemostat/asymptotics.hpp"
#include "chemostat/builtin_models.hpp"
#include "chemostat/csv.hpp"
#include "chemostat/equilibria.hpp"
#include "chemostat/rng.hpp"
#include "chemostat/sim.hpp"
#include "chemostat/util.hpp"
#include "commands.hpp"
#include "parallel.hpp"

namespace chemostat::cli {

namespace {

// One property of the module contracts, evaluated end-to-end. `slack` is the
// distance to the failing boundary: nonnegative means the property holds with
// that margin.
struct CheckResult {
    bool pass = false;
    double slack = 0.0;
    std::string detail;
};

struct Check {
    std::string name;
    std::function<CheckResult()> run;
};

SymTridiag random_tridiag(SplitMix64& rng, std::size_t n, double off_lo, double off_hi) {
    SymTridiag m;
    m.diag.resize(n);
    m.offdiag.resize(n - 1);
    for (auto& d : m.diag) d = rng.uniform(-3.0, 3.0);
    for (auto& b : m.offdiag) b = rng.uniform(off_lo, off_hi);
    return m;
}

CheckResult pass_if(double slack, std::string detail) {
    return {slack >= 0.0, slack, std::move(detail)};
}

// ---------------------------------------------------------------- model ----

CheckResult check_growth_matrix_form() {
    double worst = 0.0;
    for (const ChemostatModel& model : {fig1_model(1.0, 0.2), fig2_model(1.0, 5.0)}) {
        for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            const SymTridiag b = growth_matrix(model, s);
            const std::size_t n = model.species_count();
            for (std::size_t i = 0; i < n; ++i) {
                const double want = model.kinetics().rate(i, s) - model.u() +
                                    model.epsilon() * mutation_diagonal(i, n);
                worst = std::max(worst, std::abs(b.diag[i] - want));
            }
            for (double off : b.offdiag) {
                worst = std::max(worst, std::abs(off - model.epsilon()));
                if (off < 0.0) worst = std::max(worst, -off);
            }
        }
    }
    return pass_if(1e-15 - worst, "max assembly deviation " + csv::field(worst));
}

CheckResult check_row_sum_identity() {
    double worst = 0.0;
    for (const ChemostatModel& model : {fig1_model(0.7, 0.2), fig2_model(1.3, 5.0)}) {
        const std::size_t n = model.species_count();
        for (double s : {0.1, 0.5, 0.9}) {
            const SymTridiag b = growth_matrix(model, s);
            for (std::size_t i = 0; i < n; ++i) {
                double row = b.diag[i];
                if (i > 0) row += b.offdiag[i - 1];
                if (i + 1 < n) row += b.offdiag[i];
                const double want = model.kinetics().rate(i, s) - model.u();
                worst = std::max(worst, std::abs(row - want));
            }
        }
    }
    return pass_if(1e-13 - worst, "max |row sum - (mu_i - u)| = " + csv::field(worst));
}

CheckResult check_mass_balance_drift() {
    double worst = 0.0;
    SplitMix64 rng(71);
    for (const ChemostatModel& model : {fig1_model(1.0, 0.2), fig2_model(1.0, 5.0)}) {
        const std::size_t n = model.species_count();
        for (int trial = 0; trial < 20; ++trial) {
            State st = sample_initial_condition(n, rng, trial % 2 == 1);
            const StateRate rate = drift(model, st);
            double sum = rate.ds;
            for (double d : rate.dx) sum += d;
            const double want = model.u() * (1.0 - st.total_mass());
            const double scale = std::max(1.0, std::abs(want));
            worst = std::max(worst, std::abs(sum - want) / scale);
        }
    }
    return pass_if(1e-12 - worst, "max relative defect " + csv::field(worst));
}

CheckResult check_monod_monotone() {
    const ChemostatModel model = fig1_model();
    double min_gap = std::numeric_limits<double>::infinity();
    double bound_slack = std::numeric_limits<double>::infinity();
    const auto grid = linspace(0.0, 1.0, 101);
    for (std::size_t i = 0; i < model.species_count(); ++i) {
        for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
            min_gap = std::min(min_gap, model.kinetics().rate(i, grid[k + 1]) -
                                            model.kinetics().rate(i, grid[k]));
        }
        for (double s : grid)
            bound_slack =
                std::min(bound_slack, model.kinetics().law(i).m - model.kinetics().rate(i, s));
    }
    const double slack = std::min(min_gap, bound_slack);
    return pass_if(slack, "min increase " + csv::field(min_gap) + ", min bound slack " +
                              csv::field(bound_slack));
}

CheckResult check_break_even_consistency() {
    const ChemostatModel model = fig1_model();
    for (double u : linspace(0.01, 1.2, 60)) {
        for (std::size_t i = 0; i < 2; ++i) {
            const bool finite = break_even(model.kinetics(), i, u).has_value();
            const bool should = model.kinetics().rate(i, 1.0) > u;
            if (finite != should)
                return {false, -1.0, "mismatch at u=" + csv::field(u)};
        }
    }
    return {true, 0.0, "finite iff mu_i(1) > u on 60-point grid"};
}

// --------------------------------------------------------------- linalg ----

CheckResult check_perron_positivity() {
    double min_comp = std::numeric_limits<double>::infinity();
    SplitMix64 rng(1002);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.next() % 15;
        const SymTridiag m = random_tridiag(rng, n, 0.05, 2.0);
        const EigResult e = perron_vector(m, top_eigenvalue(m));
        for (double c : e.vector) min_comp = std::min(min_comp, c);
    }
    return pass_if(min_comp, "min Perron component " + csv::field(min_comp));
}

CheckResult check_comparison_monotonicity() {
    double min_gap = std::numeric_limits<double>::infinity();
    SplitMix64 rng(1003);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.next() % 7;
        SymTridiag c = random_tridiag(rng, n, 0.1, 1.5);
        SymTridiag d = c;
        for (auto& v : d.diag) v += rng.uniform(0.0, 0.5);
        for (auto& v : d.offdiag) v += rng.uniform(0.0, 0.3);
        d.diag[rng.next() % n] += 0.25;  // at least one strict increase
        min_gap = std::min(min_gap, top_eigenvalue(d) - top_eigenvalue(c));
    }
    return pass_if(min_gap, "min lambda(D) - lambda(C) = " + csv::field(min_gap));
}

CheckResult check_top_vs_dense(bool quick) {
    const int fixtures = quick ? 200 : 1000;
    double worst = 0.0;
    SplitMix64 rng(1004);
    for (int trial = 0; trial < fixtures; ++trial) {
        const std::size_t n = 2 + rng.next() % 7;
        const SymTridiag m = random_tridiag(rng, n, 0.05, 2.0);
        const double dev =
            std::abs(top_eigenvalue(m) - dense_eigensystem(to_dense(m)).values.back());
        worst = std::max(worst, dev);
    }
    return pass_if(1e-10 - worst,
                   "max deviation " + csv::field(worst) + " over " + std::to_string(fixtures) +
                       " fixtures");
}

CheckResult check_two_species_closed_form() {
    const MonodKinetics& kin = fig1_model().kinetics();
    double worst = 0.0;
    for (double s : linspace(0.0, 1.0, 20)) {
        for (double eps : linspace(0.0, 2.0, 20)) {
            const ChemostatModel model = fig1_model(eps, 0.2);
            const double solver = top_eigenvalue(growth_matrix(model, s), 1e-13);
            const double closed = two_species_top_eigenvalue(kin, s, 0.2, eps);
            worst = std::max(worst, std::abs(solver - closed));
        }
    }
    return pass_if(1e-12 - worst, "max |solver - closed form| = " + csv::field(worst));
}

CheckResult check_sensitivity_fd(bool quick) {
    const int fixtures = quick ? 30 : 100;
    const double h = 1e-6;
    double worst_rel = 0.0;
    SplitMix64 rng(1005);
    for (int trial = 0; trial < fixtures; ++trial) {
        const std::size_t n = 2 + rng.next() % 7;
        SymTridiag m = random_tridiag(rng, n, 0.5, 1.5);
        for (auto& d : m.diag) d = rng.uniform(-1.0, 1.0);
        const Matrix sens = eigenvalue_sensitivity(m);
        double ref = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) ref = std::max(ref, std::abs(sens(i, j)));

        double dev = 0.0;
        auto lam = [&](const SymTridiag& mm) { return top_eigenvalue(mm, 1e-15); };
        for (std::size_t i = 0; i < n; ++i) {
            SymTridiag p = m;
            p.diag[i] += h;
            SymTridiag q = m;
            q.diag[i] -= h;
            const double fd = (lam(p) - lam(q)) / (2.0 * h);
            dev = std::max(dev, std::abs(fd - sens(i, i)));
        }
        for (std::size_t k = 0; k + 1 < n; ++k) {
            SymTridiag p = m;
            p.offdiag[k] += h;
            SymTridiag q = m;
            q.offdiag[k] -= h;
            const double fd = (lam(p) - lam(q)) / (2.0 * h);
            dev = std::max(dev, std::abs(fd - 2.0 * sens(k, k + 1)));
        }
        worst_rel = std::max(worst_rel, dev / ref);
    }
    return pass_if(1e-6 - worst_rel, "max relative FD deviation " + csv::field(worst_rel));
}

// ----------------------------------------------------------- equilibria ----

CheckResult check_lambda_increasing() {
    double min_gap = std::numeric_limits<double>::infinity();
    for (const ChemostatModel& model : {fig1_model(1.0, 0.2), fig2_model(1.0, 5.0)}) {
        const auto grid = linspace(0.0, 1.0, 64);
        double prev = top_eigenvalue(growth_matrix(model, grid.front()));
        for (std::size_t k = 1; k < grid.size(); ++k) {
            const double cur = top_eigenvalue(growth_matrix(model, grid[k]));
            min_gap = std::min(min_gap, cur - prev);
            prev = cur;
        }
    }
    return pass_if(min_gap, "min consecutive increase " + csv::field(min_gap));
}

CheckResult check_unique_root_bracket() {
    for (const ChemostatModel& model : {fig1_model(1.0, 0.2), fig2_model(1.0, 5.0)}) {
        const auto grid = linspace(0.0, 1.0, 64);
        int flips = 0;
        bool prev_pos = top_eigenvalue(growth_matrix(model, grid.front())) > 0.0;
        for (std::size_t k = 1; k < grid.size(); ++k) {
            const bool pos = top_eigenvalue(growth_matrix(model, grid[k])) > 0.0;
            if (pos != prev_pos) ++flips;
            prev_pos = pos;
        }
        if (flips != 1) return {false, -1.0, "expected one sign change, saw " + std::to_string(flips)};
    }
    return {true, 0.0, "single sign change on 64-point bracket for both models"};
}

CheckResult check_defining_residual() {
    double worst_lambda = 0.0, worst_mass = 0.0;
    for (const ChemostatModel& base : {fig1_model(), fig2_model()}) {
        for (double eps : {0.01, 0.5, 1.5}) {
            const double uc = critical_dilution(base.kinetics(), eps);
            for (double frac : {0.2, 0.5, 0.8}) {
                const ChemostatModel model = base.with_epsilon(eps).with_u(frac * uc);
                const Equilibrium eq = coexistence_equilibrium(model);
                worst_lambda =
                    std::max(worst_lambda, std::abs(top_eigenvalue(growth_matrix(model, eq.s))));
                double mass = eq.s - 1.0;
                for (double c : eq.x) mass += c;
                worst_mass = std::max(worst_mass, std::abs(mass));
            }
        }
    }
    const double slack = std::min(1e-11 - worst_lambda, 1e-10 - worst_mass);
    return pass_if(slack, "max |lambda(B(s*))| = " + csv::field(worst_lambda) +
                              ", max |sum x + s - 1| = " + csv::field(worst_mass));
}

CheckResult check_uc_non_increasing() {
    double min_slack = std::numeric_limits<double>::infinity();
    for (const ChemostatModel& model : {fig1_model(), fig2_model()}) {
        const auto grid = linspace(0.0, 5.0, 100);
        double prev = critical_dilution(model.kinetics(), grid.front());
        for (std::size_t k = 1; k < grid.size(); ++k) {
            const double cur = critical_dilution(model.kinetics(), grid[k]);
            min_slack = std::min(min_slack, prev - cur + 1e-12);
            prev = cur;
        }
    }
    return pass_if(min_slack, "min monotonicity slack " + csv::field(min_slack));
}

CheckResult check_two_species_oracle_equivalence() {
    const MonodKinetics& kin = fig1_model().kinetics();
    double worst = 0.0;
    for (double u : linspace(0.05, 0.45, 9)) {
        for (double eps : {1e-3, 0.1, 0.5, 1.0, 2.0}) {
            const Equilibrium eq = coexistence_equilibrium(fig1_model(eps, u));
            const TwoSpeciesEquilibrium closed = two_species_equilibrium(kin, u, eps);
            worst = std::max({worst, std::abs(eq.s - closed.s), std::abs(eq.x[0] - closed.x1),
                              std::abs(eq.x[1] - closed.x2)});
        }
    }
    return pass_if(1e-9 - worst, "max |general - closed form| = " + csv::field(worst));
}

CheckResult check_stability_dichotomy() {
    double min_margin = std::numeric_limits<double>::infinity();
    for (const ChemostatModel& base : {fig1_model(), fig2_model()}) {
        for (double eps : {0.5, 1.0}) {
            const double uc = critical_dilution(base.kinetics(), eps);
            for (double frac : {0.3, 0.7, 1.05, 1.2}) {
                const ChemostatModel model = base.with_epsilon(eps).with_u(frac * uc);
                const Equilibrium washout = washout_equilibrium(model);
                const StabilityReport wrep = stability_report(model, washout);
                if (model.u() < uc - 1e-3) {
                    const Equilibrium eq = coexistence_equilibrium(model);
                    const StabilityReport rep = stability_report(model, eq);
                    if (rep.verdict != StabilityVerdict::las &&
                        rep.verdict != StabilityVerdict::gas_claimed)
                        return {false, rep.jacobian_abscissa,
                                "coexistence not LAS at eps=" + csv::field(eps) +
                                    " u=" + csv::field(model.u())};
                    min_margin = std::min(min_margin, -rep.jacobian_abscissa);
                    min_margin = std::min(min_margin, wrep.jacobian_abscissa);
                } else if (model.u() > uc + 1e-3) {
                    min_margin = std::min(min_margin, -wrep.jacobian_abscissa);
                }
            }
        }
    }
    return pass_if(min_margin, "min abscissa margin " + csv::field(min_margin));
}

CheckResult check_inequality_slacks() {
    double min_slack = std::numeric_limits<double>::infinity();
    for (const ChemostatModel& base : {fig1_model(), fig2_model()}) {
        for (double eps : {0.05, 0.5, 2.0}) {
            const double uc = critical_dilution(base.kinetics(), eps);
            for (double frac : {0.25, 0.6, 0.9}) {
                const ChemostatModel model = base.with_epsilon(eps).with_u(frac * uc);
                const Equilibrium eq = coexistence_equilibrium(model);
                min_slack = std::min(min_slack, inequality_certificates(model, eq).min_slack());
            }
        }
    }
    return pass_if(min_slack + 1e-9, "min inequality slack " + csv::field(min_slack));
}

// ----------------------------------------------------------- asymptotics ----

CheckResult check_expansion_remainder() {
    const MonodKinetics& kin = fig1_model().kinetics();
    const ExpansionResult ex = first_order_expansion(kin, 0.2);
    std::vector<double> errs;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const Equilibrium eq = coexistence_equilibrium(fig1_model(eps, 0.2));
        double err = std::abs(eq.s - (ex.base_s + eps * ex.sigma));
        for (std::size_t i = 0; i < 2; ++i)
            err = std::max(err, std::abs(eq.x[i] - (ex.base_x[i] + eps * ex.xi[i])));
        errs.push_back(err / eps);
    }
    const double r1 = errs[0] / errs[1];
    const double r2 = errs[1] / errs[2];
    const bool ok = r1 >= 5.0 && r1 <= 20.0 && r2 >= 5.0 && r2 <= 20.0;
    return {ok, std::min({r1 - 5.0, 20.0 - r1, r2 - 5.0, 20.0 - r2}),
            "consecutive remainder ratios " + csv::field(r1) + ", " + csv::field(r2)};
}

CheckResult check_expansion_balance() {
    double worst = 0.0;
    for (double u : linspace(0.05, 0.45, 9)) {
        const ExpansionResult ex = first_order_expansion(fig1_model().kinetics(), u);
        double sum = ex.sigma;
        for (double c : ex.xi) sum += c;
        worst = std::max(worst, std::abs(sum));
    }
    for (double u : linspace(1.0, 8.0, 8)) {
        const ExpansionResult ex = first_order_expansion(fig2_model().kinetics(), u);
        double sum = ex.sigma;
        for (double c : ex.xi) sum += c;
        worst = std::max(worst, std::abs(sum));
    }
    return pass_if(1e-14 - worst, "max |sigma + sum xi| = " + csv::field(worst));
}

CheckResult check_expansion_support() {
    const MonodKinetics& kin = fig2_model().kinetics();
    const std::size_t i0 = winner_index(kin, 5.0);
    auto non_neighbor_max = [&](double eps) {
        const Equilibrium eq = coexistence_equilibrium(fig2_model(eps, 5.0));
        double m = 0.0;
        for (std::size_t j = 0; j < eq.x.size(); ++j)
            if (j + 1 < i0 || j > i0 + 1) m = std::max(m, eq.x[j]);
        return m;
    };
    const double m1 = non_neighbor_max(1e-4);
    const double m2 = non_neighbor_max(2e-4);
    const double ratio = m2 / m1;
    const bool ok = ratio >= 2.8 && ratio <= 5.7;  // quadratic scaling would give 4
    return {ok, std::min(ratio - 2.8, 5.7 - ratio),
            "non-neighbor mass ratio at doubled eps = " + csv::field(ratio)};
}

CheckResult check_substrate_monotone_to_limit() {
    const ChemostatModel base = fig1_model();
    const LimitPoint lim = infinite_mutation_limit(base);
    double prev = -std::numeric_limits<double>::infinity();
    double min_step = std::numeric_limits<double>::infinity();
    double last = 0.0;
    for (double eps : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0}) {
        const double s = equilibrium_substrate(base.with_epsilon(eps));
        min_step = std::min(min_step, s - prev);
        prev = s;
        last = s;
    }
    const double slack = std::min(min_step, lim.s + 1e-9 - last);
    return pass_if(slack, "min increase along eps grid " + csv::field(min_step) +
                              ", s(100) = " + csv::field(last) + " vs limit " +
                              csv::field(lim.s));
}

// ------------------------------------------------------------------ sim ----

CheckResult check_sim_mass_balance() {
    double worst = 0.0;
    const double tol = 1e-10;
    IntegrateOptions opts;
    opts.tol = tol;
    SplitMix64 rng(2100);
    {
        const ChemostatModel model = fig1_model(1.0, 0.2);
        const State init = sample_initial_condition(2, rng, true);
        worst = std::max(worst, integrate(model, init, 50.0, opts).max_mass_balance_error());
    }
    {
        const ChemostatModel model = fig2_model();
        const State init = sample_initial_condition(20, rng, true);
        worst = std::max(worst, integrate(model, init, 20.0, opts).max_mass_balance_error());
    }
    {
        const ChemostatModel model(MonodKinetics({{0.9, 0.8}, {1.1, 1.0}, {1.0, 0.6}}), 1.0, 0.0);
        const State init{{0.2, 0.3, 0.1}, 0.3};
        worst = std::max(worst, integrate(model, init, 50.0, opts).max_mass_balance_error());
    }
    return pass_if(100.0 * tol - worst, "max mass-balance error " + csv::field(worst));
}

CheckResult check_positivity_propagation() {
    double min_pos = std::numeric_limits<double>::infinity();
    {
        const ChemostatModel model = fig1_model(0.5, 0.2);
        const Trajectory traj = integrate(model, State{{0.4, 0.0}, 0.6}, 5.0, {});
        for (std::size_t k = 1; k < traj.min_species.size(); ++k)
            min_pos = std::min(min_pos, traj.min_species[k]);
    }
    {
        const ChemostatModel model(
            MonodKinetics({{1.0, 0.9}, {0.9, 0.8}, {1.1, 1.0}, {1.0, 0.6}, {0.8, 0.7}}), 0.3,
            0.1);
        State init{{0.0, 0.0, 0.5, 0.0, 0.0}, 0.5};
        const Trajectory traj = integrate(model, init, 5.0, {});
        for (std::size_t k = 1; k < traj.min_species.size(); ++k)
            min_pos = std::min(min_pos, traj.min_species[k]);
    }
    return pass_if(min_pos, "min concentration after t=0: " + csv::field(min_pos));
}

CheckResult check_substrate_repulsion() {
    const ChemostatModel model = fig1_model(1.0, 0.2);
    const double floor = substrate_floor(model);
    State init{{0.6, 0.3}, 0.01};
    const Trajectory traj = integrate(model, init, 300.0, {});
    const PersistenceMetrics m = persistence_metrics(traj, 0.5);
    return pass_if(m.substrate_min - 0.5 * floor,
                   "tail substrate min " + csv::field(m.substrate_min) + " vs 0.5 c_u = " +
                       csv::field(0.5 * floor));
}

CheckResult check_gas_small_u(bool quick, unsigned threads) {
    const int per_u = quick ? 3 : 25;  // on-manifold + off-manifold each
    double worst = 0.0;
    bool all = true;
    for (double u : {0.01, 0.05}) {
        const ChemostatModel model = fig1_model(1.0, u);
        const Equilibrium eq = coexistence_equilibrium(model);
        const double horizon = 2.0 * std::max(200.0, 13.0 / u);
        std::vector<double> finals(2 * per_u, 0.0);
        std::vector<char> flags(2 * per_u, 0);
        parallel_for(finals.size(), threads, [&](std::size_t j) {
            SplitMix64 rng = SplitMix64::stream(9000 + static_cast<std::uint64_t>(u * 1000), j);
            const State init = sample_initial_condition(2, rng, j % 2 == 1);
            IntegrateOptions opts;
            opts.tol = 1e-10;
            const Trajectory traj = integrate(model, init, horizon, opts);
            const ConvergenceReport rep = convergence_check(traj, eq, 1e-6);
            finals[j] = rep.final_distance;
            flags[j] = rep.converged ? 1 : 0;
        });
        for (std::size_t j = 0; j < finals.size(); ++j) {
            worst = std::max(worst, finals[j]);
            if (!flags[j]) all = false;
        }
    }
    return {all && worst <= 1e-6, 1e-6 - worst,
            "max final distance " + csv::field(worst) + " over " + std::to_string(4 * per_u) +
                " runs"};
}

CheckResult check_cep_recovery() {
    const ChemostatModel model = fig1_model(0.0, 0.2);
    Equilibrium target;
    target.kind = EquilibriumKind::coexistence;
    target.x = {0.0, 0.8};
    target.s = 0.2;
    IntegrateOptions opts;
    opts.tol = 1e-10;
    const Trajectory traj = integrate(model, State{{0.1, 0.1}, 0.8}, 800.0, opts);
    const ConvergenceReport rep = convergence_check(traj, target, 1e-6);
    const PersistenceMetrics m = persistence_metrics(traj, 0.25);
    const bool ok = rep.converged && m.per_species_floor[0] <= 1e-8;
    return {ok, 1e-6 - rep.final_distance,
            "final distance " + csv::field(rep.final_distance) + ", loser floor " +
                csv::field(m.per_species_floor[0])};
}

// ------------------------------------------------------------------ cli ----

CheckResult check_csv_determinism(const RunConfig& base) {
    RunConfig cfg = base;
    cfg.quick = false;
    cfg.corrupt_selftest = false;
    cfg.horizon = 5.0;
    cfg.seed = 4242;
    auto read_bytes = [](const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    cfg.out_dir = base.out_dir / "det_a";
    if (cmd_fig2(cfg) != 0) return {false, -1.0, "fig2 run failed"};
    cfg.out_dir = base.out_dir / "det_b";
    if (cmd_fig2(cfg) != 0) return {false, -1.0, "fig2 run failed"};
    for (const char* name : {"trajectory.csv", "error_norm.csv", "final_profile.csv"}) {
        if (read_bytes(base.out_dir / "det_a" / name) != read_bytes(base.out_dir / "det_b" / name))
            return {false, -1.0, std::string(name) + " differs between identical runs"};
    }
    return {true, 0.0, "byte-identical CSV outputs for identical config and seed"};
}

}  // namespace

int cmd_verify(const RunConfig& config) {
    config.validate();
    std::filesystem::create_directories(config.out_dir);
    const bool quick = config.quick;
    const unsigned threads = config.threads;

    std::vector<Check> checks;
    checks.push_back({"model.growth_matrix_form", check_growth_matrix_form});
    checks.push_back({"model.row_sum_identity", check_row_sum_identity});
    checks.push_back({"model.mass_balance_drift", check_mass_balance_drift});
    checks.push_back({"model.monod_monotone_bounded", check_monod_monotone});
    checks.push_back({"model.break_even_consistency", check_break_even_consistency});
    checks.push_back({"linalg.perron_positivity", check_perron_positivity});
    checks.push_back({"linalg.comparison_monotonicity", check_comparison_monotonicity});
    checks.push_back({"linalg.top_vs_dense_oracle", [quick] { return check_top_vs_dense(quick); }});
    checks.push_back({"linalg.two_species_closed_form", check_two_species_closed_form});
    checks.push_back({"linalg.sensitivity_fd", [quick] { return check_sensitivity_fd(quick); }});
    checks.push_back({"equilibria.lambda_increasing_in_s", check_lambda_increasing});
    checks.push_back({"equilibria.unique_root_bracket", check_unique_root_bracket});
    checks.push_back({"equilibria.defining_residual", check_defining_residual});
    checks.push_back({"equilibria.uc_non_increasing", check_uc_non_increasing});
    checks.push_back(
        {"equilibria.two_species_oracle_equivalence", check_two_species_oracle_equivalence});
    checks.push_back({"equilibria.stability_dichotomy", check_stability_dichotomy});
    checks.push_back({"equilibria.inequality_slacks", check_inequality_slacks});
    checks.push_back({"asymptotics.expansion_remainder", check_expansion_remainder});
    checks.push_back({"asymptotics.expansion_balance", check_expansion_balance});
    checks.push_back({"asymptotics.expansion_support", check_expansion_support});
    checks.push_back(
        {"asymptotics.substrate_monotone_to_limit", check_substrate_monotone_to_limit});
    checks.push_back({"sim.mass_balance", check_sim_mass_balance});
    checks.push_back({"sim.positivity_propagation", check_positivity_propagation});
    checks.push_back({"sim.substrate_repulsion", check_substrate_repulsion});
    checks.push_back(
        {"sim.gas_small_u", [quick, threads] { return check_gas_small_u(quick, threads); }});
    checks.push_back({"sim.cep_recovery", check_cep_recovery});
    checks.push_back({"cli.csv_determinism", [&config] { return check_csv_determinism(config); }});
    if (config.corrupt_selftest) {
        // harness self-test: a deliberately corrupted tolerance must surface
        checks.push_back({"selftest.corrupted_tolerance", [] {
                              return pass_if(1e-12 - 1e-6, "injected tolerance corruption");
                          }});
    }

    std::vector<CheckResult> results(checks.size());
    parallel_for(checks.size(), threads, [&](std::size_t i) {
        try {
            results[i] = checks[i].run();
        } catch (const std::exception& e) {
            results[i] = {false, -1.0, std::string("exception: ") + e.what()};
        }
    });

    std::size_t failures = 0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const CheckResult& r = results[i];
        if (!r.pass) ++failures;
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << checks[i].name
                  << " slack=" << csv::field(r.slack) << " " << r.detail << "\n";
    }
    std::cout << (failures == 0 ? "all properties pass" : std::to_string(failures) + " failure(s)")
              << " (" << checks.size() << " checks)\n";
    return failures == 0 ? 0 : 3;
}

}  // namespace chemostat::cli
