#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include "chemostat/equilibria.hpp"
#include "chemostat/model.hpp"
#include "chemostat/rng.hpp"

namespace chemostat {

class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& msg, double time)
        : std::runtime_error(msg), time_(time) {}
    double time() const { return time_; }

private:
    double time_ = 0.0;
};

// Time-stamped states with per-sample invariant diagnostics.
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    std::vector<double> mass_balance_error;  // |b(t) - (1 + (b0 - 1) e^{-u t})|
    std::vector<double> min_species;
    double b0 = 0.0;

    const State& final_state() const { return states.back(); }
    double max_mass_balance_error() const;
    std::size_t first_index_at_or_after(double t) const;
};

struct IntegrateOptions {
    double tol = 1e-10;       // local error per step
    double max_step = 0.0;    // 0 selects horizon / 10
    bool adaptive_stop = false;  // stop once drift < tol/10 and mass settled
};

// Dormand-Prince 5(4) embedded pair with PI step control. Steps that push any
// concentration below -10 tol are rejected and retried at half step; clipping
// would silently corrupt the mass-balance diagnostic.
Trajectory integrate(const ChemostatModel& model, const State& initial, double horizon,
                     const IntegrateOptions& opts = {});

struct ConvergenceReport {
    bool converged = false;
    double final_distance = 0.0;
    double time_to_tol = 0.0;  // meaningful when converged
};

// Sup-norm distance of the trajectory tail to a target equilibrium. The
// time-to-tolerance uses a hold condition: below tol for at least the last
// 10% of the horizon, so a grazing pass near a saddle does not count.
ConvergenceReport convergence_check(const Trajectory& trajectory, const Equilibrium& target,
                                    double tol);

struct PersistenceMetrics {
    double tail_begin = 0.0;
    std::vector<double> per_species_floor;
    double biomass_floor = 0.0;
    double substrate_min = 0.0;
    double substrate_max = 0.0;
};

PersistenceMetrics persistence_metrics(const Trajectory& trajectory, double tail_fraction);

struct BatchModeReport {
    std::vector<double> predicted_x;  // b0/n each
    double predicted_s = 0.0;         // 0
    State final;
    double distance = 0.0;            // sup-norm final vs predicted
    double mass_drift = 0.0;          // max |b(t) - b0|
};

// u = 0, eps > 0: every solution equalizes across species and exhausts the
// substrate.
BatchModeReport batch_mode_check(const ChemostatModel& model, const State& initial,
                                 double horizon, const IntegrateOptions& opts = {});

// Random initial condition in D: species floored at 1e-3; either on the
// invariant manifold (b = 1) or off it with b in [0.5, 1.5].
State sample_initial_condition(std::size_t n, SplitMix64& rng, bool off_manifold);

void write_trajectory_csv(const std::filesystem::path& file, const Trajectory& trajectory);

struct EnsembleRow {
    std::uint64_t seed = 0;
    bool converged = false;
    double final_dist = 0.0;
    double time_to_tol = 0.0;
    std::vector<double> floors;
};

void write_ensemble_csv(const std::filesystem::path& file, std::size_t species_count,
                        std::span<const EnsembleRow> rows);

}  // namespace chemostat
