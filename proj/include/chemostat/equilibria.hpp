#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "chemostat/linalg.hpp"
#include "chemostat/model.hpp"

namespace chemostat {

enum class Regime { washout_only, coexistence, critical };

struct Classification {
    Regime regime = Regime::washout_only;
    double lambda_at_one = 0.0;  // lambda(B(1, u, eps))
};

enum class StabilityVerdict { gas_claimed, las, stable, unstable, marginal };

const char* to_string(StabilityVerdict v);
const char* to_string(Regime r);

struct StabilityReport {
    double jacobian_abscissa = 0.0;     // full (n+1) x (n+1) block Jacobian
    double a_abscissa = 0.0;            // species block A = B - d a^T
    StabilityVerdict verdict = StabilityVerdict::marginal;
    std::vector<double> d_vector;       // M'(s) x at the equilibrium
    bool certified = false;
};

enum class EquilibriumKind { washout, coexistence };

struct Equilibrium {
    EquilibriumKind kind = EquilibriumKind::washout;
    std::vector<double> x;
    double s = 1.0;
    std::optional<EigResult> perron;  // coexistence only
    double lambda_at_one = 0.0;
    std::optional<StabilityReport> stability;
};

// Critical dilution rate: the top eigenvalue of M(1) + eps T. Above it only
// washout persists.
double critical_dilution(const MonodKinetics& kinetics, double epsilon);

// Sign of lambda(B(1, u, eps)) with an explicit +-1e-10 marginal band.
Classification classify(const ChemostatModel& model);

// The unique root s in (0, 1) of lambda(B(s, u, eps)) = 0, by bisection on the
// monotone bracket [0, 1]. Requires the coexistence regime.
double equilibrium_substrate(const ChemostatModel& model);

Equilibrium washout_equilibrium(const ChemostatModel& model);
Equilibrium coexistence_equilibrium(const ChemostatModel& model);

// classify + build + stability in one call.
Equilibrium solve_equilibrium(const ChemostatModel& model);

// Closed-form top eigenvalue of the two-species B(s, u, eps).
double two_species_top_eigenvalue(const MonodKinetics& kinetics, double s, double u,
                                  double epsilon);

struct TwoSpeciesEquilibrium {
    double x1 = 0.0;
    double x2 = 0.0;
    double s = 0.0;
};

// Closed-form two-species coexistence point; routes to the symmetric formula
// when the kinetics intersect at the operating dilution.
TwoSpeciesEquilibrium two_species_equilibrium(const MonodKinetics& kinetics, double u,
                                              double epsilon);

StabilityReport stability_report(const ChemostatModel& model, const Equilibrium& eq);

// Slack values for the steady-state and lambda(B(1)) inequality chains; a
// negative slack beyond -1e-9 falsifies the implementation, not the input.
struct InequalityCertificates {
    bool has_equilibrium_chain = false;
    double seq_mean_le_u = 0.0;       // u - mu_bar(s*)
    double seq_u_le_max = 0.0;        // mu_hat(s*) - u
    double seq_max_le_u_2eps = 0.0;   // u + 2 eps - mu_hat(s*)
    double sin_lower_hat = 0.0;       // lambda1 - (mu_hat(1) - u - 2 eps)
    double sin_lower_mean = 0.0;      // lambda1 - (mu_bar(1) - u)
    double sin_upper = 0.0;           // (mu_hat(1) - u) - lambda1

    double min_slack() const;
};

InequalityCertificates inequality_certificates(const ChemostatModel& model,
                                               const Equilibrium& eq);

struct EquilibriumRow {
    double epsilon = 0.0;
    double u = 0.0;
    Equilibrium eq;
};

void write_equilibrium_csv(const std::filesystem::path& file, std::size_t species_count,
                           std::span<const EquilibriumRow> rows);

void write_uc_curve_csv(const std::filesystem::path& file, const MonodKinetics& kinetics,
                        std::span<const double> epsilon_grid);

}  // namespace chemostat
