#include "chemostat/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chemostat/csv.hpp"

namespace chemostat {

namespace {

constexpr double kMarginalBand = 1e-10;
constexpr double kVerdictBand = 1e-6;
constexpr int kSubstrateBisections = 60;

// argmin of the finite break-even concentrations; nullopt when all infinite
std::optional<std::size_t> cep_winner(const MonodKinetics& kinetics, double u) {
    std::optional<std::size_t> best;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < kinetics.species_count(); ++i) {
        const auto lam = break_even(kinetics, i, u);
        if (lam && *lam < best_val) {
            best_val = *lam;
            best = i;
        }
    }
    return best;
}

}  // namespace

const char* to_string(StabilityVerdict v) {
    switch (v) {
        case StabilityVerdict::gas_claimed: return "GAS-claimed";
        case StabilityVerdict::las: return "LAS";
        case StabilityVerdict::stable: return "stable";
        case StabilityVerdict::unstable: return "unstable";
        case StabilityVerdict::marginal: return "marginal";
    }
    return "?";
}

const char* to_string(Regime r) {
    switch (r) {
        case Regime::washout_only: return "washout-only";
        case Regime::coexistence: return "coexistence";
        case Regime::critical: return "critical";
    }
    return "?";
}

double critical_dilution(const MonodKinetics& kinetics, double epsilon) {
    if (!(epsilon >= 0.0)) throw std::invalid_argument("critical_dilution: epsilon must be >= 0");
    const std::size_t n = kinetics.species_count();
    SymTridiag m;
    m.diag.resize(n);
    m.offdiag.assign(n > 0 ? n - 1 : 0, epsilon);
    for (std::size_t i = 0; i < n; ++i)
        m.diag[i] = kinetics.rate(i, 1.0) + epsilon * mutation_diagonal(i, n);
    return top_eigenvalue(m);
}

Classification classify(const ChemostatModel& model) {
    Classification c;
    c.lambda_at_one = top_eigenvalue(growth_matrix(model, 1.0));
    if (c.lambda_at_one > kMarginalBand)
        c.regime = Regime::coexistence;
    else if (c.lambda_at_one < -kMarginalBand)
        c.regime = Regime::washout_only;
    else
        c.regime = Regime::critical;
    return c;
}

double equilibrium_substrate(const ChemostatModel& model) {
    const Classification c = classify(model);
    if (c.regime != Regime::coexistence)
        throw std::domain_error(
            "equilibrium_substrate: no coexistence bracket, lambda(B(1,u,eps)) = " +
            std::to_string(c.lambda_at_one));
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < kSubstrateBisections; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double lam = top_eigenvalue(growth_matrix(model, mid));
        if (lam > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

Equilibrium washout_equilibrium(const ChemostatModel& model) {
    Equilibrium eq;
    eq.kind = EquilibriumKind::washout;
    eq.x.assign(model.species_count(), 0.0);
    eq.s = 1.0;
    eq.lambda_at_one = top_eigenvalue(growth_matrix(model, 1.0));
    return eq;
}

Equilibrium coexistence_equilibrium(const ChemostatModel& model) {
    const std::size_t n = model.species_count();
    Equilibrium eq;
    eq.kind = EquilibriumKind::coexistence;
    eq.lambda_at_one = top_eigenvalue(growth_matrix(model, 1.0));

    if (model.epsilon() == 0.0) {
        // Decoupled system: the competitive-exclusion point of the winning
        // species. The Perron route does not apply (B is diagonal).
        const auto winner = cep_winner(model.kinetics(), model.u());
        if (!winner)
            throw std::domain_error("coexistence_equilibrium: washout regime at epsilon = 0");
        const double lam = *break_even(model.kinetics(), *winner, model.u());
        eq.s = lam;
        eq.x.assign(n, 0.0);
        eq.x[*winner] = 1.0 - lam;
        EigResult unit;
        unit.lambda_max = 0.0;
        unit.vector.assign(n, 0.0);
        unit.vector[*winner] = 1.0;
        unit.residual = 0.0;
        eq.perron = std::move(unit);
        return eq;
    }

    eq.s = equilibrium_substrate(model);
    const SymTridiag b = growth_matrix(model, eq.s);
    const double lam = top_eigenvalue(b);
    EigResult perron = perron_vector(b, lam);
    double total = 0.0;
    for (double c : perron.vector) total += c;
    const double scale = (1.0 - eq.s) / total;
    eq.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) eq.x[i] = scale * perron.vector[i];
    eq.perron = std::move(perron);
    return eq;
}

Equilibrium solve_equilibrium(const ChemostatModel& model) {
    const Classification c = classify(model);
    Equilibrium eq = (c.regime == Regime::coexistence) ? coexistence_equilibrium(model)
                                                       : washout_equilibrium(model);
    eq.stability = stability_report(model, eq);
    return eq;
}

double two_species_top_eigenvalue(const MonodKinetics& kinetics, double s, double u,
                                  double epsilon) {
    if (kinetics.species_count() != 2)
        throw std::invalid_argument("two_species_top_eigenvalue: exactly two species required");
    const double mu1 = kinetics.rate(0, s);
    const double mu2 = kinetics.rate(1, s);
    const double d = mu1 - mu2;
    return -epsilon - u + 0.5 * (mu1 + mu2) + 0.5 * std::sqrt(d * d + 4.0 * epsilon * epsilon);
}

TwoSpeciesEquilibrium two_species_equilibrium(const MonodKinetics& kinetics, double u,
                                              double epsilon) {
    if (kinetics.species_count() != 2)
        throw std::invalid_argument("two_species_equilibrium: exactly two species required");
    if (!(two_species_top_eigenvalue(kinetics, 1.0, u, epsilon) > 0.0))
        throw std::domain_error("two_species_equilibrium: washout regime");

    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < kSubstrateBisections; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (two_species_top_eigenvalue(kinetics, mid, u, epsilon) > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    TwoSpeciesEquilibrium eq;
    eq.s = 0.5 * (lo + hi);
    const double mu1 = kinetics.rate(0, eq.s);
    const double mu2 = kinetics.rate(1, eq.s);
    if (std::abs(mu1 - mu2) < 1e-12) {
        // intersecting kinetics at the operating dilution
        eq.x1 = 0.5 * (1.0 - eq.s);
        eq.x2 = eq.x1;
    } else {
        eq.x1 = (1.0 - eq.s) * (u - mu2) / (mu1 - mu2);
        eq.x2 = (1.0 - eq.s) * (u - mu1) / (mu2 - mu1);
    }
    return eq;
}

StabilityReport stability_report(const ChemostatModel& model, const Equilibrium& eq) {
    const std::size_t n = model.species_count();
    StabilityReport rep;

    if (eq.kind == EquilibriumKind::washout) {
        // Block-triangular Jacobian: spectrum is eig(B(1,u,eps)) plus {-u}.
        rep.d_vector.assign(n, 0.0);
        rep.a_abscissa = eq.lambda_at_one;
        rep.jacobian_abscissa = std::max(eq.lambda_at_one, -model.u());
        rep.certified = true;
        if (eq.lambda_at_one > kVerdictBand)
            rep.verdict = StabilityVerdict::unstable;
        else if (eq.lambda_at_one < -kVerdictBand)
            rep.verdict = StabilityVerdict::gas_claimed;
        else
            rep.verdict = StabilityVerdict::stable;
        return rep;
    }

    rep.d_vector.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        rep.d_vector[i] = model.kinetics().rate_derivative(i, eq.s) * eq.x[i];

    const Matrix b = to_dense(growth_matrix(model, eq.s));
    Matrix a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = b(i, j) - rep.d_vector[i];

    Matrix jac(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) jac(i, j) = a(i, j);
        jac(i, n) = rep.d_vector[i];
    }
    jac(n, n) = -model.u();

    const AbscissaEstimate ea = spectral_abscissa(a);
    const AbscissaEstimate ej = spectral_abscissa(jac);
    rep.a_abscissa = ea.value;
    rep.jacobian_abscissa = ej.value;
    rep.certified = ea.converged && ej.converged;
    if (ej.sign == SpectralSign::negative)
        rep.verdict = (n == 2) ? StabilityVerdict::gas_claimed : StabilityVerdict::las;
    else if (ej.sign == SpectralSign::positive)
        rep.verdict = StabilityVerdict::unstable;
    else
        rep.verdict = StabilityVerdict::marginal;
    return rep;
}

double InequalityCertificates::min_slack() const {
    double m = std::min({sin_lower_hat, sin_lower_mean, sin_upper});
    if (has_equilibrium_chain) m = std::min({m, seq_mean_le_u, seq_u_le_max, seq_max_le_u_2eps});
    return m;
}

InequalityCertificates inequality_certificates(const ChemostatModel& model,
                                               const Equilibrium& eq) {
    InequalityCertificates cert;
    const double u = model.u();
    const double eps = model.epsilon();
    const auto at_one = model.kinetics().rate_stats(1.0);
    const double lam1 = eq.lambda_at_one;
    cert.sin_lower_hat = lam1 - (at_one.max - u - 2.0 * eps);
    cert.sin_lower_mean = lam1 - (at_one.mean - u);
    cert.sin_upper = (at_one.max - u) - lam1;
    if (eq.kind == EquilibriumKind::coexistence) {
        cert.has_equilibrium_chain = true;
        const auto at_s = model.kinetics().rate_stats(eq.s);
        cert.seq_mean_le_u = u - at_s.mean;
        cert.seq_u_le_max = at_s.max - u;
        cert.seq_max_le_u_2eps = (u + 2.0 * eps) - at_s.max;
    }
    return cert;
}

void write_equilibrium_csv(const std::filesystem::path& file, std::size_t species_count,
                           std::span<const EquilibriumRow> rows) {
    std::vector<std::string> cols = {"epsilon", "u", "kind", "s"};
    for (std::size_t i = 1; i <= species_count; ++i) cols.push_back("x_" + std::to_string(i));
    cols.push_back("lambda_at_one");
    cols.push_back("abscissa");
    csv::Table table(file, cols);
    for (const EquilibriumRow& row : rows) {
        std::vector<std::string> fields;
        fields.reserve(cols.size());
        fields.push_back(csv::field(row.epsilon));
        fields.push_back(csv::field(row.u));
        fields.push_back(row.eq.kind == EquilibriumKind::coexistence ? "coexistence" : "washout");
        fields.push_back(csv::field(row.eq.s));
        for (std::size_t i = 0; i < species_count; ++i) fields.push_back(csv::field(row.eq.x[i]));
        fields.push_back(csv::field(row.eq.lambda_at_one));
        fields.push_back(csv::field(row.eq.stability ? row.eq.stability->jacobian_abscissa
                                                     : std::numeric_limits<double>::quiet_NaN()));
        table.add_row(fields);
    }
    table.close();
}

void write_uc_curve_csv(const std::filesystem::path& file, const MonodKinetics& kinetics,
                        std::span<const double> epsilon_grid) {
    csv::Table table(file, {"epsilon", "u_c", "lower_bound", "upper_bound"});
    const auto at_one = kinetics.rate_stats(1.0);
    for (double eps : epsilon_grid) {
        const double uc = critical_dilution(kinetics, eps);
        const double lower = std::max(at_one.max - 2.0 * eps, at_one.mean);
        table.add_row({csv::field(eps), csv::field(uc), csv::field(lower),
                       csv::field(at_one.max)});
    }
    table.close();
}

}  // namespace chemostat
