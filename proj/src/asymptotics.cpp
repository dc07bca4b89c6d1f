#include "chemostat/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "chemostat/csv.hpp"
#include "chemostat/equilibria.hpp"

namespace chemostat {

std::size_t winner_index(const MonodKinetics& kinetics, double u) {
    const std::size_t n = kinetics.species_count();
    std::vector<double> lam(n, std::numeric_limits<double>::infinity());
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
        const auto b = break_even(kinetics, i, u);
        if (b) {
            lam[i] = *b;
            any = true;
        }
    }
    if (!any)
        throw WashoutRegimeError("winner_index: all break-even concentrations are infinite");
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (lam[i] < lam[best]) best = i;
    for (std::size_t i = 0; i < n; ++i)
        if (i != best && std::isfinite(lam[i]) && std::abs(lam[i] - lam[best]) <= 1e-12)
            throw NonGenericDilutionError(
                "winner_index: tied break-even concentrations between species " +
                std::to_string(best + 1) + " and " + std::to_string(i + 1));
    return best;
}

ExpansionResult first_order_expansion(const MonodKinetics& kinetics, double u) {
    const std::size_t n = kinetics.species_count();
    if (!(u > 0.0) || !(u < kinetics.rate_stats(1.0).max))
        throw std::domain_error("first_order_expansion: u must lie in (0, mu_hat(1))");
    ExpansionResult r;
    r.winner = winner_index(kinetics, u);
    r.base_s = *break_even(kinetics, r.winner, u);
    r.base_x.assign(n, 0.0);
    r.base_x[r.winner] = 1.0 - r.base_s;

    r.xi.assign(n, 0.0);
    double neighbor_sum = 0.0;
    for (std::size_t off = 0; off < 2; ++off) {
        // neighbors i0 - 1 and i0 + 1, skipping past the boundary
        if (off == 0 && r.winner == 0) continue;
        if (off == 1 && r.winner + 1 >= n) continue;
        const std::size_t j = (off == 0) ? r.winner - 1 : r.winner + 1;
        r.xi[j] = (1.0 - r.base_s) / (u - kinetics.rate(j, r.base_s));
        neighbor_sum += r.xi[j];
    }
    r.sigma = -mutation_diagonal(r.winner, n) / kinetics.rate_derivative(r.winner, r.base_s);
    r.xi[r.winner] = -neighbor_sum - r.sigma;
    return r;
}

FdExpansion finite_difference_expansion(const MonodKinetics& kinetics, double u, double eps0,
                                        double step) {
    if (!(eps0 > step) || !(step > 0.0))
        throw std::invalid_argument("finite_difference_expansion: need eps0 > step > 0");
    const ChemostatModel lo(kinetics, eps0 - step, u);
    const ChemostatModel hi(kinetics, eps0 + step, u);
    const Equilibrium elo = coexistence_equilibrium(lo);
    const Equilibrium ehi = coexistence_equilibrium(hi);
    FdExpansion fd;
    const std::size_t n = kinetics.species_count();
    fd.xi.resize(n);
    for (std::size_t i = 0; i < n; ++i) fd.xi[i] = (ehi.x[i] - elo.x[i]) / (2.0 * step);
    fd.sigma = (ehi.s - elo.s) / (2.0 * step);
    return fd;
}

LimitPoint infinite_mutation_limit(const ChemostatModel& model) {
    const double u = model.u();
    const auto at_one = model.kinetics().rate_stats(1.0);
    if (!(u > 0.0) || !(u < at_one.mean))
        throw std::domain_error(
            "infinite_mutation_limit: no coexistence limit, u must lie in (0, mu_bar(1))");
    // mu_bar has no radical inverse for general n; bisect to 1e-13.
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if (model.kinetics().rate_stats(mid).mean > u)
            hi = mid;
        else
            lo = mid;
    }
    LimitPoint p;
    p.s = 0.5 * (lo + hi);
    const std::size_t n = model.species_count();
    p.x.assign(n, (1.0 - p.s) / static_cast<double>(n));
    return p;
}

void write_expansion_csv(const std::filesystem::path& file, const MonodKinetics& kinetics,
                         std::span<const double> u_grid) {
    const std::size_t n = kinetics.species_count();
    std::vector<std::string> cols = {"u", "i0", "sigma"};
    for (std::size_t i = 1; i <= n; ++i) cols.push_back("xi_" + std::to_string(i));
    cols.push_back("fd_sigma");
    for (std::size_t i = 1; i <= n; ++i) cols.push_back("fd_xi_" + std::to_string(i));
    cols.push_back("abs_err");
    csv::Table table(file, cols);
    for (double u : u_grid) {
        ExpansionResult r;
        FdExpansion fd;
        try {
            r = first_order_expansion(kinetics, u);
            fd = finite_difference_expansion(kinetics, u);
        } catch (const std::exception& e) {
            std::cerr << "expansion: skipping u=" << u << ": " << e.what() << "\n";
            continue;
        }
        double err = std::abs(r.sigma - fd.sigma);
        for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(r.xi[i] - fd.xi[i]));
        std::vector<std::string> fields;
        fields.reserve(cols.size());
        fields.push_back(csv::field(u));
        fields.push_back(csv::field(static_cast<std::uint64_t>(r.winner + 1)));
        fields.push_back(csv::field(r.sigma));
        for (std::size_t i = 0; i < n; ++i) fields.push_back(csv::field(r.xi[i]));
        fields.push_back(csv::field(fd.sigma));
        for (std::size_t i = 0; i < n; ++i) fields.push_back(csv::field(fd.xi[i]));
        fields.push_back(csv::field(err));
        table.add_row(fields);
    }
    table.close();
}

}  // namespace chemostat
