#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include "chemostat/model.hpp"

namespace chemostat {

class WashoutRegimeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class NonGenericDilutionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Index (0-based) of the species with the least finite break-even
// concentration. Errors when all are infinite or when the minimum is tied
// within 1e-12 (non-generic dilution).
std::size_t winner_index(const MonodKinetics& kinetics, double u);

// First-order behavior of the coexistence point for small mutation rates:
// E(eps) = E_winner + eps (xi, sigma) + O(eps^2). xi is supported on the
// winner and its direct neighbors; sigma + sum(xi) = 0.
struct ExpansionResult {
    std::size_t winner = 0;        // i0, 0-based
    std::vector<double> base_x;    // species part of E_{i0}
    double base_s = 0.0;           // lambda_{i0}(u)
    std::vector<double> xi;
    double sigma = 0.0;
};

ExpansionResult first_order_expansion(const MonodKinetics& kinetics, double u);

// Central-difference estimate of d(E)/d(eps) near eps = 0, computed with the
// general equilibrium solver. Serves as the independent oracle for
// first_order_expansion and fills the fd_* columns of expansion.csv.
struct FdExpansion {
    std::vector<double> xi;
    double sigma = 0.0;
};

FdExpansion finite_difference_expansion(const MonodKinetics& kinetics, double u,
                                        double eps0 = 1e-5, double step = 5e-6);

// Limit of the coexistence point as the mutation rate grows without bound:
// species uniformly distributed, substrate at the mean break-even level.
struct LimitPoint {
    std::vector<double> x;
    double s = 0.0;
};

LimitPoint infinite_mutation_limit(const ChemostatModel& model);

void write_expansion_csv(const std::filesystem::path& file, const MonodKinetics& kinetics,
                         std::span<const double> u_grid);

}  // namespace chemostat
