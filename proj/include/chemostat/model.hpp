#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chemostat/linalg.hpp"

namespace chemostat {

struct MonodLaw {
    double m = 0.0;  // maximal growth rate
    double a = 0.0;  // half-saturation constant
};

// Per-species Monod growth laws mu_i(s) = m_i s / (a_i + s).
class MonodKinetics {
public:
    // Positive parameters required. Species sharing an identical (m, a) pair
    // get a warning, not an error: degenerate fixtures are legitimate inputs,
    // they just void the genericity assumptions.
    explicit MonodKinetics(std::vector<MonodLaw> laws);

    std::size_t species_count() const { return laws_.size(); }
    const MonodLaw& law(std::size_t i) const;

    double rate(std::size_t i, double s) const;             // mu_i(s)
    double rate_derivative(std::size_t i, double s) const;  // mu_i'(s)

    struct RateStats {
        double mean = 0.0;  // mu_bar(s)
        double max = 0.0;   // mu_hat(s)
    };
    RateStats rate_stats(double s) const;

    bool has_duplicate_laws() const { return has_duplicates_; }

private:
    std::vector<MonodLaw> laws_;
    bool has_duplicates_ = false;
};

// Break-even concentration: the substrate level where mu_i equals u, or
// nullopt when species i cannot reach the dilution rate on [0, 1].
std::optional<double> break_even(const MonodKinetics& kinetics, std::size_t i, double u);

// Chemostat with nearest-neighbor mutation at rate epsilon and dilution u;
// input substrate normalized to 1, unit yields.
class ChemostatModel {
public:
    ChemostatModel(MonodKinetics kinetics, double epsilon, double u);

    std::size_t species_count() const { return kinetics_.species_count(); }
    const MonodKinetics& kinetics() const { return kinetics_; }
    double epsilon() const { return epsilon_; }
    double u() const { return u_; }

    ChemostatModel with_epsilon(double epsilon) const { return {kinetics_, epsilon, u_}; }
    ChemostatModel with_u(double u) const { return {kinetics_, epsilon_, u}; }

private:
    MonodKinetics kinetics_;
    double epsilon_ = 0.0;
    double u_ = 0.0;
};

struct State {
    std::vector<double> x;  // species concentrations, nonnegative
    double s = 0.0;         // substrate in [0, 1]

    double total_mass() const;  // b = s + sum_j x_j
};

void validate_state(const State& state, std::size_t n);

// Mutation stencil T: off-diagonal 1 between neighbors, diagonal minus the
// neighbor count. Row sums vanish for every n; the single-species matrix is
// zero (nothing to mutate into).
double mutation_diagonal(std::size_t i, std::size_t n);
void apply_mutation(std::span<const double> x, std::span<double> out);  // out = T x
SymTridiag mutation_matrix(std::size_t n);

// B(s, u, eps) = M(s) - u I + eps T
SymTridiag growth_matrix(const ChemostatModel& model, double s);

struct StateRate {
    std::vector<double> dx;
    double ds = 0.0;
};

StateRate drift(const ChemostatModel& model, const State& state);

// Positive lower barrier c_u for the asymptotic substrate level: the substrate
// value where the fastest kinetics reaches u/8, capped at 1/2. Closed-form
// per-species inversion, no iteration.
double substrate_floor(const ChemostatModel& model);

class ModelFormatError : public std::runtime_error {
public:
    ModelFormatError(std::string field, const std::string& message)
        : std::runtime_error(message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// JSON model document: { "n": int, "species": [{"m": float, "a": float}, ...],
//                        "epsilon": float, "u": float }
ChemostatModel parse_model_json(const std::string& text);
ChemostatModel load_model(const std::filesystem::path& file);

}  // namespace chemostat
