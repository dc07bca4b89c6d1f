#include "chemostat/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

namespace chemostat {

MonodKinetics::MonodKinetics(std::vector<MonodLaw> laws) : laws_(std::move(laws)) {
    if (laws_.empty()) throw std::invalid_argument("kinetics: at least one species required");
    for (std::size_t i = 0; i < laws_.size(); ++i) {
        if (!(laws_[i].m > 0.0) || !std::isfinite(laws_[i].m))
            throw std::invalid_argument("kinetics: species " + std::to_string(i + 1) +
                                        " has non-positive maximal rate m");
        if (!(laws_[i].a > 0.0) || !std::isfinite(laws_[i].a))
            throw std::invalid_argument("kinetics: species " + std::to_string(i + 1) +
                                        " has non-positive half-saturation a");
    }
    std::size_t pairs = 0;
    std::size_t first_i = 0, first_j = 0;
    for (std::size_t i = 0; i < laws_.size(); ++i)
        for (std::size_t j = i + 1; j < laws_.size(); ++j)
            if (laws_[i].m == laws_[j].m && laws_[i].a == laws_[j].a) {
                if (pairs == 0) {
                    first_i = i;
                    first_j = j;
                }
                ++pairs;
            }
    if (pairs > 0) {
        has_duplicates_ = true;
        std::cerr << "warning: species " << (first_i + 1) << " and " << (first_j + 1)
                  << " share identical kinetics (m=" << laws_[first_i].m
                  << ", a=" << laws_[first_i].a << ")";
        if (pairs > 1) std::cerr << " and " << (pairs - 1) << " more pair(s) coincide";
        std::cerr << "; genericity assumptions may fail\n";
    }
}

const MonodLaw& MonodKinetics::law(std::size_t i) const {
    if (i >= laws_.size()) throw std::out_of_range("kinetics: species index out of range");
    return laws_[i];
}

double MonodKinetics::rate(std::size_t i, double s) const {
    const MonodLaw& l = law(i);
    return l.m * s / (l.a + s);
}

double MonodKinetics::rate_derivative(std::size_t i, double s) const {
    const MonodLaw& l = law(i);
    const double d = l.a + s;
    return l.m * l.a / (d * d);
}

MonodKinetics::RateStats MonodKinetics::rate_stats(double s) const {
    RateStats st;
    st.max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (std::size_t i = 0; i < laws_.size(); ++i) {
        const double r = rate(i, s);
        sum += r;
        st.max = std::max(st.max, r);
    }
    st.mean = sum / static_cast<double>(laws_.size());
    return st;
}

std::optional<double> break_even(const MonodKinetics& kinetics, std::size_t i, double u) {
    if (!(u > 0.0)) throw std::invalid_argument("break_even: dilution rate must be positive");
    const MonodLaw& l = kinetics.law(i);
    if (!(kinetics.rate(i, 1.0) > u)) return std::nullopt;
    return l.a * u / (l.m - u);
}

ChemostatModel::ChemostatModel(MonodKinetics kinetics, double epsilon, double u)
    : kinetics_(std::move(kinetics)), epsilon_(epsilon), u_(u) {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
        throw std::invalid_argument("model: epsilon must be nonnegative");
    if (!(u >= 0.0) || !std::isfinite(u))
        throw std::invalid_argument("model: dilution rate must be nonnegative");
}

double State::total_mass() const {
    double b = s;
    for (double c : x) b += c;
    return b;
}

void validate_state(const State& state, std::size_t n) {
    if (state.x.size() != n) throw std::invalid_argument("state: species count mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(state.x[i] >= 0.0)) throw std::invalid_argument("state: negative concentration");
        total += state.x[i];
    }
    if (!(total > 0.0)) throw std::invalid_argument("state: at least one species must be present");
    if (!(state.s >= 0.0 && state.s <= 1.0))
        throw std::invalid_argument("state: substrate outside [0,1]");
}

double mutation_diagonal(std::size_t i, std::size_t n) {
    if (n <= 1) return 0.0;
    return (i == 0 || i + 1 == n) ? -1.0 : -2.0;
}

void apply_mutation(std::span<const double> x, std::span<double> out) {
    const std::size_t n = x.size();
    if (n == 1) {
        out[0] = 0.0;
        return;
    }
    out[0] = x[1] - x[0];
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = x[i - 1] - 2.0 * x[i] + x[i + 1];
    out[n - 1] = x[n - 2] - x[n - 1];
}

SymTridiag mutation_matrix(std::size_t n) {
    SymTridiag t;
    t.diag.resize(n);
    t.offdiag.assign(n > 0 ? n - 1 : 0, 1.0);
    for (std::size_t i = 0; i < n; ++i) t.diag[i] = mutation_diagonal(i, n);
    return t;
}

SymTridiag growth_matrix(const ChemostatModel& model, double s) {
    const std::size_t n = model.species_count();
    SymTridiag b;
    b.diag.resize(n);
    b.offdiag.assign(n > 0 ? n - 1 : 0, model.epsilon());
    for (std::size_t i = 0; i < n; ++i)
        b.diag[i] = model.kinetics().rate(i, s) - model.u() + model.epsilon() * mutation_diagonal(i, n);
    return b;
}

StateRate drift(const ChemostatModel& model, const State& state) {
    const std::size_t n = model.species_count();
    StateRate rate;
    rate.dx.resize(n);
    double consumption = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double mu = model.kinetics().rate(i, state.s);
        rate.dx[i] = (mu - model.u()) * state.x[i];
        consumption += mu * state.x[i];
    }
    if (n > 1 && model.epsilon() > 0.0) {
        const double eps = model.epsilon();
        rate.dx[0] += eps * (state.x[1] - state.x[0]);
        for (std::size_t i = 1; i + 1 < n; ++i)
            rate.dx[i] += eps * (state.x[i - 1] - 2.0 * state.x[i] + state.x[i + 1]);
        rate.dx[n - 1] += eps * (state.x[n - 2] - state.x[n - 1]);
    }
    rate.ds = -consumption + model.u() * (1.0 - state.s);
    return rate;
}

double substrate_floor(const ChemostatModel& model) {
    if (!(model.u() > 0.0))
        throw std::invalid_argument("substrate_floor: dilution rate must be positive");
    const double c = model.u() / 8.0;
    double delta = 1.0;
    for (std::size_t i = 0; i < model.species_count(); ++i) {
        const MonodLaw& l = model.kinetics().law(i);
        if (model.kinetics().rate(i, 1.0) <= c) continue;  // never reaches u/8 on [0,1]
        delta = std::min(delta, l.a * c / (l.m - c));
    }
    return std::min(delta, 0.5);
}

namespace {

using nlohmann::json;

double require_number(const json& j, const std::string& field) {
    if (!j.contains(field)) throw ModelFormatError(field, "missing field '" + field + "'");
    if (!j.at(field).is_number())
        throw ModelFormatError(field, "field '" + field + "' must be a number");
    return j.at(field).get<double>();
}

}  // namespace

ChemostatModel parse_model_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ModelFormatError("document", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ModelFormatError("document", "top-level value must be an object");

    if (!doc.contains("n")) throw ModelFormatError("n", "missing field 'n'");
    if (!doc.at("n").is_number_integer())
        throw ModelFormatError("n", "field 'n' must be an integer");
    const long long n = doc.at("n").get<long long>();
    if (n < 1) throw ModelFormatError("n", "species count must be at least 1");

    if (!doc.contains("species") || !doc.at("species").is_array())
        throw ModelFormatError("species", "field 'species' must be an array");
    const json& species = doc.at("species");
    if (static_cast<long long>(species.size()) != n)
        throw ModelFormatError("species", "species array length " + std::to_string(species.size()) +
                                               " does not match n=" + std::to_string(n));

    std::vector<MonodLaw> laws;
    laws.reserve(species.size());
    for (std::size_t i = 0; i < species.size(); ++i) {
        const std::string where = "species[" + std::to_string(i) + "]";
        if (!species[i].is_object()) throw ModelFormatError(where, where + " must be an object");
        MonodLaw l;
        try {
            l.m = require_number(species[i], "m");
            l.a = require_number(species[i], "a");
        } catch (const ModelFormatError& e) {
            throw ModelFormatError(where + "." + e.field(), e.what());
        }
        if (!(l.m > 0.0)) throw ModelFormatError(where + ".m", "m must be positive");
        if (!(l.a > 0.0)) throw ModelFormatError(where + ".a", "a must be positive");
        laws.push_back(l);
    }

    const double epsilon = require_number(doc, "epsilon");
    if (!(epsilon >= 0.0)) throw ModelFormatError("epsilon", "epsilon must be nonnegative");
    const double u = require_number(doc, "u");
    if (!(u >= 0.0)) throw ModelFormatError("u", "u must be nonnegative");

    return ChemostatModel(MonodKinetics(std::move(laws)), epsilon, u);
}

ChemostatModel load_model(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ModelFormatError("file", "cannot open model file " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model_json(buf.str());
}

}  // namespace chemostat
