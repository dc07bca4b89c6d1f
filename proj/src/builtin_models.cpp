#include "chemostat/builtin_models.hpp"

namespace chemostat {

ChemostatModel fig1_model(double epsilon, double u) {
    return ChemostatModel(MonodKinetics({{1.0, 1.0}, {0.7, 0.5}}), epsilon, u);
}

ChemostatModel fig2_model(double epsilon, double u) {
    std::vector<MonodLaw> laws;
    laws.reserve(20);
    for (int i = 1; i <= 20; ++i) {
        const double d = 10.0 - i;
        laws.push_back({20.0, 1.0 + 0.5 * d * d});
    }
    return ChemostatModel(MonodKinetics(std::move(laws)), epsilon, u);
}

std::optional<ChemostatModel> builtin_model(std::string_view name) {
    if (name == "fig1") return fig1_model();
    if (name == "fig2") return fig2_model();
    return std::nullopt;
}

}  // namespace chemostat
