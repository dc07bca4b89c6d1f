#pragma once

#include <optional>
#include <string_view>

#include "chemostat/model.hpp"

namespace chemostat {

// Two-species benchmark: mu_1(s) = s/(1+s), mu_2(s) = 0.7 s/(0.5+s).
ChemostatModel fig1_model(double epsilon = 1.0, double u = 0.2);

// Twenty-species benchmark: mu_i(s) = 20 s/(a_i+s), a_i = 1 + (10-i)^2/2.
ChemostatModel fig2_model(double epsilon = 1.0, double u = 5.0);

std::optional<ChemostatModel> builtin_model(std::string_view name);

}  // namespace chemostat
