#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chemostat/model.hpp"

namespace chemostat::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GridAxis {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
};

// "lo:hi:count" per axis, axes separated by commas
std::vector<GridAxis> parse_grid(const std::string& spec);
std::vector<double> axis_points(const GridAxis& axis);

struct RunConfig {
    std::string model_spec = "fig1";  // builtin name or path to a JSON model
    std::filesystem::path out_dir = ".";
    double tol = 1e-10;
    std::uint64_t seed = 1;
    double horizon = 0.0;  // 0 selects the command default
    std::string grid;      // raw grid spec, command default if empty
    std::optional<double> u_override;
    std::optional<double> epsilon_override;
    std::optional<std::vector<double>> x0;
    std::optional<double> s0;
    unsigned threads = 0;  // 0 = hardware concurrency
    int gas_ensemble = 0;  // trajectories per sweep point, 0 disables
    bool emit_gnuplot = false;
    bool corrupt_selftest = false;  // verify harness self-test hook
    bool quick = false;             // reduced ensemble sizes (smoke runs)

    void validate() const;
};

ChemostatModel resolve_model(const RunConfig& config);

// Exit codes: 0 success, 1 input error, 2 marginal/boundary, 3 property failure.
int cmd_steady(const RunConfig& config);
int cmd_uc(const RunConfig& config);
int cmd_fig1(const RunConfig& config);
int cmd_fig2(const RunConfig& config);
int cmd_simulate(const RunConfig& config);
int cmd_sweep(const RunConfig& config);
int cmd_expand(const RunConfig& config);
int cmd_verify(const RunConfig& config);

}  // namespace chemostat::cli
