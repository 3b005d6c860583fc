#pragma once

#include "gradnet/convergence.hpp"
#include "gradnet/model.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace gradnet::cli {

struct SimulationBlock {
    std::size_t sites = 64;
    std::vector<double> times;
    IntegratorChoice integrator = IntegratorChoice::automatic;
    std::optional<double> cfl;
};

struct OutputBlock {
    std::string dir = ".";
};

/// Parsed run configuration. `model` is absent when the config only names a scenario.
struct RunConfig {
    std::optional<std::string> scenario;
    std::optional<ModelSpec> model;
    std::vector<std::size_t> sweep_sites;
    SweepOptions sweep;
    Thresholds thresholds;
    bool thresholds_given = false;
    std::optional<double> self_check_ratio;
    SimulationBlock simulation;
    std::size_t network_sites = 8;
    OutputBlock output;
};

/// Throws ConfigError on schema violations and nlohmann::json::exception on bad JSON.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

ModelSpec parse_model(const nlohmann::json& block);
/// Accepts a number or a string such as "2pi", "pi" or "0.5pi".
double parse_length(const nlohmann::json& value);

}  // namespace gradnet::cli
