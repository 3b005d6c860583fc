#pragma once

#include "gradnet/convergence.hpp"
#include "gradnet/model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gradnet {

/// A model together with the sweep that exercises it and the thresholds it must meet.
struct Scenario {
    std::string id;
    std::string description;
    ModelSpec model;
    std::vector<std::size_t> sites;
    SweepOptions options;
    Thresholds thresholds;
    /// When set, the fine reference is cross-checked against one at this larger ratio.
    std::optional<double> self_check_ratio;
};

std::vector<std::string> builtin_scenario_ids();
/// Throws ConfigError for an unknown id.
Scenario builtin_scenario(std::string_view id);

struct ScenarioResult {
    ConvergenceReport report;
    std::vector<CheckOutcome> checks;
    std::optional<double> self_check_W;
    bool passed = false;
};

/// Sweeps the scenario and evaluates its thresholds (plus the reference self-check, which
/// must stay below 10% of the smallest measured W).
ScenarioResult run_scenario(const Scenario& scenario);

}  // namespace gradnet
