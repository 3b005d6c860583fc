#pragma once

#include "gradnet/lattice.hpp"
#include "gradnet/synthesis.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace gradnet {

using NetworkFactory = std::function<StiffnessNetwork(std::span<const double>, const Lattice&)>;

struct SelftestOptions {
    std::uint64_t seed = 0;
    int fields = 100;
    /// Network builder under test; defaults to assemble_stiffness.
    NetworkFactory factory;
};

struct SuiteResult {
    std::string name;
    bool passed = false;
    double worst = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

/// Property suites: integration by parts, discrete Sobolev and chain-rule inequalities,
/// recursion vs direct Laplacian powers, network force vs operator force, force vs energy.
std::vector<SuiteResult> run_selftest(const SelftestOptions& options = {});

}  // namespace gradnet
