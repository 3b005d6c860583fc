#include "gradnet/scenarios.hpp"

#include "gradnet/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <numbers>

namespace gradnet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ModelSpec periodic_sine(std::vector<double> coeffs, double amplitude) {
    ModelSpec m;
    m.length = kTwoPi;
    m.order = static_cast<int>(coeffs.size()) - 1;
    m.bc = Boundary::periodic;
    m.coeffs = std::move(coeffs);
    m.initial.kind = InitialKind::trig;
    m.initial.displacement = {TrigTerm{1, 0.0, amplitude}};
    return m;
}

std::vector<std::size_t> halvings(std::size_t first, int count) {
    std::vector<std::size_t> out{first};
    for (int i = 0; i < count; ++i) out.push_back(out.back() * 2);
    return out;
}

}  // namespace

std::vector<std::string> builtin_scenario_ids() {
    return {"elastica-periodic", "elastica-dirichlet", "general-linear", "nonlinear", "harmonic-chain"};
}

Scenario builtin_scenario(std::string_view id) {
    Scenario s;
    s.id = std::string(id);
    if (id == "elastica-periodic") {
        s.description = "periodic elastica, u0 = sin(x), exact propagator vs spectral solution";
        s.model = periodic_sine({0.0, 0.0, 1.0}, 1.0);
        s.sites = halvings(32, 4);
        s.options.integrator = IntegratorChoice::exact;
        s.options.reference = ReferenceChoice::spectral;
        s.thresholds.min_order = 1.9;
        s.thresholds.max_terminal_ratio = 1e-4;
        s.thresholds.max_drift = 1e-12;
    } else if (id == "elastica-dirichlet") {
        s.description = "clamped elastica, u0 = (x (L - x) / L^2)^2, Verlet vs fine lattice";
        s.model.length = kTwoPi;
        s.model.order = 2;
        s.model.bc = Boundary::dirichlet;
        s.model.coeffs = {0.0, 0.0, 1.0};
        s.model.initial.kind = InitialKind::clamped;
        s.model.initial.envelope_exponent = 2;
        s.model.initial.displacement = {TrigTerm{0, 1.0, 0.0}};
        s.sites = halvings(64, 4);
        s.options.integrator = IntegratorChoice::verlet;
        s.options.cfl = 0.25;
        s.options.reference = ReferenceChoice::fine;
        s.thresholds.min_order = 0.45;
        s.thresholds.max_terminal_ratio = 0.1;
        s.thresholds.max_drift = 1e-4;
        s.thresholds.laplacian_bound = true;
    } else if (id == "general-linear") {
        s.description = "n = 3, A = (1, 1, 0, 1), exact propagator vs spectral solution";
        s.model = periodic_sine({1.0, 1.0, 0.0, 1.0}, 1.0);
        s.sites = halvings(32, 4);
        s.options.integrator = IntegratorChoice::exact;
        s.options.reference = ReferenceChoice::spectral;
        s.thresholds.min_order = 1.9;
        s.thresholds.max_terminal_ratio = 0.1;
        s.thresholds.max_drift = 1e-12;
    } else if (id == "nonlinear") {
        s.description = "A = (1, 0, 1), R = 0.1 (xi0^4 + xi1^4), u0 = 0.5 sin(x), Verlet vs fine lattice";
        s.model = periodic_sine({1.0, 0.0, 1.0}, 0.5);
        s.model.nonlinearity = PolynomialR({Monomial{4, 0, 0.1}, Monomial{0, 4, 0.1}});
        s.sites = halvings(32, 4);
        s.options.integrator = IntegratorChoice::verlet;
        s.options.reference = ReferenceChoice::fine;
        s.thresholds.max_terminal_ratio = 0.1;
        s.thresholds.max_drift = 1e-4;
        s.self_check_ratio = 32.0;
    } else if (id == "harmonic-chain") {
        s.description = "grounded chain A = (1, 1), exact propagator vs spectral solution";
        s.model = periodic_sine({1.0, 1.0}, 1.0);
        s.sites = halvings(32, 4);
        s.options.integrator = IntegratorChoice::exact;
        s.options.reference = ReferenceChoice::spectral;
        s.thresholds.max_terminal_ratio = 0.1;
        s.thresholds.max_drift = 1e-12;
    } else {
        throw ConfigError("unknown scenario '" + std::string(id) + "'");
    }
    return s;
}

ScenarioResult run_scenario(const Scenario& scenario) {
    ScenarioResult result;
    std::unique_ptr<ReferenceProvider> reference;
    if (!scenario.sites.empty()) reference = make_reference(scenario.model, scenario.sites, scenario.options);
    result.report = sweep(scenario.model, scenario.sites, scenario.options, reference.get(), scenario.id);
    result.checks = evaluate(result.report, scenario.thresholds);
    if (scenario.self_check_ratio && reference) {
        const double t = scenario.options.times.empty() ? 0.0 : scenario.options.times.back();
        const double w = reference_self_check(scenario.model, scenario.sites.back(), *reference,
                                              *scenario.self_check_ratio, t, scenario.options);
        result.self_check_W = w;
        double smallest = 0.0;
        bool have = false;
        for (const SweepRow& row : result.report.rows) {
            if (row.failed) continue;
            smallest = have ? std::min(smallest, row.terminal_W()) : row.terminal_W();
            have = true;
        }
        char detail[128];
        std::snprintf(detail, sizeof detail, "W(%s, fine-grid x%g) = %.6g, smallest measured W = %.6g",
                      reference->name().c_str(), *scenario.self_check_ratio, w, smallest);
        result.checks.push_back({"reference self-check < 10% of smallest W", have && w < 0.1 * smallest, detail});
    }
    result.passed = std::all_of(result.checks.begin(), result.checks.end(), [](const CheckOutcome& c) { return c.passed; });
    return result;
}

}  // namespace gradnet
