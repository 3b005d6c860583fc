#pragma once

#include "gradnet/continuum.hpp"
#include "gradnet/dynamics.hpp"
#include "gradnet/model.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gradnet {

/// W = 1/2 |du|^2 + 1/2 |dv|^2 + 1/2 sum_alpha c_alpha |D^alpha du|^2.
struct DeviationWeights {
    std::vector<double> c;

    /// c_2 = 1 only.
    static DeviationWeights elastica();
    /// c_alpha = 2 A_alpha.
    static DeviationWeights general(std::span<const double> coeffs);
};

/// Default weights: elastica weights for A = (0, 0, A_2), general weights otherwise.
DeviationWeights default_weights(const ModelSpec& model);

/// Sums run over the whole zero-extended support, stencil overhang included.
double deviation_W(const ReferenceSample& ref, const SimState& state, const DeviationWeights& weights);
double deviation_W(const ReferenceProvider& ref, const SimState& state, const DeviationWeights& weights);
/// Same functional with every sum restricted to the cells of [0, L).
double deviation_W_interval(const ReferenceSample& ref, const SimState& state, const DeviationWeights& weights);

/// eps * sum over non-free sites of v_ref * (sum (-1)^alpha A_alpha Delta^alpha u).
double boundary_flux(const ModelSpec& model, const ReferenceSample& ref, const SimState& state);

enum class IntegratorChoice { automatic, exact, verlet };
enum class ReferenceChoice { automatic, spectral, fine };

std::string_view to_string(IntegratorChoice c);
std::string_view to_string(ReferenceChoice c);
IntegratorChoice parse_integrator(std::string_view text);
ReferenceChoice parse_reference(std::string_view text);

struct SweepOptions {
    std::vector<double> times{0.2, 0.4, 0.6, 0.8, 1.0};
    IntegratorChoice integrator = IntegratorChoice::automatic;
    std::optional<double> cfl;
    ReferenceChoice reference = ReferenceChoice::automatic;
    double ratio = 16.0;
    double reference_dt = 1e-4;
    std::optional<DeviationWeights> weights;
    unsigned threads = 1;
};

struct SweepRow {
    double eps = 0.0;
    std::size_t sites = 0;
    std::vector<double> times;
    std::vector<double> W;
    std::vector<double> W_interval;
    std::vector<double> energy;
    std::vector<double> drift;
    std::vector<double> boundary_flux;
    double initial_energy = 0.0;
    double max_drift = 0.0;
    double max_laplacian = 0.0;
    double laplacian_bound = 0.0;
    double max_top_derivative = 0.0;
    double top_derivative_bound = 0.0;
    double max_energy_bound_ratio = 0.0;
    std::string integrator;
    double dt = 0.0;
    std::size_t steps = 0;
    double wall_seconds = 0.0;
    bool failed = false;
    std::string message;

    double terminal_W() const { return W.empty() ? 0.0 : W.back(); }
};

struct OrderFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
    std::size_t points = 0;
};

struct ConvergenceReport {
    std::string scenario;
    std::string reference;
    /// Sorted by decreasing eps.
    std::vector<SweepRow> rows;
    std::optional<OrderFit> fit;
    std::string fit_message;
    bool extrapolated = false;
};

/// Rows with W below this are excluded from order fits.
inline constexpr double kRoundoffFloor = 1e-22;

/// Least-squares slope of log(values) against log(eps) over entries >= kRoundoffFloor.
/// Throws InsufficientDataError with fewer than 3 usable points.
OrderFit fit_order(std::span<const double> eps, std::span<const double> values);
OrderFit estimate_order(const ConvergenceReport& report);

/// N for each eps; throws ConfigError unless L / eps is an integer.
std::vector<std::size_t> sites_from_eps(double length, std::span<const double> eps);

/// Builds the reference chosen by `options` for the finest lattice in `sites`.
std::unique_ptr<ReferenceProvider> make_reference(const ModelSpec& model, std::span<const std::size_t> sites,
                                                  const SweepOptions& options);

/// Runs every lattice in `sites` (strictly increasing) against the reference. A row whose
/// trajectory diverges is marked failed and the sweep continues.
ConvergenceReport sweep(const ModelSpec& model, std::span<const std::size_t> sites, const SweepOptions& options,
                        const ReferenceProvider* reference = nullptr, std::string scenario = "custom");

/// W between `reference` and a fine reference at `ratio`, sampled on the lattice with
/// `sites` cells at time t.
double reference_self_check(const ModelSpec& model, std::size_t sites, const ReferenceProvider& reference,
                            double ratio, double t, const SweepOptions& options);

struct Thresholds {
    bool strictly_decreasing = true;
    std::optional<double> min_order;
    /// Bound on W(finest) / W(coarsest).
    std::optional<double> max_terminal_ratio;
    std::optional<double> max_drift;
    bool laplacian_bound = false;
};

struct CheckOutcome {
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<CheckOutcome> evaluate(const ConvergenceReport& report, const Thresholds& thresholds);

}  // namespace gradnet
