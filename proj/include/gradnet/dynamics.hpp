#pragma once

#include "gradnet/fft.hpp"
#include "gradnet/lattice.hpp"
#include "gradnet/model.hpp"
#include "gradnet/synthesis.hpp"

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

namespace gradnet {

struct SimState {
    double t = 0.0;
    LatticeField u;
    LatticeField v;
};

struct EnergyBreakdown {
    double kinetic = 0.0;
    double quadratic = 0.0;
    double nonlinear = 0.0;
    double total = 0.0;
};

/// Samples u_0 and v_0 at the lattice sites (frozen sites forced to zero).
SimState initial_state(const ModelSpec& model, const Lattice& lattice);

/// -[d0 R(u, D+u) - D-(d1 R(u, D+u))]; frozen sites get 0.
LatticeField nonlinear_force(const ModelSpec& model, const LatticeField& u);
void nonlinear_force_kernel(const PolynomialR& r, const Lattice& lattice, std::span<const double> u,
                            std::span<double> f, std::vector<double>& scratch);

/// Network force plus the nonlinear contribution.
LatticeField total_force(const ModelSpec& model, const StiffnessNetwork& net, const LatticeField& u);

/// Band-edge frequency bound sqrt(sum |A_alpha| (4/eps^2)^alpha).
double max_frequency(std::span<const double> coeffs, double eps);
double default_cfl(const ModelSpec& model);
/// dt = cfl * 2 / omega_max; cfl defaults to 0.25 (linear) or 0.125 (nonlinear).
double stable_dt(const ModelSpec& model, double eps, std::optional<double> cfl = {});

/// One velocity-Verlet step.
SimState step_verlet(const ModelSpec& model, const StiffnessNetwork& net, const SimState& state, double dt);

/// Velocity-Verlet stepping on raw site arrays; the force at the current position is
/// cached between steps.
class VerletIntegrator {
public:
    /// Keeps references to `model` and `net`; both must outlive the integrator.
    VerletIntegrator(const ModelSpec& model, const StiffnessNetwork& net, const SimState& initial);
    VerletIntegrator(const ModelSpec&, StiffnessNetwork&&, const SimState&) = delete;
    VerletIntegrator(ModelSpec&&, const StiffnessNetwork&, const SimState&) = delete;

    double time() const noexcept { return t_; }
    std::size_t steps() const noexcept { return steps_; }
    SimState state() const;

    /// Advances to `t_target` in equal steps no longer than `dt_max`. Throws
    /// DivergenceError when the state stops being finite.
    void advance_to(double t_target, double dt_max);
    void step(double dt);

private:
    void compute_force();
    bool finite() const;

    const ModelSpec* model_;
    const StiffnessNetwork* net_;
    Lattice lattice_;
    double t_;
    std::size_t steps_ = 0;
    std::vector<double> u_, v_, f_, nl_, scratch_;
};

/// Mode-wise exact evolution of a linear periodic lattice.
class ExactPropagator {
public:
    ExactPropagator(const ModelSpec& model, const SimState& initial);
    SimState at(double t);

private:
    Lattice lattice_;
    double t0_;
    RealFft fft_;
    std::vector<double> omega_;
    std::vector<std::complex<double>> u_hat_, v_hat_;
};

/// Throws UnsupportedError unless the model is linear and periodic.
SimState exact_linear_propagate(const ModelSpec& model, const SimState& state, double t);

EnergyBreakdown energy(const ModelSpec& model, const SimState& state);

/// Pointwise bounds implied by energy conservation.
struct BoundDiagnostics {
    double energy_bound_lhs = 0.0;  ///< (eps/2) sum [v^2 + A_0 u^2 + A_n (D^n u)^2]
    double max_top_derivative = 0.0;  ///< max |D^n u|
    double top_derivative_bound = 0.0;  ///< sqrt(2 E0 / (A_n eps))
    double max_laplacian = 0.0;  ///< max |Delta u| over free sites
    double laplacian_bound = 0.0;  ///< sqrt(2 E0 / eps)
};

BoundDiagnostics bound_diagnostics(const ModelSpec& model, const SimState& state, double initial_energy);

}  // namespace gradnet
