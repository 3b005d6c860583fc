#pragma once

#include "gradnet/lattice.hpp"
#include "gradnet/model.hpp"

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace gradnet {

/// omega(k) = sqrt(sum A_alpha k^(2 alpha)). Throws ImaginaryFrequencyError when the
/// radicand is negative.
double dispersion_omega(std::span<const double> coeffs, double k);

/// Lattice analogue with k^2 replaced by s = (4/eps^2) sin^2(k eps / 2).
double discrete_dispersion_omega(std::span<const double> coeffs, double k, double eps);

/// Exact solution of the linear periodic continuum at time t, as one-sided complex mode
/// amplitudes: u(x) = sum_m Re(u_hat_m exp(i k_m x)).
struct SpectralSolution {
    double length = 0.0;
    double t = 0.0;
    int max_derivative = 0;
    std::vector<double> wavenumbers;
    std::vector<std::complex<double>> u_hat;
    std::vector<std::complex<double>> v_hat;
};

/// Throws UnsupportedError for nonlinear, Dirichlet or non-trig models.
SpectralSolution spectral_solve(const ModelSpec& model, double t);

/// d-th spatial derivative of u (or u_t) at x. Throws DomainError if d > 2n+1 or t differs
/// from the solution time.
double eval_reference(const SpectralSolution& sol, InitialField field, double x, double t, int d);

/// Continuum energy (1/2) int [u_t^2 + sum A_alpha |d^alpha u|^2] over one period.
double continuum_energy(const SpectralSolution& sol, std::span<const double> coeffs);

struct ReferenceSample {
    double t = 0.0;
    LatticeField u;
    LatticeField v;
};

/// Source of the comparison field u in the deviation functional.
class ReferenceProvider {
public:
    virtual ~ReferenceProvider() = default;
    /// Reference u, u_t sampled at the sites of `lattice` at time t.
    virtual ReferenceSample sample(double t, const Lattice& lattice) const = 0;
    virtual std::string name() const = 0;
};

class SpectralReference final : public ReferenceProvider {
public:
    explicit SpectralReference(ModelSpec model);
    ReferenceSample sample(double t, const Lattice& lattice) const override;
    std::string name() const override { return "spectral"; }

private:
    ModelSpec model_;
};

struct FineGridOptions {
    /// Fine-lattice step of the splitting integrator.
    double dt = 1e-4;
};

/// Discrete solution on a lattice `ratio` times finer than a given coarse lattice, stored
/// at a fixed set of times.
///
/// Stepping is Strang splitting: half kick with the nonlinear force, exact or implicit
/// midpoint flow of the linear network, half kick. The periodic linear flow is exact
/// (Fourier rotation); the Dirichlet one is the implicit midpoint rule.
class FineGridReference final : public ReferenceProvider {
public:
    /// Throws ConfigError unless `ratio` is an integer >= 8.
    FineGridReference(const ModelSpec& model, std::size_t coarse_sites, double ratio, std::vector<double> times,
                      FineGridOptions options = {});

    ReferenceSample sample(double t, const Lattice& lattice) const override;
    std::string name() const override;

    const Lattice& fine_lattice() const noexcept { return fine_; }
    std::size_t steps() const noexcept { return steps_; }

private:
    Lattice fine_;
    std::size_t ratio_;
    std::vector<double> times_;
    std::vector<std::vector<double>> u_, v_;
    std::size_t steps_ = 0;
};

/// Fine-grid reference at eps_ref = L / (coarse_sites * ratio).
std::unique_ptr<FineGridReference> fine_grid_oracle(const ModelSpec& model, std::size_t coarse_sites, double ratio,
                                                    std::vector<double> times, FineGridOptions options = {});

}  // namespace gradnet
