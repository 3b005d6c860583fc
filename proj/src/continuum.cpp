#include "gradnet/continuum.hpp"

#include "gradnet/dynamics.hpp"
#include "gradnet/errors.hpp"
#include "gradnet/fft.hpp"
#include "gradnet/synthesis.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace gradnet {

ImaginaryFrequencyError::ImaginaryFrequencyError(double k, double omega_squared)
    : Error("imaginary frequency: omega^2 = " + std::to_string(omega_squared) + " < 0 at k = " + std::to_string(k)),
      k_(k), omega_squared_(omega_squared) {}

namespace {

double omega_from_symbol(std::span<const double> coeffs, double s, double k) {
    double w2 = 0.0;
    double power = 1.0;
    for (double a : coeffs) {
        w2 += a * power;
        power *= s;
    }
    if (w2 < 0.0) throw ImaginaryFrequencyError(k, w2);
    return std::sqrt(w2);
}

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

// Rotates (u_hat, v_hat) in phase space by omega * tau; omega = 0 drifts.
void rotate(std::complex<double>& u, std::complex<double>& v, double omega, double tau) {
    if (omega == 0.0) {
        u += tau * v;
        return;
    }
    const double c = std::cos(omega * tau);
    const double s = std::sin(omega * tau);
    const std::complex<double> u0 = u;
    u = c * u0 + (s / omega) * v;
    v = -omega * s * u0 + c * v;
}

}  // namespace

double dispersion_omega(std::span<const double> coeffs, double k) { return omega_from_symbol(coeffs, k * k, k); }

double discrete_dispersion_omega(std::span<const double> coeffs, double k, double eps) {
    if (!(eps > 0.0)) throw DomainError("mesh size must be positive");
    const double sn = std::sin(0.5 * k * eps);
    return omega_from_symbol(coeffs, 4.0 / (eps * eps) * sn * sn, k);
}

SpectralSolution spectral_solve(const ModelSpec& model, double t) {
    if (!model.is_linear()) throw UnsupportedError("spectral solution requires R = 0");
    if (model.bc != Boundary::periodic) throw UnsupportedError("spectral solution requires periodic bc");
    if (model.initial.kind != InitialKind::trig) throw UnsupportedError("spectral solution requires trig initial data");

    // a cos(kx) + b sin(kx) = Re((a - i b) exp(i k x))
    std::map<int, std::pair<std::complex<double>, std::complex<double>>> modes;
    for (const TrigTerm& term : model.initial.displacement)
        modes[term.mode].first += std::complex<double>(term.cos_coeff, -term.sin_coeff);
    for (const TrigTerm& term : model.initial.velocity)
        modes[term.mode].second += std::complex<double>(term.cos_coeff, -term.sin_coeff);

    SpectralSolution sol;
    sol.length = model.length;
    sol.t = t;
    sol.max_derivative = 2 * model.order + 1;
    for (auto& [m, amp] : modes) {
        const double k = 2.0 * std::numbers::pi * static_cast<double>(m) / model.length;
        auto [u, v] = amp;
        rotate(u, v, dispersion_omega(model.coeffs, k), t);
        sol.wavenumbers.push_back(k);
        sol.u_hat.push_back(u);
        sol.v_hat.push_back(v);
    }
    return sol;
}

double eval_reference(const SpectralSolution& sol, InitialField field, double x, double t, int d) {
    if (d < 0 || d > sol.max_derivative)
        throw DomainError("derivative order " + std::to_string(d) + " outside 0.." + std::to_string(sol.max_derivative));
    if (!same_time(t, sol.t)) throw DomainError("spectral solution evaluated at a different time");
    const auto& amp = field == InitialField::displacement ? sol.u_hat : sol.v_hat;
    static const std::complex<double> i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    double sum = 0.0;
    for (std::size_t m = 0; m < amp.size(); ++m) {
        const double k = sol.wavenumbers[m];
        const std::complex<double> factor = i_pow[d % 4] * std::pow(k, d);
        sum += std::real(amp[m] * factor * std::polar(1.0, k * x));
    }
    return sum;
}

double continuum_energy(const SpectralSolution& sol, std::span<const double> coeffs) {
    // Each nonzero mode contributes (L/2)|c|^2 to int Re(c e^{ikx})^2; the zero mode L c^2.
    double e = 0.0;
    for (std::size_t m = 0; m < sol.u_hat.size(); ++m) {
        const double k = sol.wavenumbers[m];
        const double w = k == 0.0 ? sol.length : 0.5 * sol.length;
        double sym = 0.0;
        double power = 1.0;
        for (double a : coeffs) {
            sym += a * power;
            power *= k * k;
        }
        e += 0.5 * w * (std::norm(sol.v_hat[m]) + sym * std::norm(sol.u_hat[m]));
    }
    return e;
}

SpectralReference::SpectralReference(ModelSpec model) : model_(std::move(model)) {
    spectral_solve(model_, 0.0);
}

ReferenceSample SpectralReference::sample(double t, const Lattice& lattice) const {
    const SpectralSolution sol = spectral_solve(model_, t);
    std::vector<double> u(lattice.site_count()), v(lattice.site_count());
    const double eps = lattice.spacing();
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double x = eps * static_cast<double>(i);
        u[i] = eval_reference(sol, InitialField::displacement, x, t, 0);
        v[i] = eval_reference(sol, InitialField::velocity, x, t, 0);
    }
    return ReferenceSample{t, LatticeField(lattice, std::move(u)), LatticeField(lattice, std::move(v))};
}

namespace {

// Exact flow of the linear periodic network in Fourier space.
class PeriodicFlow {
public:
    PeriodicFlow(const ModelSpec& model, const Lattice& lat) : fft_(lat.sites) {
        const std::size_t modes = fft_.spectrum_size();
        const double eps = lat.spacing();
        const double w_max = max_frequency(model.coeffs, eps);
        omega_.resize(modes);
        for (std::size_t m = 0; m < modes; ++m) {
            const double k = 2.0 * std::numbers::pi * static_cast<double>(m) / lat.length;
            const double w = discrete_dispersion_omega(model.coeffs, k, eps);
            omega_[m] = w < 1e-12 * w_max ? 0.0 : w;
        }
        uh_.resize(modes);
        vh_.resize(modes);
    }

    void flow(std::vector<double>& u, std::vector<double>& v, double tau) {
        fft_.forward(u, uh_);
        fft_.forward(v, vh_);
        for (std::size_t m = 0; m < uh_.size(); ++m) rotate(uh_[m], vh_[m], omega_[m], tau);
        fft_.inverse(uh_, u);
        fft_.inverse(vh_, v);
    }

    // n Strang steps of length h carried out in Fourier space. The force spectrum at the
    // current position is cached, so a step costs one inverse and one forward transform.
    void split(const PolynomialR& r, const Lattice& lat, std::vector<double>& u, std::vector<double>& v, double h,
               std::size_t n) {
        fft_.forward(u, uh_);
        fft_.forward(v, vh_);
        force_spectrum(r, lat, u);
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t m = 0; m < uh_.size(); ++m) {
                vh_[m] += 0.5 * h * fh_[m];
                rotate(uh_[m], vh_[m], omega_[m], h);
            }
            fft_.inverse(uh_, u);
            force_spectrum(r, lat, u);
            for (std::size_t m = 0; m < uh_.size(); ++m) vh_[m] += 0.5 * h * fh_[m];
        }
        fft_.inverse(vh_, v);
    }

private:
    void force_spectrum(const PolynomialR& r, const Lattice& lat, std::span<const double> u) {
        kick_.resize(u.size());
        fh_.resize(uh_.size());
        nonlinear_force_kernel(r, lat, u, kick_, scratch_);
        fft_.forward(kick_, fh_);
    }

    RealFft fft_;
    std::vector<double> omega_;
    std::vector<std::complex<double>> uh_, vh_, fh_;
    std::vector<double> kick_, scratch_;
};

// Implicit midpoint flow of the linear network on the free sites of a Dirichlet lattice.
class DirichletFlow {
public:
    DirichletFlow(const ModelSpec& model, const Lattice& lat) : first_(lat.first_free()) {
        const StiffnessNetwork net = assemble_stiffness(model.coeffs, lat);
        const Index count = lat.last_free() - lat.first_free() + 1;
        std::vector<Eigen::Triplet<double>> entries;
        for (Index i = lat.first_free(); i <= lat.last_free(); ++i) {
            double diag = net.grounding();
            for (int d = -net.reach(); d <= net.reach(); ++d) {
                const Index j = net.partner(i, d);
                if (d == 0 || j < 0) continue;
                const double k = net.offset_coupling(i, d);
                diag += k;
                if (!lat.is_frozen(j)) entries.emplace_back(i - first_, j - first_, -k);
            }
            entries.emplace_back(i - first_, i - first_, diag);
        }
        k_.resize(count, count);
        k_.setFromTriplets(entries.begin(), entries.end());
        u_.resize(count);
        v_.resize(count);
    }

    void flow(std::vector<double>& u, std::vector<double>& v, double tau) {
        if (tau != tau_) factor(tau);
        for (Eigen::Index i = 0; i < u_.size(); ++i) {
            u_[i] = u[static_cast<std::size_t>(i + first_)];
            v_[i] = v[static_cast<std::size_t>(i + first_)];
        }
        const Eigen::VectorXd rhs = v_ - tau * (k_ * (u_ + 0.25 * tau * v_));
        const Eigen::VectorXd v1 = solver_.solve(rhs);
        for (Eigen::Index i = 0; i < u_.size(); ++i) {
            u[static_cast<std::size_t>(i + first_)] = u_[i] + 0.5 * tau * (v_[i] + v1[i]);
            v[static_cast<std::size_t>(i + first_)] = v1[i];
        }
    }

private:
    void factor(double tau) {
        Eigen::SparseMatrix<double> a = (0.25 * tau * tau) * k_;
        for (Eigen::Index i = 0; i < a.rows(); ++i) a.coeffRef(i, i) += 1.0;
        solver_.compute(a);
        if (solver_.info() != Eigen::Success) throw DomainError("implicit midpoint factorization failed");
        tau_ = tau;
    }

    Index first_;
    Eigen::SparseMatrix<double> k_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
    double tau_ = 0.0;
    Eigen::VectorXd u_, v_;
};

std::size_t checked_ratio(double ratio) {
    if (!std::isfinite(ratio) || ratio != std::floor(ratio) || ratio < 8.0)
        throw ConfigError("refinement ratio must be an integer >= 8");
    return static_cast<std::size_t>(ratio);
}

}  // namespace

FineGridReference::FineGridReference(const ModelSpec& model, std::size_t coarse_sites, double ratio,
                                     std::vector<double> times, FineGridOptions options)
    : ratio_(checked_ratio(ratio)) {
    if (!(options.dt > 0.0)) throw ConfigError("reference time step must be positive");
    fine_ = make_lattice(model.length, coarse_sites * ratio_, model.bc, model.order);
    times_.push_back(0.0);
    std::sort(times.begin(), times.end());
    for (double t : times) {
        if (t < 0.0) throw ConfigError("sample times must be nonnegative");
        if (!same_time(t, times_.back())) times_.push_back(t);
    }

    const SimState init = initial_state(model, fine_);
    std::vector<double> u = init.u.site_values();
    std::vector<double> v = init.v.site_values();
    std::vector<double> kick(u.size()), scratch;

    std::unique_ptr<PeriodicFlow> pflow;
    std::unique_ptr<DirichletFlow> dflow;
    if (fine_.bc == Boundary::periodic)
        pflow = std::make_unique<PeriodicFlow>(model, fine_);
    else
        dflow = std::make_unique<DirichletFlow>(model, fine_);
    auto flow = [&](double tau) {
        if (pflow)
            pflow->flow(u, v, tau);
        else
            dflow->flow(u, v, tau);
    };
    auto half_kick = [&](double tau) {
        nonlinear_force_kernel(model.nonlinearity, fine_, u, kick, scratch);
        for (std::size_t i = 0; i < u.size(); ++i) v[i] += 0.5 * tau * kick[i];
    };

    u_.push_back(u);
    v_.push_back(v);
    const bool exact = pflow && model.is_linear();
    for (std::size_t s = 1; s < times_.size(); ++s) {
        const double span = times_[s] - times_[s - 1];
        if (exact) {
            flow(span);
            ++steps_;
        } else {
            const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(span / options.dt * (1.0 - 1e-12))));
            const double h = span / static_cast<double>(n);
            if (pflow) {
                pflow->split(model.nonlinearity, fine_, u, v, h, n);
            } else {
                for (std::size_t k = 0; k < n; ++k) {
                    if (!model.is_linear()) half_kick(h);
                    flow(h);
                    if (!model.is_linear()) half_kick(h);
                }
            }
            steps_ += n;
        }
        for (double x : u)
            if (!std::isfinite(x)) throw DivergenceError("fine-grid reference diverged", times_[s - 1]);
        u_.push_back(u);
        v_.push_back(v);
    }
}

std::string FineGridReference::name() const { return "fine-grid x" + std::to_string(ratio_); }

ReferenceSample FineGridReference::sample(double t, const Lattice& lattice) const {
    if (lattice.bc != fine_.bc || lattice.length != fine_.length || lattice.sites == 0 ||
        fine_.sites % lattice.sites != 0)
        throw ShapeError("lattice is not a sub-lattice of the fine reference");
    const auto it = std::find_if(times_.begin(), times_.end(), [&](double s) { return same_time(t, s); });
    if (it == times_.end()) throw DomainError("reference has no snapshot at t = " + std::to_string(t));
    const std::size_t snap = static_cast<std::size_t>(it - times_.begin());
    const std::size_t stride = fine_.sites / lattice.sites;
    std::vector<double> u(lattice.site_count()), v(lattice.site_count());
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = u_[snap][i * stride];
        v[i] = v_[snap][i * stride];
    }
    return ReferenceSample{t, LatticeField(lattice, std::move(u)), LatticeField(lattice, std::move(v))};
}

std::unique_ptr<FineGridReference> fine_grid_oracle(const ModelSpec& model, std::size_t coarse_sites, double ratio,
                                                    std::vector<double> times, FineGridOptions options) {
    return std::make_unique<FineGridReference>(model, coarse_sites, ratio, std::move(times), options);
}

}  // namespace gradnet
