#include "gradnet/dynamics.hpp"

#include "gradnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gradnet {

SimState initial_state(const ModelSpec& model, const Lattice& lattice) {
    auto u0 = [&](double x) { return eval_initial(model, InitialField::displacement, x, 0); };
    auto v0 = [&](double x) { return eval_initial(model, InitialField::velocity, x, 0); };
    return SimState{0.0, sample(u0, lattice), sample(v0, lattice)};
}

void nonlinear_force_kernel(const PolynomialR& r, const Lattice& lattice, std::span<const double> u,
                            std::span<double> f, std::vector<double>& scratch) {
    const std::size_t count = u.size();
    const bool periodic = lattice.bc == Boundary::periodic;
    const double inv = 1.0 / lattice.spacing();
    if (r.is_zero()) {
        std::fill(f.begin(), f.end(), 0.0);
        return;
    }
    // scratch[i] = d1 R(u_i, (D+u)_i); the Dirichlet zero extension makes u_{N+1} = 0.
    scratch.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double next = (i + 1 < count) ? u[i + 1] : (periodic ? u[0] : 0.0);
        double d0 = 0.0;
        r.gradient(u[i], (next - u[i]) * inv, d0, scratch[i]);
        f[i] = -d0;
    }
    // Site -1 of a Dirichlet field holds 0, so its d1 R is evaluated at (0, u_0 / eps).
    double prev = 0.0;
    if (periodic) {
        prev = scratch[count - 1];
    } else {
        double d0 = 0.0;
        r.gradient(0.0, u[0] * inv, d0, prev);
    }
    for (std::size_t i = 0; i < count; ++i) {
        f[i] += (scratch[i] - prev) * inv;
        prev = scratch[i];
    }
    for (Index i = 0; i < lattice.first_free(); ++i) f[static_cast<std::size_t>(i)] = 0.0;
    for (Index i = lattice.last_free() + 1; i < Index(count); ++i) f[static_cast<std::size_t>(i)] = 0.0;
}

LatticeField nonlinear_force(const ModelSpec& model, const LatticeField& u) {
    const std::vector<double> sites = u.site_values();
    std::vector<double> f(sites.size(), 0.0);
    std::vector<double> scratch;
    nonlinear_force_kernel(model.nonlinearity, u.lattice(), sites, f, scratch);
    return LatticeField(u.lattice(), std::move(f));
}

LatticeField total_force(const ModelSpec& model, const StiffnessNetwork& net, const LatticeField& u) {
    LatticeField f = force_from_network(net, u);
    if (model.is_linear()) return f;
    return f + nonlinear_force(model, u);
}

double max_frequency(std::span<const double> coeffs, double eps) {
    const double s = 4.0 / (eps * eps);
    double w2 = 0.0;
    double power = 1.0;
    for (double a : coeffs) {
        w2 += std::abs(a) * power;
        power *= s;
    }
    return std::sqrt(w2);
}

double default_cfl(const ModelSpec& model) { return model.is_linear() ? 0.25 : 0.125; }

double stable_dt(const ModelSpec& model, double eps, std::optional<double> cfl) {
    const double c = cfl.value_or(default_cfl(model));
    if (!(c > 0.0) || c > 1.0) throw DomainError("cfl factor must lie in (0, 1]");
    const double w = max_frequency(model.coeffs, eps);
    if (w == 0.0) throw DomainError("all coefficients vanish: no dynamics");
    return c * 2.0 / w;
}

VerletIntegrator::VerletIntegrator(const ModelSpec& model, const StiffnessNetwork& net, const SimState& initial)
    : model_(&model), net_(&net), lattice_(initial.u.lattice()), t_(initial.t),
      u_(initial.u.site_values()), v_(initial.v.site_values()), f_(u_.size(), 0.0) {
    if (!(lattice_ == net.lattice()) || !(initial.v.lattice() == lattice_))
        throw ShapeError("VerletIntegrator: lattice mismatch");
    for (std::size_t i = 0; i < u_.size(); ++i)
        if (lattice_.is_frozen(Index(i))) u_[i] = v_[i] = 0.0;
    compute_force();
}

void VerletIntegrator::compute_force() {
    network_force_kernel(*net_, u_, f_);
    if (model_->is_linear()) return;
    nl_.resize(u_.size());
    nonlinear_force_kernel(model_->nonlinearity, lattice_, u_, nl_, scratch_);
    for (std::size_t i = 0; i < f_.size(); ++i) f_[i] += nl_[i];
}

bool VerletIntegrator::finite() const {
    for (std::size_t i = 0; i < u_.size(); ++i)
        if (!std::isfinite(u_[i]) || !std::isfinite(v_[i])) return false;
    return true;
}

void VerletIntegrator::step(double dt) {
    if (!(dt > 0.0)) throw DomainError("time step must be positive");
    const double half = 0.5 * dt;
    for (std::size_t i = 0; i < u_.size(); ++i) {
        v_[i] += half * f_[i];
        u_[i] += dt * v_[i];
    }
    compute_force();
    for (std::size_t i = 0; i < u_.size(); ++i) v_[i] += half * f_[i];
    t_ += dt;
    ++steps_;
}

void VerletIntegrator::advance_to(double t_target, double dt_max) {
    const double span = t_target - t_;
    if (span <= 0.0) return;
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(span / dt_max * (1.0 - 1e-12))));
    const double dt = span / static_cast<double>(n);
    const double start = t_;
    double last_good = t_;
    for (std::size_t k = 1; k <= n; ++k) {
        step(dt);
        if (k % 64 == 0 || k == n) {
            if (!finite()) throw DivergenceError("non-finite state: time step too large?", last_good);
            last_good = start + static_cast<double>(k) * dt;
        }
    }
    t_ = t_target;
}

SimState VerletIntegrator::state() const {
    return SimState{t_, LatticeField(lattice_, u_), LatticeField(lattice_, v_)};
}

SimState step_verlet(const ModelSpec& model, const StiffnessNetwork& net, const SimState& state, double dt) {
    VerletIntegrator integrator(model, net, state);
    integrator.step(dt);
    if (!std::isfinite(max_abs(integrator.state().u)))
        throw DivergenceError("non-finite state: time step too large?", state.t);
    return integrator.state();
}

ExactPropagator::ExactPropagator(const ModelSpec& model, const SimState& initial)
    : lattice_(initial.u.lattice()), t0_(initial.t), fft_(initial.u.lattice().sites) {
    if (!model.is_linear()) throw UnsupportedError("exact propagation requires R = 0");
    if (lattice_.bc != Boundary::periodic) throw UnsupportedError("exact propagation requires periodic bc");
    const std::size_t modes = fft_.spectrum_size();
    u_hat_.resize(modes);
    v_hat_.resize(modes);
    fft_.forward(initial.u.values(), u_hat_);
    fft_.forward(initial.v.values(), v_hat_);

    const double eps = lattice_.spacing();
    const double w_max = max_frequency(model.coeffs, eps);
    omega_.resize(modes);
    for (std::size_t m = 0; m < modes; ++m) {
        const double k = 2.0 * std::numbers::pi * static_cast<double>(m) / lattice_.length;
        const double sn = std::sin(0.5 * k * eps);
        const double s = 4.0 / (eps * eps) * sn * sn;
        double w2 = 0.0;
        double power = 1.0;
        for (double a : model.coeffs) {
            w2 += a * power;
            power *= s;
        }
        if (w2 < -1e-12 * w_max * w_max) throw ImaginaryFrequencyError(k, w2);
        const double w = std::sqrt(std::max(w2, 0.0));
        omega_[m] = w < 1e-12 * w_max ? 0.0 : w;
    }
}

SimState ExactPropagator::at(double t) {
    const double tau = t - t0_;
    std::vector<std::complex<double>> uh(u_hat_.size()), vh(v_hat_.size());
    for (std::size_t m = 0; m < uh.size(); ++m) {
        const double w = omega_[m];
        if (w == 0.0) {
            uh[m] = u_hat_[m] + tau * v_hat_[m];
            vh[m] = v_hat_[m];
            continue;
        }
        const double c = std::cos(w * tau);
        const double s = std::sin(w * tau);
        uh[m] = c * u_hat_[m] + (s / w) * v_hat_[m];
        vh[m] = -w * s * u_hat_[m] + c * v_hat_[m];
    }
    std::vector<double> u(lattice_.sites), v(lattice_.sites);
    fft_.inverse(uh, u);
    fft_.inverse(vh, v);
    return SimState{t, LatticeField(lattice_, std::move(u)), LatticeField(lattice_, std::move(v))};
}

SimState exact_linear_propagate(const ModelSpec& model, const SimState& state, double t) {
    ExactPropagator prop(model, state);
    return prop.at(t);
}

EnergyBreakdown energy(const ModelSpec& model, const SimState& state) {
    require_same_lattice(state.u, state.v, "energy");
    EnergyBreakdown e;
    e.kinetic = 0.5 * inner(state.v, state.v);
    LatticeField even = state.u;
    for (std::size_t alpha = 0; alpha < model.coeffs.size(); ++alpha) {
        const double a = model.coeffs[alpha];
        if (alpha > 0 && alpha % 2 == 0) even = laplacian(even);
        if (a == 0.0) continue;
        if (alpha % 2 == 0) {
            e.quadratic += 0.5 * a * inner(even, even);
        } else {
            const LatticeField d = dplus(even);
            e.quadratic += 0.5 * a * inner(d, d);
        }
    }
    if (!model.is_linear()) {
        const LatticeField grad = dplus(state.u);
        double sum = 0.0;
        for (Index i = grad.first(); i <= grad.last(); ++i) sum += model.nonlinearity.value(state.u[i], grad[i]);
        e.nonlinear = state.u.spacing() * sum;
    }
    e.total = e.kinetic + e.quadratic + e.nonlinear;
    return e;
}

BoundDiagnostics bound_diagnostics(const ModelSpec& model, const SimState& state, double initial_energy) {
    BoundDiagnostics b;
    const double eps = state.u.spacing();
    const int n = model.order;
    const double an = model.coeffs.back();
    const LatticeField top = dalpha(state.u, n);
    b.energy_bound_lhs =
        0.5 * (inner(state.v, state.v) + model.coeffs.front() * inner(state.u, state.u) + an * inner(top, top));
    b.max_top_derivative = max_abs(top);
    b.top_derivative_bound = an > 0.0 ? std::sqrt(2.0 * initial_energy / (an * eps)) : 0.0;
    const LatticeField lap = laplacian(state.u);
    const Lattice& lat = state.u.lattice();
    for (Index i = lat.first_free(); i <= lat.last_free(); ++i)
        b.max_laplacian = std::max(b.max_laplacian, std::abs(lap[i]));
    b.laplacian_bound = std::sqrt(2.0 * initial_energy / eps);
    return b;
}

}  // namespace gradnet
