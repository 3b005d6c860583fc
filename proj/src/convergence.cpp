#include "gradnet/convergence.hpp"

#include "gradnet/errors.hpp"
#include "gradnet/synthesis.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <exception>
#include <thread>

namespace gradnet {

DeviationWeights DeviationWeights::elastica() { return DeviationWeights{{0.0, 0.0, 1.0}}; }

DeviationWeights DeviationWeights::general(std::span<const double> coeffs) {
    DeviationWeights w;
    for (double a : coeffs) w.c.push_back(2.0 * a);
    return w;
}

DeviationWeights default_weights(const ModelSpec& model) {
    const auto& a = model.coeffs;
    if (a.size() == 3 && a[0] == 0.0 && a[1] == 0.0) return DeviationWeights::elastica();
    return DeviationWeights::general(a);
}

namespace {

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

template <typename Inner>
double weighted_deviation(const ReferenceSample& ref, const SimState& state, const DeviationWeights& weights,
                          Inner&& inner_fn) {
    if (!same_time(ref.t, state.t))
        throw DomainError("reference time " + std::to_string(ref.t) + " differs from state time " +
                          std::to_string(state.t));
    require_same_lattice(ref.u, state.u, "deviation_W");
    require_same_lattice(ref.v, state.v, "deviation_W");
    const LatticeField du = ref.u - state.u;
    const LatticeField dv = ref.v - state.v;
    double w = 0.5 * inner_fn(du, du) + 0.5 * inner_fn(dv, dv);
    LatticeField even = du;
    for (std::size_t alpha = 0; alpha < weights.c.size(); ++alpha) {
        if (alpha > 0 && alpha % 2 == 0) even = laplacian(even);
        const double c = weights.c[alpha];
        if (c == 0.0) continue;
        if (alpha % 2 == 0) {
            w += 0.5 * c * inner_fn(even, even);
        } else {
            const LatticeField d = dplus(even);
            w += 0.5 * c * inner_fn(d, d);
        }
    }
    return w;
}

}  // namespace

double deviation_W(const ReferenceSample& ref, const SimState& state, const DeviationWeights& weights) {
    return weighted_deviation(ref, state, weights, [](const LatticeField& a, const LatticeField& b) {
        return inner(a, b);
    });
}

double deviation_W(const ReferenceProvider& ref, const SimState& state, const DeviationWeights& weights) {
    return deviation_W(ref.sample(state.t, state.u.lattice()), state, weights);
}

double deviation_W_interval(const ReferenceSample& ref, const SimState& state, const DeviationWeights& weights) {
    return weighted_deviation(ref, state, weights, [](const LatticeField& a, const LatticeField& b) {
        return inner_interval(a, b);
    });
}

double boundary_flux(const ModelSpec& model, const ReferenceSample& ref, const SimState& state) {
    require_same_lattice(ref.v, state.u, "boundary_flux");
    const Lattice& lat = state.u.lattice();
    if (lat.bc == Boundary::periodic) return 0.0;
    // operator_force = -sum (-1)^alpha A_alpha Delta^alpha u on free sites only; rebuild it
    // everywhere on the support.
    LatticeField power = state.u;
    std::vector<double> op(lat.site_count(), 0.0);
    for (std::size_t alpha = 0; alpha < model.coeffs.size(); ++alpha) {
        if (alpha > 0) power = laplacian(power);
        const double sign = alpha % 2 == 0 ? 1.0 : -1.0;
        for (std::size_t i = 0; i < op.size(); ++i) op[i] += sign * model.coeffs[alpha] * power[Index(i)];
    }
    double sum = 0.0;
    for (Index i = 0; i < Index(op.size()); ++i)
        if (lat.is_frozen(i)) sum += ref.v[i] * op[static_cast<std::size_t>(i)];
    return lat.spacing() * sum;
}

std::string_view to_string(IntegratorChoice c) {
    switch (c) {
        case IntegratorChoice::exact: return "exact";
        case IntegratorChoice::verlet: return "verlet";
        default: return "auto";
    }
}

std::string_view to_string(ReferenceChoice c) {
    switch (c) {
        case ReferenceChoice::spectral: return "spectral";
        case ReferenceChoice::fine: return "fine";
        default: return "auto";
    }
}

IntegratorChoice parse_integrator(std::string_view text) {
    if (text == "auto") return IntegratorChoice::automatic;
    if (text == "exact") return IntegratorChoice::exact;
    if (text == "verlet") return IntegratorChoice::verlet;
    throw ConfigError("unknown integrator '" + std::string(text) + "' (expected auto, exact or verlet)");
}

ReferenceChoice parse_reference(std::string_view text) {
    if (text == "auto") return ReferenceChoice::automatic;
    if (text == "spectral") return ReferenceChoice::spectral;
    if (text == "fine") return ReferenceChoice::fine;
    throw ConfigError("unknown reference '" + std::string(text) + "' (expected auto, spectral or fine)");
}

OrderFit fit_order(std::span<const double> eps, std::span<const double> values) {
    if (eps.size() != values.size()) throw ShapeError("fit_order: eps and values differ in length");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(values[i] >= kRoundoffFloor) || !std::isfinite(values[i]) || !(eps[i] > 0.0)) continue;
        x.push_back(std::log(eps[i]));
        y.push_back(std::log(values[i]));
    }
    if (x.size() < 3)
        throw InsufficientDataError("order fit needs at least 3 usable rows, have " + std::to_string(x.size()));
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw InsufficientDataError("order fit needs distinct mesh sizes");
    OrderFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.points = x.size();
    for (std::size_t i = 0; i < x.size(); ++i)
        fit.residual = std::max(fit.residual, std::abs(y[i] - (fit.intercept + fit.slope * x[i])));
    return fit;
}

OrderFit estimate_order(const ConvergenceReport& report) {
    std::vector<double> eps, w;
    for (const SweepRow& row : report.rows) {
        if (row.failed || row.W.empty()) continue;
        eps.push_back(row.eps);
        w.push_back(row.terminal_W());
    }
    return fit_order(eps, w);
}

std::vector<std::size_t> sites_from_eps(double length, std::span<const double> eps) {
    std::vector<std::size_t> out;
    for (double e : eps) {
        if (!(e > 0.0)) throw ConfigError("mesh sizes must be positive");
        const double n = length / e;
        const double r = std::round(n);
        if (r < 1.0 || std::abs(n - r) > 1e-9 * r)
            throw ConfigError("L / eps = " + std::to_string(n) + " is not an integer");
        out.push_back(static_cast<std::size_t>(r));
    }
    return out;
}

namespace {

bool spectral_available(const ModelSpec& model) {
    return model.is_linear() && model.bc == Boundary::periodic && model.initial.kind == InitialKind::trig;
}

void check_sites(std::span<const std::size_t> sites) {
    for (std::size_t i = 1; i < sites.size(); ++i)
        if (sites[i] <= sites[i - 1]) throw ConfigError("mesh list must be strictly refining (N increasing)");
}

SweepRow run_row(const ModelSpec& model, std::size_t sites, const SweepOptions& options,
                 const ReferenceProvider& reference, const DeviationWeights& weights, bool exact) {
    const auto start = std::chrono::steady_clock::now();
    SweepRow row;
    const Lattice lattice = make_lattice(model.length, sites, model.bc, model.order);
    row.eps = lattice.spacing();
    row.sites = sites;
    row.integrator = exact ? "exact" : "verlet";
    const StiffnessNetwork net = assemble_stiffness(model.coeffs, lattice);
    const SimState init = initial_state(model, lattice);
    row.initial_energy = energy(model, init).total;
    const double e0 = row.initial_energy;

    auto record = [&](const SimState& s) {
        const ReferenceSample ref = reference.sample(s.t, lattice);
        row.times.push_back(s.t);
        row.W.push_back(deviation_W(ref, s, weights));
        row.W_interval.push_back(deviation_W_interval(ref, s, weights));
        row.boundary_flux.push_back(boundary_flux(model, ref, s));
        const double e = energy(model, s).total;
        const double drift = e0 != 0.0 ? std::abs(e - e0) / std::abs(e0) : std::abs(e - e0);
        row.energy.push_back(e);
        row.drift.push_back(drift);
        row.max_drift = std::max(row.max_drift, drift);
        const BoundDiagnostics b = bound_diagnostics(model, s, e0);
        row.max_laplacian = std::max(row.max_laplacian, b.max_laplacian);
        row.laplacian_bound = b.laplacian_bound;
        row.max_top_derivative = std::max(row.max_top_derivative, b.max_top_derivative);
        row.top_derivative_bound = b.top_derivative_bound;
        if (e0 > 0.0) row.max_energy_bound_ratio = std::max(row.max_energy_bound_ratio, b.energy_bound_lhs / e0);
    };

    try {
        if (exact) {
            ExactPropagator prop(model, init);
            for (double t : options.times) record(prop.at(t));
        } else {
            row.dt = stable_dt(model, row.eps, options.cfl);
            VerletIntegrator integrator(model, net, init);
            for (double t : options.times) {
                integrator.advance_to(t, row.dt);
                record(integrator.state());
            }
            row.steps = integrator.steps();
        }
    } catch (const DivergenceError& e) {
        row.failed = true;
        row.message = std::string(e.what()) + " (last finite t = " + std::to_string(e.last_finite_time()) + ")";
    }
    row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
}

}  // namespace

std::unique_ptr<ReferenceProvider> make_reference(const ModelSpec& model, std::span<const std::size_t> sites,
                                                  const SweepOptions& options) {
    ReferenceChoice choice = options.reference;
    if (choice == ReferenceChoice::automatic)
        choice = spectral_available(model) ? ReferenceChoice::spectral : ReferenceChoice::fine;
    if (choice == ReferenceChoice::spectral) {
        if (!spectral_available(model))
            throw ConfigError("spectral reference needs a linear periodic model with trig initial data");
        return std::make_unique<SpectralReference>(model);
    }
    if (sites.empty()) throw ConfigError("fine-grid reference needs at least one mesh");
    const std::size_t finest = *std::max_element(sites.begin(), sites.end());
    return fine_grid_oracle(model, finest, options.ratio, options.times, FineGridOptions{options.reference_dt});
}

ConvergenceReport sweep(const ModelSpec& model, std::span<const std::size_t> sites, const SweepOptions& options,
                        const ReferenceProvider* reference, std::string scenario) {
    ConvergenceReport report;
    report.scenario = std::move(scenario);
    report.extrapolated = model.bc == Boundary::dirichlet && model.order != 2;
    check_sites(sites);
    if (sites.empty()) {
        report.fit_message = "empty mesh list";
        return report;
    }
    for (double t : options.times)
        if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("sample times must be finite and nonnegative");

    bool exact = false;
    switch (options.integrator) {
        case IntegratorChoice::automatic: exact = model.is_linear() && model.bc == Boundary::periodic; break;
        case IntegratorChoice::exact:
            if (!model.is_linear() || model.bc != Boundary::periodic)
                throw ConfigError("exact integrator is only valid for linear periodic models");
            exact = true;
            break;
        case IntegratorChoice::verlet: exact = false; break;
    }

    std::unique_ptr<ReferenceProvider> owned;
    if (!reference) {
        owned = make_reference(model, sites, options);
        reference = owned.get();
    }
    report.reference = reference->name();
    const DeviationWeights weights = options.weights.value_or(default_weights(model));

    report.rows.resize(sites.size());
    std::vector<std::exception_ptr> errors(sites.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < sites.size(); i = next++) {
            try {
                report.rows[i] = run_row(model, sites[i], options, *reference, weights, exact);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, unsigned(sites.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    try {
        report.fit = estimate_order(report);
    } catch (const InsufficientDataError& e) {
        report.fit_message = e.what();
    }
    return report;
}

double reference_self_check(const ModelSpec& model, std::size_t sites, const ReferenceProvider& reference,
                            double ratio, double t, const SweepOptions& options) {
    const auto b = fine_grid_oracle(model, sites, ratio, {t}, FineGridOptions{options.reference_dt});
    const Lattice lattice = make_lattice(model.length, sites, model.bc, model.order);
    const ReferenceSample sa = reference.sample(t, lattice);
    const ReferenceSample sb = b->sample(t, lattice);
    return deviation_W(sa, SimState{t, sb.u, sb.v}, options.weights.value_or(default_weights(model)));
}

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

}  // namespace

std::vector<CheckOutcome> evaluate(const ConvergenceReport& report, const Thresholds& thresholds) {
    std::vector<CheckOutcome> out;
    std::vector<const SweepRow*> rows;
    bool any_failed = false;
    for (const SweepRow& r : report.rows) {
        if (r.failed)
            any_failed = true;
        else
            rows.push_back(&r);
    }
    out.push_back({"all trajectories finite", !any_failed, any_failed ? "at least one row diverged" : ""});

    if (thresholds.strictly_decreasing) {
        bool ok = rows.size() >= 2;
        std::string detail;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            detail += (i ? ", " : "") + fmt(rows[i]->terminal_W());
            if (i > 0 && !(rows[i]->terminal_W() < rows[i - 1]->terminal_W())) ok = false;
        }
        out.push_back({"W(T) strictly decreasing", ok, "W(T) = [" + detail + "]"});
    }
    if (thresholds.min_order) {
        const bool ok = report.fit && report.fit->slope >= *thresholds.min_order;
        out.push_back({"fitted order >= " + fmt(*thresholds.min_order), ok,
                       report.fit ? "order " + fmt(report.fit->slope) + ", residual " + fmt(report.fit->residual)
                                  : report.fit_message});
    }
    if (thresholds.max_terminal_ratio) {
        bool ok = rows.size() >= 2;
        double ratio = 0.0;
        if (ok) {
            ratio = rows.back()->terminal_W() / rows.front()->terminal_W();
            ok = ratio <= *thresholds.max_terminal_ratio;
        }
        out.push_back({"W(finest) / W(coarsest) <= " + fmt(*thresholds.max_terminal_ratio), ok, "ratio " + fmt(ratio)});
    }
    if (thresholds.max_drift) {
        double worst = 0.0;
        for (const SweepRow* r : rows) worst = std::max(worst, r->max_drift);
        out.push_back({"energy drift <= " + fmt(*thresholds.max_drift), !rows.empty() && worst <= *thresholds.max_drift,
                       "max relative drift " + fmt(worst)});
    }
    if (thresholds.laplacian_bound) {
        bool ok = !rows.empty();
        double worst = 0.0;
        for (const SweepRow* r : rows) {
            worst = std::max(worst, r->max_laplacian / r->laplacian_bound);
            if (!(r->max_laplacian <= r->laplacian_bound)) ok = false;
        }
        out.push_back({"max |Delta u| <= sqrt(2 E0 / eps)", ok, "max ratio " + fmt(worst)});
    }
    return out;
}

}  // namespace gradnet
