#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gradnet/dynamics.hpp"
#include "gradnet/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace gradnet;

namespace {

constexpr double kPi = std::numbers::pi;

ModelSpec make_model(std::vector<double> a, std::vector<TrigTerm> u0, std::vector<TrigTerm> v0 = {}) {
    ModelSpec m;
    m.length = 2.0 * kPi;
    m.order = static_cast<int>(a.size()) - 1;
    m.coeffs = std::move(a);
    m.initial.displacement = std::move(u0);
    m.initial.velocity = std::move(v0);
    return m;
}

ModelSpec nonlinear_model() {
    ModelSpec m = make_model({1.0, 0.0, 1.0}, {{1, 0.0, 0.5}});
    m.nonlinearity = PolynomialR({{4, 0, 0.1}, {0, 4, 0.1}});
    return m;
}

ModelSpec clamped_elastica() {
    ModelSpec m = make_model({0.0, 0.0, 1.0}, {{0, 1.0, 0.0}});
    m.bc = Boundary::dirichlet;
    m.initial.kind = InitialKind::clamped;
    m.initial.envelope_exponent = 2;
    return m;
}

double max_diff(const LatticeField& a, const LatticeField& b) { return max_abs(a - b); }

SimState run_verlet(const ModelSpec& m, const StiffnessNetwork& net, const SimState& s, double t, double dt) {
    VerletIntegrator it(m, net, s);
    it.advance_to(t, dt);
    return it.state();
}

}  // namespace

TEST_CASE("total_force without R equals the network force") {
    const ModelSpec m = make_model({0.0, 0.0, 1.0}, {{1, 0.0, 1.0}, {3, 0.2, 0.0}});
    const Lattice lat = make_lattice(m.length, 32, m.bc, m.order);
    const auto net = assemble_stiffness(m.coeffs, lat);
    const SimState s = initial_state(m, lat);
    CHECK(total_force(m, net, s.u).site_values() == force_from_network(net, s.u).site_values());
}

TEST_CASE("nonlinear force is minus the gradient of the nonlinear energy") {
    for (Boundary bc : {Boundary::periodic, Boundary::dirichlet}) {
        ModelSpec m = nonlinear_model();
        m.nonlinearity = PolynomialR({{4, 0, 0.1}, {0, 4, 0.1}, {2, 2, 0.3}});
        m.bc = bc;
        const Lattice lat = make_lattice(m.length, 24, bc, m.order);
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> pick(-1.0, 1.0);
        std::vector<double> v(lat.site_count());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = lat.is_frozen(Index(i)) ? 0.0 : pick(rng);
        const LatticeField u(lat, v);
        const LatticeField f = nonlinear_force(m, u);
        const LatticeField zero = LatticeField::zeros(lat);
        const double h = 1e-6;
        for (Index i = lat.first_free(); i <= lat.last_free(); ++i) {
            auto w = v;
            w[std::size_t(i)] += h;
            const double up = energy(m, SimState{0.0, LatticeField(lat, w), zero}).nonlinear;
            w[std::size_t(i)] -= 2 * h;
            const double down = energy(m, SimState{0.0, LatticeField(lat, w), zero}).nonlinear;
            CHECK(-(up - down) / (2 * h) / lat.spacing() == doctest::Approx(f[i]).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("stable_dt examples") {
    const ModelSpec elastica = make_model({0.0, 0.0, 1.0}, {{1, 0.0, 1.0}});
    CHECK(max_frequency(elastica.coeffs, 0.1) == doctest::Approx(400.0));
    CHECK(stable_dt(elastica, 0.1, 0.5) == doctest::Approx(0.5 * 0.005));
    CHECK(stable_dt(elastica, 0.1) == doctest::Approx(0.25 * 0.005));
    const ModelSpec chain = make_model({0.0, 1.0}, {{1, 0.0, 1.0}});
    CHECK(max_frequency(chain.coeffs, 0.05) == doctest::Approx(2.0 / 0.05));
    const ModelSpec dead = make_model({0.0, 0.0}, {{1, 0.0, 1.0}});
    CHECK_THROWS_AS(stable_dt(dead, 0.1), DomainError);
    CHECK_THROWS_AS(stable_dt(elastica, 0.1, 1.5), DomainError);
    CHECK(stable_dt(nonlinear_model(), 0.1) == doctest::Approx(0.125 * 2.0 / max_frequency(nonlinear_model().coeffs, 0.1)));
}

TEST_CASE("Verlet with zero force drifts uniformly") {
    const ModelSpec m = make_model({0.0, 1.0}, {{0, 0.3, 0.0}}, {{0, 0.7, 0.0}});
    const Lattice lat = make_lattice(m.length, 16, m.bc, m.order);
    const auto net = assemble_stiffness(m.coeffs, lat);
    const SimState s = initial_state(m, lat);
    const SimState next = step_verlet(m, net, s, 0.01);
    for (Index i = 0; i < 16; ++i) {
        CHECK(next.u[i] == doctest::Approx(0.3 + 0.01 * 0.7).epsilon(1e-15));
        CHECK(next.v[i] == doctest::Approx(0.7).epsilon(1e-15));
    }
    CHECK(next.t == doctest::Approx(0.01));
}

TEST_CASE("Verlet grounded mass completes a period with second-order phase error") {
    // Uniform displacement of A = (1, 1): every mass is an independent unit oscillator.
    const ModelSpec m = make_model({1.0, 1.0}, {{0, 1.0, 0.0}});
    const Lattice lat = make_lattice(m.length, 8, m.bc, m.order);
    const auto net = assemble_stiffness(m.coeffs, lat);
    const SimState s = initial_state(m, lat);
    double prev = 0.0;
    for (double dt : {0.02, 0.01, 0.005}) {
        const SimState end = run_verlet(m, net, s, 2.0 * kPi, dt);
        const double err = std::abs(end.u[0] - 1.0) + std::abs(end.v[0]);
        CHECK(err < 2.0 * dt * dt);
        if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.05));
        prev = err;
    }
}

TEST_CASE("Verlet is time reversible") {
    const ModelSpec m = nonlinear_model();
    const Lattice lat = make_lattice(m.length, 32, m.bc, m.order);
    const auto net = assemble_stiffness(m.coeffs, lat);
    const SimState s = initial_state(m, lat);
    const double dt = stable_dt(m, lat.spacing());
    SimState a = step_verlet(m, net, s, dt);
    a.v = -1.0 * a.v;
    SimState b = step_verlet(m, net, a, dt);
    b.v = -1.0 * b.v;
    CHECK(max_diff(b.u, s.u) <= 1e-12);
    CHECK(max_diff(b.v, s.v) <= 1e-12);
}

TEST_CASE("Verlet reports divergence") {
    const ModelSpec m = make_model({0.0, 0.0, 1.0}, {{1, 0.0, 1.0}, {31, 0.0, 1e-3}});
    const Lattice lat = make_lattice(m.length, 64, m.bc, m.order);
    const auto net = assemble_stiffness(m.coeffs, lat);
    VerletIntegrator it(m, net, initial_state(m, lat));
    try {
        it.advance_to(10.0, 0.05);
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.last_finite_time() >= 0.0);
        CHECK(e.last_finite_time() < 10.0);
    }
}

TEST_CASE("exact propagator examples") {
    const std::size_t n = 32;
    const int mode = 3;
    const ModelSpec m = make_model({0.0, 0.0, 1.0}, {{mode, 0.2, 0.5}});
    const Lattice lat = make_lattice(m.length, n, m.bc, m.order);
    const double eps = lat.spacing();
    const double s = 4.0 / (eps * eps) * std::pow(std::sin(mode * eps / 2.0), 2);
    const double period = 2.0 * kPi / s;
    const SimState init = initial_state(m, lat);
    const SimState back = exact_linear_propagate(m, init, period);
    CHECK(max_diff(back.u, init.u) <= 1e-12);
    CHECK(max_diff(back.v, init.v) <= 1e-11);

    const SimState half = exact_linear_propagate(m, init, period / 2.0);
    CHECK(max_diff(half.u, -1.0 * init.u) <= 1e-12);

    const ModelSpec drift = make_model({0.0, 0.0, 1.0}, {{1, 0.0, 0.1}}, {{0, 0.5, 0.0}});
    const SimState d0 = initial_state(drift, lat);
    const SimState d1 = exact_linear_propagate(drift, d0, 2.0);
    double mean = 0.0;
    for (Index i = 0; i < Index(n); ++i) mean += d1.u[i] / double(n);
    CHECK(mean == doctest::Approx(1.0).epsilon(1e-12));

    const ModelSpec rich = make_model({0.5, 1.0, 0.0, 1.0}, {{1, 0.3, 1.0}, {4, 0.2, -0.4}}, {{2, 0.7, 0.1}});
    const Lattice lat3 = make_lattice(rich.length, 64, rich.bc, rich.order);
    ExactPropagator prop(rich, initial_state(rich, lat3));
    const double e0 = energy(rich, initial_state(rich, lat3)).total;
    for (double t : {0.3, 1.0, 7.5}) CHECK(std::abs(energy(rich, prop.at(t)).total - e0) <= 1e-12 * e0);
}

TEST_CASE("exact propagator rejects unsupported models") {
    const ModelSpec nl = nonlinear_model();
    const Lattice lat = make_lattice(nl.length, 16, nl.bc, nl.order);
    CHECK_THROWS_AS(exact_linear_propagate(nl, initial_state(nl, lat), 1.0), UnsupportedError);

    const ModelSpec dir = clamped_elastica();
    const Lattice dlat = make_lattice(dir.length, 16, dir.bc, dir.order);
    CHECK_THROWS_AS(exact_linear_propagate(dir, initial_state(dir, dlat), 1.0), UnsupportedError);

    const ModelSpec unstable = make_model({0.0, -1.0, 0.01}, {{1, 0.0, 1.0}});
    const Lattice ulat = make_lattice(unstable.length, 16, unstable.bc, unstable.order);
    CHECK_THROWS_AS(exact_linear_propagate(unstable, initial_state(unstable, ulat), 1.0), ImaginaryFrequencyError);
}

TEST_CASE("energy examples") {
    const ModelSpec m = make_model({0.0, 0.0, 1.0}, {{1, 0.0, 1.0}});
    const Lattice lat = make_lattice(m.length, 256, m.bc, m.order);
    const SimState zero{0.0, LatticeField::zeros(lat), LatticeField::zeros(lat)};
    const auto ez = energy(m, zero);
    CHECK(ez.total == 0.0);
    CHECK(ez.kinetic == 0.0);
    CHECK(ez.quadratic == 0.0);
    CHECK(ez.nonlinear == 0.0);

    // 1/2 int |(a sin kx)''|^2 over [0, 2 pi] = a^2 k^4 pi / 2.
    for (int k : {1, 2}) {
        const double a = 0.7;
        const ModelSpec mk = make_model({0.0, 0.0, 1.0}, {{k, 0.0, a}});
        const auto e = energy(mk, initial_state(mk, lat));
        CHECK(std::abs(e.total - 0.5 * a * a * std::pow(k, 4) * kPi) <= 1e-3 * e.total);
    }

    const ModelSpec rich = make_model({0.5, 1.0, 0.0, 1.0}, {{1, 0.3, 1.0}, {4, 0.2, -0.4}});
    const Lattice lat3 = make_lattice(rich.length, 64, rich.bc, rich.order);
    const SimState s = initial_state(rich, lat3);
    CHECK(energy(rich, s).quadratic ==
          doctest::Approx(network_energy(assemble_stiffness(rich.coeffs, lat3), s.u)).epsilon(1e-11));
}

TEST_CASE("nonlinear Verlet energy drift") {
    const ModelSpec m = nonlinear_model();
    const Lattice lat = make_lattice(m.length, 128, m.bc, m.order);
    const auto net = assemble_stiffness(m.coeffs, lat);
    const SimState s = initial_state(m, lat);
    const double e0 = energy(m, s).total;
    double prev = 0.0;
    for (double cfl : {0.25, 0.125, 0.0625}) {
        VerletIntegrator it(m, net, s);
        const double dt = stable_dt(m, lat.spacing(), cfl);
        double drift = 0.0;
        for (int j = 1; j <= 10; ++j) {
            it.advance_to(0.1 * j, dt);
            drift = std::max(drift, std::abs(energy(m, it.state()).total - e0) / e0);
        }
        if (cfl == 0.25) CHECK(drift <= 1e-4);
        if (prev > 0.0) CHECK(prev / drift > 3.0);
        prev = drift;
    }
}

TEST_CASE("Verlet converges to the exact propagator at second order") {
    const ModelSpec m = make_model({1.0, 1.0, 0.0, 1.0}, {{1, 0.0, 1.0}, {2, 0.3, 0.0}});
    const Lattice lat = make_lattice(m.length, 32, m.bc, m.order);
    const auto net = assemble_stiffness(m.coeffs, lat);
    const SimState s = initial_state(m, lat);
    const SimState exact = exact_linear_propagate(m, s, 1.0);
    const double dt0 = stable_dt(m, lat.spacing());
    double prev = 0.0;
    for (int level = 0; level < 4; ++level) {
        const SimState v = run_verlet(m, net, s, 1.0, dt0 / std::pow(2.0, level));
        const double err = max_diff(v.u, exact.u);
        if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.05));
        prev = err;
    }
}

TEST_CASE("energy bounds hold along trajectories") {
    {
        const ModelSpec m = make_model({0.5, 1.0, 0.0, 1.0}, {{1, 0.3, 1.0}, {4, 0.2, -0.4}});
        const Lattice lat = make_lattice(m.length, 64, m.bc, m.order);
        ExactPropagator prop(m, initial_state(m, lat));
        const double e0 = energy(m, initial_state(m, lat)).total;
        for (double t : {0.25, 0.5, 1.0}) {
            const auto b = bound_diagnostics(m, prop.at(t), e0);
            CHECK(b.energy_bound_lhs <= e0 * (1.0 + 1e-12));
            CHECK(b.max_top_derivative <= b.top_derivative_bound);
        }
    }
    for (const ModelSpec& m : {nonlinear_model(), clamped_elastica()}) {
        const Lattice lat = make_lattice(m.length, 64, m.bc, m.order);
        const auto net = assemble_stiffness(m.coeffs, lat);
        const SimState s = initial_state(m, lat);
        const double e0 = energy(m, s).total;
        VerletIntegrator it(m, net, s);
        for (double t : {0.25, 0.5, 0.75, 1.0}) {
            it.advance_to(t, stable_dt(m, lat.spacing(), 0.0625));
            const auto b = bound_diagnostics(m, it.state(), e0);
            CHECK(b.energy_bound_lhs <= e0 * (1.0 + 1e-4));
            CHECK(b.max_top_derivative <= b.top_derivative_bound);
            CHECK(b.max_laplacian <= b.laplacian_bound);
        }
    }
}

TEST_CASE("Dirichlet Verlet keeps frozen sites at rest") {
    const ModelSpec m = clamped_elastica();
    const Lattice lat = make_lattice(m.length, 64, m.bc, m.order);
    const auto net = assemble_stiffness(m.coeffs, lat);
    const SimState end = run_verlet(m, net, initial_state(m, lat), 0.5, stable_dt(m, lat.spacing()));
    for (Index i = 0; i <= lat.last_site(); ++i) {
        if (!lat.is_frozen(i)) continue;
        CHECK(end.u[i] == 0.0);
        CHECK(end.v[i] == 0.0);
    }
}
