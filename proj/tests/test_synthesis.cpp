#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gradnet/errors.hpp"
#include "gradnet/synthesis.hpp"

#include <cmath>
#include <random>

using namespace gradnet;

namespace {

// Periodic Delta_eps^p applied to raw values by the three-point stencil.
std::vector<double> lap_power(std::vector<double> u, int p, double eps) {
    const std::size_t n = u.size();
    for (int step = 0; step < p; ++step) {
        std::vector<double> next(n);
        for (std::size_t i = 0; i < n; ++i)
            next[i] = (u[(i + 1) % n] - 2.0 * u[i] + u[(i + n - 1) % n]) / (eps * eps);
        u = std::move(next);
    }
    return u;
}

LatticeField random_field(const Lattice& lat, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> pick(-1.0, 1.0);
    std::vector<double> v(lat.site_count());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = lat.is_frozen(Index(i)) ? 0.0 : pick(rng);
    return LatticeField(lat, std::move(v));
}

}  // namespace

TEST_CASE("laplacian_power_coeffs examples") {
    const double eps = 0.5;
    const Lattice lat = make_lattice(8.0, 16, Boundary::periodic, 2);
    const Stencil k1 = laplacian_power_coeffs(1, lat, 2);
    CHECK(k1.at(1) == 1.0 / (eps * eps));
    CHECK(k1.at(-1) == 1.0 / (eps * eps));
    CHECK(k1.at(0) == 0.0);
    CHECK(k1.at(2) == 0.0);

    const Stencil k2 = laplacian_power_coeffs(2, lat, 2);
    const double e4 = std::pow(eps, -4);
    CHECK(k2.at(1) == doctest::Approx(-4.0 * e4));
    CHECK(k2.at(-1) == doctest::Approx(-4.0 * e4));
    CHECK(k2.at(2) == doctest::Approx(e4));
    CHECK(k2.at(-2) == doctest::Approx(e4));
    CHECK(k2.at(0) == 0.0);
    CHECK(k2.at(3) == 0.0);

    CHECK_THROWS(laplacian_power_coeffs(3, lat, 2));
}

TEST_CASE("stencils reproduce Delta^p on basis vectors") {
    const std::size_t n = 24;
    const Lattice lat = make_lattice(3.0, n, Boundary::periodic, 4);
    const double eps = lat.spacing();
    for (int p = 1; p <= 4; ++p) {
        const Stencil k = laplacian_power_coeffs(p, lat, 4);
        std::vector<double> e(n, 0.0);
        e[0] = 1.0;
        const auto col = lap_power(e, p, eps);
        // (Delta^p e_0)_i = K(i, 0) for i != 0.
        for (int d = 1; d <= p; ++d) {
            CHECK(k.at(d) == doctest::Approx(col[n - std::size_t(d)]).epsilon(1e-12));
            CHECK(k.at(-d) == doctest::Approx(col[std::size_t(d)]).epsilon(1e-12));
        }
    }
}

TEST_CASE("assemble_stiffness examples") {
    const Lattice lat = make_lattice(2.0, 20, Boundary::periodic, 2);
    const double eps = lat.spacing();
    const double elastica[] = {0.0, 0.0, 1.0};
    const auto net = assemble_stiffness(elastica, lat);
    CHECK(net.grounding() == 0.0);
    CHECK(net.coupling(5, 6) == doctest::Approx(4.0 * std::pow(eps, -4)));
    CHECK(net.coupling(5, 4) == doctest::Approx(4.0 * std::pow(eps, -4)));
    CHECK(net.coupling(5, 7) == doctest::Approx(-std::pow(eps, -4)));
    CHECK(net.coupling(5, 3) == doctest::Approx(-std::pow(eps, -4)));
    CHECK(net.coupling(5, 8) == 0.0);

    const Lattice chain_lat = make_lattice(2.0, 20, Boundary::periodic, 1);
    const double chain[] = {0.0, 1.0};
    const auto cnet = assemble_stiffness(chain, chain_lat);
    CHECK(cnet.coupling(0, 1) == doctest::Approx(std::pow(eps, -2)));
    CHECK(cnet.coupling(0, 19) == doctest::Approx(std::pow(eps, -2)));
    CHECK(cnet.grounding() == 0.0);
    std::mt19937_64 rng(2);
    const LatticeField u = random_field(chain_lat, rng);
    const LatticeField f = force_from_network(cnet, u);
    const LatticeField l = laplacian(u);
    for (Index i = 0; i < 20; ++i) CHECK(f[i] == doctest::Approx(l[i]).epsilon(1e-12));

    const double grounded[] = {1.0, 0.0, 1.0};
    const auto gnet = assemble_stiffness(grounded, lat);
    CHECK(gnet.grounding() == 1.0);
    CHECK(gnet.coupling(5, 7) == doctest::Approx(-std::pow(eps, -4)));
    const LatticeField w = random_field(lat, rng);
    const LatticeField fg = force_from_network(gnet, w);
    const LatticeField ll = laplacian(laplacian(w));
    for (Index i = 0; i < 20; ++i)
        CHECK(fg[i] == doctest::Approx(-(w[i] + ll[i])).scale(1.0).epsilon(1e-10));

    const double bad[] = {1.0, 0.0, 0.0};
    CHECK_THROWS_AS(assemble_stiffness(bad, lat), ValidationError);
}

TEST_CASE("unit impulse reproduces the elastica stencil") {
    const Lattice lat = make_lattice(16.0, 16, Boundary::periodic, 2);
    const double elastica[] = {0.0, 0.0, 1.0};
    const auto net = assemble_stiffness(elastica, lat);
    std::vector<double> v(16, 0.0);
    v[0] = 1.0;
    const LatticeField f = force_from_network(net, LatticeField(lat, v));
    CHECK(f[0] == -6.0);
    CHECK(f[1] == 4.0);
    CHECK(f[-1] == 4.0);
    CHECK(f[2] == -1.0);
    CHECK(f[-2] == -1.0);
    for (Index i = 3; i <= 13; ++i) CHECK(f[i] == 0.0);
}

TEST_CASE("network force equals operator force on random fields") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> coef(0.1, 2.0);
    for (Boundary bc : {Boundary::periodic, Boundary::dirichlet}) {
        for (int n = 1; n <= 4; ++n) {
            const Lattice lat = make_lattice(2.0, 40, bc, n);
            std::vector<double> a(std::size_t(n) + 1);
            for (double& x : a) x = coef(rng);
            const auto net = assemble_stiffness(a, lat);
            CHECK(net.reach() <= n);
            for (int trial = 0; trial < 100; ++trial) {
                const LatticeField u = random_field(lat, rng);
                const LatticeField f1 = force_from_network(net, u);
                const LatticeField f2 = operator_force(a, u);
                const double scale = max_abs(f2);
                for (Index i = 0; i <= lat.last_site(); ++i)
                    REQUIRE(std::abs(f1[i] - f2[i]) <= 1e-10 * scale);
            }
        }
    }
}

TEST_CASE("translation gives zero force without grounding") {
    const Lattice lat = make_lattice(2.0, 30, Boundary::periodic, 3);
    const double a[] = {0.0, 1.0, 0.5, 2.0};
    const auto net = assemble_stiffness(a, lat);
    const LatticeField c(lat, std::vector<double>(30, 1.7));
    CHECK(max_abs(force_from_network(net, c)) <= 1e-9);
}

TEST_CASE("verify_realizability") {
    const Lattice lat = make_lattice(2.0, 32, Boundary::periodic, 2);
    const double elastica[] = {0.0, 0.0, 1.0};
    auto net = assemble_stiffness(elastica, lat);
    const auto report = verify_realizability(net);
    CHECK(report.passed);
    CHECK(report.symmetric);
    CHECK(report.band_ok);
    bool next_negative = false;
    for (const auto& s : report.negative_springs)
        if (s.offset == 2 && s.stiffness < 0.0) next_negative = true;
    CHECK(next_negative);

    net.set_offset_coupling(0, 1, net.offset_coupling(0, 1) * 1.01);
    const auto broken = verify_realizability(net);
    CHECK_FALSE(broken.symmetric);
    CHECK_FALSE(broken.passed);

    const Lattice lat3 = make_lattice(2.0, 32, Boundary::periodic, 3);
    const double a3[] = {1.0, 1.0, 0.0, 1.0};
    const auto r3 = verify_realizability(assemble_stiffness(a3, lat3));
    CHECK(r3.passed);
    CHECK(r3.force_residual <= 1e-10);
    CHECK(r3.max_offset == 3);
}

TEST_CASE("network_energy examples") {
    const Lattice lat = make_lattice(8.0, 8, Boundary::periodic, 1);
    const double chain[] = {0.0, 1.0};
    const auto net = assemble_stiffness(chain, lat);
    CHECK(network_energy(net, LatticeField::zeros(lat)) == 0.0);
    std::vector<double> v(8, 0.0);
    v[1] = 1.0;
    CHECK(network_energy(net, LatticeField(lat, v)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("network force is minus the energy gradient") {
    std::mt19937_64 rng(8);
    for (Boundary bc : {Boundary::periodic, Boundary::dirichlet}) {
        const Lattice lat = make_lattice(2.0, 20, bc, 2);
        const double a[] = {0.5, 1.0, 1.0};
        const auto net = assemble_stiffness(a, lat);
        const LatticeField u = random_field(lat, rng);
        const LatticeField f = force_from_network(net, u);
        const double eps = lat.spacing();
        const double h = 1e-6;
        for (Index i = lat.first_free(); i <= lat.last_free(); ++i) {
            auto shifted = u.site_values();
            shifted[std::size_t(i)] += h;
            const double up = network_energy(net, LatticeField(lat, shifted));
            shifted[std::size_t(i)] -= 2 * h;
            const double down = network_energy(net, LatticeField(lat, shifted));
            const double grad = (up - down) / (2 * h);
            CHECK(-grad / eps == doctest::Approx(f[i]).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("shape errors") {
    const Lattice a = make_lattice(2.0, 20, Boundary::periodic, 1);
    const Lattice b = make_lattice(2.0, 10, Boundary::periodic, 1);
    const double chain[] = {0.0, 1.0};
    const auto net = assemble_stiffness(chain, a);
    CHECK_THROWS_AS(force_from_network(net, LatticeField::zeros(b)), ShapeError);
    CHECK_THROWS_AS(network_energy(net, LatticeField::zeros(b)), ShapeError);
}
