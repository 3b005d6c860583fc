#include "gradnet/selftest.hpp"

#include "gradnet/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace gradnet {

namespace {

constexpr double kLength = 2.0 * std::numbers::pi;

LatticeField random_field(const Lattice& lat, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(lat.site_count());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = lat.is_frozen(Index(i)) ? 0.0 : dist(rng);
    return LatticeField(lat, std::move(v));
}

std::vector<double> random_coeffs(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(0.1, 2.0);
    std::vector<double> a(static_cast<std::size_t>(n + 1));
    for (double& x : a) x = dist(rng);
    return a;
}

SuiteResult finish(std::string name, double worst, double tol) {
    SuiteResult r{std::move(name), worst <= tol, worst, tol, {}};
    char buf[96];
    std::snprintf(buf, sizeof buf, "worst %.3e (tolerance %.1e)", worst, tol);
    r.detail = buf;
    return r;
}

SuiteResult integration_by_parts(std::mt19937_64& rng, int fields) {
    const Lattice lat = make_lattice(kLength, 64, Boundary::periodic, 1);
    double worst = 0.0;
    for (int k = 0; k < fields; ++k) {
        const LatticeField f = random_field(lat, rng);
        const LatticeField g = random_field(lat, rng);
        const LatticeField dg = dplus(g);
        const double lhs = inner(f, dg);
        const double rhs = -inner(dminus(f), g);
        // Rounding error scales with the summed magnitudes, not with the possibly cancelling sum.
        double scale = 1e-300;
        for (Index i = 0; i < Index(lat.sites); ++i) scale += std::abs(f[i] * dg[i]) * lat.spacing();
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    return finish("integration by parts", worst, 1e-13);
}

SuiteResult sobolev(std::mt19937_64& rng, int fields) {
    // Reports max |f|^2 / ((1/L + 1) ||f||_H1^2), which must not exceed 1.
    double worst = 0.0;
    for (std::size_t n : {16, 64, 256}) {
        const Lattice lat = make_lattice(kLength, n, Boundary::periodic, 1);
        for (int k = 0; k < fields; ++k) {
            const LatticeField f = random_field(lat, rng);
            const LatticeField d = dplus(f);
            const double h1 = inner(f, f) + inner(d, d);
            const double m = max_abs(f);
            worst = std::max(worst, m * m / ((1.0 / kLength + 1.0) * h1));
        }
    }
    return finish("discrete Sobolev inequality", worst, 1.0);
}

SuiteResult chain_rule(std::mt19937_64& rng, int fields) {
    // f(z) = sin(3z) + z^3 / 3; sup |f'| on [a, b] bounded by 3 + max(a^2, b^2).
    const Lattice lat = make_lattice(kLength, 64, Boundary::periodic, 1);
    double worst = 0.0;
    for (int k = 0; k < fields; ++k) {
        const LatticeField g = random_field(lat, rng);
        std::vector<double> fg(lat.sites);
        for (std::size_t i = 0; i < fg.size(); ++i) {
            const double z = g[Index(i)];
            fg[i] = std::sin(3.0 * z) + z * z * z / 3.0;
        }
        const LatticeField f(lat, std::move(fg));
        const LatticeField df = dplus(f);
        const LatticeField dg = dplus(g);
        const double m = max_abs(g);
        const double sup = 3.0 + m * m;
        for (Index i = 0; i < Index(lat.sites); ++i) {
            const double bound = sup * std::abs(dg[i]);
            if (bound > 0.0) worst = std::max(worst, std::abs(df[i]) / bound);
        }
    }
    return finish("discrete chain-rule inequality", worst, 1.0 + 1e-12);
}

SuiteResult recursion(std::mt19937_64& rng, int fields) {
    const Lattice lat = make_lattice(kLength, 64, Boundary::periodic, 4);
    double worst = 0.0;
    for (int p = 1; p <= 4; ++p) {
        const Stencil k = laplacian_power_coeffs(p, lat, 4);
        for (int trial = 0; trial < fields; ++trial) {
            const LatticeField u = random_field(lat, rng);
            const LatticeField direct = dalpha(u, 2 * p);
            double err = 0.0;
            for (Index i = 0; i < Index(lat.sites); ++i) {
                double s = 0.0;
                for (int d = -p; d <= p; ++d) s += k.at(d) * (u[i + d] - u[i]);
                err = std::max(err, std::abs(s - direct[i]));
            }
            worst = std::max(worst, err / std::max(max_abs(direct), 1e-300));
        }
    }
    return finish("stiffness recursion vs Laplacian powers", worst, 1e-11);
}

SuiteResult force_equivalence(std::mt19937_64& rng, int fields, const NetworkFactory& factory) {
    double worst = 0.0;
    for (int n = 1; n <= 4; ++n) {
        for (Boundary bc : {Boundary::periodic, Boundary::dirichlet}) {
            const Lattice lat = make_lattice(kLength, 64, bc, n);
            const std::vector<double> a = random_coeffs(n, rng);
            const StiffnessNetwork net = factory(a, lat);
            for (int trial = 0; trial < fields; ++trial) {
                const LatticeField u = random_field(lat, rng);
                const LatticeField fo = operator_force(a, u);
                const LatticeField fn = force_from_network(net, u);
                worst = std::max(worst, max_abs(fn - fo) / std::max(max_abs(fo), 1e-300));
            }
        }
    }
    return finish("network force vs operator force", worst, 1e-10);
}

SuiteResult force_energy(std::mt19937_64& rng, int fields, const NetworkFactory& factory) {
    // For a quadratic energy the central difference of U is exact up to roundoff:
    // eps F_i = -(U(u + h e_i) - U(u - h e_i)) / 2h. Also checks U against the operator energy.
    double worst = 0.0;
    const int trials = std::max(1, fields / 10);
    for (int n = 1; n <= 4; ++n) {
        const Lattice lat = make_lattice(kLength, 32, Boundary::periodic, n);
        const std::vector<double> a = random_coeffs(n, rng);
        const StiffnessNetwork net = factory(a, lat);
        ModelSpec model;
        model.length = kLength;
        model.order = n;
        model.coeffs = a;
        for (int trial = 0; trial < trials; ++trial) {
            LatticeField u = random_field(lat, rng);
            const LatticeField f = force_from_network(net, u);
            const double h = 1e-3;
            const double eps = lat.spacing();
            for (Index i = 0; i < Index(lat.sites); i += 5) {
                LatticeField up = u, um = u;
                up.values()[static_cast<std::size_t>(i)] += h;
                um.values()[static_cast<std::size_t>(i)] -= h;
                const double grad = (network_energy(net, up) - network_energy(net, um)) / (2.0 * h);
                const double scale = std::max(std::abs(eps * f[i]), 1e-8 * network_energy(net, u));
                worst = std::max(worst, std::abs(grad + eps * f[i]) / scale);
            }
            const double un = network_energy(net, u);
            const double uo = energy(model, SimState{0.0, u, LatticeField::zeros(lat)}).quadratic;
            worst = std::max(worst, std::abs(un - uo) / std::max(std::abs(uo), 1e-300));
        }
    }
    return finish("network force vs energy gradient", worst, 1e-7);
}

}  // namespace

std::vector<SuiteResult> run_selftest(const SelftestOptions& options) {
    const NetworkFactory factory = options.factory ? options.factory
                                                   : NetworkFactory([](std::span<const double> a, const Lattice& lat) {
                                                         return assemble_stiffness(a, lat);
                                                     });
    std::mt19937_64 rng(options.seed);
    std::vector<SuiteResult> out;
    out.push_back(integration_by_parts(rng, options.fields));
    out.push_back(sobolev(rng, options.fields));
    out.push_back(chain_rule(rng, options.fields));
    out.push_back(recursion(rng, options.fields));
    out.push_back(force_equivalence(rng, options.fields, factory));
    out.push_back(force_energy(rng, options.fields, factory));
    return out;
}

}  // namespace gradnet
