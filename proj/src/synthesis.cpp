#include "gradnet/synthesis.hpp"

#include "gradnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace gradnet {

Stencil laplacian_power_coeffs(int power, const Lattice& lattice, int order) {
    if (power < 1) throw DomainError("laplacian power must be >= 1");
    if (power > order) throw DomainError("laplacian power exceeds the design order n");
    const double h = lattice.spacing();
    const double inv = 1.0 / (h * h);

    Stencil k{1, {inv, 0.0, inv}};
    for (int level = 2; level <= power; ++level) {
        Stencil next{level, std::vector<double>(static_cast<std::size_t>(2 * level + 1), 0.0)};
        double row_sum = 0.0;
        for (double c : k.coeffs) row_sum += c;
        for (int d = -level; d <= level; ++d) {
            double v = k.at(d - 1) + k.at(d + 1) - 2.0 * k.at(d);
            if (d == 1 || d == -1) v -= row_sum;
            next.coeffs[static_cast<std::size_t>(d + level)] = inv * v;
        }
        next.coeffs[static_cast<std::size_t>(level)] = 0.0;
        k = std::move(next);
    }
    return k;
}

StiffnessNetwork::StiffnessNetwork(const Lattice& lattice, int order, int reach, double grounding,
                                   std::vector<double> coeffs)
    : lattice_(lattice), order_(order), reach_(reach), grounding_(grounding), coeffs_(std::move(coeffs)),
      table_(lattice.site_count() * static_cast<std::size_t>(2 * reach + 1), 0.0) {
    if (reach < 0) throw DomainError("network reach must be >= 0");
    if (lattice.bc == Boundary::periodic && lattice.sites < static_cast<std::size_t>(2 * reach + 1))
        throw DomainError("periodic network needs N >= 2 reach + 1 sites");
}

Index StiffnessNetwork::partner(Index i, int d) const {
    const Index j = i + d;
    if (lattice_.bc == Boundary::periodic) {
        const Index n = Index(lattice_.sites);
        return j < 0 ? j + n : (j >= n ? j - n : j);
    }
    return (j < 0 || j > Index(lattice_.sites)) ? -1 : j;
}

double StiffnessNetwork::offset_coupling(Index i, int d) const {
    if (d < -reach_ || d > reach_ || i < 0 || i >= Index(rows())) return 0.0;
    return table_[static_cast<std::size_t>(i) * static_cast<std::size_t>(2 * reach_ + 1) +
                  static_cast<std::size_t>(d + reach_)];
}

void StiffnessNetwork::set_offset_coupling(Index i, int d, double k) {
    if (d < -reach_ || d > reach_ || i < 0 || i >= Index(rows()))
        throw DomainError("coupling outside the stored band");
    if (partner(i, d) < 0 && k != 0.0) throw DomainError("coupling partner lies outside the lattice");
    table_[static_cast<std::size_t>(i) * static_cast<std::size_t>(2 * reach_ + 1) +
           static_cast<std::size_t>(d + reach_)] = k;
}

double StiffnessNetwork::coupling(Index i, Index j) const {
    if (lattice_.bc == Boundary::dirichlet) return offset_coupling(i, static_cast<int>(j - i));
    const Index n = Index(lattice_.sites);
    Index d = (j - i) % n;
    if (d < 0) d += n;
    if (d > n / 2) d -= n;
    return offset_coupling(((i % n) + n) % n, static_cast<int>(d));
}

std::vector<double> StiffnessNetwork::band() const {
    const Index row = lattice_.bc == Boundary::periodic ? 0 : Index(reach_);
    std::vector<double> out;
    for (int d = 1; d <= reach_; ++d) out.push_back(offset_coupling(row, d));
    return out;
}

StiffnessNetwork assemble_stiffness(std::span<const double> coeffs, const Lattice& lattice) {
    if (coeffs.size() < 2) throw ValidationError("need coefficients A_0..A_n with n >= 1");
    for (double a : coeffs)
        if (!std::isfinite(a)) throw ValidationError("coefficients must be finite");
    if (coeffs.back() == 0.0) throw ValidationError("A_n = 0: the network has no top-order spring");
    const int n = static_cast<int>(coeffs.size()) - 1;
    if (lattice.bc == Boundary::dirichlet && lattice.frozen != n)
        throw ShapeError("dirichlet lattice must freeze n sites at each end");

    std::vector<double> band(static_cast<std::size_t>(2 * n + 1), 0.0);
    for (int p = 1; p <= n; ++p) {
        if (coeffs[static_cast<std::size_t>(p)] == 0.0) continue;
        const Stencil kp = laplacian_power_coeffs(p, lattice, n);
        const double sign = (p % 2 == 0) ? -1.0 : 1.0;  // -(-1)^p
        for (int d = -p; d <= p; ++d)
            band[static_cast<std::size_t>(d + n)] += sign * coeffs[static_cast<std::size_t>(p)] * kp.at(d);
    }

    StiffnessNetwork net(lattice, n, n, coeffs[0], std::vector<double>(coeffs.begin(), coeffs.end()));
    for (Index i = 0; i < Index(net.rows()); ++i)
        for (int d = -n; d <= n; ++d)
            if (d != 0 && net.partner(i, d) >= 0)
                net.set_offset_coupling(i, d, band[static_cast<std::size_t>(d + n)]);
    return net;
}

void network_force_kernel(const StiffnessNetwork& net, std::span<const double> u, std::span<double> f) {
    const Lattice& lat = net.lattice();
    const Index rows = Index(net.rows());
    const int reach = net.reach();
    const double g = net.grounding();
    for (Index i = 0; i < rows; ++i) {
        if (lat.is_frozen(i)) {
            f[static_cast<std::size_t>(i)] = 0.0;
            continue;
        }
        const double ui = u[static_cast<std::size_t>(i)];
        double acc = -g * ui;
        for (int d = -reach; d <= reach; ++d) {
            if (d == 0) continue;
            const Index j = net.partner(i, d);
            if (j < 0) continue;
            acc += net.offset_coupling(i, d) * (u[static_cast<std::size_t>(j)] - ui);
        }
        f[static_cast<std::size_t>(i)] = acc;
    }
}

LatticeField force_from_network(const StiffnessNetwork& net, const LatticeField& u) {
    if (!(u.lattice() == net.lattice())) throw ShapeError("force_from_network: lattice mismatch");
    const std::vector<double> sites = u.site_values();
    std::vector<double> f(sites.size(), 0.0);
    network_force_kernel(net, sites, f);
    return LatticeField(u.lattice(), std::move(f));
}

LatticeField operator_force(std::span<const double> coeffs, const LatticeField& u) {
    const Lattice& lat = u.lattice();
    std::vector<double> f(lat.site_count(), 0.0);
    LatticeField power = u;
    for (std::size_t alpha = 0; alpha < coeffs.size(); ++alpha) {
        if (alpha > 0) power = laplacian(power);
        const double sign = (alpha % 2 == 0) ? -1.0 : 1.0;
        for (std::size_t i = 0; i < f.size(); ++i) f[i] += sign * coeffs[alpha] * power[Index(i)];
    }
    for (std::size_t i = 0; i < f.size(); ++i)
        if (lat.is_frozen(Index(i))) f[i] = 0.0;
    return LatticeField(lat, std::move(f));
}

double network_energy(const StiffnessNetwork& net, const LatticeField& u) {
    if (!(u.lattice() == net.lattice())) throw ShapeError("network_energy: lattice mismatch");
    const double h = net.lattice().spacing();
    double pair = 0.0;
    double ground = 0.0;
    for (Index i = 0; i < Index(net.rows()); ++i) {
        const double ui = u[i];
        ground += ui * ui;
        for (int d = -net.reach(); d <= net.reach(); ++d) {
            const Index j = net.partner(i, d);
            if (d == 0 || j < 0) continue;
            const double diff = ui - u[j];
            pair += net.offset_coupling(i, d) * diff * diff;
        }
    }
    return 0.25 * h * pair + 0.5 * h * net.grounding() * ground;
}

RealizabilityReport verify_realizability(const StiffnessNetwork& net, std::uint64_t seed) {
    RealizabilityReport rep;
    const Lattice& lat = net.lattice();
    const Index rows = Index(net.rows());
    const int reach = net.reach();
    rep.normalization =
        "k_ij = -sum_{p>=1} (-1)^p A_p K^p_ij (force F_i = sum_j k_ij (u_j - u_i) - g u_i), "
        "A_0 realized as grounding springs g";

    rep.band_ok = true;
    rep.symmetric = true;
    for (Index i = 0; i < rows; ++i) {
        for (int d = -reach; d <= reach; ++d) {
            const double k = net.offset_coupling(i, d);
            if (k == 0.0) continue;
            rep.max_offset = std::max(rep.max_offset, std::abs(d));
            if (std::abs(d) > net.order()) rep.band_ok = false;
            const Index j = net.partner(i, d);
            if (d == 0 || j < 0 || net.offset_coupling(j, -d) != k) rep.symmetric = false;
        }
    }
    if (!rep.band_ok) rep.messages.push_back("springs reach beyond offset n = " + std::to_string(net.order()));
    if (!rep.symmetric) rep.messages.push_back("k_ij != k_ji: action-reaction violated");

    // Interior rows must coincide; rows near a Dirichlet end are the same band truncated
    // at the lattice edge.
    const Index ref = lat.bc == Boundary::periodic ? 0 : Index(reach);
    rep.translation_invariant = lat.bc == Boundary::periodic || rows > 2 * reach;
    for (Index i = 0; i < rows && rep.translation_invariant; ++i) {
        for (int d = -reach; d <= reach; ++d) {
            const double expected = net.partner(i, d) >= 0 ? net.offset_coupling(ref, d) : 0.0;
            if (net.offset_coupling(i, d) != expected) {
                rep.translation_invariant = false;
                rep.messages.push_back("row " + std::to_string(i) + " differs from the interior band");
                break;
            }
        }
    }

    for (int d = 1; d <= reach; ++d) {
        const double k = net.offset_coupling(ref, d);
        if (k < 0.0) rep.negative_springs.push_back({d, k});
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 8; ++trial) {
        std::vector<double> values(lat.site_count());
        for (std::size_t i = 0; i < values.size(); ++i) values[i] = lat.is_frozen(Index(i)) ? 0.0 : dist(rng);
        const LatticeField u(lat, std::move(values));
        const LatticeField fn = force_from_network(net, u);
        const LatticeField fo = operator_force(net.coeffs(), u);
        const double scale = std::max(max_abs(fo), 1e-300);
        worst = std::max(worst, max_abs(fn - fo) / scale);
    }
    rep.force_residual = worst;
    rep.force_ok = worst <= 1e-10;
    if (!rep.force_ok) rep.messages.push_back("network force departs from the operator form");

    rep.passed = rep.band_ok && rep.symmetric && rep.translation_invariant && rep.force_ok;
    return rep;
}

}  // namespace gradnet
