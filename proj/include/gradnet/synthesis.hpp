#pragma once

#include "gradnet/lattice.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gradnet {

/// Translation-invariant pair coefficients K(d) for offsets d in [-reach, reach].
struct Stencil {
    int reach = 0;
    std::vector<double> coeffs;

    double at(int offset) const {
        return (offset < -reach || offset > reach) ? 0.0 : coeffs[static_cast<std::size_t>(offset + reach)];
    }
};

/// Pairwise representation of Delta_eps^power: (Delta^p u)_i = sum_j K^p_{i,j} (u_j - u_i),
/// built by the two-term recursion from K^1 = eps^-2 on nearest neighbours. Diagonal
/// entries are reset to zero after every step. Rejects power > order.
Stencil laplacian_power_coeffs(int power, const Lattice& lattice, int order);

/// Pairwise spring network with on-site grounding.
///
/// The table stores k_{i,i+d} for every site i of the lattice and d in [-reach, reach].
/// Dirichlet tables include the frozen sites, so springs anchoring a free mass to a frozen
/// one appear on both rows.
class StiffnessNetwork {
public:
    StiffnessNetwork(const Lattice& lattice, int order, int reach, double grounding, std::vector<double> coeffs);

    const Lattice& lattice() const noexcept { return lattice_; }
    int order() const noexcept { return order_; }
    int reach() const noexcept { return reach_; }
    double grounding() const noexcept { return grounding_; }
    /// Continuum coefficients A_0..A_n the network was synthesized from.
    const std::vector<double>& coeffs() const noexcept { return coeffs_; }

    std::size_t rows() const noexcept { return lattice_.site_count(); }
    double offset_coupling(Index i, int d) const;
    void set_offset_coupling(Index i, int d, double k);
    /// k_{i,j}; zero beyond the stored reach.
    double coupling(Index i, Index j) const;
    /// Partner of row i at offset d, or -1 when it falls outside a Dirichlet lattice.
    Index partner(Index i, int d) const;
    /// k(1..reach) of the first interior row.
    std::vector<double> band() const;

private:
    Lattice lattice_;
    int order_;
    int reach_;
    double grounding_;
    std::vector<double> coeffs_;
    std::vector<double> table_;
};

/// k_{i,j} = -sum_{p=1..n} (-1)^p A_p K^p_{i,j}, grounding g = A_0.
StiffnessNetwork assemble_stiffness(std::span<const double> coeffs, const Lattice& lattice);

/// F_i = sum_j k_{i,j} (u_j - u_i) - g u_i; frozen sites get 0.
LatticeField force_from_network(const StiffnessNetwork& net, const LatticeField& u);

/// Raw kernel behind force_from_network: `u` and `f` hold the lattice sites in order.
void network_force_kernel(const StiffnessNetwork& net, std::span<const double> u, std::span<double> f);

/// -sum_alpha (-1)^alpha A_alpha Delta_eps^alpha u evaluated by repeated stencils; frozen sites get 0.
LatticeField operator_force(std::span<const double> coeffs, const LatticeField& u);

/// U = (eps/4) sum_{i,j} k_{i,j} (u_i - u_j)^2 + (eps g / 2) sum_i u_i^2, so that F = -(1/eps) grad U.
double network_energy(const StiffnessNetwork& net, const LatticeField& u);

struct SpringRecord {
    int offset = 0;
    double stiffness = 0.0;
};

struct RealizabilityReport {
    bool band_ok = false;
    bool symmetric = false;
    bool translation_invariant = false;
    bool force_ok = false;
    double force_residual = 0.0;
    int max_offset = 0;
    std::vector<SpringRecord> negative_springs;
    std::vector<std::string> messages;
    std::string normalization;
    bool passed = false;
};

RealizabilityReport verify_realizability(const StiffnessNetwork& net, std::uint64_t seed = 0);

}  // namespace gradnet
