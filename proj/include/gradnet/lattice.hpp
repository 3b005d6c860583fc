#pragma once

#include "gradnet/model.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace gradnet {

using Index = std::ptrdiff_t;

/// Uniform lattice {0, eps, ..., N eps} on [0, L].
///
/// Periodic lattices carry sites 0..N-1 (site N is identified with 0). Dirichlet lattices
/// carry sites 0..N, of which the first and last `frozen` are held at zero.
struct Lattice {
    double length = 0.0;
    std::size_t sites = 0;
    Boundary bc = Boundary::periodic;
    int frozen = 0;

    double spacing() const { return length / static_cast<double>(sites); }
    /// Last physical site: N-1 periodic, N Dirichlet.
    Index last_site() const { return bc == Boundary::periodic ? Index(sites) - 1 : Index(sites); }
    std::size_t site_count() const { return bc == Boundary::periodic ? sites : sites + 1; }
    bool is_frozen(Index i) const;
    Index first_free() const { return bc == Boundary::periodic ? 0 : frozen; }
    Index last_free() const { return bc == Boundary::periodic ? Index(sites) - 1 : Index(sites) - frozen; }

    friend bool operator==(const Lattice&, const Lattice&) = default;
};

/// Lattice for a model of gradient order `order`; Dirichlet lattices freeze `order` sites
/// at each end.
Lattice make_lattice(double length, std::size_t sites, Boundary bc, int order);

/// Lattice field read as a left-continuous step function.
///
/// Periodic fields store exactly N values and index modulo N. Dirichlet fields store a
/// contiguous support [first, last] containing [0, N] and read as zero elsewhere; operators
/// grow the support so that stencil overhang beyond [0, L] is kept exactly.
class LatticeField {
public:
    LatticeField() = default;
    /// `values` holds sites 0..N-1 (periodic) or 0..N (Dirichlet).
    LatticeField(const Lattice& lattice, std::vector<double> values);
    LatticeField(const Lattice& lattice, Index first, std::vector<double> values);

    static LatticeField zeros(const Lattice& lattice);

    const Lattice& lattice() const noexcept { return lattice_; }
    double spacing() const { return lattice_.spacing(); }

    Index first() const noexcept { return first_; }
    Index last() const noexcept { return first_ + Index(values_.size()) - 1; }

    /// Value at site i (wrapped when periodic, zero outside the support when Dirichlet).
    double operator[](Index i) const;

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    /// Values at the physical sites (0..N-1 or 0..N).
    std::vector<double> site_values() const;

private:
    Lattice lattice_;
    Index first_ = 0;
    std::vector<double> values_;
};

LatticeField dplus(const LatticeField& f);
LatticeField dminus(const LatticeField& f);
LatticeField laplacian(const LatticeField& f);
/// D^alpha: Delta^(alpha/2) for even alpha, D+ Delta^((alpha-1)/2) for odd alpha.
LatticeField dalpha(const LatticeField& f, int alpha);

LatticeField sample(const std::function<double(double)>& g, const Lattice& lattice);

/// eps * sum f_i g_i over the whole support (the line integral of the step functions).
double inner(const LatticeField& f, const LatticeField& g);
/// Same sum restricted to the sites 0..N-1 whose cells tile [0, L).
double inner_interval(const LatticeField& f, const LatticeField& g);

/// Energy-type norm: ||v||^2 + ||u||^2 + sum_{k=1..n} ||D^k u||^2, square-rooted.
double eps_norm(const LatticeField& u, const LatticeField& v, int order);

double max_abs(const LatticeField& f);

LatticeField operator+(const LatticeField& a, const LatticeField& b);
LatticeField operator-(const LatticeField& a, const LatticeField& b);
LatticeField operator*(double s, const LatticeField& a);

void require_same_lattice(const LatticeField& a, const LatticeField& b, const char* what);

}  // namespace gradnet
