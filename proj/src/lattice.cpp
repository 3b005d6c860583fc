#include "gradnet/lattice.hpp"

#include "gradnet/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gradnet {

namespace {

Index wrap(Index i, Index n) {
    const Index r = i % n;
    return r < 0 ? r + n : r;
}

// Builds a Dirichlet field on [first, last] from a per-site generator.
template <typename Fn>
LatticeField build(const Lattice& lat, Index first, Index last, Fn&& value_at) {
    std::vector<double> out(static_cast<std::size_t>(last - first + 1));
    for (Index i = first; i <= last; ++i) out[static_cast<std::size_t>(i - first)] = value_at(i);
    return LatticeField(lat, first, std::move(out));
}

template <typename Fn>
LatticeField build_periodic(const Lattice& lat, Fn&& value_at) {
    std::vector<double> out(lat.sites);
    for (Index i = 0; i < Index(lat.sites); ++i) out[static_cast<std::size_t>(i)] = value_at(i);
    return LatticeField(lat, std::move(out));
}

}  // namespace

bool Lattice::is_frozen(Index i) const {
    if (bc == Boundary::periodic) return false;
    return i < frozen || i > Index(sites) - frozen;
}

Lattice make_lattice(double length, std::size_t sites, Boundary bc, int order) {
    if (!(length > 0.0)) throw DomainError("lattice length must be positive");
    if (sites < 1) throw DomainError("lattice needs at least one cell");
    if (bc == Boundary::dirichlet && sites < static_cast<std::size_t>(2 * order))
        throw DomainError("dirichlet lattice has no free site: N must be >= 2n");
    return Lattice{length, sites, bc, bc == Boundary::dirichlet ? order : 0};
}

LatticeField::LatticeField(const Lattice& lattice, std::vector<double> values)
    : LatticeField(lattice, 0, std::move(values)) {}

LatticeField::LatticeField(const Lattice& lattice, Index first, std::vector<double> values)
    : lattice_(lattice), first_(first), values_(std::move(values)) {
    if (lattice_.bc == Boundary::periodic) {
        if (first_ != 0 || values_.size() != lattice_.sites)
            throw ShapeError("periodic field must hold exactly N values");
    } else if (first_ > 0 || last() < Index(lattice_.sites)) {
        throw ShapeError("dirichlet field support must contain sites 0..N");
    }
}

LatticeField LatticeField::zeros(const Lattice& lattice) {
    return LatticeField(lattice, std::vector<double>(lattice.site_count(), 0.0));
}

double LatticeField::operator[](Index i) const {
    if (lattice_.bc == Boundary::periodic) return values_[static_cast<std::size_t>(wrap(i, Index(lattice_.sites)))];
    if (i < first_ || i > last()) return 0.0;
    return values_[static_cast<std::size_t>(i - first_)];
}

std::vector<double> LatticeField::site_values() const {
    std::vector<double> out(lattice_.site_count());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*this)[Index(i)];
    return out;
}

void require_same_lattice(const LatticeField& a, const LatticeField& b, const char* what) {
    if (!(a.lattice() == b.lattice())) throw ShapeError(std::string(what) + ": lattice mismatch");
}

LatticeField dplus(const LatticeField& f) {
    const double inv = 1.0 / f.spacing();
    if (f.lattice().bc == Boundary::periodic)
        return build_periodic(f.lattice(), [&](Index i) { return (f[i + 1] - f[i]) * inv; });
    return build(f.lattice(), f.first() - 1, f.last(), [&](Index i) { return (f[i + 1] - f[i]) * inv; });
}

LatticeField dminus(const LatticeField& f) {
    const double inv = 1.0 / f.spacing();
    if (f.lattice().bc == Boundary::periodic)
        return build_periodic(f.lattice(), [&](Index i) { return (f[i] - f[i - 1]) * inv; });
    return build(f.lattice(), f.first(), f.last() + 1, [&](Index i) { return (f[i] - f[i - 1]) * inv; });
}

LatticeField laplacian(const LatticeField& f) {
    const double h = f.spacing();
    const double inv = 1.0 / (h * h);
    auto stencil = [&](Index i) { return (f[i + 1] + f[i - 1] - 2.0 * f[i]) * inv; };
    if (f.lattice().bc == Boundary::periodic) return build_periodic(f.lattice(), stencil);
    return build(f.lattice(), f.first() - 1, f.last() + 1, stencil);
}

LatticeField dalpha(const LatticeField& f, int alpha) {
    if (alpha < 0) throw DomainError("derivative order must be >= 0");
    LatticeField out = f;
    for (int k = 0; k < alpha / 2; ++k) out = laplacian(out);
    if (alpha % 2 == 1) out = dplus(out);
    return out;
}

LatticeField sample(const std::function<double(double)>& g, const Lattice& lattice) {
    const double h = lattice.spacing();
    std::vector<double> values(lattice.site_count());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = g(static_cast<double>(i) * h);
    if (lattice.bc == Boundary::dirichlet) {
        // The clamped ends themselves must carry zero data; the remaining frozen sites are
        // forced to zero as the constraint prescribes.
        if (std::abs(g(0.0)) > 1e-10 || std::abs(g(lattice.length)) > 1e-10)
            throw ConsistencyError("sampled data does not vanish at the clamped ends");
        for (std::size_t i = 0; i < values.size(); ++i)
            if (lattice.is_frozen(Index(i))) values[i] = 0.0;
    }
    return LatticeField(lattice, std::move(values));
}

double inner(const LatticeField& f, const LatticeField& g) {
    require_same_lattice(f, g, "inner");
    double sum = 0.0;
    if (f.lattice().bc == Boundary::periodic) {
        const auto a = f.values();
        const auto b = g.values();
        for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    } else {
        const Index lo = std::max(f.first(), g.first());
        const Index hi = std::min(f.last(), g.last());
        for (Index i = lo; i <= hi; ++i) sum += f[i] * g[i];
    }
    return f.spacing() * sum;
}

double inner_interval(const LatticeField& f, const LatticeField& g) {
    require_same_lattice(f, g, "inner_interval");
    double sum = 0.0;
    for (Index i = 0; i < Index(f.lattice().sites); ++i) sum += f[i] * g[i];
    return f.spacing() * sum;
}

double eps_norm(const LatticeField& u, const LatticeField& v, int order) {
    require_same_lattice(u, v, "eps_norm");
    double sq = inner(v, v) + inner(u, u);
    LatticeField even = u;  // Delta^(k/2) u, advanced every second order
    for (int k = 1; k <= order; ++k) {
        if (k % 2 == 0) {
            even = laplacian(even);
            sq += inner(even, even);
        } else {
            const LatticeField d = dplus(even);
            sq += inner(d, d);
        }
    }
    return std::sqrt(sq);
}

double max_abs(const LatticeField& f) {
    double m = 0.0;
    for (double x : f.values()) m = std::max(m, std::abs(x));
    return m;
}

namespace {

template <typename Op>
LatticeField combine(const LatticeField& a, const LatticeField& b, Op op) {
    require_same_lattice(a, b, "field arithmetic");
    if (a.lattice().bc == Boundary::periodic)
        return build_periodic(a.lattice(), [&](Index i) { return op(a[i], b[i]); });
    return build(a.lattice(), std::min(a.first(), b.first()), std::max(a.last(), b.last()),
                 [&](Index i) { return op(a[i], b[i]); });
}

}  // namespace

LatticeField operator+(const LatticeField& a, const LatticeField& b) {
    return combine(a, b, [](double x, double y) { return x + y; });
}

LatticeField operator-(const LatticeField& a, const LatticeField& b) {
    return combine(a, b, [](double x, double y) { return x - y; });
}

LatticeField operator*(double s, const LatticeField& a) {
    LatticeField out = a;
    for (double& x : out.values()) x *= s;
    return out;
}

}  // namespace gradnet
