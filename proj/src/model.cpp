#include "gradnet/model.hpp"

#include "gradnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace gradnet {

namespace {

double ipow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

// k (k-1) ... (k-j+1), the j-th derivative factor of x^k.
double falling(int k, int j) {
    double r = 1.0;
    for (int i = 0; i < j; ++i) r *= static_cast<double>(k - i);
    return r;
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

// d-th derivative of the trig polynomial at x; the quadrant is picked by d mod 4 so that
// no phase shifts enter the argument.
double trig_derivative(std::span<const TrigTerm> terms, double length, double x, int d) {
    double sum = 0.0;
    for (const auto& t : terms) {
        const double k = 2.0 * std::numbers::pi * t.mode / length;
        const double c = std::cos(k * x);
        const double s = std::sin(k * x);
        const double scale = ipow(k, d);
        double dc = 0.0;  // d^d/dx^d cos(kx) / k^d
        double ds = 0.0;  // d^d/dx^d sin(kx) / k^d
        switch (d % 4) {
            case 0: dc = c; ds = s; break;
            case 1: dc = -s; ds = c; break;
            case 2: dc = -c; ds = -s; break;
            default: dc = s; ds = -c; break;
        }
        if (t.mode == 0 && d > 0) continue;
        sum += scale * (t.cos_coeff * dc + t.sin_coeff * ds);
    }
    return sum;
}

// j-th derivative of (s (1 - s))^m with s = x / L, written as a Leibniz sum over the two
// factors so that both endpoints evaluate to exact zeros.
double envelope_derivative(int m, double length, double x, int j) {
    const double s = x / length;
    const double r = 1.0 - s;
    double sum = 0.0;
    for (int a = 0; a <= j; ++a) {
        const int b = j - a;
        if (a > m || b > m) continue;
        const double fa = falling(m, a) * ipow(s, m - a);
        const double gb = falling(m, b) * ipow(r, m - b) * ((b % 2 == 0) ? 1.0 : -1.0);
        sum += binomial(j, a) * fa * gb;
    }
    return sum / ipow(length, j);
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

std::string_view to_string(Boundary bc) {
    return bc == Boundary::periodic ? "periodic" : "dirichlet";
}

Boundary parse_boundary(std::string_view text) {
    if (text == "periodic") return Boundary::periodic;
    if (text == "dirichlet" || text == "clamped") return Boundary::dirichlet;
    throw ValidationError("unknown boundary kind '" + std::string(text) + "'");
}

std::string_view to_string(Admissibility a) {
    switch (a) {
        case Admissibility::strict: return "strict";
        case Admissibility::relaxed: return "relaxed";
        default: return "none";
    }
}

SquareMatrix SquareMatrix::diagonal(std::span<const double> diag) {
    SquareMatrix m(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

bool PolynomialR::is_zero() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const Monomial& t) { return t.c == 0.0; });
}

bool PolynomialR::depends_on_gradient() const {
    return std::any_of(terms_.begin(), terms_.end(),
                       [](const Monomial& t) { return t.c != 0.0 && t.q > 0; });
}

RDerivatives PolynomialR::eval(double xi0, double xi1) const {
    RDerivatives r;
    for (const auto& t : terms_) {
        const double p = t.p;
        const double q = t.q;
        const double a0 = ipow(xi0, t.p);
        const double a1 = ipow(xi1, t.q);
        r.value += t.c * a0 * a1;
        if (t.p >= 1) r.d0 += t.c * p * ipow(xi0, t.p - 1) * a1;
        if (t.q >= 1) r.d1 += t.c * q * a0 * ipow(xi1, t.q - 1);
        if (t.p >= 1 && t.q >= 1) r.d01 += t.c * p * q * ipow(xi0, t.p - 1) * ipow(xi1, t.q - 1);
        if (t.q >= 2) r.d11 += t.c * q * (q - 1) * a0 * ipow(xi1, t.q - 2);
    }
    return r;
}

void PolynomialR::gradient(double xi0, double xi1, double& d0, double& d1) const {
    d0 = 0.0;
    d1 = 0.0;
    for (const auto& t : terms_) {
        if (t.p >= 1) d0 += t.c * t.p * ipow(xi0, t.p - 1) * ipow(xi1, t.q);
        if (t.q >= 1) d1 += t.c * t.q * ipow(xi0, t.p) * ipow(xi1, t.q - 1);
    }
}

double PolynomialR::value(double xi0, double xi1) const {
    double v = 0.0;
    for (const auto& t : terms_) v += t.c * ipow(xi0, t.p) * ipow(xi1, t.q);
    return v;
}

RDerivatives eval_R(const PolynomialR& r, double xi0, double xi1) { return r.eval(xi0, xi1); }

std::vector<double> reduce_quadratic(const SquareMatrix& q) {
    const std::size_t size = q.size();
    if (size == 0) throw ValidationError("quadratic form is empty");
    double scale = 0.0;
    for (std::size_t a = 0; a < size; ++a)
        for (std::size_t b = 0; b < size; ++b) scale = std::max(scale, std::abs(q(a, b)));
    for (std::size_t a = 0; a < size; ++a) {
        for (std::size_t b = a + 1; b < size; ++b) {
            if (std::abs(q(a, b) - q(b, a)) > 1e-12 * scale) {
                throw ValidationError("quadratic form Q is not symmetric at (" + std::to_string(a) +
                                      "," + std::to_string(b) + ")");
            }
        }
    }
    const int n = static_cast<int>(size) - 1;
    std::vector<double> coeffs(size, 0.0);
    for (int gamma = 0; gamma <= n; ++gamma) {
        double sum = 0.0;
        for (int alpha = 0; alpha <= n; ++alpha) {
            const int beta = 2 * gamma - alpha;
            if (beta < 0 || beta > n) continue;
            const double parity = ((alpha % 2 == 0) ? 1.0 : -1.0) + ((beta % 2 == 0) ? 1.0 : -1.0);
            sum += q(alpha, beta) * parity;
        }
        coeffs[gamma] = 0.5 * sum * ((gamma % 2 == 0) ? 1.0 : -1.0);
    }
    return coeffs;
}

ModelSpec with_quadratic(ModelSpec spec, SquareMatrix q) {
    spec.coeffs = reduce_quadratic(q);
    spec.order = static_cast<int>(q.size()) - 1;
    spec.quadratic = std::move(q);
    return spec;
}

void check_well_formed(const ModelSpec& spec) {
    if (!(spec.length > 0.0) || !std::isfinite(spec.length))
        throw ValidationError("domain length must be positive");
    if (spec.order < 1) throw ValidationError("gradient order n must be >= 1");
    if (spec.coeffs.size() != static_cast<std::size_t>(spec.order) + 1)
        throw ValidationError("expected " + std::to_string(spec.order + 1) + " coefficients A_0..A_n, got " +
                              std::to_string(spec.coeffs.size()));
    for (double a : spec.coeffs)
        if (!std::isfinite(a)) throw ValidationError("coefficients must be finite");
    if (!(spec.horizon > 0.0)) throw ValidationError("time horizon must be positive");
    for (const auto& t : spec.nonlinearity.terms()) {
        if (t.p < 0 || t.q < 0) throw ValidationError("monomial exponents must be nonnegative");
        if (!std::isfinite(t.c)) throw ValidationError("monomial coefficients must be finite");
    }
    const auto& init = spec.initial;
    if (init.kind == InitialKind::trig && spec.bc != Boundary::periodic)
        throw ValidationError("trig initial data requires periodic boundary conditions");
    if (init.kind == InitialKind::clamped) {
        if (spec.bc != Boundary::dirichlet)
            throw ValidationError("clamped initial data requires dirichlet boundary conditions");
        if (init.envelope_exponent < spec.order)
            throw ValidationError("clamped envelope exponent m must be >= n");
    }
    for (const auto* list : {&init.displacement, &init.velocity})
        for (const auto& t : *list)
            if (t.mode < 0) throw ValidationError("trig mode indices must be nonnegative");
}

double default_kappa_mesh(double length) { return length / 16.0; }

double compute_kappa(double length, double eps0) {
    if (!(eps0 > 0.0) || !(eps0 < length))
        throw DomainError("compute_kappa requires 0 < eps0 < L");
    const double s = std::sin(std::numbers::pi * eps0 / length);
    return 1.0 / ((4.0 / (eps0 * eps0)) * s * s);
}

ValidationReport validate_model(const ModelSpec& spec, std::optional<double> eps0) {
    ValidationReport report;
    const auto& a = spec.coeffs;
    const int n = spec.order;
    const double an = a.empty() ? 0.0 : a.back();
    const bool linear = spec.is_linear();

    report.checks.push_back({"A_n != 0", an != 0.0, "A_n = " + format_double(an)});

    // A_0 = 0 is the setting of the elastica and chain models; positivity of A_0 only
    // matters for the L^2 control of u in the nonlinear energy bound.
    const bool a0_ok = linear ? a.front() >= 0.0 : a.front() > 0.0;
    bool interior_nonneg = true;
    for (int alpha = 1; alpha < n; ++alpha) interior_nonneg = interior_nonneg && a[alpha] >= 0.0;
    const bool strict = a0_ok && an > 0.0 && interior_nonneg;
    report.checks.push_back({"strict admissibility", strict,
                             linear ? "A_0 >= 0 (linear model), A_n > 0, A_alpha >= 0"
                                    : "A_0 > 0, A_n > 0, A_alpha >= 0"});
    if (linear && a.front() == 0.0)
        report.notes.push_back("A_0 = 0 accepted: linear model, no L^2 control of u needed");

    report.kappa_mesh = eps0.value_or(default_kappa_mesh(spec.length));
    report.kappa = compute_kappa(spec.length, report.kappa_mesh);
    bool relaxed = false;
    if (!strict) {
        double lhs = 0.0;
        for (int alpha = 1; alpha < n; ++alpha)
            if (a[alpha] < 0.0) lhs += std::abs(a[alpha]) * std::pow(report.kappa, n - alpha);
        relaxed = a0_ok && an > 0.0 && lhs <= 0.5 * an;
        report.checks.push_back({"relaxed admissibility", relaxed,
                                 "sum |A_alpha| kappa^(n-alpha) = " + format_double(lhs) +
                                     " vs A_n/2 = " + format_double(0.5 * an) +
                                     ", kappa = " + format_double(report.kappa)});
        report.notes.push_back(
            "kappa is the discrete Poincare constant sup ||u||^2/||D_eps u||^2 over zero-average "
            "periodic fields at mesh " + format_double(report.kappa_mesh));
    }

    const auto& terms = spec.nonlinearity.terms();
    bool degree_ok = true;
    bool gradient_ok = true;
    bool certificate = true;
    for (const auto& t : terms) {
        if (t.c == 0.0) continue;
        degree_ok = degree_ok && (t.p + t.q >= 3);
        if (n == 1) gradient_ok = gradient_ok && t.q == 0;
        certificate = certificate && (t.p % 2 == 0) && (t.q % 2 == 0) && t.c >= 0.0;
    }
    report.checks.push_back({"R vanishes to third order", degree_ok, "every term has p + q >= 3"});
    report.checks.push_back({"R depends only on u when n = 1", gradient_ok, "n = " + std::to_string(n)});
    report.checks.push_back({"R nonnegativity certificate", certificate,
                             "even exponents and nonnegative coefficients"});
    if (!certificate)
        report.notes.push_back("R >= 0 could not be certified; the discrete energy bound may not hold");

    report.admissibility = strict ? Admissibility::strict : (relaxed ? Admissibility::relaxed : Admissibility::none);
    report.ok = an != 0.0 && degree_ok && gradient_ok && certificate && (strict || relaxed);
    return report;
}

std::string ValidationReport::to_text() const {
    std::ostringstream os;
    for (const auto& c : checks)
        os << (c.passed ? "[pass] " : "[FAIL] ") << c.name << ": " << c.detail << '\n';
    for (const auto& note : notes) os << "note: " << note << '\n';
    os << "admissibility: " << to_string(admissibility) << '\n';
    os << "status: " << (ok ? "pass" : "fail") << '\n';
    return os.str();
}

double eval_initial(const ModelSpec& spec, InitialField field, double x, int derivative) {
    if (derivative < 0 || derivative > 2 * spec.order + 2)
        throw DomainError("derivative order " + std::to_string(derivative) + " exceeds 2n+2 = " +
                          std::to_string(2 * spec.order + 2));
    const double tol = 1e-12 * spec.length;
    if (x < -tol || x > spec.length + tol) throw DomainError("position outside [0, L]");
    const auto& init = spec.initial;
    const auto& terms = field == InitialField::displacement ? init.displacement : init.velocity;
    if (init.kind == InitialKind::trig) return trig_derivative(terms, spec.length, x, derivative);

    double sum = 0.0;
    for (int j = 0; j <= derivative; ++j) {
        const double env = envelope_derivative(init.envelope_exponent, spec.length, x, j);
        if (env == 0.0) continue;
        sum += binomial(derivative, j) * env * trig_derivative(terms, spec.length, x, derivative - j);
    }
    return sum;
}

}  // namespace gradnet
