#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gradnet {

enum class Boundary { periodic, dirichlet };

std::string_view to_string(Boundary bc);
Boundary parse_boundary(std::string_view text);

/// Dense row-major square matrix, used for the quadratic form Q.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t size) : size_(size), data_(size * size, 0.0) {}

    std::size_t size() const noexcept { return size_; }
    double operator()(std::size_t row, std::size_t col) const { return data_[row * size_ + col]; }
    double& operator()(std::size_t row, std::size_t col) { return data_[row * size_ + col]; }

    static SquareMatrix diagonal(std::span<const double> diag);

private:
    std::size_t size_ = 0;
    std::vector<double> data_;
};

/// One term c * xi0^p * xi1^q of the nonlinear energy density.
struct Monomial {
    int p = 0;
    int q = 0;
    double c = 0.0;
};

/// Value, gradient and the two second partials of R needed by the discrete chain rule.
struct RDerivatives {
    double value = 0.0;
    double d0 = 0.0;
    double d1 = 0.0;
    double d01 = 0.0;
    double d11 = 0.0;
};

/// Polynomial nonlinearity R(xi0, xi1) = sum c * xi0^p * xi1^q.
class PolynomialR {
public:
    PolynomialR() = default;
    explicit PolynomialR(std::vector<Monomial> terms) : terms_(std::move(terms)) {}

    const std::vector<Monomial>& terms() const noexcept { return terms_; }
    bool is_zero() const;
    RDerivatives eval(double xi0, double xi1) const;
    /// Only the first partials; the hot path of the nonlinear force.
    void gradient(double xi0, double xi1, double& d0, double& d1) const;
    double value(double xi0, double xi1) const;
    bool depends_on_gradient() const;

private:
    std::vector<Monomial> terms_;
};

RDerivatives eval_R(const PolynomialR& r, double xi0, double xi1);

/// u = sum_m cos_coeff * cos(k_m x) + sin_coeff * sin(k_m x), k_m = 2 pi m / L.
struct TrigTerm {
    int mode = 0;
    double cos_coeff = 0.0;
    double sin_coeff = 0.0;
};

enum class InitialKind { trig, clamped };
enum class InitialField { displacement, velocity };

/// Analytic initial data. The clamped family multiplies a trig polynomial by the
/// envelope (x (L - x) / L^2)^m, which vanishes to order m at both ends.
struct InitialData {
    InitialKind kind = InitialKind::trig;
    int envelope_exponent = 0;
    std::vector<TrigTerm> displacement;
    std::vector<TrigTerm> velocity;
};

struct ModelSpec {
    double length = 0.0;
    int order = 1;
    Boundary bc = Boundary::periodic;
    /// Reduced coefficients A_0..A_n; always populated (from Q when Q is given).
    std::vector<double> coeffs;
    std::optional<SquareMatrix> quadratic;
    PolynomialR nonlinearity;
    InitialData initial;
    double horizon = 1.0;

    bool is_linear() const { return nonlinearity.is_zero(); }
};

/// Fills `coeffs` from `quadratic`. Throws ValidationError on a non-symmetric Q.
ModelSpec with_quadratic(ModelSpec spec, SquareMatrix q);

/// Structural checks that a parser must enforce (sizes, signs of L and T, data family
/// vs boundary kind). Throws ValidationError.
void check_well_formed(const ModelSpec& spec);

std::vector<double> reduce_quadratic(const SquareMatrix& q);

enum class Admissibility { strict, relaxed, none };
std::string_view to_string(Admissibility a);

struct ValidationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    Admissibility admissibility = Admissibility::none;
    double kappa = 0.0;
    double kappa_mesh = 0.0;
    std::vector<std::string> notes;
    bool ok = false;

    std::string to_text() const;
};

/// Default mesh bound used for the relaxed admissibility test when none is supplied.
double default_kappa_mesh(double length);

ValidationReport validate_model(const ModelSpec& spec, std::optional<double> eps0 = {});

/// Discrete Poincare constant: sup over eps in (0, eps0] of 1 / lambda_1(-Delta_eps).
double compute_kappa(double length, double eps0);

double eval_initial(const ModelSpec& spec, InitialField field, double x, int derivative);

}  // namespace gradnet
