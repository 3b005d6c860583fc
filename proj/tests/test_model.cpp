#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gradnet/errors.hpp"
#include "gradnet/model.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

using namespace gradnet;

namespace {

constexpr double kPi = std::numbers::pi;

ModelSpec linear_model(std::vector<double> a) {
    ModelSpec m;
    m.length = 2.0 * kPi;
    m.order = static_cast<int>(a.size()) - 1;
    m.coeffs = std::move(a);
    m.initial.displacement = {{1, 0.0, 1.0}};
    return m;
}

// Smallest nonzero eigenvalue of the periodic -Delta_eps matrix.
double poincare_oracle(double length, std::size_t n) {
    const double eps = length / static_cast<double>(n);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = Eigen::Index(i);
        m(r, r) = 2.0 / (eps * eps);
        m(r, Eigen::Index((i + 1) % n)) -= 1.0 / (eps * eps);
        m(r, Eigen::Index((i + n - 1) % n)) -= 1.0 / (eps * eps);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    const auto& ev = solver.eigenvalues();
    double smallest = INFINITY;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev[i] > 1e-9) smallest = std::min(smallest, ev[i]);
    return 1.0 / smallest;
}

const ValidationCheck* find_check(const ValidationReport& r, const std::string& name) {
    for (const auto& c : r.checks)
        if (c.name == name) return &c;
    return nullptr;
}

}  // namespace

TEST_CASE("reduce_quadratic examples") {
    const double diag[] = {1.0, 2.0, 3.0};
    auto a = reduce_quadratic(SquareMatrix::diagonal(diag));
    CHECK(a == std::vector<double>{1.0, 2.0, 3.0});

    SquareMatrix q(3);
    q(0, 2) = q(2, 0) = 1.0;
    a = reduce_quadratic(q);
    REQUIRE(a.size() == 3);
    CHECK(a[0] == 0.0);
    CHECK(a[1] == -2.0);
    CHECK(a[2] == 0.0);

    SquareMatrix odd(2);
    odd(0, 1) = odd(1, 0) = 5.0;
    a = reduce_quadratic(odd);
    CHECK(a == std::vector<double>{0.0, 0.0});
}

TEST_CASE("reduce_quadratic rejects a non-symmetric Q") {
    SquareMatrix q(2);
    q(0, 1) = 1.0;
    CHECK_THROWS_AS(reduce_quadratic(q), ValidationError);
    q(1, 0) = 1.0 + 1e-14;
    CHECK_NOTHROW(reduce_quadratic(q));
}

TEST_CASE("Q_02 term integrates by parts to -2 int |Du|^2") {
    // u = sum b_m sin(m x) on [0, 2 pi]: int 2 u u'' = -2 int |u'|^2, checked by midpoint quadrature.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    double b[4];
    for (double& x : b) x = coef(rng);
    const int points = 512;
    double lhs = 0.0;
    double grad = 0.0;
    for (int j = 0; j < points; ++j) {
        const double x = 2.0 * kPi * (j + 0.5) / points;
        double u = 0.0, du = 0.0, ddu = 0.0;
        for (int m = 1; m <= 4; ++m) {
            u += b[m - 1] * std::sin(m * x);
            du += b[m - 1] * m * std::cos(m * x);
            ddu -= b[m - 1] * m * m * std::sin(m * x);
        }
        lhs += 2.0 * u * ddu;
        grad += du * du;
    }
    SquareMatrix q(3);
    q(0, 2) = q(2, 0) = 1.0;
    const auto a = reduce_quadratic(q);
    CHECK(lhs == doctest::Approx(a[1] * grad).epsilon(1e-12));
}

TEST_CASE("validate_model examples") {
    auto strict = validate_model(linear_model({1.0, 0.0, 1.0}));
    CHECK(strict.ok);
    CHECK(strict.admissibility == Admissibility::strict);

    auto degenerate = validate_model(linear_model({1.0, 0.0, 0.0}));
    CHECK_FALSE(degenerate.ok);
    const auto* an = find_check(degenerate, "A_n != 0");
    REQUIRE(an != nullptr);
    CHECK_FALSE(an->passed);
    CHECK(degenerate.to_text().find("A_n") != std::string::npos);

    const double kappa = compute_kappa(2.0 * kPi, 2.0 * kPi / 16.0);
    const double small = 0.4 / kappa;
    auto relaxed = validate_model(linear_model({1.0, -small, 1.0}));
    CHECK(relaxed.ok);
    CHECK(relaxed.admissibility == Admissibility::relaxed);

    const double large = 0.6 / kappa;
    auto rejected = validate_model(linear_model({1.0, -large, 1.0}));
    CHECK_FALSE(rejected.ok);
    CHECK(rejected.admissibility == Admissibility::none);
}

TEST_CASE("validate_model nonlinearity checks") {
    auto m = linear_model({1.0, 0.0, 1.0});
    m.nonlinearity = PolynomialR({{4, 0, 0.1}, {0, 4, 0.1}});
    CHECK(validate_model(m).ok);

    m.nonlinearity = PolynomialR({{2, 0, 1.0}});
    CHECK_FALSE(validate_model(m).ok);

    m.nonlinearity = PolynomialR({{4, 0, -1.0}});
    auto r = validate_model(m);
    CHECK_FALSE(r.ok);
    CHECK_FALSE(find_check(r, "R nonnegativity certificate")->passed);

    auto chain = linear_model({1.0, 1.0});
    chain.nonlinearity = PolynomialR({{0, 4, 1.0}});
    CHECK_FALSE(validate_model(chain).ok);
}

TEST_CASE("compute_kappa matches the eigen-oracle") {
    const double length = 2.0 * kPi;
    for (std::size_t n : {8u, 16u, 32u, 128u}) {
        const double eps0 = length / static_cast<double>(n);
        CHECK(compute_kappa(length, eps0) == doctest::Approx(poincare_oracle(length, n)).epsilon(1e-10));
    }
    CHECK(compute_kappa(length, kPi / 8.0) == doctest::Approx(1.0129507467218792).epsilon(1e-14));
    CHECK(poincare_oracle(length, 1024) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("compute_kappa is nondecreasing and guards its domain") {
    const double length = 2.0 * kPi;
    double prev = 0.0;
    for (int j = 1; j < 100; ++j) {
        const double k = compute_kappa(length, length * j / 100.0);
        CHECK(k >= prev);
        prev = k;
    }
    CHECK_THROWS_AS(compute_kappa(length, 0.0), DomainError);
    CHECK_THROWS_AS(compute_kappa(length, -1.0), DomainError);
    CHECK_THROWS_AS(compute_kappa(length, length), DomainError);
}

TEST_CASE("eval_R examples") {
    PolynomialR quartic({{4, 0, 1.0}, {0, 4, 1.0}});
    auto d = eval_R(quartic, 1.0, 2.0);
    CHECK(d.value == 17.0);
    CHECK(d.d0 == 4.0);
    CHECK(d.d1 == 32.0);
    CHECK(d.d01 == 0.0);
    CHECK(d.d11 == 48.0);

    PolynomialR mixed({{2, 2, 1.0}});
    d = eval_R(mixed, 1.0, 1.0);
    CHECK(d.value == 1.0);
    CHECK(d.d0 == 2.0);
    CHECK(d.d1 == 2.0);
    CHECK(d.d01 == 4.0);
    CHECK(d.d11 == 2.0);

    CHECK(eval_R(quartic, 0.0, 0.0).value == 0.0);
    CHECK(eval_R(PolynomialR({{3, 1, 2.0}, {1, 5, -1.0}}), 0.0, 0.0).value == 0.0);
}

TEST_CASE("eval_R agrees with central differences") {
    PolynomialR r({{4, 0, 0.3}, {1, 3, -0.7}, {2, 2, 1.1}, {0, 5, 0.2}});
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pick(-1.5, 1.5);
    const double h = 1e-5;
    for (int trial = 0; trial < 100; ++trial) {
        const double x = pick(rng), y = pick(rng);
        const auto d = eval_R(r, x, y);
        const double fd0 = (r.value(x + h, y) - r.value(x - h, y)) / (2 * h);
        const double fd1 = (r.value(x, y + h) - r.value(x, y - h)) / (2 * h);
        const double fd01 = (eval_R(r, x + h, y).d1 - eval_R(r, x - h, y).d1) / (2 * h);
        const double fd11 = (eval_R(r, x, y + h).d1 - eval_R(r, x, y - h).d1) / (2 * h);
        CHECK(d.d0 == doctest::Approx(fd0).epsilon(1e-6));
        CHECK(d.d1 == doctest::Approx(fd1).epsilon(1e-6));
        CHECK(d.d01 == doctest::Approx(fd01).epsilon(1e-6));
        CHECK(d.d11 == doctest::Approx(fd11).epsilon(1e-6));
        double g0 = 0.0, g1 = 0.0;
        r.gradient(x, y, g0, g1);
        CHECK(g0 == doctest::Approx(d.d0).epsilon(1e-14));
        CHECK(g1 == doctest::Approx(d.d1).epsilon(1e-14));
    }
}

TEST_CASE("eval_initial examples") {
    ModelSpec m = linear_model({0.0, 0.0, 1.0});
    m.length = 3.0;
    m.initial.displacement = {{1, 0.0, 1.0}};
    CHECK(eval_initial(m, InitialField::displacement, 0.75, 0) == doctest::Approx(1.0).epsilon(1e-15));

    ModelSpec clamped = linear_model({0.0, 0.0, 1.0});
    clamped.bc = Boundary::dirichlet;
    clamped.initial.kind = InitialKind::clamped;
    clamped.initial.envelope_exponent = 2;
    clamped.initial.displacement = {{0, 1.0, 0.0}};
    CHECK(eval_initial(clamped, InitialField::displacement, 0.0, 1) == 0.0);
    CHECK(eval_initial(clamped, InitialField::displacement, clamped.length, 1) == doctest::Approx(0.0));
    const double x = 1.3, l = clamped.length;
    const double env = x * (l - x) / (l * l);
    CHECK(eval_initial(clamped, InitialField::displacement, x, 0) == doctest::Approx(env * env).epsilon(1e-14));
    CHECK_THROWS_AS(eval_initial(clamped, InitialField::displacement, x, 7), DomainError);
}

TEST_CASE("eval_initial derivatives match finite differences") {
    ModelSpec m = linear_model({0.0, 0.0, 1.0});
    m.initial.displacement = {{2, 0.0, 1.0}};
    const double k = 2.0;
    for (double x : {0.3, 1.7, 4.0}) {
        CHECK(eval_initial(m, InitialField::displacement, x, 4) ==
              doctest::Approx(std::pow(k, 4) * std::sin(k * x)).epsilon(1e-12));
    }

    ModelSpec clamped = linear_model({0.0, 0.0, 1.0});
    clamped.bc = Boundary::dirichlet;
    clamped.initial.kind = InitialKind::clamped;
    clamped.initial.envelope_exponent = 3;
    clamped.initial.displacement = {{1, 0.5, 0.8}, {2, -0.3, 0.0}};
    const double h = 1e-3;
    for (int d = 0; d < 5; ++d) {
        for (double x : {0.9, 2.5, 4.4}) {
            auto f = [&](double y) { return eval_initial(clamped, InitialField::displacement, y, d); };
            const double fd = (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
            CHECK(eval_initial(clamped, InitialField::displacement, x, d + 1) == doctest::Approx(fd).epsilon(1e-7));
        }
    }
}

TEST_CASE("check_well_formed guards structure") {
    ModelSpec m = linear_model({0.0, 0.0, 1.0});
    CHECK_NOTHROW(check_well_formed(m));
    ModelSpec bad = m;
    bad.coeffs.pop_back();
    CHECK_THROWS_AS(check_well_formed(bad), ValidationError);
    bad = m;
    bad.bc = Boundary::dirichlet;
    CHECK_THROWS_AS(check_well_formed(bad), ValidationError);
    bad = m;
    bad.length = -1.0;
    CHECK_THROWS_AS(check_well_formed(bad), ValidationError);
}
