#include <doctest.h>

#include <cmath>
#include <numbers>

#include "twistlab/errors.hpp"
#include "twistlab/rmt.hpp"

using namespace twistlab;

namespace {

double as_double(const Rational& r) { return double(r.numerator()) / double(r.denominator()); }

// prod_{j=1}^{k-1} j!/(2j)! times 2^{k(k+1)/2}, in long double.
long double g_oracle(int k) {
    long double g = std::pow(2.0L, k * (k + 1) / 2);
    for (int j = 1; j < k; ++j) g *= std::tgamma((long double)(j + 1)) / std::tgamma((long double)(2 * j + 1));
    return g;
}

// M_O(N, k) from Gamma functions in long double.
long double mo_oracle(int N, int k) {
    long double v = std::pow(2.0L, 2 * N * k);
    for (int j = 1; j <= N; ++j)
        v *= std::exp(std::lgamma((long double)(N + j - 1)) + std::lgamma(k + j - 0.5L) - std::lgamma(j - 0.5L) -
                      std::lgamma((long double)(k + j + N - 1)));
    return v;
}

// Simpson rule on [a, b] with n (even) panels.
template <class F>
double simpson(F f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * f(a + h * i);
    return s * h / 3;
}

}  // namespace

TEST_CASE("M_O product examples") {
    for (int N = 1; N <= 50; ++N) {
        CHECK(mo_product(N, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(mo_product(N, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(mo_product(N, 2.0) == doctest::Approx(4.0 * N + 2).epsilon(1e-12));
    }
    CHECK(mo_product(1, 2.0) == doctest::Approx(6.0).epsilon(1e-13));
    for (int N : {1, 3, 7, 20})
        for (int k = 1; k <= 5; ++k) CHECK(mo_product(N, double(k)) == doctest::Approx(double(mo_oracle(N, k))).epsilon(1e-11));
    CHECK_THROWS_AS(mo_product(3, cplx(-0.5, 0)), DomainError);
    CHECK_THROWS_AS(mo_product(3, cplx(-1.5 + 1e-10, 0)), DomainError);
    CHECK_THROWS_AS(mo_product(0, 1.0), DomainError);
}

TEST_CASE("g_k and the polynomial form") {
    CHECK(g_rational(0) == Rational(1));
    CHECK(g_rational(1) == Rational(2));
    CHECK(g_rational(2) == Rational(4));
    CHECK(g_rational(3) == Rational(8, 3));
    CHECK(g_rational(4) == Rational(16, 45));
    for (int k = 1; k <= 6; ++k) {
        CHECK(as_double(g_rational(k)) == doctest::Approx(double(g_oracle(k))).epsilon(1e-13));
        CHECK(g_analytic(double(k)) == doctest::Approx(as_double(g_rational(k))).epsilon(1e-10));
    }
    for (int N = 1; N <= 50; ++N) {
        CHECK(mo_polynomial(N, 0) == Rational(1));
        CHECK(mo_polynomial(N, 1) == Rational(2));
        CHECK(mo_polynomial(N, 2) == Rational(4 * N + 2));
        for (int k = 3; k <= 4; ++k)
            CHECK(as_double(mo_polynomial(N, k)) == doctest::Approx(mo_product(N, double(k))).epsilon(1e-10));
    }
}

TEST_CASE("contour form agrees with the closed forms") {
    CHECK(mo_contour(5, 1) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(mo_contour(5, 2) == doctest::Approx(22.0).epsilon(1e-10));
    for (int N = 1; N <= 10; ++N)
        for (int k = 1; k <= 4; ++k) {
            CAPTURE(N);
            CAPTURE(k);
            CHECK(mo_contour(N, k) == doctest::Approx(as_double(mo_polynomial(N, k))).epsilon(1e-8));
        }
    CHECK_THROWS_AS(mo_contour(3, 5), DomainError);
}

TEST_CASE("large-N asymptotics M_O(N,s) ~ g_s N^{s(s-1)/2}") {
    for (double s : {0.5, 1.0, 1.5, 2.0}) {
        const double ratio = mo_product(200, s) / (g_analytic(s) * std::pow(200.0, 0.5 * s * (s - 1)));
        CHECK(std::abs(ratio - 1.0) < 0.02);
    }
}

TEST_CASE("residue at s = -1/2") {
    CHECK(residue_h(1) == doctest::Approx(1.0 / (2 * std::numbers::pi)).epsilon(1e-13));
    CHECK(residue_h(2) == doctest::Approx(8.0 / (3 * std::numbers::pi * std::numbers::pi)).epsilon(1e-13));
    for (int N = 1; N <= 10; ++N) CHECK(residue_numeric(N) == doctest::Approx(residue_h(N)).epsilon(1e-6));
    CHECK(std::abs(residue_h(100) / h_asym(100) - 1.0) < 0.05);
}

TEST_CASE("Mellin density at N = 5: normalization and moments") {
    const MellinDensity p(5);
    const double top = std::sqrt(p.support_max());
    // t = u^2 removes the t^{-1/2} edge; the head below u0 comes from the cdf
    const double u0 = 1e-3;
    const auto moment = [&](int k) {
        const double head = k == 0 ? p.cdf(u0 * u0) : 0.0;
        return head + simpson([&](double u) { return 2 * u * std::pow(u * u, k) * p.density(u * u); }, u0, top, 20000);
    };
    CHECK(std::abs(moment(0) - 1.0) < 1e-6);
    CHECK(std::abs(p.cdf(p.support_max() * (1 - 1e-12)) - 1.0) < 1e-6);
    for (int k = 1; k <= 3; ++k) {
        const double exact = as_double(mo_polynomial(5, k));
        CHECK(std::abs(moment(k) - exact) / exact < 1e-4);
    }
    CHECK(p.density(p.support_max()) == 0.0);
    CHECK_THROWS_AS(p.density(1e-13), DomainError);
    CHECK_THROWS_AS(MellinDensity(1), DomainError);
    // the small-t law holds down to the resolved floor
    CHECK(p.density(1e-12) * 1e-6 / residue_h(5) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(p.cdf(1e-12) / (2e-6 * residue_h(5)) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("small-t law at N = 20") {
    const MellinDensity p(20);
    CHECK(p.density(1e-6) * 1e-3 / residue_h(20) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("CLT abscissa map") {
    const MellinDensity p(20);
    const double x = 0.3, t = clt_abscissa_to_t(20, x);
    CHECK(t == doctest::Approx(std::exp(x * std::sqrt(std::log(20.0))) / std::sqrt(20.0)));
    CHECK(clt_density(p, x) == doctest::Approx(p.density(t) * t * std::sqrt(std::log(20.0))));
}

TEST_CASE("Haar draws are reproducible and lie in [0, 4^N]") {
    CHECK(haar_sample_sodd(3, 42) == haar_sample_sodd(3, 42));
    const auto v = haar_samples(2, 2000, 7);
    CHECK(v == haar_samples(2, 2000, 7));
    for (double x : v) {
        CHECK(x >= 0.0);
        CHECK(x <= 16.0 + 1e-9);
    }
}
