#include <doctest.h>

#include <cmath>
#include <numbers>

#include "twistlab/special.hpp"

using namespace twistlab;

TEST_CASE("log gamma against std::lgamma") {
    for (double x = 0.1; x < 60; x += 0.37) CHECK(log_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(1e-13));
    CHECK(std::abs(gamma(cplx(0.5, 0)) - std::sqrt(std::numbers::pi)) < 1e-13);
}

TEST_CASE("log gamma reflection |Gamma(1/2 + iy)|^2 = pi / cosh(pi y)") {
    for (double y : {0.3, 2.0, 11.0, 40.0, 300.0}) {
        const double lhs = 2.0 * log_gamma(cplx(0.5, y)).real();
        const double py = std::numbers::pi * y;
        const double rhs = std::log(2.0 * std::numbers::pi) - py - std::log1p(std::exp(-2.0 * py));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
    }
}

TEST_CASE("Barnes G") {
    CHECK(barnes_g(1.0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(barnes_g(2.0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(barnes_g(3.0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(barnes_g(4.0) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(barnes_g(5.0) == doctest::Approx(12.0).epsilon(1e-13));
    CHECK(barnes_g(0.0) == 0.0);
    CHECK(barnes_g(-2.0) == 0.0);
    // G(1/2) = 2^{1/24} e^{1/8} pi^{-1/4} A^{-3/2}, A the Glaisher-Kinkelin constant
    const double glaisher = 1.28242712910062263687;
    const double g_half = std::pow(2.0, 1.0 / 24) * std::exp(0.125) * std::pow(std::numbers::pi, -0.25) *
                          std::pow(glaisher, -1.5);
    CHECK(barnes_g(0.5) == doctest::Approx(g_half).epsilon(1e-12));
    // G(z + 1) = Gamma(z) G(z) off the real axis
    for (cplx z : {cplx(0.3, 1.7), cplx(2.5, -4.0), cplx(-0.7, 0.4)})
        CHECK(std::abs(barnes_g(z + 1.0) / (gamma(z) * barnes_g(z)) - 1.0) < 1e-11);
}

TEST_CASE("zeta") {
    CHECK(std::abs(zeta_near_one(cplx(2, 0)) - std::numbers::pi * std::numbers::pi / 6) < 1e-14);
    CHECK(std::abs(zeta(cplx(4, 0)) - std::pow(std::numbers::pi, 4) / 90) < 1e-14);
    // Laurent expansion at 1: 1/w + gamma - gamma_1 w + O(w^2)
    const cplx w(1e-4, 2e-4);
    const double gamma1 = -0.0728158454836767;
    CHECK(std::abs(zeta(1.0 + w) - 1.0 / w - kEulerGamma + gamma1 * w) < 1e-8);
    CHECK(std::abs(zeta(cplx(0, 0)) + 0.5) < 1e-12);
    CHECK(std::abs(zeta(cplx(-1, 0)) + 1.0 / 12) < 1e-12);
}
