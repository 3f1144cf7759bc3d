#pragma once

#include <complex>

namespace twistlab {

using cplx = std::complex<double>;

inline constexpr double kEulerGamma = 0.57721566490153286061;
inline constexpr double kZetaPrimeMinusOne = -0.16542114370045092921;

/// Principal-branch log Gamma: sum of principal logs along the upward shift,
/// then Stirling with 12 Bernoulli terms. DomainError at poles.
cplx log_gamma(cplx z);
cplx gamma(cplx z);
double log_gamma(double x);

/// log G(z) for Barnes' G, continuous off the non-positive real axis.
cplx log_barnes_g(cplx z);
/// G(z); exactly 0 at non-positive integers.
cplx barnes_g(cplx z);
double barnes_g(double x);

/// Riemann zeta by Euler-Maclaurin. Intended for Re s > -2; DomainError at s = 1.
cplx zeta(cplx s);
inline cplx zeta_near_one(cplx s) { return zeta(s); }

}  // namespace twistlab
