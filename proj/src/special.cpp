#include "twistlab/special.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "twistlab/errors.hpp"

namespace twistlab {

namespace {

// B_2, B_4, ..., B_26
constexpr std::array<double, 13> kBernoulli = {
    1.0 / 6,         -1.0 / 30,           1.0 / 42,       -1.0 / 30,        5.0 / 66,
    -691.0 / 2730,   7.0 / 6,             -3617.0 / 510,  43867.0 / 798,    -174611.0 / 330,
    854513.0 / 138,  -236364091.0 / 2730, 8553103.0 / 6,
};

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

bool is_nonpositive_integer(cplx z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

cplx stirling(cplx z) {
    cplx sum = (z - 0.5) * std::log(z) - z + kHalfLog2Pi;
    const cplx inv = 1.0 / z;
    const cplx inv2 = inv * inv;
    cplx pw = inv;
    for (int k = 1; k <= 12; ++k) {
        sum += kBernoulli[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * pw;
        pw *= inv2;
    }
    return sum;
}

}  // namespace

cplx log_gamma(cplx z) {
    if (is_nonpositive_integer(z)) throw DomainError("Gamma pole at " + std::to_string(z.real()));
    cplx shift = 0.0;
    while (z.real() < 15.0 && !(std::abs(z.imag()) >= 15.0 && z.real() >= 0.0)) {
        shift += std::log(z);
        z += 1.0;
    }
    return stirling(z) - shift;
}

cplx gamma(cplx z) { return std::exp(log_gamma(z)); }

double log_gamma(double x) { return log_gamma(cplx(x, 0.0)).real(); }

cplx log_barnes_g(cplx w) {
    if (is_nonpositive_integer(w)) throw DomainError("Barnes G vanishes at " + std::to_string(w.real()));
    cplx shift = 0.0;
    while (std::abs(w) < 20.0 || w.real() < 0.0) {
        shift += log_gamma(w);
        w += 1.0;
    }
    const cplx z = w - 1.0;
    const cplx lz = std::log(z);
    const cplx z2 = z * z;
    cplx sum = 0.5 * z2 * lz - 0.75 * z2 + z * kHalfLog2Pi - lz / 12.0 + kZetaPrimeMinusOne;
    const cplx inv2 = 1.0 / z2;
    cplx pw = inv2;
    for (int k = 1; k <= 11; ++k) {
        sum += kBernoulli[k] / (4.0 * k * (k + 1.0)) * pw;
        pw *= inv2;
    }
    return sum - shift;
}

cplx barnes_g(cplx z) {
    if (is_nonpositive_integer(z)) return 0.0;
    return std::exp(log_barnes_g(z));
}

double barnes_g(double x) { return barnes_g(cplx(x, 0.0)).real(); }

cplx zeta(cplx s) {
    if (s == cplx(1.0, 0.0)) throw DomainError("zeta pole at s = 1");
    constexpr int N = 20;
    cplx sum = 0.0;
    for (int n = 1; n < N; ++n) sum += std::exp(-s * std::log(double(n)));
    const double logN = std::log(double(N));
    const cplx Ns = std::exp(-s * logN);
    sum += double(N) * Ns / (s - 1.0) + 0.5 * Ns;
    // tail: B_2k/(2k)! s(s+1)...(s+2k-2) N^{-s-2k+1}
    cplx rising = s;
    cplx pw = Ns / double(N);
    double fact = 2.0;
    for (int k = 1; k <= 12; ++k) {
        sum += kBernoulli[k - 1] / fact * rising * pw;
        rising *= (s + double(2 * k - 1)) * (s + double(2 * k));
        pw /= double(N) * double(N);
        fact *= double(2 * k + 1) * double(2 * k + 2);
    }
    return sum;
}

}  // namespace twistlab
