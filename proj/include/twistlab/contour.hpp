#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace twistlab {

/// k-fold trapezoidal quadrature on a product of circles |z_j| = r_j, M nodes
/// each, for integrands of the form
///
///   prod_j S_j(z_j) * prod_{i<j} P_ij(z_i, z_j) * prod_p (c0_p + c1_p (prod_j A_pj(z_j) + prod_j B_pj(z_j)))
///
/// The caller fills the tables; S_j must already include the dz_j/(2 pi i) = z_j dtheta/(2 pi) factor
/// (that is, a factor z_j). The mixed prime product is optional.
struct TorusIntegrand {
    int k = 1;
    int M = 64;
    std::vector<double> radii;                       // r_j
    std::vector<std::vector<std::complex<double>>> z;  // z[j][m] = r_j exp(2 pi i m / M)
    std::vector<std::vector<std::complex<double>>> single;  // [j][m]
    std::vector<std::vector<std::complex<double>>> pair;    // [pair_index(i,j)][mi * M + mj]

    // mixed prime product, SoA: [j][m * P + p]
    std::size_t primes = 0;
    std::vector<double> c0, c1;
    std::vector<std::vector<double>> a_re, a_im, b_re, b_im;

    /// Integrand real on the real axis: sum over half of the first circle only.
    bool conjugate_symmetric = false;

    int pair_index(int i, int j) const { return j * (j - 1) / 2 + i; }

    /// Allocates z/single/pair (single = 1, pair = 1). Radii r_j = r0 (1 + (j+1)/(8k)).
    static TorusIntegrand make(int k, int M, double r0);
    void allocate_mixed(std::size_t prime_count);
};

/// E[V(z) (sum_j z_j)^d / d!] over the grid for d = 0..degree, i.e. the
/// coefficient of x^d of the k-fold integral of V(z) exp(x sum_j z_j).
std::vector<std::complex<double>> torus_moments(const TorusIntegrand& in, int degree);

/// (-1)^{k(k-1)/2} 2^k / k!
double contour_prefactor(int k);

}  // namespace twistlab
