#include "twistlab/contour.hpp"

#include <cmath>
#include <numbers>

#include "twistlab/errors.hpp"

namespace twistlab {

using cplx = std::complex<double>;

TorusIntegrand TorusIntegrand::make(int k, int M, double r0) {
    if (k < 1) throw DomainError("contour dimension must be positive");
    if (M < 2 || M % 2 != 0) throw DomainError("nodes per circle must be even and at least 2");
    TorusIntegrand t;
    t.k = k;
    t.M = M;
    t.radii.resize(k);
    t.z.assign(k, std::vector<cplx>(M));
    t.single.assign(k, std::vector<cplx>(M, 1.0));
    t.pair.assign(k * (k - 1) / 2, std::vector<cplx>(std::size_t(M) * M, 1.0));
    for (int j = 0; j < k; ++j) {
        t.radii[j] = r0 * (1.0 + double(j + 1) / (8.0 * k));
        for (int m = 0; m < M; ++m) t.z[j][m] = std::polar(t.radii[j], 2.0 * std::numbers::pi * m / M);
    }
    return t;
}

void TorusIntegrand::allocate_mixed(std::size_t prime_count) {
    primes = prime_count;
    c0.assign(prime_count, 0.0);
    c1.assign(prime_count, 0.0);
    const std::size_t n = std::size_t(M) * prime_count;
    a_re.assign(k, std::vector<double>(n, 1.0));
    a_im.assign(k, std::vector<double>(n, 0.0));
    b_re.assign(k, std::vector<double>(n, 1.0));
    b_im.assign(k, std::vector<double>(n, 0.0));
}

double contour_prefactor(int k) {
    double f = std::pow(2.0, k);
    for (int i = 2; i <= k; ++i) f /= i;
    return (k * (k - 1) / 2) % 2 == 0 ? f : -f;
}

namespace {

struct Walker {
    const TorusIntegrand& in;
    const int degree;
    const int k, M;
    const std::size_t P;

    // last-variable mixed tables transposed to [p * M + m]
    std::vector<double> la_re, la_im, lb_re, lb_im;
    // sa[j] = prod over variables 0..j of A (likewise sb for B)
    std::vector<std::vector<double>> sa_re, sa_im, sb_re, sb_im;
    std::vector<double> ones, zeros;
    std::vector<int> idx;
    std::vector<double> acc_re, acc_im;

    Walker(const TorusIntegrand& t, int d) : in(t), degree(d), k(t.k), M(t.M), P(t.primes) {
        idx.assign(k, 0);
        acc_re.resize(M);
        acc_im.resize(M);
        if (P == 0) return;
        const int last = k - 1;
        la_re.resize(P * M);
        la_im.resize(P * M);
        lb_re.resize(P * M);
        lb_im.resize(P * M);
        for (int m = 0; m < M; ++m)
            for (std::size_t p = 0; p < P; ++p) {
                la_re[p * M + m] = in.a_re[last][m * P + p];
                la_im[p * M + m] = in.a_im[last][m * P + p];
                lb_re[p * M + m] = in.b_re[last][m * P + p];
                lb_im[p * M + m] = in.b_im[last][m * P + p];
            }
        sa_re.assign(k, std::vector<double>(P));
        sa_im.assign(k, std::vector<double>(P));
        sb_re.assign(k, std::vector<double>(P));
        sb_im.assign(k, std::vector<double>(P));
        ones.assign(P, 1.0);
        zeros.assign(P, 0.0);
    }

    // Mixed prime product at every node of the last variable.
    void mixed_last() {
        for (int m = 0; m < M; ++m) {
            acc_re[m] = 1.0;
            acc_im[m] = 0.0;
        }
        if (P == 0) return;
        const int prev = k - 2;
        const double* sar = prev < 0 ? ones.data() : sa_re[prev].data();
        const double* sai = prev < 0 ? zeros.data() : sa_im[prev].data();
        const double* sbr = prev < 0 ? ones.data() : sb_re[prev].data();
        const double* sbi = prev < 0 ? zeros.data() : sb_im[prev].data();
        double* ar = acc_re.data();
        double* ai = acc_im.data();
        for (std::size_t p = 0; p < P; ++p) {
            const double xr = sar[p], xi = sai[p], yr = sbr[p], yi = sbi[p];
            const double q0 = in.c0[p], q1 = in.c1[p];
            const double* Ar = &la_re[p * M];
            const double* Ai = &la_im[p * M];
            const double* Br = &lb_re[p * M];
            const double* Bi = &lb_im[p * M];
            for (int m = 0; m < M; ++m) {
                const double tr = xr * Ar[m] - xi * Ai[m] + yr * Br[m] - yi * Bi[m];
                const double ti = xr * Ai[m] + xi * Ar[m] + yr * Bi[m] + yi * Br[m];
                const double gr = q0 + q1 * tr;
                const double gi = q1 * ti;
                const double nr = ar[m] * gr - ai[m] * gi;
                ai[m] = ar[m] * gi + ai[m] * gr;
                ar[m] = nr;
            }
        }
    }

    void update_running(int level, int m) {
        const std::size_t off = std::size_t(m) * P;
        const double* ar = &in.a_re[level][off];
        const double* ai = &in.a_im[level][off];
        const double* br = &in.b_re[level][off];
        const double* bi = &in.b_im[level][off];
        const double* xr = level == 0 ? ones.data() : sa_re[level - 1].data();
        const double* xi = level == 0 ? zeros.data() : sa_im[level - 1].data();
        const double* yr = level == 0 ? ones.data() : sb_re[level - 1].data();
        const double* yi = level == 0 ? zeros.data() : sb_im[level - 1].data();
        double* oar = sa_re[level].data();
        double* oai = sa_im[level].data();
        double* obr = sb_re[level].data();
        double* obi = sb_im[level].data();
        for (std::size_t p = 0; p < P; ++p) {
            oar[p] = xr[p] * ar[p] - xi[p] * ai[p];
            oai[p] = xr[p] * ai[p] + xi[p] * ar[p];
            obr[p] = yr[p] * br[p] - yi[p] * bi[p];
            obi[p] = yr[p] * bi[p] + yi[p] * br[p];
        }
    }

    double weight(int level, int m) const {
        if (!in.conjugate_symmetric || level != 0) return 1.0;
        return (m == 0 || m == M / 2) ? 1.0 : 2.0;
    }

    int extent(int level) const { return in.conjugate_symmetric && level == 0 ? M / 2 + 1 : M; }

    // Weighted sums of V * s^d over the grid below `level`.
    std::vector<cplx> walk(int level, cplx base, cplx s) {
        std::vector<cplx> sums(degree + 1, 0.0);
        if (level == k - 1) {
            mixed_last();
            for (int m = 0; m < extent(level); ++m) {
                cplx v = in.single[level][m] * cplx(acc_re[m], acc_im[m]);
                for (int i = 0; i < level; ++i) v *= in.pair[in.pair_index(i, level)][std::size_t(idx[i]) * M + m];
                const cplx sz = s + in.z[level][m];
                cplx term = base * v * weight(level, m);
                for (int d = 0; d <= degree; ++d) {
                    sums[d] += term;
                    term *= sz;
                }
            }
            return sums;
        }
        for (int m = 0; m < extent(level); ++m) {
            idx[level] = m;
            cplx v = base * in.single[level][m];
            for (int i = 0; i < level; ++i) v *= in.pair[in.pair_index(i, level)][std::size_t(idx[i]) * M + m];
            if (P > 0) update_running(level, m);
            const std::vector<cplx> sub = walk(level + 1, v, s + in.z[level][m]);
            const double w = weight(level, m);
            for (int d = 0; d <= degree; ++d) sums[d] += w * sub[d];
        }
        return sums;
    }
};

}  // namespace

std::vector<cplx> torus_moments(const TorusIntegrand& in, int degree) {
    if (degree < 0) throw DomainError("negative moment degree");
    if (int(in.z.size()) != in.k || int(in.single.size()) != in.k) throw DomainError("malformed torus integrand");
    Walker w(in, degree);
    std::vector<cplx> sums = w.walk(0, 1.0, 0.0);
    double count = 1.0;
    for (int j = 0; j < in.k; ++j) count *= in.M;
    double fact = 1.0;
    for (int d = 0; d <= degree; ++d) {
        if (d > 0) fact *= d;
        sums[d] /= count * fact;
        if (in.conjugate_symmetric) sums[d] = cplx(sums[d].real(), 0.0);
    }
    return sums;
}

}  // namespace twistlab
