#include "twistlab/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "twistlab/contour.hpp"
#include "twistlab/errors.hpp"

namespace twistlab {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

cplx mo_product(int N, cplx s) {
    if (N < 1) throw DomainError("N must be at least 1");
    // poles of Gamma(s + j - 1/2): s = 1/2 - j - m
    const double u = s.real() + 0.5;
    if (u <= 0.5) {
        const double nearest = std::round(u);
        if (nearest <= 0.0 && std::abs(cplx(u - nearest, s.imag())) < 1e-8)
            throw DomainError("M_O(N, s) evaluated at a pole");
    }
    cplx acc = 2.0 * N * s * std::log(2.0);
    for (int j = 1; j <= N; ++j) {
        const cplx den_arg = s + double(j + N - 1);
        if (den_arg.imag() == 0.0 && den_arg.real() <= 0.0 && den_arg.real() == std::floor(den_arg.real()))
            return 0.0;
        acc += log_gamma(double(N + j - 1)) - log_gamma(double(j) - 0.5);
        acc += log_gamma(s + (double(j) - 0.5)) - log_gamma(den_arg);
    }
    return std::exp(acc);
}

double mo_product(int N, double s) { return mo_product(N, cplx(s, 0.0)).real(); }

Rational g_rational(int k) {
    if (k < 0) throw DomainError("k must be non-negative");
    Rational g(1);
    for (int i = 0; i < k * (k + 1) / 2; ++i) g *= 2;
    for (int j = 1; j <= k - 1; ++j) {
        // j!/(2j)! = 1/((j+1)(j+2)...(2j))
        std::int64_t den = 1;
        for (int i = j + 1; i <= 2 * j; ++i) den *= i;
        g /= den;
    }
    return g;
}

Rational mo_polynomial(std::int64_t N, int k) {
    if (k < 0) throw DomainError("k must be non-negative");
    Rational m = g_rational(k);
    for (int j = 1; j <= k - 1; ++j)
        for (int i = 0; i < j; ++i) m *= Rational(2 * N + i + j, 2);
    return m;
}

double mo_contour(int N, int k, const QuadratureSpec& quad) {
    if (k < 1 || k > 4) throw DomainError("contour form implemented for 1 <= k <= 4");
    if (quad.nodes < 16) throw DomainError("need at least 16 nodes per circle");
    const double r0 = quad.r0 > 0 ? quad.r0 : std::clamp(1.0 / N, 0.02, 0.09);
    TorusIntegrand t = TorusIntegrand::make(k, quad.nodes, r0);
    t.conjugate_symmetric = true;
    for (int j = 0; j < k; ++j)
        for (int m = 0; m < t.M; ++m) {
            const cplx z = t.z[j][m];
            t.single[j][m] = std::exp(double(N) * z) * std::pow(z, 2 - 2 * k);
        }
    for (int j = 1; j < k; ++j)
        for (int i = 0; i < j; ++i) {
            auto& tab = t.pair[t.pair_index(i, j)];
            for (int a = 0; a < t.M; ++a)
                for (int b = 0; b < t.M; ++b) {
                    const cplx zi = t.z[i][a], zj = t.z[j][b];
                    const cplx den = 1.0 - std::exp(-zi - zj);
                    if (std::abs(zi + zj) < 1e-12) throw DomainError("contour radii collide");
                    const cplx vd = zj * zj - zi * zi;
                    tab[std::size_t(a) * t.M + b] = vd * vd / den;
                }
        }
    const std::vector<cplx> mom = torus_moments(t, 0);
    return contour_prefactor(k) * mom[0].real();
}

cplx g_analytic(cplx s) {
    const cplx l = 0.5 * s * s * std::log(2.0) + log_barnes_g(1.0 + s) + 0.5 * log_gamma(1.0 + 2.0 * s) -
                   0.5 * log_barnes_g(1.0 + 2.0 * s) - 0.5 * log_gamma(1.0 + s);
    return std::exp(l);
}

double g_analytic(double s) { return g_analytic(cplx(s, 0.0)).real(); }

double residue_h(int N) {
    if (N < 1) throw DomainError("N must be at least 1");
    double l = -N * std::log(2.0) - log_gamma(double(N));
    for (int j = 1; j <= N; ++j)
        l += log_gamma(double(N + j - 1)) + log_gamma(double(j)) - log_gamma(j - 0.5) - log_gamma(j + N - 1.5);
    return std::exp(l);
}

double h_asym(double N) {
    return std::pow(2.0, -7.0 / 8.0) * barnes_g(0.5) * std::pow(kPi, -0.25) * std::pow(N, 3.0 / 8.0);
}

double residue_numeric(int N, double radius, int nodes) {
    cplx sum = 0.0;
    for (int m = 0; m < nodes; ++m) {
        const cplx w = std::polar(radius, 2.0 * kPi * (m + 0.5) / nodes);
        sum += mo_product(N, -0.5 + w) * w;
    }
    return (sum / double(nodes)).real();
}

// ---------------------------------------------------------------------------
// Mellin inversion
// ---------------------------------------------------------------------------

MellinDensity::MellinDensity(int N, const LineQuadratureSpec& spec) : N_(N), spec_(spec) {
    if (N < 2) throw DomainError("Mellin inversion needs N >= 2");
    if (spec.c <= 0) throw DomainError("line abscissa must be positive");
    if (!(spec.c_small > -0.5 && spec.c_small < 0)) throw DomainError("small-t abscissa must lie in (-1/2, 0)");
    if (spec.t_min <= 0) throw DomainError("t_min must be positive");
    upper_ = std::pow(4.0, N);
    // alias images sit e^{2 pi / h} away and are damped by (c + 1/2) per unit of log t
    large_ = make_line(spec.c, 40.0);
    small_ = make_line(spec.c_small, 28.0 / (spec.c_small + 0.5));
}

MellinDensity::Line MellinDensity::make_line(double c, double margin) const {
    Line line;
    line.c = c;
    const double L = std::log(upper_ / std::min(spec_.t_min, upper_ / 2));
    line.step = 2.0 * kPi / (L + margin);
    const cplx peak = mo_product(N_, cplx(c, 0.0));
    const double floor_abs = spec_.rel_cutoff * std::abs(peak);
    line.values.push_back(peak);
    int below = 0;
    for (std::int64_t n = 1;; ++n) {
        if (n > spec_.node_budget)
            throw ConvergenceError("Mellin integrand did not decay within " + std::to_string(spec_.node_budget) +
                                   " nodes");
        const cplx v = mo_product(N_, cplx(c, double(n) * line.step));
        line.values.push_back(v);
        below = std::abs(v) < floor_abs ? below + 1 : 0;
        if (below >= 8) break;
    }
    return line;
}

namespace {

// sum_n Re(values[n] w_n e^{-i n h log t}) with w_0 halved.
template <class Weight>
double line_sum(const std::vector<cplx>& values, double h, double logt, Weight weight) {
    const cplx rot = std::polar(1.0, -h * logt);
    cplx phase = 1.0;
    double sum = 0.5 * (values[0] * weight(0)).real();
    double comp = 0.0;
    for (std::size_t n = 1; n < values.size(); ++n) {
        if (n % 256 == 0) {
            phase = std::polar(1.0, -double(n) * h * logt);
        } else {
            phase *= rot;
        }
        const double term = (values[n] * weight(n) * phase).real();
        const double t = sum + term;
        comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    return sum + comp;
}

}  // namespace

double MellinDensity::density(double t) const {
    if (t <= 0) throw DomainError("density needs t > 0");
    if (t >= upper_) return 0.0;
    if (t < spec_.t_min) throw DomainError("t below the resolved range of this density");
    const Line& line = line_for(t);
    const double logt = std::log(t);
    const double s = line_sum(line.values, line.step, logt, [](std::size_t) { return cplx(1.0, 0.0); });
    return std::exp(-(line.c + 1.0) * logt) / kPi * line.step * s;
}

double MellinDensity::cdf(double t) const {
    if (t <= 0) return 0.0;
    if (t >= upper_) return 1.0;
    if (t < spec_.t_min) throw DomainError("t below the resolved range of this density");
    const Line& line = line_for(t);
    const double logt = std::log(t);
    const double c = line.c, h = line.step;
    const double s = line_sum(line.values, h, logt, [c, h](std::size_t n) { return 1.0 / cplx(c, double(n) * h); });
    // for c < 0 the contour already lies left of the pole of 1/s at 0
    const double tail = std::exp(-c * logt) / kPi * h * s;
    return c > 0 ? 1.0 - tail : -tail;
}

double clt_abscissa_to_t(int N, double x) {
    return std::exp(x * std::sqrt(std::log(double(N)))) / std::sqrt(double(N));
}

double clt_density(const MellinDensity& density, double x) {
    const double t = clt_abscissa_to_t(density.N(), x);
    if (t >= density.support_max()) return 0.0;
    return density.density(t) * std::sqrt(std::log(double(density.N()))) * t;
}

// ---------------------------------------------------------------------------
// Haar sampling
// ---------------------------------------------------------------------------

namespace {

double draw(int N, std::mt19937_64& rng) {
    const int n = 2 * N;
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd g(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) g(i, j) = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j)
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    if (q.determinant() < 0) q.row(0) = -q.row(0);
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - q;
    return std::abs(a.partialPivLu().determinant());
}

}  // namespace

double haar_sample_sodd(int N, std::uint64_t seed) {
    if (N < 1) throw DomainError("N must be at least 1");
    std::mt19937_64 rng(seed);
    return draw(N, rng);
}

std::vector<double> haar_samples(int N, std::size_t count, std::uint64_t seed) {
    if (N < 1) throw DomainError("N must be at least 1");
    std::mt19937_64 rng(seed);
    std::vector<double> out(count);
    for (double& v : out) v = draw(N, rng);
    return out;
}

}  // namespace twistlab
