#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "twistlab/special.hpp"
#include "twistlab/theta.hpp"

namespace twistlab {

// ---------------------------------------------------------------------------
// Moments of |det(I - A)| over SO(2N)
// ---------------------------------------------------------------------------

/// 2^{2Ns} prod_{j=1}^N Gamma(N+j-1) Gamma(s+j-1/2) / (Gamma(j-1/2) Gamma(s+j+N-1)),
/// accumulated in log space. DomainError within 1e-8 of a pole s = 1/2 - j - m.
cplx mo_product(int N, cplx s);
double mo_product(int N, double s);

/// Exact polynomial form for integer k.
Rational mo_polynomial(std::int64_t N, int k);

struct QuadratureSpec {
    int nodes = 64;
    double r0 = 0.0;  // 0 picks clamp(1/N, 0.02, 0.09)
};

/// k-fold contour form by trapezoidal quadrature on circles of distinct radii.
double mo_contour(int N, int k, const QuadratureSpec& quad = {});

/// 2^{k(k+1)/2} prod_{j=1}^{k-1} j!/(2j)!
Rational g_rational(int k);
/// 2^{s^2/2} G(1+s) sqrt(Gamma(1+2s)) / sqrt(G(1+2s) Gamma(1+s))
cplx g_analytic(cplx s);
double g_analytic(double s);

/// Residue of M_O(N, s) at s = -1/2, closed form.
double residue_h(int N);
/// 2^{-7/8} G(1/2) pi^{-1/4} N^{3/8}
double h_asym(double N);
/// (1/2 pi i) of M_O(N, s) around s = -1/2 on a circle of the given radius.
double residue_numeric(int N, double radius = 1e-3, int nodes = 64);

// ---------------------------------------------------------------------------
// Value distribution of |det(I - A)| by Mellin inversion on Re s = c
// ---------------------------------------------------------------------------

struct LineQuadratureSpec {
    double c = 1.0;             // abscissa for t >= t_switch
    double c_small = -0.25;     // abscissa for t < t_switch, in (-1/2, 0)
    double t_switch = 1e-2;
    double t_min = 1e-12;       // smallest t the density must resolve
    double rel_cutoff = 1e-16;  // drop nodes once |M| falls below this fraction of the peak
    std::int64_t node_budget = 20'000'000;
};

class MellinDensity {
public:
    /// N >= 2. Throws ConvergenceError if the cutoff is not reached within the budget.
    MellinDensity(int N, const LineQuadratureSpec& spec = {});

    int N() const { return N_; }
    double support_max() const { return upper_; }
    std::size_t nodes() const { return large_.values.size() + small_.values.size(); }

    /// P_N(t); 0 for t >= 4^N. DomainError below t_min or at t <= 0.
    double density(double t) const;
    /// integral_0^t P_N.
    double cdf(double t) const;

private:
    struct Line {
        double c = 0.0;
        double step = 0.0;
        std::vector<cplx> values;  // M_O(N, c + i n step), n = 0, 1, ...
    };
    Line make_line(double c, double margin) const;
    const Line& line_for(double t) const { return t < spec_.t_switch ? small_ : large_; }

    int N_;
    LineQuadratureSpec spec_;
    double upper_ = 0.0;
    Line large_, small_;
};

/// P_N(g(x)) g'(x), g(x) = exp(x sqrt(log N)) / sqrt(N).
double clt_density(const MellinDensity& density, double x);

/// Maps a CLT abscissa x to t = g(x).
double clt_abscissa_to_t(int N, double x);

// ---------------------------------------------------------------------------
// Monte Carlo oracle
// ---------------------------------------------------------------------------

/// |det(I - A)| for A Haar on SO(2N), one draw per seed.
double haar_sample_sodd(int N, std::uint64_t seed);

/// `count` draws from one generator seeded with `seed`.
std::vector<double> haar_samples(int N, std::size_t count, std::uint64_t seed);

}  // namespace twistlab
