#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "twistlab/arith.hpp"
#include "twistlab/curve.hpp"
#include "twistlab/special.hpp"

namespace twistlab {

struct PredictionConfig {
    std::int64_t p_max = 10'000;
    int nodes = 64;
    double r0 = 0.1;          // radii r_j = r0 (1 + j/(8k)), sum kept below 1/2
    double tolerance = 1e-4;  // relative stability of coefficients under M -> M/2
    bool check_convergence = true;
};

/// A prime-truncated quantity at p_max and at p_max / 2.
struct TruncatedValue {
    double value = 0.0;
    double half_value = 0.0;  // same product truncated at p_max / 2
    double delta() const { return value - half_value; }
};

/// A^{+-}(s) truncated at p_max (s > -1).
TruncatedValue arithmetic_factor(EulerFactorData& data, TwistSign sign, double s, std::int64_t p_max);

/// F^{+-}_k(z) with the Euler product truncated at p_max.
cplx fk_integrand(EulerFactorData& data, TwistSign sign, const std::vector<cplx>& z, std::int64_t p_max);

/// Upsilon_k(x) = f_0 x^D + f_1 x^{D-1} + ... + f_D, D = k(k-1)/2.
struct MomentPolynomial {
    int k = 1;
    TwistSign sign = TwistSign::imaginary;
    std::vector<double> coefficients;  // f_0 .. f_D
    std::int64_t p_max = 0;
    int nodes = 0;
    double r0 = 0.0;
    double node_delta = 0.0;       // max relative change of a coefficient between M/2 and M
    double imaginary_ratio = 0.0;  // max |Im f_r| / |f_r| at M/2 on the full grid

    int degree() const { return k * (k - 1) / 2; }
    double evaluate(double x) const;
    /// (1/X) int_0^X Upsilon(log t) dt
    double integral_mean(double X) const;
    std::string to_json() const;
    static MomentPolynomial from_json(const std::string& text);
};

/// k-fold residue by trapezoidal quadrature, k in 1..4.
MomentPolynomial upsilon(EulerFactorData& data, TwistSign sign, int k, const PredictionConfig& config = {});

enum class MomentMode { integral, per_d };

/// integral: (1/X) int_0^X Upsilon(log t) dt. per_d: sum over the family of Upsilon(log|d|).
double moment_prediction(const MomentPolynomial& poly, const TwistFamilySpec& family, MomentMode mode);

/// A(s) g_s (log X)^{s(s-1)/2}
double leading_asymptotic(EulerFactorData& data, TwistSign sign, double s, double X, std::int64_t p_max);

/// 2^{-7/8} G(1/2) pi^{-1/4} A(-1/2)
TruncatedValue small_value_constant(EulerFactorData& data, TwistSign sign, std::int64_t p_max);
double small_value_prefactor();

/// sqrt((q+1-a_q)/(q+1+a_q))
double rq_main(std::int64_t q, std::int64_t a_q);
double rq_main(EulerFactorData& data, std::int64_t q);

/// beta(p) for the sign; `bad` selects the p | Q branch.
double beta_p(TwistSign sign, std::int64_t p, std::int64_t a_p, bool bad);

/// lambda_nu(q) with the prime sum over p != q, p <= p_max, in increasing p.
TruncatedValue lambda_nu(EulerFactorData& data, TwistSign sign, std::int64_t q, int nu, std::int64_t p_max);

/// (8/3) log(X sqrt(Q) / (2 pi)) - 1
double g_term(double X, std::int64_t conductor);

struct RqPrediction {
    double main = 0.0;
    double refined = 0.0;
    double lambda_plus = 0.0, lambda_minus = 0.0;
    double lambda_plus_half = 0.0, lambda_minus_half = 0.0;
};

RqPrediction rq_refined(EulerFactorData& data, TwistSign sign, std::int64_t q, double X, std::int64_t p_max);

}  // namespace twistlab
