#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twistlab/curve.hpp"
#include "twistlab/predict.hpp"
#include "twistlab/theta.hpp"

namespace twistlab {

struct TwistSample {
    std::int64_t d = 0;
    std::int64_t c = 0;
    double lvalue = 0.0;  // kappa c^2 / sqrt|d|
};

struct SweepResult {
    std::string curve;
    TwistSign sign = TwistSign::imaginary;
    double kappa = 0.0;
    std::int64_t X = 0;
    std::vector<TwistSample> samples;  // increasing |d|
    std::vector<double> moment_sums;   // sum of lvalue^k, k = 0..4
    std::int64_t vanishing = 0;
    std::int64_t prime_count = 0;      // samples with |d| prime
    std::int64_t prime_vanishing = 0;

    std::size_t size() const { return samples.size(); }
};

/// Iterates the restricted family up to X. The table must reach X.
SweepResult sweep(const CurveRecord& record, const CoefficientTable& table, std::int64_t X);

/// Coefficients for a record, from `cache` if it holds a table reaching X,
/// otherwise computed (and written to `cache` when a path is given).
CoefficientTable coefficients_for(const CurveRecord& record, std::int64_t X, const std::string& cache = {});

struct MomentEstimate {
    double s = 0.0;
    std::int64_t count = 0;  // samples entering the mean
    double sum = 0.0;
    double mean = 0.0;
};

/// Mean of lvalue^s. Integer s >= 0 keeps zeros, other s drops them.
MomentEstimate empirical_moment(const SweepResult& result, double s);

struct HistogramSpec {
    double lo = 0.0;
    double hi = 4.0;
    int bins = 80;
    bool logarithmic = false;
    double t_scale = 1.0;  // model curve: y_scale * P_N(t / t_scale) / t_scale
    double y_scale = 1.0;
    int rmt_N = 20;
};

struct HistogramBin {
    double lo = 0.0, hi = 0.0;
    std::int64_t count = 0;
    double density = 0.0;      // count / (nonzero * width)
    double small_model = 0.0;  // B (log X)^{3/8} t^{-1/2} at the geometric bin centre
    double rmt_model = 0.0;
};

struct Histogram {
    std::vector<HistogramBin> bins;
    std::int64_t zeros = 0;
    std::int64_t below = 0, above = 0;  // nonzero samples outside [lo, hi)
    std::int64_t nonzero = 0;
    double mass() const;
};

/// `small_constant` is B; pass 0 to leave the small_model column empty.
Histogram value_histogram(const SweepResult& result, const HistogramSpec& spec, double small_constant);

/// Regression of log density on log t over log-spaced bins spanning two
/// decades upward from `t_lo` (default: the smallest nonzero value).
struct SlopeFit {
    double t_lo = 0.0, t_hi = 0.0;
    double slope = 0.0;
    double r2 = 0.0;
    int bins = 0;
};
SlopeFit small_value_slope(const SweepResult& result, double t_lo = 0.0, int bins = 20);

struct TransformedSamples {
    std::vector<std::int64_t> d;
    std::vector<double> value;        // L-space
    std::vector<double> coefficient;  // coefficient-space counterpart
};

/// (log L + (1/2) log log|d|) / sqrt(log log|d|), nonzero samples with |d| >= 3.
/// coefficient holds the same with log L replaced by 2 log|c| - (1/2) log|d|.
TransformedSamples clt_transform(const SweepResult& result);

/// (sqrt(log|d|) L)^{1/sqrt(log log|d|)}, all samples with |d| >= 3.
/// coefficient holds the same with L replaced by c^2 / sqrt|d|.
TransformedSamples distribution_transform(const SweepResult& result);

double lognormal_cdf(double t);

struct VanishingPoint {
    std::int64_t X = 0;
    std::int64_t count = 0;
    std::int64_t vanishing = 0;
    double fraction = 0.0;
    double normalized = 0.0;
};

struct VanishingReport {
    bool prime_only = true;
    std::vector<VanishingPoint> points;
    double slope = 0.0;  // between the last two grid points
    bool no_vanishing = false;
};

/// Normalizer A(-1/2) sqrt(kappa) X^{-1/4} (log X)^{3/8} with A passed in.
VanishingReport vanishing_report(const SweepResult& result, bool prime_only, std::int64_t step, double a_minus_half);

struct RqEntry {
    std::int64_t q = 0;
    std::int64_t a_q = 0;
    std::int64_t plus = 0, minus = 0;
    std::optional<double> empirical;
    double main = 0.0, refined = 0.0;
    std::optional<double> delta_main() const;
    std::optional<double> delta_refined() const;
};

std::vector<RqEntry> rq_report(const SweepResult& result, EulerFactorData& data, std::int64_t q_max,
                               std::int64_t p_max);

/// Median of |delta| over entries with a defined ratio.
double median_abs_delta(const std::vector<RqEntry>& entries, bool refined);

/// Empirical raw sum of L^k next to the per-d prediction sum_d Upsilon_k(log|d|).
struct MomentComparison {
    int k = 0;
    std::int64_t count = 0;
    double empirical_sum = 0.0;
    double predicted_sum = 0.0;
    double ratio = 0.0;
    double empirical_mean = 0.0;
    double predicted_integral_mean = 0.0;
};

MomentComparison compare_moment(const SweepResult& result, const MomentPolynomial& poly);

}  // namespace twistlab
