#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace twistlab {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
        sum_ = t;
    }
    void merge(const CompensatedSum& other) {
        add(other.sum_);
        add(other.comp_);
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Compensated sum over fixed 4096-element chunks, merged in order.
double stable_sum(std::span<const double> values);

double normal_cdf(double x);
double normal_pdf(double x);

/// sup_x |F_n(x) - F(x)| for the empirical CDF of `sorted` (ascending).
double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t points = 0;
};

/// Ordinary least squares y = slope x + intercept.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Piecewise-linear interpolant on an increasing grid; clamps outside.
class GridInterpolant {
public:
    GridInterpolant(std::vector<double> x, std::vector<double> y);
    double operator()(double t) const;

private:
    std::vector<double> x_, y_;
};

}  // namespace twistlab
