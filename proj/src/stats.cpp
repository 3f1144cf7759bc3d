#include "twistlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "twistlab/errors.hpp"

namespace twistlab {

double stable_sum(std::span<const double> values) {
    constexpr std::size_t chunk = 4096;
    CompensatedSum total;
    for (std::size_t start = 0; start < values.size(); start += chunk) {
        CompensatedSum part;
        const std::size_t end = std::min(values.size(), start + chunk);
        for (std::size_t i = start; i < end; ++i) part.add(values[i]);
        total.merge(part);
    }
    return total.value();
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf) {
    if (sorted.empty()) throw DomainError("KS statistic of an empty sample");
    const double n = double(sorted.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double f = cdf(sorted[i]);
        d = std::max(d, std::max(f - double(i) / n, double(j + 1) / n - f));
        i = j + 1;
    }
    return d;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("linear fit needs at least two points");
    const double n = double(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) throw DomainError("degenerate abscissae in linear fit");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
    fit.points = x.size();
    return fit;
}

GridInterpolant::GridInterpolant(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.size() != y_.size() || x_.size() < 2) throw DomainError("interpolant needs two or more points");
    if (!std::is_sorted(x_.begin(), x_.end())) throw DomainError("interpolation grid must increase");
}

double GridInterpolant::operator()(double t) const {
    if (t <= x_.front()) return y_.front();
    if (t >= x_.back()) return y_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), t);
    const std::size_t i = std::size_t(it - x_.begin()) - 1;
    const double w = (t - x_[i]) / (x_[i + 1] - x_[i]);
    return y_[i] + w * (y_[i + 1] - y_[i]);
}

}  // namespace twistlab
