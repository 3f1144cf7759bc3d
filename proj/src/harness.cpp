#include "twistlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "twistlab/errors.hpp"
#include "twistlab/rmt.hpp"
#include "twistlab/stats.hpp"

namespace twistlab {

SweepResult sweep(const CurveRecord& record, const CoefficientTable& table, std::int64_t X) {
    if (X < 0) throw DomainError("X must be non-negative");
    if (table.bound < X) throw DataError("coefficient table for " + record.name + " stops at " +
                                         std::to_string(table.bound) + " < X = " + std::to_string(X));
    SweepResult r;
    r.curve = record.name;
    r.sign = record.sign;
    r.kappa = record.kappa;
    r.X = X;
    const TwistFamilySpec family = family_of(record, X);
    enumerate_family(family, [&](std::int64_t d) {
        const std::int64_t c = table.at(std::llabs(d));
        r.samples.push_back({d, c, lvalue_from_coefficient(record.kappa, c, d)});
    });

    std::vector<std::vector<double>> powers(5, std::vector<double>(r.samples.size()));
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
        const TwistSample& s = r.samples[i];
        double p = 1.0;
        for (int k = 0; k <= 4; ++k) {
            powers[k][i] = p;
            p *= s.lvalue;
        }
        const bool prime = is_prime(std::llabs(s.d));
        if (s.c == 0) ++r.vanishing;
        if (prime) {
            ++r.prime_count;
            if (s.c == 0) ++r.prime_vanishing;
        }
    }
    for (int k = 0; k <= 4; ++k) r.moment_sums.push_back(stable_sum(powers[k]));
    return r;
}

CoefficientTable coefficients_for(const CurveRecord& record, std::int64_t X, const std::string& cache) {
    namespace fs = std::filesystem;
    if (cache.empty()) return record_coefficients(record, X);
    const fs::path path = fs::path(cache) / (record.name + ".tlcc");
    if (fs::exists(path)) {
        CoefficientTable t = cache_load(path, record.name);
        if (t.bound >= X) return t;
    }
    fs::create_directories(cache);
    CoefficientTable t = record_coefficients(record, X);
    cache_store(t, path);
    return t;
}

MomentEstimate empirical_moment(const SweepResult& result, double s) {
    MomentEstimate m;
    m.s = s;
    const bool integral = s >= 0 && s == std::floor(s);
    if (integral && s <= 4) {
        m.count = std::int64_t(result.size());
        m.sum = result.moment_sums[std::size_t(s)];
    } else {
        std::vector<double> terms;
        for (const TwistSample& t : result.samples) {
            if (t.c == 0 && !integral) continue;
            terms.push_back(std::pow(t.lvalue, s));
        }
        m.count = std::int64_t(terms.size());
        m.sum = stable_sum(terms);
    }
    if (s == 0) {
        m.mean = 1.0;
        return m;
    }
    m.mean = m.count > 0 ? m.sum / double(m.count) : 0.0;
    return m;
}

double Histogram::mass() const {
    if (nonzero == 0) return 0.0;
    double m = double(below + above) / double(nonzero);
    for (const HistogramBin& b : bins) m += b.density * (b.hi - b.lo);
    return m;
}

namespace {

std::vector<double> bin_edges(double lo, double hi, int bins, bool logarithmic) {
    if (bins < 1) throw DomainError("histogram needs at least one bin");
    if (!(hi > lo)) throw DomainError("histogram range is empty");
    if (logarithmic && lo <= 0) throw DomainError("logarithmic bins need lo > 0");
    std::vector<double> e(std::size_t(bins) + 1);
    for (int i = 0; i <= bins; ++i) {
        const double u = double(i) / bins;
        e[std::size_t(i)] = logarithmic ? lo * std::pow(hi / lo, u) : lo + (hi - lo) * u;
    }
    return e;
}

std::size_t bin_of(const std::vector<double>& edges, double v) {
    return std::size_t(std::upper_bound(edges.begin(), edges.end(), v) - edges.begin()) - 1;
}

}  // namespace

Histogram value_histogram(const SweepResult& result, const HistogramSpec& spec, double small_constant) {
    const std::vector<double> edges = bin_edges(spec.lo, spec.hi, spec.bins, spec.logarithmic);
    Histogram h;
    h.bins.resize(std::size_t(spec.bins));
    for (const TwistSample& s : result.samples) {
        if (s.c == 0) {
            ++h.zeros;
            continue;
        }
        ++h.nonzero;
        if (s.lvalue < spec.lo) {
            ++h.below;
        } else if (s.lvalue >= spec.hi) {
            ++h.above;
        } else {
            ++h.bins[bin_of(edges, s.lvalue)].count;
        }
    }
    std::optional<MellinDensity> rmt;
    if (spec.rmt_N >= 2) rmt.emplace(spec.rmt_N);
    const double logx = std::log(double(std::max<std::int64_t>(result.X, 3)));
    for (std::size_t i = 0; i < h.bins.size(); ++i) {
        HistogramBin& b = h.bins[i];
        b.lo = edges[i];
        b.hi = edges[i + 1];
        b.density = h.nonzero > 0 ? double(b.count) / (double(h.nonzero) * (b.hi - b.lo)) : 0.0;
        const double t = b.lo > 0 ? std::sqrt(b.lo * b.hi) : 0.5 * (b.lo + b.hi);
        if (small_constant > 0) b.small_model = small_constant * std::pow(logx, 0.375) / std::sqrt(t);
        if (rmt) {
            const double u = t / spec.t_scale;
            if (u >= 1e-12) b.rmt_model = spec.y_scale * rmt->density(u) / spec.t_scale;
        }
    }
    return h;
}

SlopeFit small_value_slope(const SweepResult& result, double t_lo, int bins) {
    std::vector<double> nz;
    for (const TwistSample& s : result.samples)
        if (s.c != 0) nz.push_back(s.lvalue);
    if (nz.size() < 100) throw DomainError("too few nonzero values for a slope fit");
    std::sort(nz.begin(), nz.end());
    if (t_lo <= 0) t_lo = nz.front();
    SlopeFit fit;
    fit.t_lo = t_lo;
    fit.t_hi = 100.0 * t_lo;
    const std::vector<double> edges = bin_edges(fit.t_lo, fit.t_hi, bins, true);
    std::vector<std::int64_t> counts(std::size_t(bins), 0);
    for (double v : nz)
        if (v >= fit.t_lo && v < fit.t_hi) ++counts[bin_of(edges, v)];
    std::vector<double> x, y;
    for (int i = 0; i < bins; ++i) {
        if (counts[std::size_t(i)] == 0) continue;
        const double w = edges[std::size_t(i) + 1] - edges[std::size_t(i)];
        x.push_back(0.5 * (std::log(edges[std::size_t(i)]) + std::log(edges[std::size_t(i) + 1])));
        y.push_back(std::log(double(counts[std::size_t(i)]) / (double(nz.size()) * w)));
    }
    const LinearFit lf = linear_fit(x, y);
    fit.slope = lf.slope;
    fit.r2 = lf.r2;
    fit.bins = int(lf.points);
    return fit;
}

TransformedSamples clt_transform(const SweepResult& result) {
    TransformedSamples out;
    for (const TwistSample& s : result.samples) {
        const double ad = double(std::llabs(s.d));
        if (s.c == 0 || ad < 3) continue;
        const double ll = std::log(std::log(ad));
        const double root = std::sqrt(ll);
        const double coef = 2.0 * std::log(double(std::llabs(s.c))) - 0.5 * std::log(ad);
        out.d.push_back(s.d);
        out.value.push_back((std::log(s.lvalue) + 0.5 * ll) / root);
        out.coefficient.push_back((coef + 0.5 * ll) / root);
    }
    return out;
}

TransformedSamples distribution_transform(const SweepResult& result) {
    TransformedSamples out;
    for (const TwistSample& s : result.samples) {
        const double ad = double(std::llabs(s.d));
        if (ad < 3) continue;
        const double e = 1.0 / std::sqrt(std::log(std::log(ad)));
        const double c2 = double(s.c) * double(s.c);
        out.d.push_back(s.d);
        out.value.push_back(std::pow(std::sqrt(std::log(ad)) * s.lvalue, e));
        out.coefficient.push_back(std::pow(std::sqrt(std::log(ad)) * c2 / std::sqrt(ad), e));
    }
    return out;
}

double lognormal_cdf(double t) { return t <= 0 ? 0.0 : normal_cdf(std::log(t)); }

VanishingReport vanishing_report(const SweepResult& result, bool prime_only, std::int64_t step,
                                 double a_minus_half) {
    if (step < 2) throw DomainError("vanishing grid step must be at least 2");
    VanishingReport rep;
    rep.prime_only = prime_only;
    std::size_t i = 0;
    std::int64_t count = 0, vanish = 0;
    for (std::int64_t X = step; X <= result.X; X += step) {
        for (; i < result.samples.size() && std::llabs(result.samples[i].d) <= X; ++i) {
            const TwistSample& s = result.samples[i];
            if (prime_only && !is_prime(std::llabs(s.d))) continue;
            ++count;
            if (s.c == 0) ++vanish;
        }
        VanishingPoint p;
        p.X = X;
        p.count = count;
        p.vanishing = vanish;
        p.fraction = count > 0 ? double(vanish) / double(count) : 0.0;
        const double lx = std::log(double(X));
        const double norm = a_minus_half * std::sqrt(result.kappa) * std::pow(double(X), -0.25) * std::pow(lx, 0.375);
        p.normalized = p.fraction / norm;
        rep.points.push_back(p);
    }
    rep.no_vanishing = vanish == 0;
    if (rep.points.size() >= 2) {
        const VanishingPoint& a = rep.points[rep.points.size() - 2];
        const VanishingPoint& b = rep.points.back();
        rep.slope = (b.normalized - a.normalized) / double(b.X - a.X);
    }
    return rep;
}

std::optional<double> RqEntry::delta_main() const {
    if (!empirical) return std::nullopt;
    return *empirical - main;
}

std::optional<double> RqEntry::delta_refined() const {
    if (!empirical) return std::nullopt;
    return *empirical - refined;
}

std::vector<RqEntry> rq_report(const SweepResult& result, EulerFactorData& data, std::int64_t q_max,
                               std::int64_t p_max) {
    std::vector<std::int64_t> zeros;
    for (const TwistSample& s : result.samples)
        if (s.c == 0) zeros.push_back(s.d);
    data.extend(std::max(q_max, p_max));
    std::vector<RqEntry> out;
    for (std::int64_t q : primes_up_to(q_max)) {
        if (data.conductor() % q == 0) continue;
        RqEntry e;
        e.q = q;
        e.a_q = data.ap(q);
        for (std::int64_t d : zeros) {
            const int chi = kronecker(d, q);
            if (chi == 1) ++e.plus;
            if (chi == -1) ++e.minus;
        }
        if (e.minus > 0) e.empirical = double(e.plus) / double(e.minus);
        e.main = rq_main(q, e.a_q);
        e.refined = rq_refined(data, result.sign, q, double(result.X), p_max).refined;
        out.push_back(e);
    }
    return out;
}

double median_abs_delta(const std::vector<RqEntry>& entries, bool refined) {
    std::vector<double> v;
    for (const RqEntry& e : entries) {
        const auto d = refined ? e.delta_refined() : e.delta_main();
        if (d) v.push_back(std::abs(*d));
    }
    if (v.empty()) throw DomainError("no defined R_q ratios");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

MomentComparison compare_moment(const SweepResult& result, const MomentPolynomial& poly) {
    MomentComparison c;
    c.k = poly.k;
    c.count = std::int64_t(result.size());
    if (poly.k < 0 || poly.k > 4) throw DomainError("moment comparison covers k = 0..4");
    c.empirical_sum = result.moment_sums[std::size_t(poly.k)];
    std::vector<double> pred(result.size());
    for (std::size_t i = 0; i < result.size(); ++i)
        pred[i] = poly.evaluate(std::log(double(std::llabs(result.samples[i].d))));
    c.predicted_sum = stable_sum(pred);
    c.ratio = c.predicted_sum != 0 ? c.empirical_sum / c.predicted_sum : 0.0;
    c.empirical_mean = c.count > 0 ? c.empirical_sum / double(c.count) : 0.0;
    if (result.X >= 10) c.predicted_integral_mean = poly.integral_mean(double(result.X));
    return c;
}

}  // namespace twistlab
