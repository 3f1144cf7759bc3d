#include "twistlab/predict.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "twistlab/contour.hpp"
#include "twistlab/errors.hpp"
#include "twistlab/rmt.hpp"

namespace twistlab {

namespace {

constexpr double kPi = std::numbers::pi;

// Neumaier summation.
struct Compensated {
    double sum = 0.0, comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

double bad_sign(TwistSign sign) { return sign == TwistSign::imaginary ? -1.0 : 1.0; }

double log_local_factor(const EulerFactorData& data, TwistSign sign, std::int64_t p, std::int64_t ap, double s) {
    const double pd = double(p);
    const double base = 0.5 * s * (s - 1.0) * std::log1p(-1.0 / pd);
    if (!data.is_good(p)) {
        // L_p(+-a_p/p) = 1/(1 -+ a_p^2/p)
        const double l = 1.0 / (1.0 - bad_sign(sign) * double(ap * ap) / pd);
        if (l <= 0) throw DomainError("non-positive bad local factor at p = " + std::to_string(p));
        return base + s * std::log(l);
    }
    const double lp = pd / (pd + 1.0 - double(ap));
    const double lm = pd / (pd + 1.0 + double(ap));
    if (lp <= 0 || lm <= 0) throw DomainError("non-positive local factor at p = " + std::to_string(p));
    const double inner = 1.0 / pd + 0.5 * (std::pow(lp, s) + std::pow(lm, s));
    return base + std::log(pd / (pd + 1.0)) + std::log(inner);
}

void require_pmax(std::int64_t p_max) {
    if (p_max < 2) throw DomainError("prime bound must be at least 2");
}

}  // namespace

TruncatedValue arithmetic_factor(EulerFactorData& data, TwistSign sign, double s, std::int64_t p_max) {
    require_pmax(p_max);
    if (!(s > -1.0)) throw DomainError("arithmetic factor needs s > -1");
    if (s == 0.0) return {1.0, 1.0};
    data.extend(p_max);
    Compensated acc;
    TruncatedValue out;
    bool half_done = false;
    for (std::size_t i = 0; i < data.primes().size(); ++i) {
        const std::int64_t p = data.primes()[i];
        if (p > p_max) break;
        if (!half_done && p > p_max / 2) {
            out.half_value = std::exp(acc.value());
            half_done = true;
        }
        acc.add(log_local_factor(data, sign, p, data.ap_values()[i], s));
    }
    out.value = std::exp(acc.value());
    if (!half_done) out.half_value = out.value;
    return out;
}

namespace {

cplx gamma_sqrt(cplx z, std::int64_t conductor) {
    const cplx half_log =
        0.5 * (log_gamma(1.0 + z) - log_gamma(1.0 - z) + z * std::log(double(conductor) / (4.0 * kPi * kPi)));
    if (std::abs(half_log.imag()) >= kPi / 2)
        throw DomainError("square root of the gamma factor leaves the principal branch");
    return std::exp(half_log);
}

cplx local_L(double ap, double p, cplx x, bool good) {
    cplx den = 1.0 - ap * x;
    if (good) den += p * x * x;
    return 1.0 / den;
}

}  // namespace

cplx fk_integrand(EulerFactorData& data, TwistSign sign, const std::vector<cplx>& z, std::int64_t p_max) {
    require_pmax(p_max);
    const std::size_t k = z.size();
    if (k == 0) throw DomainError("empty argument vector");
    double radius = 0.0;
    for (const cplx& w : z) radius += std::abs(w);
    if (radius >= 0.5) throw DomainError("arguments outside the absolute-convergence domain");
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            if (std::abs(z[i] + z[j]) < 1e-12) throw DomainError("zeta pole z_i + z_j = 0");

    data.extend(p_max);
    cplx log_a = 0.0;
    for (std::size_t idx = 0; idx < data.primes().size(); ++idx) {
        const std::int64_t p = data.primes()[idx];
        if (p > p_max) break;
        const double pd = double(p);
        const double ap = double(data.ap_values()[idx]);
        const bool good = data.is_good(p);
        cplx local;
        if (good) {
            cplx plus = 1.0, minus = 1.0;
            for (const cplx& w : z) {
                const cplx x = std::exp(-(1.0 + w) * std::log(pd));
                plus *= local_L(ap, pd, x, true);
                minus *= local_L(ap, pd, -x, true);
            }
            local = (1.0 / pd + 0.5 * (plus + minus)) / (1.0 + 1.0 / pd);
        } else {
            local = 1.0;
            for (const cplx& w : z)
                local *= local_L(ap, pd, bad_sign(sign) * ap * std::exp(-(1.0 + w) * std::log(pd)), false);
        }
        log_a += std::log(local);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j)
                log_a += std::log(1.0 - std::exp(-(1.0 + z[i] + z[j]) * std::log(pd)));
    }
    cplx value = std::exp(log_a);
    for (const cplx& w : z) value *= gamma_sqrt(w, data.conductor());
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) value *= zeta(1.0 + z[i] + z[j]);
    return value;
}

// ---------------------------------------------------------------------------
// moment polynomials
// ---------------------------------------------------------------------------

double MomentPolynomial::evaluate(double x) const {
    double v = 0.0;
    for (double f : coefficients) v = v * x + f;
    return v;
}

double MomentPolynomial::integral_mean(double X) const {
    if (X <= 0) throw DomainError("X must be positive");
    // (1/X) int_0^X (log t)^m dt = sum_j (-1)^{m-j} m!/j! (log X)^j
    const double L = std::log(X);
    const int D = degree();
    double total = 0.0;
    for (int r = 0; r <= D; ++r) {
        const int m = D - r;
        double term = 0.0, ratio = 1.0;  // ratio = m!/j!
        for (int j = m; j >= 0; --j) {
            term += ((m - j) % 2 == 0 ? 1.0 : -1.0) * ratio * std::pow(L, j);
            ratio *= j;
        }
        total += coefficients[r] * term;
    }
    return total;
}

std::string MomentPolynomial::to_json() const {
    nlohmann::ordered_json j;
    j["k"] = k;
    j["sign"] = std::string(to_string(sign));
    j["coefficients"] = coefficients;
    j["p_max"] = p_max;
    j["nodes"] = nodes;
    j["r0"] = r0;
    j["node_delta"] = node_delta;
    j["imaginary_ratio"] = imaginary_ratio;
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

MomentPolynomial MomentPolynomial::from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        MomentPolynomial m;
        m.k = j.at("k").get<int>();
        m.sign = parse_sign(j.at("sign").get<std::string>());
        m.coefficients = j.at("coefficients").get<std::vector<double>>();
        m.p_max = j.at("p_max").get<std::int64_t>();
        m.nodes = j.at("nodes").get<int>();
        m.r0 = j.value("r0", 0.0);
        m.node_delta = j.value("node_delta", 0.0);
        m.imaginary_ratio = j.value("imaginary_ratio", 0.0);
        if (int(m.coefficients.size()) != m.degree() + 1) throw DataError("coefficient count does not match k");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad moment polynomial: ") + e.what());
    }
}

namespace {

std::vector<cplx> residue_moments(EulerFactorData& data, TwistSign sign, int k, int M, double r0,
                                  std::int64_t p_max, bool symmetric) {
    TorusIntegrand t = TorusIntegrand::make(k, M, r0);
    t.conjugate_symmetric = symmetric;
    const std::int64_t Q = data.conductor();

    std::vector<std::int64_t> good, bad;
    std::vector<double> good_ap;
    for (std::size_t i = 0; i < data.primes().size(); ++i) {
        const std::int64_t p = data.primes()[i];
        if (p > p_max) break;
        if (data.is_good(p)) {
            good.push_back(p);
            good_ap.push_back(double(data.ap_values()[i]));
        } else {
            bad.push_back(p);
        }
    }

    for (int j = 0; j < k; ++j)
        for (int m = 0; m < M; ++m) {
            const cplx z = t.z[j][m];
            cplx v = gamma_sqrt(z, Q) * std::pow(z, 2 - 2 * k);
            for (std::int64_t p : bad) {
                const double ap = double(data.ap(p));
                v *= local_L(ap, double(p), bad_sign(sign) * ap * std::exp(-(1.0 + z) * std::log(double(p))), false);
            }
            t.single[j][m] = v;
        }

    std::vector<double> logp;
    for (std::size_t i = 0; i < data.primes().size() && data.primes()[i] <= p_max; ++i)
        logp.push_back(std::log(double(data.primes()[i])));
    for (int j = 1; j < k; ++j)
        for (int i = 0; i < j; ++i) {
            auto& tab = t.pair[t.pair_index(i, j)];
            for (int a = 0; a < M; ++a)
                for (int b = 0; b < M; ++b) {
                    const cplx zi = t.z[i][a], zj = t.z[j][b];
                    const cplx w = zi + zj;
                    cplx lg = 0.0;
                    for (double lp : logp) lg += std::log(1.0 - std::exp(-(1.0 + w) * lp));
                    const cplx vd = zj * zj - zi * zi;
                    tab[std::size_t(a) * M + b] = zeta(1.0 + w) * std::exp(lg) * vd * vd;
                }
        }

    const std::size_t P = good.size();
    t.allocate_mixed(P);
    for (std::size_t p = 0; p < P; ++p) {
        const double pd = double(good[p]);
        t.c0[p] = 1.0 / pd / (1.0 + 1.0 / pd);
        t.c1[p] = 0.5 / (1.0 + 1.0 / pd);
    }
    for (int j = 0; j < k; ++j)
        for (int m = 0; m < M; ++m) {
            const cplx z = t.z[j][m];
            for (std::size_t p = 0; p < P; ++p) {
                const double pd = double(good[p]);
                const cplx x = std::exp(-(1.0 + z) * std::log(pd));
                const cplx A = local_L(good_ap[p], pd, x, true);
                const cplx B = local_L(good_ap[p], pd, -x, true);
                const std::size_t o = std::size_t(m) * P + p;
                t.a_re[j][o] = A.real();
                t.a_im[j][o] = A.imag();
                t.b_re[j][o] = B.real();
                t.b_im[j][o] = B.imag();
            }
        }

    std::vector<cplx> mom = torus_moments(t, k * (k - 1) / 2);
    const double pref = contour_prefactor(k);
    for (cplx& c : mom) c *= pref;
    return mom;
}

}  // namespace

MomentPolynomial upsilon(EulerFactorData& data, TwistSign sign, int k, const PredictionConfig& config) {
    if (k < 1 || k > 4) throw DomainError("moment polynomials implemented for 1 <= k <= 4");
    require_pmax(config.p_max);
    if (config.nodes < 16 || config.nodes % 4 != 0) throw DomainError("nodes must be a multiple of 4, at least 16");
    double radius_sum = 0.0;
    for (int j = 1; j <= k; ++j) radius_sum += config.r0 * (1.0 + double(j) / (8.0 * k));
    if (config.r0 <= 0 || radius_sum >= 0.5) throw DomainError("contour radii must satisfy sum r_j < 1/2");
    data.extend(config.p_max);

    const int D = k * (k - 1) / 2;
    const std::vector<cplx> full = residue_moments(data, sign, k, config.nodes, config.r0, config.p_max, true);

    MomentPolynomial poly;
    poly.k = k;
    poly.sign = sign;
    poly.p_max = config.p_max;
    poly.nodes = config.nodes;
    poly.r0 = config.r0;
    poly.coefficients.resize(D + 1);
    for (int r = 0; r <= D; ++r) poly.coefficients[r] = full[D - r].real();

    if (config.check_convergence) {
        const std::vector<cplx> half =
            residue_moments(data, sign, k, config.nodes / 2, config.r0, config.p_max, false);
        for (int r = 0; r <= D; ++r) {
            const double f = poly.coefficients[r];
            const cplx h = half[D - r];
            const double scale = std::max(std::abs(f), 1e-300);
            poly.node_delta = std::max(poly.node_delta, std::abs(h.real() - f) / scale);
            poly.imaginary_ratio = std::max(poly.imaginary_ratio, std::abs(h.imag()) / scale);
        }
        if (poly.imaginary_ratio > 1e-6)
            throw ConvergenceError("moment polynomial has a non-negligible imaginary part");
        if (poly.node_delta > config.tolerance)
            throw ConvergenceError("moment polynomial not stable under node doubling (delta " +
                                   std::to_string(poly.node_delta) + ")");
    }
    if (poly.coefficients[0] <= 0) throw ConvergenceError("leading coefficient is not positive");
    return poly;
}

double moment_prediction(const MomentPolynomial& poly, const TwistFamilySpec& family, MomentMode mode) {
    if (mode == MomentMode::integral) {
        if (family.bound < 10) throw DomainError("X must be at least 10");
        return poly.integral_mean(double(family.bound));
    }
    Compensated acc;
    enumerate_family(family, [&](std::int64_t d) { acc.add(poly.evaluate(std::log(double(std::llabs(d))))); });
    return acc.value();
}

double leading_asymptotic(EulerFactorData& data, TwistSign sign, double s, double X, std::int64_t p_max) {
    if (!(s > -0.5)) throw DomainError("leading asymptotic needs s > -1/2");
    if (s == 0.0) return 1.0;
    const double a = arithmetic_factor(data, sign, s, p_max).value;
    return a * g_analytic(s) * std::pow(std::log(X), 0.5 * s * (s - 1.0));
}

double small_value_prefactor() { return std::pow(2.0, -7.0 / 8.0) * barnes_g(0.5) * std::pow(kPi, -0.25); }

TruncatedValue small_value_constant(EulerFactorData& data, TwistSign sign, std::int64_t p_max) {
    const TruncatedValue a = arithmetic_factor(data, sign, -0.5, p_max);
    const double c = small_value_prefactor();
    return {c * a.value, c * a.half_value};
}

// ---------------------------------------------------------------------------
// vanishing ratios
// ---------------------------------------------------------------------------

double rq_main(std::int64_t q, std::int64_t a_q) {
    const double num = double(q + 1 - a_q), den = double(q + 1 + a_q);
    if (a_q * a_q > 4 * q || den <= 0 || num < 0) throw DomainError("a_q violates the Hasse bound");
    return std::sqrt(num / den);
}

double rq_main(EulerFactorData& data, std::int64_t q) {
    if (!is_prime(q)) throw DomainError("q must be prime");
    if (data.conductor() % q == 0) throw DomainError("q must not divide the conductor");
    data.extend(q);
    return rq_main(q, data.ap(q));
}

double beta_p(TwistSign sign, std::int64_t p, std::int64_t a_p, bool bad) {
    const double pd = double(p), lp = std::log(pd);
    if (bad) return sign == TwistSign::real ? lp / (1.0 + pd) : lp / (1.0 - pd);
    const double a = double(a_p);
    const double f1 = 1.0 - a / pd + 1.0 / pd;
    const double f2 = 1.0 + a / pd + 1.0 / pd;
    return lp * ((2.0 - a) / std::sqrt(f1) + (2.0 + a) / std::sqrt(f2)) / (2.0 + pd * (std::sqrt(f1) + std::sqrt(f2)));
}

TruncatedValue lambda_nu(EulerFactorData& data, TwistSign sign, std::int64_t q, int nu, std::int64_t p_max) {
    if (nu != 1 && nu != -1) throw DomainError("nu must be +1 or -1");
    if (!is_prime(q) || data.conductor() % q == 0) throw DomainError("q must be a prime not dividing Q");
    require_pmax(p_max);
    data.extend(std::max(p_max, q));
    const double qd = double(q), lq = std::log(qd);
    const double aq = double(data.ap(q));
    const double head = lq * (nu * aq - 2.0) / (nu * aq - qd - 1.0) - 3.0 * lq / (2.0 * (qd - 1.0)) -
                        2.5 * kEulerGamma;
    Compensated acc;
    TruncatedValue out;
    bool half_done = false;
    for (std::size_t i = 0; i < data.primes().size(); ++i) {
        const std::int64_t p = data.primes()[i];
        if (p > p_max) break;
        if (!half_done && p > p_max / 2) {
            out.half_value = head + acc.value();
            half_done = true;
        }
        if (p == q) continue;
        const double pd = double(p);
        acc.add(beta_p(sign, p, data.ap_values()[i], !data.is_good(p)) - 3.0 * std::log(pd) / (2.0 * (pd - 1.0)));
    }
    out.value = head + acc.value();
    if (!half_done) out.half_value = out.value;
    return out;
}

double g_term(double X, std::int64_t conductor) {
    return 8.0 / 3.0 * std::log(X * std::sqrt(double(conductor)) / (2.0 * kPi)) - 1.0;
}

RqPrediction rq_refined(EulerFactorData& data, TwistSign sign, std::int64_t q, double X, std::int64_t p_max) {
    RqPrediction r;
    r.main = rq_main(data, q);
    const TruncatedValue lp = lambda_nu(data, sign, q, 1, p_max);
    const TruncatedValue lm = lambda_nu(data, sign, q, -1, p_max);
    r.lambda_plus = lp.value;
    r.lambda_minus = lm.value;
    r.lambda_plus_half = lp.half_value;
    r.lambda_minus_half = lm.half_value;
    const double g = g_term(X, data.conductor());
    r.refined = r.main * (g + lp.value) / (g + lm.value);
    return r;
}

}  // namespace twistlab
