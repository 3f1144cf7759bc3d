#include "twistlab/curve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "twistlab/errors.hpp"

namespace twistlab {

std::int64_t WeierstrassCurve::b8() const {
    const auto [a1, a2, a3, a4, a6] = a;
    return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
}

std::int64_t WeierstrassCurve::c4() const { return b2() * b2() - 24 * b4(); }

std::int64_t WeierstrassCurve::c6() const { return -b2() * b2() * b2() + 36 * b2() * b4() - 216 * b6(); }

std::int64_t WeierstrassCurve::discriminant() const {
    const std::int64_t B2 = b2(), B4 = b4(), B6 = b6(), B8 = b8();
    return -B2 * B2 * B8 - 8 * B4 * B4 * B4 - 27 * B6 * B6 + 9 * B2 * B4 * B6;
}

namespace {

std::int64_t mod(std::int64_t a, std::int64_t m) {
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

}  // namespace

PointCount count_points_exhaustive(const WeierstrassCurve& curve, std::int64_t p) {
    const auto [a1, a2, a3, a4, a6] = curve.a;
    PointCount pc;
    for (std::int64_t x = 0; x < p; ++x) {
        for (std::int64_t y = 0; y < p; ++y) {
            const std::int64_t F = y * y + a1 * x * y + a3 * y - x * x * x - a2 * x * x - a4 * x - a6;
            if (mod(F, p) != 0) continue;
            ++pc.affine;
            const std::int64_t Fx = a1 * y - 3 * x * x - 2 * a2 * x - a4;
            const std::int64_t Fy = 2 * y + a1 * x + a3;
            if (mod(Fx, p) == 0 && mod(Fy, p) == 0) ++pc.singular;
        }
    }
    return pc;
}

std::int64_t compute_ap(const WeierstrassCurve& curve, std::int64_t p) {
    if (!is_prime(p)) throw DomainError("a_p requested for non-prime " + std::to_string(p));
    if (p <= 3) {
        const PointCount pc = count_points_exhaustive(curve, p);
        if (pc.singular == 0) return p - pc.affine;
        // #E_ns = affine - singular + 1 (point at infinity) = p - a_p
        return p - (pc.affine - pc.singular + 1);
    }
    std::vector<signed char> chi(static_cast<std::size_t>(p), -1);
    chi[0] = 0;
    // y^2 by first differences 2y + 1
    for (std::int64_t y = 1, sq = 0, diff = 1; y <= p / 2; ++y) {
        sq += diff;
        if (sq >= p) sq -= p;
        diff += 2;
        if (diff >= p) diff -= p;
        chi[sq] = 1;
    }
    const std::int64_t A = mod(-27 * mod(curve.c4(), p), p);
    const std::int64_t B = mod(-54 * mod(curve.c6(), p), p);
    // f(x) = x^3 + A x + B: f(x+1) - f(x) = 3x^2 + 3x + 1 + A, whose step is 6x + 6
    std::int64_t f = B, d1 = mod(1 + A, p), d2 = 6 % p;
    const std::int64_t d3 = 6 % p;
    std::int64_t sum = 0;
    for (std::int64_t x = 0; x < p; ++x) {
        sum += chi[f];
        f += d1;
        if (f >= p) f -= p;
        d1 += d2;
        if (d1 >= p) d1 -= p;
        d2 += d3;
        if (d2 >= p) d2 -= p;
    }
    return -sum;
}

EulerFactorData::EulerFactorData(WeierstrassCurve curve, std::int64_t conductor, std::int64_t bound)
    : curve_(curve), conductor_(conductor) {
    if (conductor < 1) throw DataError("conductor must be positive");
    extend(bound);
}

void EulerFactorData::extend(std::int64_t bound) {
    if (bound <= bound_) return;
    const std::vector<std::int64_t> all = primes_up_to(bound);
    index_.assign(static_cast<std::size_t>(bound) + 1, -1);
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (i >= primes_.size()) {
            primes_.push_back(all[i]);
            ap_.push_back(compute_ap(curve_, all[i]));
        }
        index_[all[i]] = static_cast<std::int32_t>(i);
    }
    bound_ = bound;
}

std::int64_t EulerFactorData::ap(std::int64_t p) const {
    if (p < 2 || p > bound_ || index_[p] < 0)
        throw DomainError("a_p unavailable for " + std::to_string(p));
    return ap_[index_[p]];
}

std::vector<std::int64_t> dirichlet_coefficients(EulerFactorData& data, std::int64_t count) {
    if (count < 1) throw DomainError("need at least one coefficient");
    data.extend(count);
    std::vector<std::int64_t> spf(static_cast<std::size_t>(count) + 1, 0);
    for (std::int64_t p : data.primes()) {
        if (p > count) break;
        for (std::int64_t m = p; m <= count; m += p)
            if (spf[m] == 0) spf[m] = p;
    }
    std::vector<std::int64_t> an(static_cast<std::size_t>(count) + 1, 0);
    an[1] = 1;
    for (std::int64_t n = 2; n <= count; ++n) {
        const std::int64_t p = spf[n];
        std::int64_t m = n, pk = 1;
        while (m % p == 0) {
            m /= p;
            pk *= p;
        }
        if (m > 1) {
            an[n] = an[m] * an[pk];
            continue;
        }
        // n = p^k
        const std::int64_t ap = data.ap(p);
        if (n == p) {
            an[n] = ap;
        } else if (!data.is_good(p)) {
            an[n] = ap * an[n / p];
        } else {
            an[n] = ap * an[n / p] - p * an[n / p / p];
        }
    }
    return an;
}

std::complex<double> local_euler_factor(const EulerFactorData& data, std::int64_t p, std::complex<double> x) {
    const double ap = static_cast<double>(data.ap(p));
    std::complex<double> den = 1.0 - ap * x;
    if (data.is_good(p)) den += static_cast<double>(p) * x * x;
    if (std::abs(den) < 1e-14) throw DomainError("pole of local Euler factor at p = " + std::to_string(p));
    return 1.0 / den;
}

std::int64_t direct_l_terms(std::int64_t conductor, std::int64_t d, double eps) {
    const double alpha = 2.0 * std::numbers::pi / (std::sqrt(double(conductor)) * double(std::llabs(d)));
    const double C = 2.0 / -std::expm1(-alpha);
    return static_cast<std::int64_t>(std::ceil(std::log(C / eps) / alpha));
}

double direct_l_value(EulerFactorData& data, std::int64_t d, const DirectLOptions& options) {
    if (d == 0) throw DomainError("d = 0");
    if (gcd(d, data.conductor()) != 1) throw DomainError("gcd(d, Q) > 1 for d = " + std::to_string(d));
    if (options.eps <= 0) throw DomainError("eps must be positive");
    const std::int64_t terms = direct_l_terms(data.conductor(), d, options.eps);
    if (terms > options.coefficient_budget)
        throw ConvergenceError("direct L-series needs " + std::to_string(terms) + " terms, budget " +
                               std::to_string(options.coefficient_budget));
    const std::vector<std::int64_t> an = dirichlet_coefficients(data, std::max<std::int64_t>(terms, 1));
    const double alpha = 2.0 * std::numbers::pi / (std::sqrt(double(data.conductor())) * double(std::llabs(d)));

    double sum = 0.0, comp = 0.0;
    for (std::int64_t n = 1; n <= terms; ++n) {
        if (an[n] == 0) continue;
        const int chi = kronecker(d, n);
        if (chi == 0) continue;
        const double term = double(chi * an[n]) / double(n) * std::exp(-alpha * double(n));
        const double t = sum + term;
        comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    return 2.0 * (sum + comp);
}

TwistFamilySpec family_of(const CurveRecord& record, std::int64_t bound) {
    std::map<std::int64_t, int> bad;
    for (std::int64_t p : prime_divisors(record.conductor))
        bad[p] = static_cast<int>(compute_ap(record.curve, p));
    return make_family(record.sign, record.conductor, std::move(bad), bound);
}

CoefficientTable record_coefficients(const CurveRecord& record, std::int64_t bound) {
    std::vector<char> in_family(static_cast<std::size_t>(std::max<std::int64_t>(bound, 0)) + 1, 0);
    enumerate_family(family_of(record, bound), [&](std::int64_t d) { in_family[std::llabs(d)] = 1; });
    return combine(record.name, record.half_form, bound, [&](std::int64_t n) { return in_family[n] != 0; });
}

// ---------------------------------------------------------------------------
// ingestion
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

const json& field(const json& j, const char* key, const std::string& who) {
    auto it = j.find(key);
    if (it == j.end()) throw DataError(who + ": missing field '" + key + "'");
    return *it;
}

std::int64_t as_int(const json& j, const std::string& what) {
    if (!j.is_number_integer()) throw DataError(what + " must be an integer");
    return j.get<std::int64_t>();
}

void validate(CurveRecord& rec) {
    const std::string& who = rec.name;
    const std::int64_t disc = rec.curve.discriminant();
    if (disc == 0) throw DataError(who + ": singular curve");
    if (!(rec.kappa > 0) || !std::isfinite(rec.kappa)) throw DataError(who + ": kappa must be positive");
    if (rec.conductor < 2 || !is_squarefree(rec.conductor)) throw DataError(who + ": conductor must be squarefree");
    if (rec.sign == TwistSign::real && !is_prime(rec.conductor))
        throw DataError(who + ": real family needs prime conductor");
    for (std::int64_t p : prime_divisors(rec.conductor))
        if (disc % p != 0) throw DataError(who + ": conductor prime " + std::to_string(p) + " does not divide disc");
    if (rec.modulus != family_modulus(rec.conductor))
        throw DataError(who + ": modulus " + std::to_string(rec.modulus) + " inconsistent with conductor");
    if (rec.half_form.forms.empty() || rec.half_form.forms.size() != rec.half_form.alphas.size())
        throw DataError(who + ": forms and alphas differ in length");
    for (const TernaryForm& f : rec.half_form.forms)
        if (!f.positive_definite()) throw DataError(who + ": form is not positive definite");
    if (rec.root_number && *rec.root_number != 1 && *rec.root_number != -1)
        throw DataError(who + ": root number must be +-1");
    if (rec.torsion_order && *rec.torsion_order < 1) throw DataError(who + ": torsion order must be positive");

    std::vector<std::int64_t> given = rec.residue_classes;
    std::sort(given.begin(), given.end());
    if (std::adjacent_find(given.begin(), given.end()) != given.end())
        throw DataError(who + ": repeated residue class");
    TwistFamilySpec spec;
    try {
        spec = family_of(rec, 0);
    } catch (const DataError& e) {
        throw DataError(who + ": " + e.what());
    }
    if (spec.residue_classes != given) throw DataError(who + ": residue classes disagree with recomputed a_p");
    rec.residue_classes = std::move(given);
}

}  // namespace

CurveRecord parse_record(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed record: ") + e.what());
    }
    if (!j.is_object()) throw DataError("record is not an object");

    CurveRecord rec;
    try {
        rec.name = field(j, "name", "record").get<std::string>();
        const std::string& who = rec.name;
        rec.sign = parse_sign(field(j, "sign", who).get<std::string>());

        const json& ai = field(j, "a_invariants", who);
        if (!ai.is_array() || ai.size() != 5) throw DataError(who + ": a_invariants needs 5 integers");
        for (std::size_t i = 0; i < 5; ++i) rec.curve.a[i] = as_int(ai[i], who + ": a_invariant");

        rec.conductor = as_int(field(j, "conductor", who), who + ": conductor");
        const json& kj = field(j, "kappa", who);
        rec.kappa_text = kj.is_string() ? kj.get<std::string>() : kj.dump();
        std::size_t used = 0;
        rec.kappa = std::stod(rec.kappa_text, &used);
        if (used != rec.kappa_text.size()) throw DataError(who + ": bad kappa '" + rec.kappa_text + "'");
        rec.modulus = as_int(field(j, "modulus", who), who + ": modulus");

        for (const json& r : field(j, "residue_classes", who)) rec.residue_classes.push_back(as_int(r, who + ": class"));
        for (const json& a : field(j, "alphas", who))
            rec.half_form.alphas.push_back(parse_rational(a.is_string() ? a.get<std::string>() : a.dump()));
        for (const json& f : field(j, "forms", who)) {
            if (!f.is_array() || f.size() != 6) throw DataError(who + ": form needs 6 integers");
            TernaryForm t;
            for (std::size_t i = 0; i < 6; ++i) t.beta[i] = as_int(f[i], who + ": form coefficient");
            rec.half_form.forms.push_back(t);
        }
        if (auto it = j.find("torsion_order"); it != j.end() && !it->is_null())
            rec.torsion_order = static_cast<int>(as_int(*it, who + ": torsion_order"));
        if (auto it = j.find("root_number"); it != j.end() && !it->is_null())
            rec.root_number = static_cast<int>(as_int(*it, who + ": root_number"));
    } catch (const json::exception& e) {
        throw DataError(rec.name + ": " + e.what());
    } catch (const std::invalid_argument&) {
        throw DataError(rec.name + ": bad number");
    } catch (const std::out_of_range&) {
        throw DataError(rec.name + ": number out of range");
    }
    validate(rec);
    return rec;
}

std::vector<CurveRecord> ingest_database(std::istream& in) {
    std::vector<CurveRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        try {
            out.push_back(parse_record(line));
        } catch (const DataError& e) {
            throw DataError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::vector<CurveRecord> ingest_database(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open curve database " + path.string());
    return ingest_database(in);
}

const CurveRecord& find_curve(const std::vector<CurveRecord>& records, const std::string& name) {
    for (const CurveRecord& r : records)
        if (r.name == name) return r;
    throw DataError("curve '" + name + "' not in database");
}

}  // namespace twistlab
