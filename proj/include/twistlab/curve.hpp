#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "twistlab/arith.hpp"
#include "twistlab/theta.hpp"

namespace twistlab {

/// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6
struct WeierstrassCurve {
    std::array<std::int64_t, 5> a{};  // a1, a2, a3, a4, a6

    std::int64_t b2() const { return a[0] * a[0] + 4 * a[1]; }
    std::int64_t b4() const { return 2 * a[3] + a[0] * a[2]; }
    std::int64_t b6() const { return a[2] * a[2] + 4 * a[4]; }
    std::int64_t b8() const;
    std::int64_t c4() const;
    std::int64_t c6() const;
    std::int64_t discriminant() const;
};

/// One entry of the curve/theta database.
struct CurveRecord {
    std::string name;
    WeierstrassCurve curve;
    std::int64_t conductor = 0;
    TwistSign sign = TwistSign::imaginary;
    double kappa = 0.0;
    std::string kappa_text;  // as printed in the database
    std::int64_t modulus = 0;
    std::vector<std::int64_t> residue_classes;
    HalfIntegralForm half_form;
    std::optional<int> torsion_order;
    std::optional<int> root_number;
};

/// Affine point count of the long Weierstrass equation over F_p by full
/// enumeration, split into all solutions and singular solutions.
struct PointCount {
    std::int64_t affine = 0;
    std::int64_t singular = 0;
};
PointCount count_points_exhaustive(const WeierstrassCurve& curve, std::int64_t p);

/// a_p = p + 1 - #E(F_p) for good p; for p | Q, a_p = p - #E_ns(F_p).
/// p in {2, 3}: exhaustive count of the long form. p > 3: -sum_x (f(x)/p) on
/// the short model y^2 = x^3 - 27 c4 x - 54 c6 (this also covers nodal
/// reduction, where the node contributes one affine point).
/// Throws DomainError for composite p.
std::int64_t compute_ap(const WeierstrassCurve& curve, std::int64_t p);

/// a_p for all primes up to a bound, plus the good/multiplicative flag.
class EulerFactorData {
public:
    EulerFactorData(WeierstrassCurve curve, std::int64_t conductor, std::int64_t bound);
    explicit EulerFactorData(const CurveRecord& record, std::int64_t bound = 1000)
        : EulerFactorData(record.curve, record.conductor, bound) {}

    /// Grows the table so every prime <= bound is covered.
    void extend(std::int64_t bound);

    std::int64_t bound() const { return bound_; }
    std::int64_t conductor() const { return conductor_; }
    const WeierstrassCurve& curve() const { return curve_; }
    const std::vector<std::int64_t>& primes() const { return primes_; }
    const std::vector<std::int64_t>& ap_values() const { return ap_; }

    /// a_p for prime p <= bound(); DomainError otherwise.
    std::int64_t ap(std::int64_t p) const;
    bool is_good(std::int64_t p) const { return conductor_ % p != 0; }

private:
    WeierstrassCurve curve_;
    std::int64_t conductor_;
    std::int64_t bound_ = 1;
    std::vector<std::int64_t> primes_;
    std::vector<std::int64_t> ap_;
    std::vector<std::int32_t> index_;  // index_[p] = position of p in primes_, -1 if not prime
};

/// a_1..a_N (index 0 unused, set to 0). Extends `data` as needed.
std::vector<std::int64_t> dirichlet_coefficients(EulerFactorData& data, std::int64_t count);

/// 1/(1 - a_p x + p x^2) for good p, 1/(1 - a_p x) for p | Q.
std::complex<double> local_euler_factor(const EulerFactorData& data, std::int64_t p, std::complex<double> x);

struct DirectLOptions {
    double eps = 1e-10;
    std::int64_t coefficient_budget = 20'000'000;
};

/// L_E(1, chi_d) from the exponentially smoothed series
///   2 sum_n a_n chi_d(n)/n exp(-2 pi n / (sqrt(Q) |d|)),
/// valid when the twisted functional equation has sign +1 and gcd(d, Q) = 1.
/// Truncation uses |a_n| <= n, which gives the geometric tail
///   2 exp(-alpha N) / (1 - exp(-alpha)), alpha = 2 pi / (sqrt(Q)|d|).
double direct_l_value(EulerFactorData& data, std::int64_t d, const DirectLOptions& options = {});

/// Number of terms the smoothed series needs for absolute error eps.
std::int64_t direct_l_terms(std::int64_t conductor, std::int64_t d, double eps);

/// Family spec for a record with bound X, a_p of bad primes computed from the curve.
TwistFamilySpec family_of(const CurveRecord& record, std::int64_t bound);

/// c(n) for 2 <= n <= bound, integrality enforced on |d| for d in the family.
CoefficientTable record_coefficients(const CurveRecord& record, std::int64_t bound);

// ---------------------------------------------------------------------------
// Database ingestion: one JSON object per line,
//   {"name": "11A_i", "sign": "imaginary", "a_invariants": [0,-1,1,-10,-20],
//    "conductor": 11, "kappa": "2.91763323388", "modulus": 11,
//    "residue_classes": [1,3,4,5,9], "alphas": ["1/2","-1/2"],
//    "forms": [[3,15,15,-14,-2,-2],[4,11,12,0,-4,0]],
//    "torsion_order": 5, "root_number": 1}
// torsion_order and root_number are optional. Blank lines and lines starting
// with '#' are skipped.
// ---------------------------------------------------------------------------

std::vector<CurveRecord> ingest_database(std::istream& in);
std::vector<CurveRecord> ingest_database(const std::filesystem::path& path);
CurveRecord parse_record(const std::string& line);

const CurveRecord& find_curve(const std::vector<CurveRecord>& records, const std::string& name);

}  // namespace twistlab
