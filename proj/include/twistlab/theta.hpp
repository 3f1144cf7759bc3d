#pragma once

#include <array>
#include <cstdint>
#include <climits>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace twistlab {

using Rational = boost::rational<std::int64_t>;

/// Parses "p/q" or "p" into a reduced rational.
Rational parse_rational(const std::string& text);

/// f(x,y,z) = b1 x^2 + b2 y^2 + b3 z^2 + b4 yz + b5 xz + b6 xy.
struct TernaryForm {
    std::array<std::int64_t, 6> beta{};

    std::int64_t operator()(std::int64_t x, std::int64_t y, std::int64_t z) const {
        return beta[0] * x * x + beta[1] * y * y + beta[2] * z * z + beta[3] * y * z + beta[4] * x * z +
               beta[5] * x * y;
    }

    /// det of the integral Gram matrix [[2b1,b6,b5],[b6,2b2,b4],[b5,b4,2b3]].
    std::int64_t gram_determinant() const;
    bool positive_definite() const;
    /// Smallest eigenvalue of the matrix A with f(v) = v^T A v.
    double min_eigenvalue() const;
};

/// Rational combination sum_j alpha_j theta_{beta_j}.
struct HalfIntegralForm {
    std::vector<TernaryForm> forms;
    std::vector<Rational> alphas;

    /// lcm of the alpha denominators.
    std::int64_t denominator() const;
};

/// Marks c(n) that is not an integer at an n no consumer needs.
inline constexpr std::int64_t kNonIntegral = INT64_MIN;

/// Exact coefficients c(n) of a half-integral weight form for 2 <= n <= bound.
/// values[n] holds c(n); values[0] and values[1] are stored as 0 because c(1)
/// is not part of the normalization.
struct CoefficientTable {
    std::string curve;
    std::int64_t bound = 0;
    std::vector<std::int64_t> values;

    /// DomainError outside [2, bound], DataError at a kNonIntegral entry.
    std::int64_t at(std::int64_t n) const;
    bool operator==(const CoefficientTable&) const = default;
};

/// r(n) = #{(x,y,z) in Z^3 : f(x,y,z) = n} for 0 <= n <= bound.
///
/// Walks x over the exact projection of the ellipsoid f <= bound, y over the
/// projection of the slice, and z over the exact root interval, updating
/// f incrementally along z. Points with x > 0 are counted twice for -v.
/// Throws DomainError for indefinite forms or bounds that risk overflow.
std::vector<std::int64_t> representation_numbers(const TernaryForm& form, std::int64_t bound);

/// c(n) = sum_j alpha_j r_j(n). A non-integral c(n) is a DataError when
/// `required(n)` holds (or `required` is empty); otherwise it is stored as
/// kNonIntegral.
CoefficientTable combine(const std::string& curve, const HalfIntegralForm& half, std::int64_t bound,
                         const std::function<bool(std::int64_t)>& required = {});

/// kappa c^2 / sqrt|d|; exactly 0.0 iff c == 0.
double lvalue_from_coefficient(double kappa, std::int64_t c, std::int64_t d);

// ---------------------------------------------------------------------------
// Coefficient cache
//
// Little-endian layout:
//   0   4  magic "TLCC"
//   4   2  format version (1)
//   6   2  reserved (0)
//   8   8  FNV-1a 64 digest of the curve name
//   16  8  bound X (signed)
//   24  8  entry count (X - 1)
//   32  8*count  signed c(2), ..., c(X)
//   end 8  FNV-1a 64 of the entry bytes
// ---------------------------------------------------------------------------

inline constexpr std::uint16_t kCacheVersion = 1;

std::uint64_t fnv1a64(std::span<const unsigned char> bytes);

void cache_store(const CoefficientTable& table, const std::filesystem::path& path);

/// Loads and validates; the stored bound must equal `bound`.
CoefficientTable cache_load(const std::filesystem::path& path, const std::string& curve, std::int64_t bound);

/// Loads and validates the header digest and checksum, accepting any bound.
CoefficientTable cache_load(const std::filesystem::path& path, const std::string& curve);

}  // namespace twistlab
