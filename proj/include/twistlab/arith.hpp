#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string_view>
#include <vector>

namespace twistlab {

enum class TwistSign { imaginary, real };

std::string_view to_string(TwistSign sign);
TwistSign parse_sign(std::string_view text);

// ---------------------------------------------------------------------------
// Primes and squarefree tests
// ---------------------------------------------------------------------------

/// Primes p <= bound, in increasing order (sieve of Eratosthenes).
std::vector<std::int64_t> primes_up_to(std::int64_t bound);

bool is_prime(std::int64_t n);
bool is_squarefree(std::int64_t n);

/// Distinct prime divisors of |n|, increasing. Trial division; n is small here.
std::vector<std::int64_t> prime_divisors(std::int64_t n);

std::int64_t gcd(std::int64_t a, std::int64_t b);

// ---------------------------------------------------------------------------
// Kronecker symbol and fundamental discriminants
// ---------------------------------------------------------------------------

/// Kronecker symbol (d/n), total on Z x Z. (d/0) is 1 for |d| = 1 and 0 otherwise.
int kronecker(std::int64_t d, std::int64_t n);

/// d = 1 mod 4 squarefree, or d = 4m with m = 2, 3 mod 4 squarefree.
bool is_fundamental(std::int64_t d);

// ---------------------------------------------------------------------------
// Restricted twist families S^-(X) and S^+(X)
// ---------------------------------------------------------------------------

struct TwistFamilySpec {
    TwistSign sign = TwistSign::imaginary;
    std::int64_t conductor = 1;
    std::map<std::int64_t, int> bad_ap;      // a_p in {-1,+1} for p | Q
    std::int64_t modulus = 1;                // Q, or 4Q when Q is even
    std::vector<std::int64_t> residue_classes;  // classes of |d| mod modulus, sorted
    std::int64_t bound = 0;                  // |d| <= bound
};

/// Q for odd squarefree Q, 4Q for even squarefree Q.
std::int64_t family_modulus(std::int64_t conductor);

/// Classes r mod family_modulus(Q) of |d| for which the character condition
/// holds: chi_d(p) = -a_p for all p | Q (imaginary), chi_d(Q) = a_Q (real).
std::vector<std::int64_t> residue_classes_from_ap(TwistSign sign, std::int64_t conductor,
                                                  const std::map<std::int64_t, int>& bad_ap);

/// Builds a family spec and validates the conductor shape for the sign.
TwistFamilySpec make_family(TwistSign sign, std::int64_t conductor,
                            std::map<std::int64_t, int> bad_ap, std::int64_t bound);

/// Character form of the membership test (does not check |d| <= bound).
bool character_predicate(const TwistFamilySpec& spec, std::int64_t d);

/// Residue-class form of the membership test (does not check |d| <= bound).
bool residue_predicate(const TwistFamilySpec& spec, std::int64_t d);

/// Full membership test. Throws DomainError when gcd(d, Q) > 1.
bool membership(const TwistFamilySpec& spec, std::int64_t d);

/// Calls emit(d) for every d in the family with |d| <= spec.bound, in
/// increasing |d|. Fundamental discriminants come from a segmented squarefree
/// sieve, so the cost is linear in the bound.
void enumerate_family(const TwistFamilySpec& spec, const std::function<void(std::int64_t)>& emit);

std::vector<std::int64_t> family_discriminants(const TwistFamilySpec& spec);
std::int64_t count_family(const TwistFamilySpec& spec);

}  // namespace twistlab
