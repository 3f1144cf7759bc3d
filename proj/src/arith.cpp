#include "twistlab/arith.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "twistlab/errors.hpp"

namespace twistlab {

std::string_view to_string(TwistSign sign) {
    return sign == TwistSign::imaginary ? "imaginary" : "real";
}

TwistSign parse_sign(std::string_view text) {
    if (text == "imaginary" || text == "i" || text == "-") return TwistSign::imaginary;
    if (text == "real" || text == "r" || text == "+") return TwistSign::real;
    throw DataError("unknown twist sign '" + std::string(text) + "'");
}

std::vector<std::int64_t> primes_up_to(std::int64_t bound) {
    std::vector<std::int64_t> primes;
    if (bound < 2) return primes;
    std::vector<bool> composite(static_cast<std::size_t>(bound) + 1, false);
    for (std::int64_t i = 2; i <= bound; ++i) {
        if (composite[i]) continue;
        primes.push_back(i);
        for (std::int64_t j = i * i; j <= bound; j += i) composite[j] = true;
    }
    return primes;
}

bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::int64_t f = 3; f * f <= n; f += 2)
        if (n % f == 0) return false;
    return true;
}

bool is_squarefree(std::int64_t n) {
    if (n == 0) return false;
    n = std::llabs(n);
    for (std::int64_t f = 2; f * f <= n; ++f) {
        if (n % f != 0) continue;
        n /= f;
        if (n % f == 0) return false;
    }
    return true;
}

std::vector<std::int64_t> prime_divisors(std::int64_t n) {
    std::vector<std::int64_t> out;
    n = std::llabs(n);
    for (std::int64_t f = 2; f * f <= n; ++f) {
        if (n % f != 0) continue;
        out.push_back(f);
        while (n % f == 0) n /= f;
    }
    if (n > 1) out.push_back(n);
    return out;
}

std::int64_t gcd(std::int64_t a, std::int64_t b) {
    a = std::llabs(a);
    b = std::llabs(b);
    while (b != 0) {
        std::int64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

namespace {

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

}  // namespace

int kronecker(std::int64_t d, std::int64_t n) {
    if (n == 0) return (d == 1 || d == -1) ? 1 : 0;
    if (d % 2 == 0 && n % 2 == 0) return 0;

    int result = 1;
    int twos = 0;
    while (n % 2 == 0) {
        n /= 2;
        ++twos;
    }
    if (twos % 2 == 1) {
        std::int64_t d8 = floor_mod(d, 8);
        if (d8 == 3 || d8 == 5) result = -result;
    }
    if (n < 0) {
        n = -n;
        if (d < 0) result = -result;
    }

    // Jacobi symbol (d/n) for odd n > 0.
    std::uint64_t b = static_cast<std::uint64_t>(n);
    std::uint64_t a = static_cast<std::uint64_t>(floor_mod(d, n));
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            std::uint64_t b8 = b % 8;
            if (b8 == 3 || b8 == 5) result = -result;
        }
        std::swap(a, b);
        if (a % 4 == 3 && b % 4 == 3) result = -result;
        a %= b;
    }
    return b == 1 ? result : 0;
}

bool is_fundamental(std::int64_t d) {
    if (d == 0 || d == 1) return false;
    std::int64_t r = floor_mod(d, 4);
    if (r == 1) return is_squarefree(d);
    if (r != 0) return false;
    std::int64_t m = d / 4;
    std::int64_t m4 = floor_mod(m, 4);
    return (m4 == 2 || m4 == 3) && is_squarefree(m);
}

std::int64_t family_modulus(std::int64_t conductor) {
    return conductor % 2 == 0 ? 4 * conductor : conductor;
}

namespace {

std::int64_t signed_d(TwistSign sign, std::int64_t abs_d) {
    return sign == TwistSign::imaginary ? -abs_d : abs_d;
}

bool character_holds(TwistSign sign, const std::map<std::int64_t, int>& bad_ap, std::int64_t conductor,
                     std::int64_t d) {
    if (sign == TwistSign::imaginary) {
        for (const auto& [p, ap] : bad_ap)
            if (kronecker(d, p) != -ap) return false;
        return true;
    }
    auto it = bad_ap.find(conductor);
    if (it == bad_ap.end()) throw DataError("real family needs a_Q for prime conductor");
    return kronecker(d, conductor) == it->second;
}

}  // namespace

std::vector<std::int64_t> residue_classes_from_ap(TwistSign sign, std::int64_t conductor,
                                                  const std::map<std::int64_t, int>& bad_ap) {
    const std::int64_t modulus = family_modulus(conductor);
    const bool even = conductor % 2 == 0;
    std::vector<std::int64_t> classes;
    for (std::int64_t r = 1; r < modulus; ++r) {
        if (gcd(r, conductor) != 1) continue;
        if (even) {
            // d odd and fundamental forces d = 1 mod 4.
            if (r % 2 == 0) continue;
            if (floor_mod(signed_d(sign, r), 4) != 1) continue;
        }
        if (character_holds(sign, bad_ap, conductor, signed_d(sign, r))) classes.push_back(r);
    }
    return classes;
}

TwistFamilySpec make_family(TwistSign sign, std::int64_t conductor, std::map<std::int64_t, int> bad_ap,
                            std::int64_t bound) {
    if (conductor < 2) throw DataError("conductor must be at least 2");
    if (sign == TwistSign::imaginary && !is_squarefree(conductor))
        throw DataError("imaginary family requires squarefree conductor");
    if (sign == TwistSign::real && !is_prime(conductor))
        throw DataError("real family requires prime conductor");
    for (std::int64_t p : prime_divisors(conductor)) {
        auto it = bad_ap.find(p);
        if (it == bad_ap.end() || (it->second != 1 && it->second != -1))
            throw DataError("missing or invalid a_p for bad prime " + std::to_string(p));
    }
    TwistFamilySpec spec;
    spec.sign = sign;
    spec.conductor = conductor;
    spec.modulus = family_modulus(conductor);
    spec.residue_classes = residue_classes_from_ap(sign, conductor, bad_ap);
    spec.bad_ap = std::move(bad_ap);
    spec.bound = bound;
    return spec;
}

bool character_predicate(const TwistFamilySpec& spec, std::int64_t d) {
    if (spec.sign == TwistSign::real && d <= 1) return false;
    if (spec.sign == TwistSign::imaginary && d >= 0) return false;
    if (gcd(d, spec.conductor) != 1) return false;
    return character_holds(spec.sign, spec.bad_ap, spec.conductor, d);
}

bool residue_predicate(const TwistFamilySpec& spec, std::int64_t d) {
    if (spec.sign == TwistSign::real && d <= 1) return false;
    if (spec.sign == TwistSign::imaginary && d >= 0) return false;
    std::int64_t r = std::llabs(d) % spec.modulus;
    return std::binary_search(spec.residue_classes.begin(), spec.residue_classes.end(), r);
}

bool membership(const TwistFamilySpec& spec, std::int64_t d) {
    if (gcd(d, spec.conductor) != 1)
        throw DomainError("gcd(d, Q) > 1 for d = " + std::to_string(d));
    if (std::llabs(d) > spec.bound || !is_fundamental(d)) return false;
    return character_predicate(spec, d);
}

namespace {

// flags[i] = 1 iff lo + i is squarefree, for the half-open range [lo, hi).
void squarefree_segment(std::int64_t lo, std::int64_t hi, const std::vector<std::int64_t>& primes,
                        std::vector<unsigned char>& flags) {
    flags.assign(static_cast<std::size_t>(std::max<std::int64_t>(hi - lo, 0)), 1);
    if (lo == 0 && hi > 0) flags[0] = 0;
    for (std::int64_t p : primes) {
        std::int64_t sq = p * p;
        if (sq >= hi) break;
        std::int64_t start = ((lo + sq - 1) / sq) * sq;
        for (std::int64_t m = start; m < hi; m += sq) flags[m - lo] = 0;
    }
}

}  // namespace

void enumerate_family(const TwistFamilySpec& spec, const std::function<void(std::int64_t)>& emit) {
    const std::int64_t bound = spec.bound;
    if (bound < 3) return;

    std::vector<unsigned char> in_class(static_cast<std::size_t>(spec.modulus), 0);
    for (std::int64_t r : spec.residue_classes) in_class[r] = 1;

    const auto root = static_cast<std::int64_t>(std::sqrt(static_cast<double>(bound))) + 2;
    const std::vector<std::int64_t> primes = primes_up_to(root);
    const std::int64_t sign = spec.sign == TwistSign::imaginary ? -1 : 1;
    constexpr std::int64_t segment = std::int64_t{1} << 20;

    std::vector<unsigned char> sf_n;
    std::vector<unsigned char> sf_quarter;
    for (std::int64_t lo = 1; lo <= bound; lo += segment) {
        const std::int64_t hi = std::min(lo + segment, bound + 1);
        squarefree_segment(lo, hi, primes, sf_n);
        const std::int64_t qlo = lo / 4;
        const std::int64_t qhi = (hi - 1) / 4 + 1;
        squarefree_segment(qlo, qhi, primes, sf_quarter);

        for (std::int64_t n = lo; n < hi; ++n) {
            if (!in_class[n % spec.modulus]) continue;
            const std::int64_t d = sign * n;
            bool fundamental = false;
            if (n % 2 == 1) {
                fundamental = floor_mod(d, 4) == 1 && sf_n[n - lo];
            } else if (n % 4 == 0) {
                const std::int64_t m4 = floor_mod(d / 4, 4);
                fundamental = (m4 == 2 || m4 == 3) && sf_quarter[n / 4 - qlo];
            }
            if (!fundamental || d == 1) continue;
            emit(d);
        }
    }
}

std::vector<std::int64_t> family_discriminants(const TwistFamilySpec& spec) {
    std::vector<std::int64_t> out;
    enumerate_family(spec, [&](std::int64_t d) { out.push_back(d); });
    return out;
}

std::int64_t count_family(const TwistFamilySpec& spec) {
    std::int64_t count = 0;
    enumerate_family(spec, [&](std::int64_t) { ++count; });
    return count;
}

}  // namespace twistlab
