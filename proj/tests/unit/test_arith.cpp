#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <numeric>
#include <set>

#include "twistlab/arith.hpp"
#include "twistlab/curve.hpp"
#include "twistlab/errors.hpp"

using namespace twistlab;

namespace {

// Legendre symbol by listing squares mod an odd prime.
int legendre_squares(std::int64_t a, std::int64_t p) {
    a = ((a % p) + p) % p;
    if (a == 0) return 0;
    for (std::int64_t x = 1; x < p; ++x)
        if (x * x % p == a) return 1;
    return -1;
}

// Kronecker (d/n) for n > 0 from its prime factorisation and the (d/2) rule.
int kronecker_oracle(std::int64_t d, std::int64_t n) {
    int r = 1;
    for (std::int64_t p = 2; n > 1; ++p) {
        while (n % p == 0) {
            n /= p;
            if (p == 2) {
                if (d % 2 == 0) return 0;
                const std::int64_t m = ((d % 8) + 8) % 8;
                r *= (m == 1 || m == 7) ? 1 : -1;
            } else {
                r *= legendre_squares(d, p);
            }
        }
    }
    return r;
}

bool squarefree_oracle(std::int64_t n) {
    n = std::llabs(n);
    for (std::int64_t f = 2; f * f <= n; ++f)
        if (n % (f * f) == 0) return false;
    return n != 0;
}

bool fundamental_oracle(std::int64_t d) {
    const std::int64_t m4 = ((d % 4) + 4) % 4;
    if (d == 0 || d == 1) return false;
    if (m4 == 1) return squarefree_oracle(d);
    if (m4 != 0) return false;
    const std::int64_t m = d / 4;
    const std::int64_t mm = ((m % 4) + 4) % 4;
    return (mm == 2 || mm == 3) && squarefree_oracle(m);
}

TwistFamilySpec family_11a(std::int64_t X) { return make_family(TwistSign::imaginary, 11, {{11, 1}}, X); }

std::vector<CurveRecord> curve_db() {
    return ingest_database(std::filesystem::path(TWISTLAB_SOURCE_DIR) / "data" / "curves.jsonl");
}

}  // namespace

TEST_CASE("kronecker examples") {
    CHECK(kronecker(-3, 11) == -1);
    CHECK(kronecker(-4, 11) == -1);
    CHECK(kronecker(5, 1) == 1);
    CHECK(kronecker(1, 0) == 1);
    CHECK(kronecker(2, 0) == 0);
}

TEST_CASE("kronecker matches factorisation oracle") {
    for (std::int64_t d = -60; d <= 60; ++d)
        for (std::int64_t n = 1; n <= 60; ++n) CHECK(kronecker(d, n) == kronecker_oracle(d, n));
}

TEST_CASE("kronecker multiplicativity in the second argument") {
    std::vector<std::int64_t> ds;
    for (std::int64_t d = -500; d <= 500; ++d)
        if (fundamental_oracle(d)) ds.push_back(d);
    for (std::size_t i = 0; i < ds.size(); i += 7)
        for (std::int64_t m = -1000; m <= 1000; m += 37)
            for (std::int64_t n = -1000; n <= 1000; n += 41)
                CHECK(kronecker(ds[i], m * n) == kronecker(ds[i], m) * kronecker(ds[i], n));
}

TEST_CASE("fundamental discriminants") {
    CHECK(is_fundamental(-3));
    CHECK(is_fundamental(-4));
    CHECK(is_fundamental(-8));
    CHECK_FALSE(is_fundamental(-5));
    CHECK(is_fundamental(12));
    for (std::int64_t d = -2000; d <= 2000; ++d) CHECK(is_fundamental(d) == fundamental_oracle(d));
}

TEST_CASE("primes and squarefree") {
    CHECK(primes_up_to(10) == std::vector<std::int64_t>{2, 3, 5, 7});
    CHECK_FALSE(is_squarefree(12));
    CHECK(is_squarefree(11));
    const auto ps = primes_up_to(5000);
    for (std::int64_t n = 0; n <= 5000; ++n) CHECK(is_prime(n) == std::binary_search(ps.begin(), ps.end(), n));
    CHECK(prime_divisors(-360) == std::vector<std::int64_t>{2, 3, 5});
}

TEST_CASE("membership examples for 11A") {
    const auto f = family_11a(100);
    CHECK(membership(f, -3));
    CHECK(membership(f, -4));
    CHECK_FALSE(membership(f, -7));
    CHECK_THROWS_AS(membership(f, -11), DomainError);
    CHECK(f.residue_classes == std::vector<std::int64_t>{1, 3, 4, 5, 9});
}

TEST_CASE("enumeration matches brute force at X = 50") {
    const auto f = family_11a(50);
    std::vector<std::int64_t> brute;
    for (std::int64_t a = 1; a <= 50; ++a) {
        const std::int64_t d = -a;
        if (!fundamental_oracle(d) || std::gcd(a, std::int64_t(11)) != 1) continue;
        if (kronecker_oracle(d, 11) == -1) brute.push_back(d);
    }
    CHECK(family_discriminants(f) == brute);
    CHECK(brute.front() == -3);
    CHECK(count_family(family_11a(2)) == 0);
}

TEST_CASE("enumeration matches brute force for every database family") {
    for (const auto& rec : curve_db()) {
        CAPTURE(rec.name);
        const auto f = family_of(rec, 3000);
        std::vector<std::int64_t> brute;
        for (std::int64_t a = 2; a <= 3000; ++a) {
            const std::int64_t d = rec.sign == TwistSign::imaginary ? -a : a;
            if (!fundamental_oracle(d) || std::gcd(a, rec.conductor) != 1) continue;
            bool ok = true;
            for (const auto& [p, ap] : f.bad_ap) {
                const int chi = kronecker_oracle(d, p);
                ok = ok && (rec.sign == TwistSign::imaginary ? chi == -ap : chi == ap);
            }
            if (ok) brute.push_back(d);
        }
        CHECK(family_discriminants(f) == brute);
    }
}

TEST_CASE("character and residue predicates agree on every database family at X = 1e4") {
    for (const auto& rec : curve_db()) {
        CAPTURE(rec.name);
        const auto f = family_of(rec, 10000);
        enumerate_family(f, [&](std::int64_t d) {
            CHECK(character_predicate(f, d));
            CHECK(residue_predicate(f, d));
        });
        for (std::int64_t a = 3; a <= 10000; ++a) {
            const std::int64_t d = rec.sign == TwistSign::imaginary ? -a : a;
            if (!is_fundamental(d) || gcd(a, rec.conductor) != 1) continue;
            CHECK(character_predicate(f, d) == residue_predicate(f, d));
        }
    }
}

TEST_CASE("family counts are monotone and the density settles") {
    std::int64_t last = 0;
    for (std::int64_t X = 1000; X <= 20000; X += 1000) {
        const std::int64_t c = count_family(family_11a(X));
        CHECK(c >= last);
        last = c;
    }
    const double a = double(count_family(family_11a(100000))) / 1e5;
    const double b = double(count_family(family_11a(200000))) / 2e5;
    CHECK(std::abs(a - b) / b < 5e-3);
}
