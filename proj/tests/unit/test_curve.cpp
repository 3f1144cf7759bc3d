#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "twistlab/curve.hpp"
#include "twistlab/errors.hpp"
#include "twistlab/theta.hpp"

using namespace twistlab;

namespace {

const WeierstrassCurve k11a{{0, -1, 1, -10, -20}};

std::vector<CurveRecord> curve_db() {
    return ingest_database(std::filesystem::path(TWISTLAB_SOURCE_DIR) / "data" / "curves.jsonl");
}

// #E(F_p) including infinity for good p, by looping over all (x, y).
std::int64_t projective_count(const WeierstrassCurve& e, std::int64_t p) {
    std::int64_t n = 1;
    const auto& a = e.a;
    for (std::int64_t x = 0; x < p; ++x)
        for (std::int64_t y = 0; y < p; ++y) {
            const std::int64_t lhs = y * y + a[0] * x * y + a[2] * y;
            const std::int64_t rhs = x * x * x + a[1] * x * x + a[3] * x + a[4];
            if (((lhs - rhs) % p + p) % p == 0) ++n;
        }
    return n;
}

}  // namespace

TEST_CASE("11A a_p values") {
    CHECK(compute_ap(k11a, 2) == -2);
    CHECK(compute_ap(k11a, 3) == -1);
    CHECK(compute_ap(k11a, 5) == 1);
    CHECK(compute_ap(k11a, 7) == -2);
    CHECK(compute_ap(k11a, 11) == 1);
    CHECK(compute_ap(k11a, 13) == 4);
    CHECK_THROWS_AS(compute_ap(k11a, 15), DomainError);
}

TEST_CASE("a_p agrees with brute-force point counts at good primes") {
    for (const auto& rec : curve_db()) {
        CAPTURE(rec.name);
        EulerFactorData data(rec, 200);
        for (std::int64_t p : data.primes()) {
            if (!data.is_good(p)) continue;
            CAPTURE(p);
            CHECK(data.ap(p) == p + 1 - projective_count(rec.curve, p));
        }
    }
}

TEST_CASE("bad primes have multiplicative reduction") {
    for (const auto& rec : curve_db())
        for (std::int64_t p : prime_divisors(rec.conductor)) {
            CAPTURE(rec.name);
            CAPTURE(p);
            const std::int64_t a = compute_ap(rec.curve, p);
            CHECK(std::abs(a) == 1);
        }
}

TEST_CASE("Hasse bound up to 1e4 on every curve") {
    for (const auto& rec : curve_db()) {
        EulerFactorData data(rec, 10000);
        for (std::size_t i = 0; i < data.primes().size(); ++i) {
            const double p = double(data.primes()[i]);
            CHECK(double(data.ap_values()[i] * data.ap_values()[i]) <= 4.0 * p);
        }
    }
}

TEST_CASE("Dirichlet coefficients reproduce the Euler product to n = 200") {
    EulerFactorData data(WeierstrassCurve{k11a}, 11, 300);
    const auto a = dirichlet_coefficients(data, 200);
    CHECK(a[1] == 1);
    CHECK(a[4] == 2);
    // formal product of the local series, truncated at 200
    std::vector<std::int64_t> prod(201, 0);
    prod[1] = 1;
    for (std::int64_t p : primes_up_to(200)) {
        std::vector<std::int64_t> local(201, 0);
        local[1] = 1;
        std::int64_t prev = 1, cur = data.ap(p);
        for (std::int64_t pk = p; pk <= 200; pk *= p) {
            local[pk] = cur;
            const std::int64_t next = data.ap(p) * cur - (data.is_good(p) ? p * prev : 0);
            prev = cur;
            cur = next;
        }
        std::vector<std::int64_t> out(201, 0);
        for (std::int64_t m = 1; m <= 200; ++m)
            if (prod[m])
                for (std::int64_t n = 1; m * n <= 200; ++n) out[m * n] += prod[m] * local[n];
        prod = out;
    }
    for (int n = 1; n <= 200; ++n) CHECK(a[n] == prod[n]);
}

TEST_CASE("local Euler factors") {
    EulerFactorData data(WeierstrassCurve{k11a}, 11, 100);
    CHECK(std::abs(local_euler_factor(data, 7, 0.0) - 1.0) < 1e-15);
    CHECK(std::abs(local_euler_factor(data, 11, 1.0 / 11) - 1.1) < 1e-14);
    CHECK(std::abs(local_euler_factor(data, 2, 0.5) - 0.4) < 1e-15);
}

TEST_CASE("ingestion of the 11A fixture") {
    const auto recs = ingest_database(std::filesystem::path(TWISTLAB_SOURCE_DIR) / "tests" / "fixtures" / "11A.jsonl");
    REQUIRE(recs.size() == 2);
    const auto& i = recs[0];
    CHECK(i.name == "11A_i");
    CHECK(i.curve.a == std::array<std::int64_t, 5>{0, -1, 1, -10, -20});
    CHECK(i.kappa == doctest::Approx(2.91763323388).epsilon(1e-14));
    CHECK(i.residue_classes == std::vector<std::int64_t>{1, 3, 4, 5, 9});
    CHECK(i.half_form.forms.size() == 2);
    CHECK(i.half_form.alphas[0] == Rational(1, 2));
    CHECK(i.half_form.alphas[1] == Rational(-1, 2));
    CHECK(recs[1].half_form.forms.size() == 6);
    CHECK(recs[1].half_form.denominator() == 10);
    CHECK(curve_db().size() == 26);
}

TEST_CASE("ingestion edge cases and rejections") {
    std::istringstream empty("");
    CHECK(ingest_database(empty).empty());
    std::istringstream comments("# header\n\n");
    CHECK(ingest_database(comments).empty());

    const std::string good =
        R"({"name": "11A_i", "sign": "imaginary", "a_invariants": [0,-1,1,-10,-20], "conductor": 11,)"
        R"( "kappa": "2.91763323388", "modulus": 11, "residue_classes": [1,3,4,5,9], "alphas": ["1/2","-1/2"],)"
        R"( "forms": [[3,15,15,-14,-2,-2],[4,11,12,0,-4,0]]})";
    CHECK_NOTHROW(parse_record(good));
    auto bad = [&](const std::string& from, const std::string& to) {
        std::string s = good;
        s.replace(s.find(from), from.size(), to);
        return s;
    };
    CHECK_THROWS_AS(parse_record(bad("[1,3,4,5,9]", "[1,3,4,5,10]")), DataError);
    CHECK_THROWS_AS(parse_record(bad("\"modulus\": 11", "\"modulus\": 44")), DataError);
    CHECK_THROWS_AS(parse_record(bad("[3,15,15,-14,-2,-2]", "[3,15,-15,-14,-2,-2]")), DataError);
    CHECK_THROWS_AS(parse_record(bad("\"2.91763323388\"", "\"-1\"")), DataError);
    CHECK_THROWS_AS(parse_record(bad("[0,-1,1,-10,-20]", "[0,0,0,0,0]")), DataError);
    CHECK_THROWS_AS(parse_record(bad("[\"1/2\",\"-1/2\"]", "[\"1/2\"]")), DataError);
    CHECK_THROWS_AS(parse_record("{not json"), DataError);
    std::istringstream numbered(good + "\n{}\n");
    try {
        ingest_database(numbered);
        FAIL("expected a DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("direct L-series examples for 11A") {
    EulerFactorData data(WeierstrassCurve{k11a}, 11, 1000);
    CHECK(direct_l_value(data, -3) == doctest::Approx(2.91763323388 / std::sqrt(3.0)).epsilon(1e-9));
    CHECK(direct_l_value(data, -4) == doctest::Approx(2.91763323388 / 2.0).epsilon(1e-9));
    DirectLOptions tight;
    tight.coefficient_budget = 10;
    CHECK_THROWS_AS(direct_l_value(data, -300, tight), ConvergenceError);
}

TEST_CASE("Waldspurger relation against the direct series on every curve") {
    for (const auto& rec : curve_db()) {
        CAPTURE(rec.name);
        const auto fam = family_discriminants(family_of(rec, 2000));
        REQUIRE(fam.size() >= 20);
        std::int64_t top = 0;
        for (int i = 0; i < 20; ++i) top = std::max<std::int64_t>(top, std::llabs(fam[std::size_t(i)]));
        const CoefficientTable table = record_coefficients(rec, top);
        EulerFactorData data(rec, 1000);
        for (int i = 0; i < 20; ++i) {
            const std::int64_t d = fam[std::size_t(i)];
            const double theta_side = lvalue_from_coefficient(rec.kappa, table.at(std::llabs(d)), d);
            const double direct = direct_l_value(data, d);
            CAPTURE(d);
            CHECK(std::abs(theta_side - direct) <= std::max(1e-6, 1e-3 * std::abs(direct)));
        }
    }
}
