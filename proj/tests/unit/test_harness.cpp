#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "twistlab/curve.hpp"
#include "twistlab/errors.hpp"
#include "twistlab/harness.hpp"
#include "twistlab/stats.hpp"

using namespace twistlab;

namespace {

const std::vector<CurveRecord>& records() {
    static const auto r = ingest_database(std::filesystem::path(TWISTLAB_SOURCE_DIR) / "tests" / "fixtures" / "11A.jsonl");
    return r;
}

const SweepResult& sweep_11a_i(std::int64_t X) {
    static std::map<std::int64_t, SweepResult> memo;
    auto it = memo.find(X);
    if (it == memo.end()) {
        const auto& rec = find_curve(records(), "11A_i");
        it = memo.emplace(X, sweep(rec, record_coefficients(rec, X), X)).first;
    }
    return it->second;
}

}  // namespace

TEST_CASE("compensated sums") {
    std::vector<double> v(100000, 0.1);
    v.push_back(1e16);
    v.push_back(-1e16);
    CHECK(stable_sum(v) == doctest::Approx(10000.0).epsilon(1e-12));
    CompensatedSum s;
    s.add(1.0);
    s.add(1e100);
    s.add(1.0);
    s.add(-1e100);
    CHECK(s.value() == 2.0);
}

TEST_CASE("KS statistic and linear fit") {
    const std::vector<double> one{0.0};
    CHECK(ks_statistic(one, normal_cdf) == doctest::Approx(0.5));
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    std::vector<double> xs(20000);
    for (double& x : xs) x = nd(rng);
    std::sort(xs.begin(), xs.end());
    CHECK(ks_statistic(xs, normal_cdf) < 0.015);
    CHECK(ks_statistic(xs, [](double x) { return normal_cdf(x - 0.5); }) > 0.15);
    const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
    const auto f = linear_fit(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r2 == doctest::Approx(1.0));
    const GridInterpolant g({0, 1, 2}, {0, 10, 30});
    CHECK(g(0.5) == doctest::Approx(5.0));
    CHECK(g(1.5) == doctest::Approx(20.0));
    CHECK(g(5.0) == 30.0);
}

TEST_CASE("sweep basics") {
    const auto& rec = find_curve(records(), "11A_i");
    const auto table = record_coefficients(rec, 100);
    CHECK(sweep(rec, table, 2).size() == 0);
    const auto r50 = sweep(rec, table, 50);
    const auto fam = family_discriminants(family_of(rec, 50));
    REQUIRE(r50.size() == fam.size());
    for (std::size_t i = 0; i < fam.size(); ++i) {
        CHECK(r50.samples[i].d == fam[i]);
        CHECK((r50.samples[i].lvalue == 0.0) == (r50.samples[i].c == 0));
        CHECK(r50.samples[i].lvalue >= 0.0);
    }
    CHECK(r50.samples[0].c * r50.samples[0].c == 1);
    CHECK_THROWS_AS(sweep(rec, table, 101), DataError);
}

TEST_CASE("empirical moments") {
    const auto& r = sweep_11a_i(20000);
    CHECK(empirical_moment(r, 0).mean == 1.0);
    CompensatedSum direct;
    std::int64_t zeros = 0;
    for (const auto& s : r.samples) {
        direct.add(r.kappa * double(s.c) * double(s.c) / std::sqrt(double(std::llabs(s.d))));
        zeros += s.c == 0;
    }
    const auto m1 = empirical_moment(r, 1);
    CHECK(std::abs(m1.sum - direct.value()) / direct.value() < 1e-10);
    CHECK(m1.mean == doctest::Approx(direct.value() / double(r.size())).epsilon(1e-12));
    CHECK(m1.count == std::int64_t(r.size()));
    CHECK(empirical_moment(r, 0.5).count == std::int64_t(r.size()) - zeros);
    CHECK(empirical_moment(r, 2).sum == doctest::Approx(r.moment_sums[2]));
    CHECK(r.vanishing == zeros);
}

TEST_CASE("histogram") {
    const auto& r = sweep_11a_i(20000);
    HistogramSpec spec;
    spec.rmt_N = 0;
    const auto h = value_histogram(r, spec, 0.2);
    CHECK(h.mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(h.zeros == r.vanishing);
    std::int64_t total = h.below + h.above + h.zeros;
    for (const auto& b : h.bins) total += b.count;
    CHECK(total == std::int64_t(r.size()));
    spec.logarithmic = true;
    spec.lo = 1e-3;
    spec.hi = 20;
    CHECK(value_histogram(r, spec, 0.2).mass() == doctest::Approx(1.0).epsilon(1e-12));
    spec.lo = 0;
    CHECK_THROWS_AS(value_histogram(r, spec, 0.2), DomainError);
}

TEST_CASE("CLT and distribution transforms equal their coefficient-space forms") {
    const auto& r = sweep_11a_i(20000);
    const auto clt = clt_transform(r);
    REQUIRE(!clt.value.empty());
    for (std::size_t i = 0; i < clt.value.size(); ++i) {
        const double ll = std::log(std::log(double(std::llabs(clt.d[i]))));
        CHECK(clt.value[i] - clt.coefficient[i] == doctest::Approx(std::log(r.kappa) / std::sqrt(ll)).epsilon(1e-9));
    }
    const auto dist = distribution_transform(r);
    for (std::size_t i = 0; i < dist.value.size(); ++i) {
        const double e = 1.0 / std::sqrt(std::log(std::log(double(std::llabs(dist.d[i])))));
        if (dist.coefficient[i] == 0) {
            CHECK(dist.value[i] == 0.0);
        } else {
            CHECK(dist.value[i] / dist.coefficient[i] == doctest::Approx(std::pow(r.kappa, e)).epsilon(1e-12));
        }
    }
    // numerator zero gives t = 0
    SweepResult one;
    one.kappa = 1.0;
    const std::int64_t d = -1000;
    const double ll = std::log(std::log(1000.0));
    one.samples.push_back({d, 1, std::exp(-0.5 * ll)});
    CHECK(std::abs(clt_transform(one).value[0]) < 1e-15);
}

TEST_CASE("vanishing report") {
    const auto& r = sweep_11a_i(20000);
    const auto rep = vanishing_report(r, true, 1000, 0.8);
    REQUIRE(rep.points.size() == 20);
    CHECK(rep.points.back().count == r.prime_count);
    CHECK(rep.points.back().vanishing == r.prime_vanishing);
    const auto all = vanishing_report(r, false, 1000, 0.8);
    CHECK(all.points.back().vanishing == r.vanishing);
    std::int64_t first = 0;
    for (const auto& s : r.samples)
        if (s.c == 0) {
            first = std::llabs(s.d);
            break;
        }
    const auto early = vanishing_report(sweep_11a_i(20000), false, std::max<std::int64_t>(2, first - 1), 0.8);
    CHECK(early.points.front().fraction == 0.0);
}

TEST_CASE("R_q report") {
    const auto& r = sweep_11a_i(20000);
    EulerFactorData data(find_curve(records(), "11A_i"), 1000);
    const auto entries = rq_report(r, data, 50, 1000);
    for (const auto& e : entries) {
        CHECK(e.q != 11);
        std::int64_t plus = 0, minus = 0;
        for (const auto& s : r.samples)
            if (s.c == 0) {
                const int chi = kronecker(s.d, e.q);
                plus += chi == 1;
                minus += chi == -1;
            }
        CHECK(e.plus == plus);
        CHECK(e.minus == minus);
        CHECK(bool(e.empirical) == (minus > 0));
    }
    CHECK(entries.front().q == 2);
    CHECK(entries.front().main == doctest::Approx(std::sqrt(5.0)));

    SweepResult none;
    none.X = 1000;
    const auto absent = rq_report(none, data, 20, 1000);
    for (const auto& e : absent) {
        CHECK_FALSE(e.empirical.has_value());
        CHECK_FALSE(e.delta_main().has_value());
    }
    CHECK_THROWS_AS(median_abs_delta(absent, true), DomainError);
}

TEST_CASE("moment comparison") {
    const auto& r = sweep_11a_i(20000);
    MomentPolynomial one;
    one.k = 1;
    one.coefficients = {1.0};
    const auto c = compare_moment(r, one);
    CHECK(c.predicted_sum == doctest::Approx(double(r.size())));
    CHECK(c.empirical_sum == r.moment_sums[1]);
}
