#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "effconc/classical.hpp"
#include "effconc/numerics.hpp"
#include "effconc/zero_bias.hpp"

using namespace effconc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("hoeffding and bernstein tails", "[classical]") {
    const Problem half(10, 1.0, 0.5);
    CHECK(hoeffding_tail(half, 0.0) == 1.0);
    CHECK_THAT(hoeffding_tail(half, 2.0), WithinRel(std::exp(-2.0), 1e-14));
    CHECK(bernstein_tail(half, 0.0) == 1.0);
    const Problem p(100, 1.0, 0.25);
    CHECK_THAT(bernstein_tail(p, 1.0), WithinRel(0.6432791767011972106, 1e-13));
    const Problem huge(1'000'000'000'000LL, 1.0, 0.25);
    CHECK_THAT(bernstein_tail(huge, 1.5), WithinRel(std::exp(-1.125), 1e-5));
    CHECK_THROWS_AS(hoeffding_tail(p, -1.0), DomainError);
}

TEST_CASE("bernstein quantile", "[classical]") {
    const Problem p(100, 1.0, 0.25);
    CHECK_THAT(bernstein_quantile(p, 0.05), WithinRel(0.7937764707515610427, 1e-13));
    const Problem big(10'000, 1.0, 0.25);
    const double L = std::log(40.0);
    CHECK_THAT(bernstein_quantile(big, 0.05), WithinRel(rsig(1.0, 0.25) / 300.0 * L + 0.25 * std::sqrt(2 * L), 1e-13));
    const Problem huge(1'000'000'000'000LL, 1.0, 0.25);
    CHECK_THAT(bernstein_quantile(huge, 0.05), WithinRel(0.25 * std::sqrt(2 * L), 1e-5));
}

TEST_CASE("berry-esseen constants", "[classical]") {
    const Problem half(100, 1.0, 0.5);
    // min(0.3328*1.429, 0.33554*1.415)
    CHECK_THAT(berry_esseen_constant(half), WithinRel(0.4747891, 1e-12));
    CHECK_THAT(nonuniform_be_constant(half), WithinRel(16.346, 1e-12));
}

TEST_CASE("berry-esseen tails", "[classical]") {
    const Problem p(400, 1.0, 0.25);
    const double C = berry_esseen_constant(p) / 20.0;
    for (double u = 0.0; u <= 3.0; u += 0.25) {
        const double v = berry_esseen_tail(p, u);
        const double raw = std_normal_cdf_c(u) + C;
        CHECK_THAT(v, WithinAbs(std::min({1.0, raw, hoeffding_tail(p, u)}), 1e-15));
        if (raw < hoeffding_tail(p, u) && raw < 1.0) CHECK_THAT(v - std_normal_cdf_c(u), WithinRel(C, 1e-10));
    }
    const Problem big(100'000'000, 1.0, 0.25);
    CHECK_THAT(berry_esseen_tail(big, 1.0), WithinAbs(std_normal_cdf_c(1.0), 1e-3));

    const Problem q(1'000'000, 1.0, 0.5);
    const double c0 = nonuniform_be_tail(q, 0.0) - 0.5;
    CHECK_THAT(c0, WithinRel(16.346 / 1000.0, 1e-10));
    const double c3 = nonuniform_be_tail(q, 3.0) - std_normal_cdf_c(3.0);
    CHECK_THAT(c3, WithinRel(c0 / 64.0, 1e-8));
}

TEST_CASE("hoeffding quantile", "[classical]") {
    const Problem p(10, 1.0, 0.25);
    CHECK(hoeffding_quantile(p, 1.0, Sided::one) == 0.0);
    CHECK_THAT(hoeffding_quantile(p, 0.1, Sided::two), WithinRel(1.223873415340408273, 1e-13));
    const Problem p2(10, 2.0, 0.25);
    CHECK_THAT(hoeffding_quantile(p2, 0.1, Sided::two), WithinRel(2 * 1.223873415340408273, 1e-13));
}

TEST_CASE("default tails take the minimum", "[classical]") {
    for (auto n : {10LL, 100LL, 10'000LL}) {
        const Problem p(n, 1.0, 0.25);
        for (double u = 0.0; u <= 5.0; u += 0.5) {
            const auto d = default_onetail(p, u);
            CHECK(d.value <= hoeffding_tail(p, u));
            CHECK(d.value <= bernstein_tail(p, u));
            CHECK(d.value <= berry_esseen_tail(p, u));
            CHECK(d.value <= nonuniform_be_tail(p, u));
            CHECK(d.value <= zero_bias_tail_at_threshold(p, p.sigma * u).value);
            CHECK(d.value >= 0.0);
            const auto t = default_twotail(p, u);
            CHECK_THAT(t.value, WithinAbs(std::min(1.0, 2.0 * d.value), 1e-15));
        }
        CHECK(default_twotail(p, 0.0).value == 1.0);
    }
}

TEST_CASE("default winner moves with n", "[classical]") {
    const auto small = default_onetail(Problem(100, 1.0, 0.25), 3.0);
    CHECK((small.winner == "bernstein" || small.winner == "hoeffding"));
    const auto large = default_onetail(Problem(1'000'000, 1.0, 0.25), 3.0);
    CHECK(large.winner != "bernstein");
    CHECK(large.winner != "hoeffding");
}

TEST_CASE("default quantile inverts the tail", "[classical]") {
    const Problem p(1000, 1.0, 0.25);
    for (Sided s : {Sided::one, Sided::two}) {
        const auto q = default_quantile(p, 0.05, s);
        const double u = q.value / p.sigma;
        const double tail = s == Sided::one ? default_onetail(p, u).value : default_twotail(p, u).value;
        CHECK(tail <= 0.05);
        CHECK(q.value <= hoeffding_quantile(p, 0.05, s) + 1e-12);
    }
}
