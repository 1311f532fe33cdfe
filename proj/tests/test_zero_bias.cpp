#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "effconc/numerics.hpp"
#include "effconc/zero_bias.hpp"

using namespace effconc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("h_u", "[zero_bias]") {
    const double root_half_pi = std::sqrt(std::numbers::pi / 2.0);
    CHECK_THAT(h_u(0.0, 0.0), WithinRel(root_half_pi / 2.0, 1e-14));
    CHECK_THAT(h_u(0.0, 0.62666), WithinRel(root_half_pi * std_normal_cdf_c(0.62666), 1e-14));
    // mpmath
    CHECK_THAT(h_u(1.0, 1.0), WithinRel(1.261960330168821921, 1e-13));
    CHECK_THAT(h_u(0.5, 2.0), WithinRel(0.06722713743399810544, 1e-13));
    for (double u = 0.0; u <= 40.0; u += 0.5)
        for (double w = -3.0; w <= u; w += 0.5) {
            const double v = h_u(w, u);
            REQUIRE(std::isfinite(v));
            REQUIRE(v >= 0.0);
        }
}

TEST_CASE("b and delta prime", "[zero_bias]") {
    CHECK_THAT(b_growth(0.0), WithinRel(std::sqrt(std::numbers::pi / 2.0), 1e-14));
    CHECK_THAT(b_growth(1.0), WithinRel(0.3873426840448451938, 1e-13));
    CHECK(b_growth(1e8) < 1e-7);
    double prev = b_growth(0.0);
    for (double w = 0.1; w <= 50.0; w += 0.1) {
        CHECK(b_growth(w) > 0.0);
        CHECK(b_growth(w) < prev);
        prev = b_growth(w);
    }
    CHECK_THAT(delta_prime(0.0), WithinAbs(0.0, 1e-15));
    CHECK_THAT(delta_prime(1.0), WithinRel(0.9360715980196037792, 1e-13));
    CHECK_THAT(delta_prime(3.0), WithinRel(2.920039602024880866, 1e-13));
    for (double u = 0.0; u <= 40.0; u += 0.01) REQUIRE(delta_prime(u) >= 0.0);
}

TEST_CASE("Q_n branches", "[zero_bias]") {
    const Problem p(100, 1.0, 0.25);
    const auto q = q_n_terms(p, 0.5);
    CHECK_THAT(q.hoeffding_branch, WithinRel(0.6348049416497515495, 1e-12));
    CHECK_THAT(q.bernstein_branch, WithinRel(0.2325007650089487133, 1e-12));
    CHECK_THAT(q.be_branch, WithinRel(0.2408850080951954925, 1e-12));
    CHECK(q.winner == "bernstein");
    CHECK(q.value == q.bernstein_branch);

    // below Delta_n the exponential branches are trivial
    const auto low = q_n_terms(p, 0.0);
    CHECK(low.hoeffding_branch == 1.0);
    CHECK(low.bernstein_branch == 1.0);
    CHECK(low.value == std::min(1.0, low.be_branch));

    const Problem big(1'000'000'000'000LL, 1.0, 0.25);
    CHECK_THAT(q_n_terms(big, 0.25 * 1.5).be_branch, WithinAbs(std_normal_cdf_c(1.5), 1e-5));

    // v_low^2 = sigma^2 (1 - 89/144) stays positive at n = 1
    const auto one = q_n_terms(Problem(1, 1.0, 0.25), 0.3);
    CHECK(std::isfinite(one.be_branch));
    CHECK(one.value <= 1.0);
}

TEST_CASE("zero-bias tails", "[zero_bias]") {
    const Problem p(400, 1.0, 0.5);
    // mpmath evaluation of the displayed bound
    CHECK_THAT(zero_bias_tail(p, 2.0, 0.5), WithinRel(0.06487874806730972217, 1e-11));
    CHECK_THAT(alt_zero_bias_tail(p, 2.0, 0.5), WithinRel(0.06487775382178180493, 1e-11));

    const double u = 1.5;
    const double d = delta_prime(u);
    const double want = std_normal_cdf_c(u) +
                        1.0 / (0.5 * 20.0 + d) * (h_u(u, u) - d * std_normal_cdf_c(u));
    CHECK_THAT(zero_bias_tail(p, u, 1.0), WithinRel(want, 1e-13));

    const Problem big(1'000'000'000'000LL, 1.0, 0.5);
    CHECK_THAT(zero_bias_tail(big, 2.0, 0.5), WithinAbs(std_normal_cdf_c(2.0), 1e-5));
    CHECK_THAT(alt_zero_bias_tail(big, 2.0, 0.5), WithinAbs(std_normal_cdf_c(2.0), 1e-5));
    CHECK_THROWS_AS(zero_bias_tail(p, 1.0, 1.5), DomainError);
    CHECK_THROWS_AS(zero_bias_tail(p, -1.0, 0.5), DomainError);
}

TEST_CASE("zero-bias at a threshold", "[zero_bias]") {
    const Problem p(400, 1.0, 0.25);
    CHECK(zero_bias_tail_at_threshold(p, 0.9 / 20.0).value == 1.0);
    CHECK(zero_bias_tail_at_threshold(p, -1.0).value == 1.0);
    const double u = 2.0;
    const double t = p.sigma * u + p.R / 20.0;
    const auto r = zero_bias_tail_at_threshold(p, t);
    for (int j = 0; j <= 32; ++j) CHECK(r.value <= zero_bias_tail(p, u, j / 32.0) + 1e-15);
    REQUIRE(r.settings.lambda.has_value());
    CHECK(zero_bias_fallback_count() == 0);
}
