#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "effconc/classical.hpp"
#include "effconc/montecarlo.hpp"
#include "effconc/numerics.hpp"
#include "effconc/wasserstein.hpp"

using namespace effconc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
BoundResult trivial(double) { return {1.0, "trivial", {}}; }
}  // namespace

TEST_CASE("wasserstein constants", "[wasserstein]") {
    const Problem p(100, 1.0, 0.5);
    const double c = 4.0 / 100.0;  // tilde R^2 / n
    const auto k = constants(p, 2, 2.0 * c);
    CHECK_THAT(k.m_nk, WithinRel(std::sqrt(0.5), 1e-14));
    CHECK_THAT(k.a_p, WithinRel(2.0 * std::numbers::e, 1e-14));
    CHECK_THAT(k.a_star, WithinRel(2.0, 1e-14));
    CHECK_THROWS_AS(constants(p, 2, c), DomainError);
    CHECK_THROWS_AS(constants(p, 2, 0.5 * c), DomainError);
}

TEST_CASE("b21 and b22", "[wasserstein]") {
    const Problem p(100, 1.0, 0.5);
    const double c = 4.0 / 100.0;
    CHECK(b21(p, 4, c * (1.0 + 1e-12)) < 1e-10);
    const auto k2 = constants(p, 2, 1.0);
    CHECK_THAT(b21(p, 2, 1.0), WithinRel(k2.d_np * k2.m_nk * k2.m_nk, 1e-13));
    // sigma = R/2: only the A* term of b22 survives
    CHECK_THAT(b22(p, 2, 1.0), WithinRel(0.1, 1e-13));
    const auto k4 = constants(p, 4, 1.0);
    CHECK_THAT(b22(p, 4, 1.0), WithinRel(std::sqrt(3.0) / 20.0 * k4.a_star, 1e-13));

    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const auto n = static_cast<std::int64_t>(std::pow(10.0, 1.0 + 4.0 * U(gen)));
        const double sigma = 0.05 + 0.45 * U(gen);
        const Problem q(n, 1.0, sigma);
        const int pp = std::min<int>(static_cast<int>(2 + 14 * U(gen)), static_cast<int>(n + 1));
        const double lo = 1.0 / (sigma * sigma * static_cast<double>(n));
        const double kappa = lo * (1.0 + 50.0 * U(gen));
        REQUIRE(b21(q, pp, kappa) <= b22(q, pp, kappa) * (1.0 + 1e-12));
    }
}

TEST_CASE("b31 and b32", "[wasserstein]") {
    for (double sigma : {0.2, 0.5}) {
        const Problem p(200, 1.0, sigma);
        const double lo = 1.0 / (sigma * sigma * 200.0);
        for (int pp : {2, 3, 6}) {
            for (double f : {1.01, 1.5, 4.0, 20.0}) {
                const double kappa = lo * f;
                const auto all = b31_all(p, pp, kappa);
                REQUIRE(all.size() == static_cast<std::size_t>(kMaxTruncation));
                for (int K : {1, 2, 5, 40}) {
                    const double v = b31(p, pp, kappa, K);
                    CHECK(v >= 0.0);
                    CHECK_THAT(v, WithinRel(all[K - 1], 1e-9));
                    CHECK(v <= b32(p, pp, kappa) * (1.0 + 1e-9));
                    CHECK(omega_kappa(p, pp, kappa, K, false) <=
                          omega_kappa(p, pp, kappa, K, true) * (1.0 + 1e-9));
                }
            }
        }
        CHECK(b31(p, 2, lo * (1.0 + 1e-12), 3) < 1e-6);
    }
}

TEST_CASE("omega", "[wasserstein]") {
    const auto w1 = omega(Problem(100, 1.0, 0.5), 1);
    CHECK_THAT(w1.value, WithinRel(0.1, 1e-14));
    CHECK_THROWS_AS(omega(Problem(3, 1.0, 0.5), 5), DomainError);

    for (double sigma : {0.25, 0.5}) {
        const Problem p(1000, 1.0, sigma);
        for (int pp : {2, 4, 8, 16}) {
            const auto w = omega(p, pp);
            CHECK(w.value > 0.0);
            CHECK(w.value <= k_rsig(p, pp) * pp / std::sqrt(1000.0));
            CHECK(w.value >= omega_lower_bound(p, pp) * (1.0 - 1e-12));
            CHECK(w.K_p >= 1);
            CHECK(w.K_p <= kMaxTruncation);
            const double lo = 1.0 / (sigma * sigma * 1000.0);
            CHECK(w.kappa > lo);
            CHECK_THAT(omega_kappa(p, pp, w.kappa, w.K_p, false), WithinRel(w.value, 1e-9));
        }
    }
    CHECK(k_rsig(Problem(50, 1.0, 0.1), 3.0) >= 10.0);
}

TEST_CASE("omega bounds the coupling distance", "[wasserstein]") {
    for (std::int64_t n : {4, 16}) {
        const Problem p(n, 1.0, 0.5);
        CHECK(exact_wasserstein_bernoulli(n, 1.0) <= p.sigma * omega(p, 1).value);
        for (int pp : {2, 3}) CHECK(exact_wasserstein_bernoulli(n, pp) <= p.sigma * omega(p, pp).value);
    }
}

TEST_CASE("wasserstein tails", "[wasserstein]") {
    const Problem p(1000, 1.0, 0.25);
    CHECK(wass_tail(p, 0.0, trivial).value == 1.0);
    CHECK(wass_tail(p, 40.0, trivial).value < 1e-6);
    for (double u : {1.0, 2.0, 3.0}) {
        const auto one = wass_tail(p, u, trivial);
        const auto two = wass_tail_two(p, u, trivial);
        CHECK(one.value <= 1.0);
        CHECK(two.value >= one.value);
        CHECK(two.value <= std::min(1.0, 2.0 * one.value) * (1.0 + 1e-6));
        const auto withaux = wass_tail(p, u, [&](double x) { return default_onetail(p, x); });
        CHECK(withaux.value <= default_onetail(p, u).value);
        CHECK(withaux.value <= one.value);
    }
    const auto r = wass_tail(p, 3.0, trivial);
    REQUIRE(r.settings.p.has_value());
    REQUIRE(r.settings.rho.has_value());
    CHECK(*r.settings.rho > 0.0);
    CHECK(*r.settings.rho < 1.0);
    CHECK(wass_tail_two(p, 0.0, trivial).value == 1.0);
}

TEST_CASE("efficient quantiles", "[wasserstein]") {
    const Problem p(10'000, 1.0, 0.25);
    const auto two = efficient_quantile(p, 0.05, Sided::two);
    const auto one = efficient_quantile(p, 0.05, Sided::one);
    CHECK(two.value >= one.value);
    CHECK(two.value < bernstein_quantile(p, 0.05));
    auto be2 = [&](double u) { return std::min(1.0, 2.0 * berry_esseen_tail(p, u)); };
    const double be_q = p.sigma * invert_monotone_tail(be2, 0.05, inversion_u_max(p, 0.05, Sided::two));
    CHECK(two.value <= be_q + 1e-12);
    CHECK(two.value <= hoeffding_quantile(p, 0.05, Sided::two));

    const Problem huge(100'000'000, 1.0, 0.25);
    const double limit = 0.25 * std_normal_upper_quantile(0.05);
    const double q8 = efficient_quantile(huge, 0.05, Sided::one).value;
    CHECK(q8 >= limit);
    CHECK(q8 <= 1.01 * limit);
    CHECK(efficient_quantile(Problem(1'000'000, 1.0, 0.25), 0.05, Sided::one).value >= q8);
}
