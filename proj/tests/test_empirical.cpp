#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "effconc/classical.hpp"
#include "effconc/empirical.hpp"
#include "effconc/montecarlo.hpp"
#include "effconc/numerics.hpp"
#include "effconc/wasserstein.hpp"

using namespace effconc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("summaries", "[empirical]") {
    const std::vector<double> x{0.1, 0.4, 0.4, 0.9};
    const auto s = summarize(x, 1.0);
    CHECK(s.n == 4);
    CHECK_THAT(s.mean, WithinRel(0.45, 1e-14));
    CHECK_THAT(s.emp_var, WithinRel((0.35 * 0.35 + 0.05 * 0.05 * 2 + 0.45 * 0.45) / 4.0, 1e-13));
    const std::vector<double> bad{0.1, 1.2};
    CHECK_THROWS_AS(summarize(bad, 1.0), DomainError);
}

TEST_CASE("DKW quantiles", "[empirical]") {
    CHECK_THAT(ks_quantile(100, 0.05, Sided::two), WithinRel(0.1358101515740619498, 1e-13));
    CHECK_THROWS_AS(ks_quantile(100, 2.0, Sided::two), DomainError);
    for (std::int64_t n : {2, 50, 10'000})
        for (double a : {1e-6, 0.01, 0.3})
            CHECK(ks_quantile(n, a, Sided::one) <= ks_quantile(n, a, Sided::two));
    const auto k = ks_quantiles(400, 0.02);
    CHECK(k.two_sided == ks_quantile(400, 0.01, Sided::two));
    CHECK(k.one_sided == ks_quantile(400, 0.01, Sided::one));
}

TEST_CASE("variance bracket endpoints", "[empirical]") {
    CHECK(sigma_lower(1.0, 0.09, 0.0) == std::sqrt(0.09));
    CHECK(sigma_lower(2.0, 0.49, 0.0) == std::sqrt(0.49));
    CHECK(sigma_lower(1.0, 0.0, 0.1) == 0.0);
    // the displayed expression is negative here and clamps to zero
    CHECK(sigma_lower(1.0, 0.09, 0.1) == 0.0);
    CHECK(sigma_lower(1.0, 0.09, 1.0) == 0.0);

    const SampleSummary s{10'000, 0.5, 0.0625};
    const auto ks = ks_quantiles(s.n, 0.01);
    CHECK_THAT(sigma_lower(1.0, s.emp_var, ks.two_sided), WithinRel(0.2164620902659844613, 1e-12));
    // candidates 0.28256660 (deviation) and 0.28007809 / 0.28001621 (KS)
    CHECK_THAT(sigma_upper(1.0, s, ks, 0.01, Sided::two), WithinRel(0.2800780903695185405, 1e-12));
    CHECK_THAT(sigma_upper(1.0, s, ks, 0.01, Sided::one), WithinRel(0.2800162126484968316, 1e-12));
    const SampleSummary big{100'000'000, 0.5, 0.0625};
    const auto b = variance_bracket(1.0, big, 0.01, Sided::two);
    CHECK_THAT(b.sigma_lo, WithinAbs(0.25, 2e-3));
    CHECK_THAT(b.sigma_hi, WithinAbs(0.25, 2e-3));
    CHECK_THROWS_AS(sigma_upper(1.0, SampleSummary{1, 0.5, 0.0}, ks, 0.01, Sided::two), DomainError);
}

TEST_CASE("default a", "[empirical]") {
    CHECK_THAT(default_a(0.1, 100, Sided::one), WithinRel(0.01281551565544600467, 1e-12));
    CHECK(default_a(0.1, 100, Sided::two) >= default_a(0.1, 100, Sided::one));
    CHECK(default_a(0.1, 1'000'000, Sided::one) / 0.1 < 2e-3);
    CHECK(default_a(0.9, 1, Sided::one) == 0.45);
}

TEST_CASE("empirical Bernstein", "[empirical]") {
    const SampleSummary s{100, 0.5, 0.0625};
    CHECK_THAT(empirical_bernstein_quantile(s, 1.0, 0.05), WithinRel(1.352013228038882316, 1e-13));
    const SampleSummary big{10'000'000'000LL, 0.5, 0.0625};
    CHECK(empirical_bernstein_quantile(big, 1.0, 0.05) > 0.25 * std_normal_upper_quantile(0.05));
}

TEST_CASE("empirical quantile supremum", "[empirical]") {
    const SampleSummary s{2000, 0.5, 0.04};
    const double a = 0.005;
    const auto br = variance_bracket(1.0, s, a, Sided::two);
    auto bern = [](double R, double d, double sigma) {
        return sigma > 0.0 ? bernstein_quantile(Problem(2000, R, sigma), d) : 0.0;
    };
    const auto r = empirical_quantile(s, 1.0, 0.05, a, bern, Sided::two);
    CHECK_THAT(r.value, WithinRel(bern(1.0, 0.05 - a, br.sigma_hi), 1e-12));

    // a constant base quantile is returned as is
    auto flat = [](double, double, double) { return 0.7; };
    CHECK(empirical_quantile(s, 1.0, 0.05, a, flat, Sided::two).value == 0.7);
    CHECK_THROWS_AS(empirical_quantile(s, 1.0, 0.05, 0.06, flat, Sided::two), DomainError);
}

TEST_CASE("bracket coverage", "[empirical]") {
    // Bernoulli(0.3) and scaled Beta(2, 5) data on [0, 1]
    std::mt19937_64 gen(99);
    const std::int64_t n = 1000;
    const int reps = 3000;
    const double a = default_a(0.05, n, Sided::two);
    std::bernoulli_distribution bern(0.3);
    std::gamma_distribution<double> g2(2.0, 1.0), g5(5.0, 1.0);
    const double sig_bern = std::sqrt(0.21);
    const double sig_beta = std::sqrt(2.0 * 5.0 / (49.0 * 8.0));
    int miss_bern = 0, miss_beta = 0;
    std::vector<double> x(n);
    for (int r = 0; r < reps; ++r) {
        for (auto& v : x) v = bern(gen) ? 1.0 : 0.0;
        auto b = variance_bracket(1.0, summarize(x, 1.0), a, Sided::two);
        if (sig_bern < b.sigma_lo || sig_bern > b.sigma_hi) ++miss_bern;
        for (auto& v : x) {
            const double y = g2(gen);
            v = y / (y + g5(gen));
        }
        b = variance_bracket(1.0, summarize(x, 1.0), a, Sided::two);
        if (sig_beta < b.sigma_lo || sig_beta > b.sigma_hi) ++miss_beta;
    }
    const double limit = a + mc_slack(a, reps);
    CHECK(miss_bern / double(reps) <= limit);
    CHECK(miss_beta / double(reps) <= limit);
}

TEST_CASE("efficient empirical quantile", "[empirical]") {
    const SampleSummary s{1'000'000, 0.5, 0.0625};
    const auto q = efficient_ebe_quantile(s, 1.0, 0.05, Sided::one);
    const double target = 0.25 * std_normal_upper_quantile(0.05);
    CHECK(q.value >= target);
    CHECK(q.value <= 1.1 * target);
    CHECK(q.value <= hoeffding_quantile(Problem(s.n, 1.0, 0.25), 0.05, Sided::one));

    const auto q4 = efficient_ebe_quantile(SampleSummary{10'000, 0.5, 0.0625}, 1.0, 0.05, Sided::one);
    CHECK(q4.value > q.value);
    const auto t = efficient_ebe_quantile(s, 1.0, 0.05, Sided::two);
    CHECK(t.value >= q.value);
}
