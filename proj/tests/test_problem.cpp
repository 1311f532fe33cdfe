#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "effconc/numerics.hpp"
#include "effconc/problem.hpp"

using namespace effconc;
using Catch::Matchers::WithinRel;

TEST_CASE("rsig closed form", "[problem]") {
    CHECK(rsig(1.0, 0.5) == 0.5);
    CHECK_THAT(rsig(1.0, 0.3), WithinRel(0.9, 1e-14));
    CHECK_THAT(rsig(2.0, 0.6), WithinRel(1.8, 1e-14));
    CHECK_THAT(rsig(1.0, 1e-9), WithinRel(1.0, 1e-12));
    CHECK_THROWS_AS(rsig(1.0, 0.51), DomainError);
    // rounding just past the boundary is absorbed
    CHECK(rsig(1.0, 0.5 * (1.0 + 1e-16)) == 0.5);
}

TEST_CASE("rsig at a modified sigma", "[problem]") {
    CHECK(rsig_at(1.0, 0.3) == rsig(1.0, 0.3));
    CHECK_THAT(rsig_at(1.0, std::sqrt(55.0) / 24.0), WithinRel(0.8930825471690251588, 1e-13));
    CHECK_THAT(rsig_at(3.0, 1e-10), WithinRel(3.0, 1e-12));
}

TEST_CASE("rsig invariants", "[problem]") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const double R = 0.01 + 10.0 * U(gen);
        const double sigma = R / 2.0 * (1e-6 + (1.0 - 1e-6) * U(gen));
        const double r = rsig(R, sigma);
        REQUIRE(R - r <= R / 2.0 + 1e-15 * R);
        REQUIRE(R / 2.0 <= r + 1e-15 * R);
        REQUIRE(r <= R);
        const double c = 0.1 + 5.0 * U(gen);
        REQUIRE_THAT(rsig(c * R, c * sigma), WithinRel(c * r, 1e-12));
    }
}

TEST_CASE("problem construction", "[problem]") {
    const Problem p(100, 2.0, 0.5);
    const auto d = derive(p);
    CHECK_THAT(d.tilde_R, WithinRel(4.0, 1e-15));
    CHECK_THAT(d.tilde_rsig, WithinRel(d.tilde_R / 2 + std::sqrt(d.tilde_R * d.tilde_R - 4) / 2, 1e-13));
    CHECK(d.tilde_rsig >= 1.0);
    CHECK_THROWS_AS(Problem(100, 1.0, 0.6), DomainError);
    CHECK_THROWS_AS(Problem(0, 1.0, 0.2), DomainError);
    CHECK_THROWS_AS(Problem(10, 1.0, 0.0), DomainError);
    CHECK_NOTHROW(Problem(10, 1.0, 0.5));
}
