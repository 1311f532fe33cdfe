#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "effconc/numerics.hpp"
#include "effconc/stopping.hpp"

using namespace effconc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

class ConstantStream : public DataSource {
public:
    explicit ConstantStream(double v) : v_(v) {}
    std::optional<double> next() override { return v_; }

private:
    double v_;
};

}  // namespace

TEST_CASE("hoeffding stop time", "[stopping]") {
    CHECK(hoeffding_stop_n(1.0, 0.01, 0.1) == 14979);
    const auto base = hoeffding_stop_n(1.0, 0.02, 0.1);
    CHECK(std::llabs(hoeffding_stop_n(1.0, 0.01, 0.1) - 4 * base) <= 4);
    CHECK_THROWS_AS(hoeffding_stop_n(1.0, 0.01, 2.0), DomainError);
    CHECK_THROWS_AS(hoeffding_stop_n(1.0, 0.0, 0.1), DomainError);
}

TEST_CASE("schedule and budget", "[stopping]") {
    const StoppingConfig cfg;
    const auto sched = cfg.schedule();
    REQUIRE(sched.size() > 10);
    CHECK(sched[0] == 32);
    CHECK(sched[1] == 48);
    for (std::size_t k = 1; k < sched.size(); ++k) CHECK(sched[k] > sched[k - 1]);
    CHECK(sched.back() <= cfg.max_n);
    double total = 0.0;
    for (int k = 0; k < 100'000; ++k) total += cfg.budget(k);
    CHECK(total <= cfg.delta);
    CHECK_THAT(total, WithinRel(cfg.delta, 1e-4));
    CHECK_THAT(cfg.budget(0), WithinRel(0.6 / (std::numbers::pi * std::numbers::pi), 1e-14));
}

TEST_CASE("uniform average stream", "[stopping]") {
    for (int ell : {1, 100}) {
        UniformAverageStream s(ell, 5, 1);
        const int N = 1'000'000;
        double sum = 0.0, sq = 0.0;
        for (int i = 0; i < N; ++i) {
            const double x = *s.next();
            REQUIRE(x >= 0.0);
            REQUIRE(x <= 1.0);
            sum += x;
            sq += x * x;
        }
        const double mean = sum / N;
        const double var = sq / N - mean * mean;
        const double want = 1.0 / (12.0 * ell);
        // sd of the sample variance is want*sqrt(k/N), k = 0.8 uniform, 2 near-normal
        const double se = want * std::sqrt(2.0 / N);
        CHECK_THAT(var, WithinAbs(want, 3.0 * se));
    }
    UniformAverageStream a(10, 42, 3), b(10, 42, 3), c(10, 43, 3);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
        const double x = *a.next();
        CHECK(x == *b.next());
        differs |= x != *c.next();
    }
    CHECK(differs);
    UniformAverageStream limited(1, 1, 1, 3);
    CHECK(limited.next());
    CHECK(limited.next());
    CHECK(limited.next());
    CHECK_FALSE(limited.next());
}

TEST_CASE("stopping rules", "[stopping]") {
    const StoppingConfig cfg;
    {
        UniformAverageStream s(10, 1, 1);
        const auto t = run_stopping(s, StopRule::hoeffding, cfg, 1.0, 0.5);
        REQUIRE(t.checks.size() == 1);
        CHECK(t.final_n == 14979);
        CHECK(t.checks[0].stopped);
    }
    for (StopRule rule : {StopRule::emp_bernstein, StopRule::ebe}) {
        ConstantStream s(0.5);
        const auto t = run_stopping(s, rule, cfg, 1.0, 0.5);
        REQUIRE_FALSE(t.checks.empty());
        CHECK(t.correct);
        CHECK(t.final_mean == 0.5);
        CHECK(t.final_n < 14979);
        int stops = 0;
        for (const auto& c : t.checks) stops += c.stopped;
        CHECK(stops == 1);
        CHECK(t.checks.back().stopped);
        CHECK(t.checks.back().half_width <= cfg.epsilon);
        for (std::size_t k = 0; k + 1 < t.checks.size(); ++k) CHECK(t.checks[k].half_width > cfg.epsilon);
    }
    {
        UniformAverageStream s(100, 7, 2, 500);
        const auto t = run_stopping(s, StopRule::emp_bernstein, cfg, 1.0, 0.5);
        CHECK(t.exhausted);
    }
}

TEST_CASE("stopping is deterministic", "[stopping]") {
    const StoppingConfig cfg;
    UniformAverageStream a(100, 9, 4), b(100, 9, 4);
    const auto ta = run_stopping(a, StopRule::emp_bernstein, cfg, 1.0, 0.5);
    const auto tb = run_stopping(b, StopRule::emp_bernstein, cfg, 1.0, 0.5);
    CHECK(ta.final_n == tb.final_n);
    CHECK(ta.final_mean == tb.final_mean);
    std::ostringstream oa, ob;
    write_trace_header(oa);
    write_trace_rows(oa, 0, StopRule::emp_bernstein, 100, ta);
    write_trace_rows(ob, 0, StopRule::emp_bernstein, 100, tb);
    CHECK(oa.str().rfind("replication,rule,ell,check_index,n,half_width,stopped,correct\n", 0) == 0);
    CHECK(oa.str().substr(oa.str().find('\n') + 1) == ob.str());
}

TEST_CASE("rule names", "[stopping]") {
    CHECK(parse_stop_rule("eb") == StopRule::emp_bernstein);
    CHECK(parse_stop_rule("ebe") == StopRule::ebe);
    CHECK(to_string(StopRule::hoeffding) == "hoeffding");
    CHECK_THROWS_AS(parse_stop_rule("bogus"), DomainError);
}
