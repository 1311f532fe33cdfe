// Runs every primary acceptance criterion at full scale and prints one
// PASS/FAIL line per criterion on stdout; details and progress go to stderr.
// `--reduced` shrinks the replication counts for a quick look.

#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "effconc/validation.hpp"

using namespace effconc;

namespace {

struct Criterion {
    const char* name;
    std::function<std::vector<SuiteReport>(const ValidationScale&, const Progress&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    ValidationScale scale;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--reduced") == 0) {
            scale = ValidationScale::reduced();
        } else {
            std::fprintf(stderr, "usage: %s [--reduced]\n", argv[0]);
            return 2;
        }
    }
    const Progress progress = [](const std::string& line) {
        std::fprintf(stderr, "  .. %s\n", line.c_str());
    };

    const std::vector<Criterion> criteria{
        {"tail validity", [](auto& s, auto& p) { return std::vector{tail_validity_suite(s, p)}; }},
        {"quantile validity", [](auto& s, auto& p) { return std::vector{quantile_validity_suite(s, p)}; }},
        {"efficiency convergence", [](auto& s, auto&) { return std::vector{efficiency_suite(s)}; }},
        {"sub-gaussian correction decay", [](auto& s, auto&) { return std::vector{subgaussian_suite(s)}; }},
        {"wasserstein chain", [](auto& s, auto& p) { return std::vector{wasserstein_suite(s, p)}; }},
        {"empirical berry-esseen below empirical bernstein",
         [](auto& s, auto&) { return std::vector{ebe_vs_bernstein_suite(s)}; }},
        {"stopping", [](auto& s, auto& p) { return std::vector{stopping_suite(s, true, p)}; }},
        {"closed-form spot checks", [](auto& s, auto&) { return std::vector{closed_form_suite(s)}; }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        std::fprintf(stderr, "running %s\n", c.name);
        bool ok = true;
        int checks = 0;
        double seconds = 0.0;
        std::size_t failures = 0;
        for (const auto& r : c.run(scale, progress)) {
            ok = ok && r.pass();
            checks += r.checks;
            seconds += r.seconds;
            failures += r.failures.size();
            for (const auto& n : r.notes) std::fprintf(stderr, "  note: %s\n", n.c_str());
            for (const auto& f : r.failures)
                std::fprintf(stderr, "  violated %s: %s\n", f.check.c_str(), f.detail.c_str());
        }
        failed += !ok;
        std::printf("%s %s (%d checks, %zu failed, %.1f s)\n", ok ? "PASS" : "FAIL", c.name, checks,
                    failures, seconds);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
