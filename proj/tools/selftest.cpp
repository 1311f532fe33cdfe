#include "selftest.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <iostream>
#include <vector>

#include "commands.hpp"
#include "effconc/validation.hpp"
#include "effconc/wasserstein.hpp"

namespace effconc::cli {

namespace {

struct SuiteEntry {
    const char* name;
    std::function<SuiteReport(const ValidationScale&, const Progress&)> run;
};

const std::vector<SuiteEntry>& suites() {
    static const std::vector<SuiteEntry> all{
        {"closed_form", [](const ValidationScale& s, const Progress&) { return closed_form_suite(s); }},
        {"efficiency", [](const ValidationScale& s, const Progress&) { return efficiency_suite(s); }},
        {"subgaussian", [](const ValidationScale& s, const Progress&) { return subgaussian_suite(s); }},
        {"wasserstein", wasserstein_suite},
        {"ebe_vs_bernstein", [](const ValidationScale& s, const Progress&) { return ebe_vs_bernstein_suite(s); }},
        {"tail_validity", tail_validity_suite},
        {"quantile_validity", quantile_validity_suite},
        // The stop-time ordering is reported as a note here; it is a benchmark
        // outcome, not a validity invariant.
        {"stopping", [](const ValidationScale& s, const Progress& p) { return stopping_suite(s, false, p); }},
    };
    return all;
}

constexpr std::size_t kMaxListedFailures = 10;

}  // namespace

void add_selftest_options(CLI::App* cmd, SelftestArgs& args) {
    std::string names;
    for (const auto& s : suites()) names += std::string(names.empty() ? "" : ", ") + s.name;
    cmd->add_option("--suite", args.suites, "comma list of suites or 'all' (" + names + ")");
    cmd->add_flag("--full", args.full, "full replication counts instead of the reduced defaults");
    cmd->add_option("--seed", args.seed, "random seed");
    cmd->add_option("--corrupt-b21", args.corrupt_b21,
                    "test hook: multiply the b21 constant by this factor");
    cmd->add_flag("-v,--verbose", args.verbose, "print suite notes and progress");
}

int run_selftest(const SelftestArgs& args, std::ostream& os) {
    std::vector<std::string> all;
    for (const auto& s : suites()) all.push_back(s.name);
    const auto chosen = split_list(args.suites, all);

    ValidationScale scale = args.full ? ValidationScale{} : ValidationScale::reduced();
    scale.seed = args.seed;
    set_b21_scale_for_testing(args.corrupt_b21);

    const Progress progress = [&](const std::string& line) {
        if (args.verbose) std::cerr << "  .. " << line << std::endl;
    };
    bool ok = true;
    double total = 0.0;
    for (const auto& entry : suites()) {
        if (std::find(chosen.begin(), chosen.end(), entry.name) == chosen.end()) continue;
        const SuiteReport r = entry.run(scale, progress);
        total += r.seconds;
        ok = ok && r.pass();
        char line[256];
        std::snprintf(line, sizeof line, "[%s] %-18s %5d checks  %3zu failed  %8.2f s\n",
                      r.pass() ? "PASS" : "FAIL", r.name.c_str(), r.checks, r.failures.size(), r.seconds);
        os << line;
        if (args.verbose)
            for (const auto& n : r.notes) os << "    note: " << n << '\n';
        for (std::size_t i = 0; i < r.failures.size() && i < kMaxListedFailures; ++i)
            os << "    violated " << r.failures[i].check << ": " << r.failures[i].detail << '\n';
        if (r.failures.size() > kMaxListedFailures)
            os << "    ... " << r.failures.size() - kMaxListedFailures << " more\n";
        os.flush();
    }
    set_b21_scale_for_testing(1.0);
    char line[96];
    std::snprintf(line, sizeof line, "selftest %s in %.2f s\n", ok ? "passed" : "FAILED", total);
    os << line;
    return ok ? kOk : kSelftestFailed;
}

}  // namespace effconc::cli
