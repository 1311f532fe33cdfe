#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace effconc {

// Replication counts for the simulation-backed suites. The defaults are the
// full acceptance sizes; selftest scales them down.
struct ValidationScale {
    std::int64_t tail_reps = 100'000;
    std::int64_t quantile_reps = 10'000;
    std::int64_t coupling_samples = 1'000'000;
    int coupling_bootstrap = 50;
    int chain_settings = 100;
    int stop_mean_reps = 10;
    int stop_correct_reps = 200;
    std::uint64_t seed = 20240611;

    static ValidationScale reduced();
};

struct CheckFailure {
    std::string check;   // short identifier of the violated invariant
    std::string detail;
};

struct SuiteReport {
    std::string name;
    int checks = 0;
    std::vector<CheckFailure> failures;
    std::vector<std::string> notes;  // informational lines, never affect pass()
    double seconds = 0.0;

    bool pass() const { return failures.empty() && checks > 0; }
};

using Progress = std::function<void(const std::string&)>;

// Literal closed-form values that must hold to 1e-12.
SuiteReport closed_form_suite(const ValidationScale& scale);

// Every tail bound vs. simulated exceedance of sigma*u on the two-point model.
SuiteReport tail_validity_suite(const ValidationScale& scale, const Progress& progress = {});

// Efficient known-variance and empirical quantiles vs. simulated exceedance.
SuiteReport quantile_validity_suite(const ValidationScale& scale, const Progress& progress = {});

// Efficient/Bernstein/Hoeffding two-sided quantile ratios against the normal limit.
SuiteReport efficiency_suite(const ValidationScale& scale);

// Log-linear decay of the zero-bias correction in u^2.
SuiteReport subgaussian_suite(const ValidationScale& scale);

// Omega chain, b21 <= b22, growth bound and the empirical coupling check.
SuiteReport wasserstein_suite(const ValidationScale& scale, const Progress& progress = {});

// Efficient empirical quantile strictly below empirical Bernstein for large n.
SuiteReport ebe_vs_bernstein_suite(const ValidationScale& scale);

// Stopping rules: error frequency, budget accounting, Hoeffding stop n, and
// (when `check_ordering`) mean stop time of ebe <= eb for ell in {10, 100}.
SuiteReport stopping_suite(const ValidationScale& scale, bool check_ordering,
                           const Progress& progress = {});

}  // namespace effconc
