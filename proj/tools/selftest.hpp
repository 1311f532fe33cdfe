#pragma once

#include <ostream>
#include <string>

#include <CLI11.hpp>

namespace effconc::cli {

struct SelftestArgs {
    std::string suites = "all";
    bool full = false;
    unsigned long long seed = 20240611;
    double corrupt_b21 = 1.0;  // test hook: multiplies b21 when != 1
    bool verbose = false;
};

void add_selftest_options(CLI::App* cmd, SelftestArgs& args);

// Runs the selected suites, printing one status line per suite with timing and
// every violated invariant. Returns kOk or kSelftestFailed.
int run_selftest(const SelftestArgs& args, std::ostream& os);

}  // namespace effconc::cli
