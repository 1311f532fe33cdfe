#pragma once

#include <functional>
#include <string>
#include <vector>

#include "effconc/bound_result.hpp"
#include "effconc/problem.hpp"

namespace effconc::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumeric = 2, kSelftestFailed = 3 };

struct NamedTail {
    std::string name;
    std::function<BoundResult(const Problem&, double u, Sided)> tail;
};

// Registry of tail bounds addressable by name on the command line.
const std::vector<NamedTail>& tail_registry();
std::vector<std::string> quantile_bound_names();

// Quantile of S_n (not divided by sigma) for a named bound.
BoundResult named_quantile(const std::string& name, const Problem& prob, double delta, Sided sided);

// "a,b,c" -> {a, b, c}; "all" expands to `all`.
std::vector<std::string> split_list(const std::string& text, const std::vector<std::string>& all);

// "1e2..1e8" with `per_decade` log-spaced points per decade, or a comma list.
std::vector<long long> parse_n_grid(const std::string& text, int per_decade);
std::vector<double> parse_real_list(const std::string& text);
// parse_real_list restricted to values in (0, 1).
std::vector<double> parse_delta_list(const std::string& text);

}  // namespace effconc::cli
