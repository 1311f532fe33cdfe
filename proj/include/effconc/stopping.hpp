#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "effconc/rng.hpp"

namespace effconc {

enum class StopRule { hoeffding, emp_bernstein, ebe };

std::string to_string(StopRule rule);
// Accepts "hoeffding", "eb" / "emp_bernstein", "ebe".
StopRule parse_stop_rule(const std::string& name);

struct StoppingConfig {
    double epsilon = 0.01;
    double delta = 0.1;
    std::int64_t schedule_base = 32;
    double schedule_ratio = 1.5;
    std::int64_t max_n = 100'000'000;

    void validate() const;
    // n_k = ceil(base * ratio^k), forced strictly increasing.
    std::vector<std::int64_t> schedule() const;
    // delta * 6 / (pi^2 (k+1)^2); sums to delta over the unbounded schedule.
    double budget(int k) const;
};

struct CheckRecord {
    int index = 0;
    std::int64_t n = 0;
    double half_width = 0.0;
    double budget = 0.0;
    bool stopped = false;
};

struct StoppingTrace {
    std::vector<CheckRecord> checks;
    std::int64_t final_n = 0;
    double final_mean = 0.0;
    bool correct = false;
    // True when the data ran out (or max_n was reached) before any stop.
    bool exhausted = false;
    double spent_budget = 0.0;
};

class DataSource {
public:
    virtual ~DataSource() = default;
    virtual std::optional<double> next() = 0;
};

// Each draw is the mean of ell Uniform[0,1) variables; R = 1, mean 1/2,
// variance 1/(12 ell). `limit` caps the number of draws (0 = unlimited).
class UniformAverageStream : public DataSource {
public:
    UniformAverageStream(int ell, std::uint64_t seed, std::uint64_t stream = 0,
                         std::int64_t limit = 0);
    std::optional<double> next() override;

private:
    int ell_;
    CounterRng rng_;
    std::int64_t limit_;
    std::int64_t drawn_ = 0;
};

// ceil(R^2 log(2/delta) / (2 eps^2)).
std::int64_t hoeffding_stop_n(double R, double epsilon, double delta);

StoppingTrace run_stopping(DataSource& stream, StopRule rule, const StoppingConfig& config,
                           double R, double true_mean);

// Header: replication,rule,ell,check_index,n,half_width,stopped,correct
void write_trace_header(std::ostream& os);
void write_trace_rows(std::ostream& os, int replication, StopRule rule, int ell,
                      const StoppingTrace& trace);

}  // namespace effconc
