#include "effconc/stopping.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string_view>
#include <numbers>

#include "effconc/classical.hpp"
#include "effconc/empirical.hpp"
#include "effconc/numerics.hpp"

namespace effconc {

std::string to_string(StopRule rule) {
    switch (rule) {
        case StopRule::hoeffding: return "hoeffding";
        case StopRule::emp_bernstein: return "eb";
        case StopRule::ebe: return "ebe";
    }
    return "unknown";
}

StopRule parse_stop_rule(const std::string& name) {
    if (name == "hoeffding") return StopRule::hoeffding;
    if (name == "eb" || name == "emp_bernstein") return StopRule::emp_bernstein;
    if (name == "ebe") return StopRule::ebe;
    throw DomainError("unknown stopping rule '" + name + "'");
}

void StoppingConfig::validate() const {
    if (!(epsilon > 0.0)) throw DomainError("stopping: epsilon must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("stopping: delta must lie in (0,1)");
    if (schedule_base < 2) throw DomainError("stopping: schedule_base must be >= 2");
    if (!(schedule_ratio > 1.0)) throw DomainError("stopping: schedule_ratio must exceed 1");
    if (max_n < schedule_base) throw DomainError("stopping: max_n below the first check");
}

std::vector<std::int64_t> StoppingConfig::schedule() const {
    std::vector<std::int64_t> out;
    double x = static_cast<double>(schedule_base);
    std::int64_t prev = 0;
    while (true) {
        std::int64_t n = std::max(prev + 1, static_cast<std::int64_t>(std::ceil(x - 1e-9)));
        if (n > max_n) break;
        out.push_back(n);
        prev = n;
        x *= schedule_ratio;
    }
    return out;
}

double StoppingConfig::budget(int k) const {
    const double kk = k + 1.0;
    return delta * 6.0 / (std::numbers::pi * std::numbers::pi * kk * kk);
}

UniformAverageStream::UniformAverageStream(int ell, std::uint64_t seed, std::uint64_t stream,
                                           std::int64_t limit)
    : ell_(ell), rng_(seed, stream), limit_(limit) {
    if (ell < 1) throw DomainError("uniform_average_stream: ell must be >= 1");
}

std::optional<double> UniformAverageStream::next() {
    if (limit_ > 0 && drawn_ >= limit_) return std::nullopt;
    ++drawn_;
    double s = 0.0;
    for (int i = 0; i < ell_; ++i) s += rng_.uniform();
    return s / ell_;
}

std::int64_t hoeffding_stop_n(double R, double epsilon, double delta) {
    if (!(R > 0.0)) throw DomainError("hoeffding_stop_n: R must be positive");
    if (!(epsilon > 0.0)) throw DomainError("hoeffding_stop_n: epsilon must be positive");
    if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("hoeffding_stop_n: delta must lie in (0,1]");
    return static_cast<std::int64_t>(std::ceil(R * R * std::log(2.0 / delta) / (2.0 * epsilon * epsilon)));
}

StoppingTrace run_stopping(DataSource& stream, StopRule rule, const StoppingConfig& config,
                           double R, double true_mean) {
    config.validate();
    StoppingTrace trace;
    std::int64_t n = 0;
    double mean = 0.0, m2 = 0.0;
    auto advance_to = [&](std::int64_t target) {
        while (n < target) {
            const auto w = stream.next();
            if (!w) return false;
            if (!(*w >= 0.0 && *w <= R)) throw DomainError("stopping: stream value outside [0, R]");
            ++n;
            const double d = *w - mean;
            mean += d / static_cast<double>(n);
            m2 += d * (*w - mean);
        }
        return true;
    };
    auto finish = [&](bool stopped) {
        trace.final_n = n;
        trace.final_mean = mean;
        trace.exhausted = !stopped;
        trace.correct = stopped && std::fabs(mean - true_mean) <= config.epsilon;
    };

    if (rule == StopRule::hoeffding) {
        const std::int64_t target = hoeffding_stop_n(R, config.epsilon, config.delta);
        if (target > config.max_n || !advance_to(target)) {
            finish(false);
            return trace;
        }
        const double hw = hoeffding_quantile(Problem(target, R, 0.5 * R), config.delta, Sided::two) /
                          std::sqrt(static_cast<double>(target));
        trace.checks.push_back({0, target, hw, config.delta, true});
        trace.spent_budget = config.delta;
        finish(true);
        return trace;
    }

    const auto checks = config.schedule();
    for (std::size_t k = 0; k < checks.size(); ++k) {
        if (!advance_to(checks[k])) break;
        const double w = config.budget(static_cast<int>(k));
        const SampleSummary s{n, mean, std::clamp(m2 / static_cast<double>(n), 0.0, 0.25 * R * R)};
        double q;
        if (rule == StopRule::emp_bernstein) {
            q = empirical_bernstein_quantile(s, R, 0.5 * w);
        } else {
            q = efficient_ebe_quantile(s, R, w, Sided::two).value;
        }
        const double hw = q / std::sqrt(static_cast<double>(n));
        const bool stop = hw <= config.epsilon;
        trace.checks.push_back({static_cast<int>(k), n, hw, w, stop});
        trace.spent_budget += w;
        if (stop) {
            finish(true);
            return trace;
        }
    }
    finish(false);
    return trace;
}

void write_trace_header(std::ostream& os) {
    os << "replication,rule,ell,check_index,n,half_width,stopped,correct\n";
}

void write_trace_rows(std::ostream& os, int replication, StopRule rule, int ell,
                      const StoppingTrace& trace) {
    char buf[64];
    for (const auto& c : trace.checks) {
        const auto end = std::to_chars(buf, buf + sizeof buf, c.half_width).ptr;
        os << replication << ',' << to_string(rule) << ',' << ell << ',' << c.index << ',' << c.n
           << ',' << std::string_view(buf, static_cast<std::size_t>(end - buf)) << ','
           << (c.stopped ? "true" : "false") << ',' << (trace.correct ? "true" : "false") << '\n';
    }
}

}  // namespace effconc
