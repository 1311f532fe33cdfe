#include "effconc/validation.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>

#include "effconc/classical.hpp"
#include "effconc/empirical.hpp"
#include "effconc/montecarlo.hpp"
#include "effconc/numerics.hpp"
#include "effconc/problem.hpp"
#include "effconc/rng.hpp"
#include "effconc/stopping.hpp"
#include "effconc/wasserstein.hpp"
#include "effconc/zero_bias.hpp"

namespace effconc {

ValidationScale ValidationScale::reduced() {
    ValidationScale s;
    s.tail_reps = 20'000;
    s.quantile_reps = 2'000;
    s.coupling_samples = 100'000;
    s.coupling_bootstrap = 20;
    s.chain_settings = 100;
    s.stop_mean_reps = 10;
    s.stop_correct_reps = 20;
    return s;
}

namespace {

constexpr std::array<double, 3> kSigmas{0.1, 0.25, 0.5};
constexpr std::array<std::int64_t, 3> kSizes{50, 200, 1000};
constexpr std::array<double, 5> kUs{0.0, 0.5, 1.0, 2.0, 3.0};
constexpr std::array<double, 3> kDeltas{0.01, 0.05, 0.1};

// Stream labels; one per suite so suites never share draws.
enum StreamTag : std::uint64_t { kTailStream = 1, kQuantileStream, kChainStream, kCouplingStream };

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

class Recorder {
public:
    explicit Recorder(std::string name) : start_(std::chrono::steady_clock::now()) {
        report_.name = std::move(name);
    }

    bool check(bool ok, const std::string& id, const std::string& detail) {
        ++report_.checks;
        if (!ok) report_.failures.push_back({id, detail});
        return ok;
    }
    void note(const std::string& line) { report_.notes.push_back(line); }

    SuiteReport finish() {
        report_.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        return std::move(report_);
    }

private:
    SuiteReport report_;
    std::chrono::steady_clock::time_point start_;
};

void tell(const Progress& progress, const std::string& line) {
    if (progress) progress(line);
}

// Simulated two-point sums for one (sigma, n) cell, kept as a histogram over
// the success count.
struct Cell {
    std::int64_t n;
    double sigma;
    double q;
    std::int64_t reps;
    std::map<std::int64_t, std::int64_t> hist;

    double deviation(std::int64_t k) const { return scaled_deviation(k, n, 1.0, q); }

    // Frequency of {S_n > t} (or {|S_n| > t}). Exact ties are not
    // exceedances; the relative 1e-12 guard keeps rounding from creating them.
    double exceed(double t, bool two_sided) const {
        const double guard = 1e-12 * (1.0 + std::fabs(t));
        std::int64_t hits = 0;
        for (const auto& [k, c] : hist) {
            const double s = deviation(k);
            if (s > t + guard || (two_sided && -s > t + guard)) hits += c;
        }
        return static_cast<double>(hits) / static_cast<double>(reps);
    }
};

Cell simulate(std::int64_t n, double sigma, std::int64_t reps, std::uint64_t seed,
              std::uint64_t stream) {
    Cell cell{n, sigma, two_point_q(1.0, sigma), reps, {}};
    for (auto k : sample_counts(n, cell.q, reps, seed, stream)) ++cell.hist[k];
    return cell;
}

}  // namespace

SuiteReport closed_form_suite(const ValidationScale&) {
    Recorder rec("closed_form");
    auto exact = [&](const std::string& id, double got, double want) {
        rec.check(std::fabs(got - want) <= 1e-12, id, fmt("got %.17g, want %.17g", got, want));
    };
    exact("rsig(1,0.3)", rsig(1.0, 0.3), 0.9);
    exact("normal_tail(0)", std_normal_cdf_c(0.0), 0.5);
    exact("dkw_two_sided(100,0.05)", ks_quantile(100, 0.05, Sided::two),
          std::sqrt(std::log(40.0) / 200.0));
    const auto n_h = hoeffding_stop_n(1.0, 0.01, 0.1);
    exact("hoeffding_stop_n(1,0.01,0.1)", static_cast<double>(n_h), 14979.0);
    return rec.finish();
}

SuiteReport tail_validity_suite(const ValidationScale& scale, const Progress& progress) {
    Recorder rec("tail_validity");
    std::uint64_t cell_id = 0;
    for (double sigma : kSigmas) {
        for (std::int64_t n : kSizes) {
            const Cell cell = simulate(n, sigma, scale.tail_reps, scale.seed,
                                       stream_id(kTailStream, cell_id++));
            const Problem prob(n, 1.0, sigma);
            for (double u : kUs) {
                const double t = sigma * u;
                const double one = cell.exceed(t, false);
                const double two = cell.exceed(t, true);
                const std::array<std::pair<const char*, double>, 8> bounds{{
                    {"hoeffding", hoeffding_tail(prob, u)},
                    {"bernstein", bernstein_tail(prob, u)},
                    {"berry_esseen", berry_esseen_tail(prob, u)},
                    {"nonuniform_be", nonuniform_be_tail(prob, u)},
                    {"zero_bias", zero_bias_tail_at_threshold(prob, t).value},
                    {"wasserstein", efficient_tail(prob, u, Sided::one).value},
                    {"default_two_sided", default_twotail(prob, u).value},
                    {"wasserstein_two_sided", efficient_tail(prob, u, Sided::two).value},
                }};
                for (std::size_t i = 0; i < bounds.size(); ++i) {
                    const auto& [name, b] = bounds[i];
                    const double freq = i < 6 ? one : two;
                    const double limit = b + mc_slack(b, cell.reps);
                    rec.check(freq <= limit, name,
                              fmt("sigma=%g n=%lld u=%g: exceedance %.5f > bound %.5f + slack",
                                  sigma, static_cast<long long>(n), u, freq, b));
                }
            }
            tell(progress, fmt("tail validity sigma=%g n=%lld done", sigma,
                               static_cast<long long>(n)));
        }
    }
    return rec.finish();
}

SuiteReport quantile_validity_suite(const ValidationScale& scale, const Progress& progress) {
    Recorder rec("quantile_validity");
    std::uint64_t cell_id = 0;
    for (double sigma : kSigmas) {
        for (std::int64_t n : kSizes) {
            // Known-variance quantiles are cheap and get the larger sample.
            const Cell big = simulate(n, sigma, scale.tail_reps, scale.seed,
                                      stream_id(kQuantileStream, cell_id, 1));
            const Cell cell = simulate(n, sigma, scale.quantile_reps, scale.seed,
                                       stream_id(kQuantileStream, cell_id, 2));
            ++cell_id;
            const Problem prob(n, 1.0, sigma);
            const double nd = static_cast<double>(n);
            for (double delta : kDeltas) {
                const double limit = delta + mc_slack(delta, cell.reps);
                const double limit_big = delta + mc_slack(delta, big.reps);
                const std::string where = fmt("sigma=%g n=%lld delta=%g", sigma,
                                              static_cast<long long>(n), delta);
                for (Sided sided : {Sided::one, Sided::two}) {
                    const bool two = sided == Sided::two;
                    const char* tag = two ? "two-sided" : "one-sided";

                    const double qk = efficient_quantile(prob, delta, sided).value;
                    const double fk = big.exceed(qk, two);
                    rec.check(fk <= limit_big, fmt("efficient_quantile %s", tag),
                              fmt("%s: exceedance %.5f > %.5f", where.c_str(), fk, limit_big));

                    // The empirical quantile depends on the data only through
                    // the success count.
                    std::int64_t hits = 0;
                    for (const auto& [k, c] : cell.hist) {
                        const double phat = static_cast<double>(k) / nd;
                        const SampleSummary summary{n, phat, phat * (1.0 - phat)};
                        const double qe = efficient_ebe_quantile(summary, 1.0, delta, sided).value;
                        const double s = cell.deviation(k);
                        if (s > qe || (two && -s > qe)) hits += c;
                    }
                    const double fe = static_cast<double>(hits) / static_cast<double>(cell.reps);
                    rec.check(fe <= limit, fmt("ebe_quantile %s", tag),
                              fmt("%s: exceedance %.5f > %.5f", where.c_str(), fe, limit));
                }
            }
            tell(progress, fmt("quantile validity sigma=%g n=%lld done", sigma,
                               static_cast<long long>(n)));
        }
    }
    return rec.finish();
}

SuiteReport efficiency_suite(const ValidationScale&) {
    Recorder rec("efficiency");
    const double sigma = 0.25, delta = 0.05;
    const double reference = sigma * std_normal_upper_quantile(0.5 * delta);
    double previous = INFINITY;
    for (double n = 1e2; n <= 1e8 * 1.0001; n *= 10.0) {
        const Problem prob(static_cast<std::int64_t>(std::llround(n)), 1.0, sigma);
        const BoundResult eff = efficient_quantile(prob, delta, Sided::two);
        const double r_eff = eff.value / reference;
        const double r_bern = bernstein_quantile(prob, delta) / reference;
        const double r_hoef = hoeffding_quantile(prob, delta, Sided::two) / reference;
        rec.note(fmt("n=%.0e efficient=%.6f (%s) bernstein=%.6f hoeffding=%.6f", n, r_eff,
                     eff.winner.c_str(), r_bern, r_hoef));
        rec.check(r_eff < previous, "efficient ratio strictly decreasing",
                  fmt("n=%.0e: %.9f not below %.9f", n, r_eff, previous));
        rec.check(r_bern >= 1.2, "bernstein ratio >= 1.2", fmt("n=%.0e: %.6f", n, r_bern));
        rec.check(r_hoef >= 1.2, "hoeffding ratio >= 1.2", fmt("n=%.0e: %.6f", n, r_hoef));
        previous = r_eff;
    }
    rec.check(previous <= 1.10, "efficient ratio <= 1.10 at n=1e8", fmt("%.6f", previous));
    return rec.finish();
}

SuiteReport subgaussian_suite(const ValidationScale&) {
    Recorder rec("subgaussian");
    const Problem prob(10'000, 1.0, 0.25);
    std::vector<double> xs, ys;
    for (int i = 0; i <= 20; ++i) {
        const double u = 1.0 + 0.25 * i;
        const double gap = zero_bias_tail_at_threshold(prob, prob.sigma * u).value -
                           std_normal_cdf_c(u);
        if (!rec.check(gap > 0.0, "correction positive", fmt("u=%g: gap %.3g", u, gap))) continue;
        xs.push_back(u * u);
        ys.push_back(std::log(gap));
    }
    if (xs.size() < 3) return rec.finish();
    const double m = static_cast<double>(xs.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    const double r2 = sxy * sxy / (sxx * syy);
    rec.note(fmt("slope=%.6f r2=%.6f", slope, r2));
    rec.check(slope < 0.0, "negative slope", fmt("slope %.6g", slope));
    rec.check(r2 >= 0.95, "fit r2 >= 0.95", fmt("r2 %.6f", r2));
    return rec.finish();
}

SuiteReport wasserstein_suite(const ValidationScale& scale, const Progress& progress) {
    Recorder rec("wasserstein");

    CounterRng rng(scale.seed, stream_id(kChainStream));
    for (int i = 0; i < scale.chain_settings; ++i) {
        const auto n = static_cast<std::int64_t>(std::llround(std::pow(10.0, 1.0 + 5.0 * rng.uniform())));
        const double sigma = 0.05 + 0.45 * rng.uniform();
        const int p = 2 + static_cast<int>(15.0 * rng.uniform());
        const int K = 1 + static_cast<int>(kMaxTruncation * rng.uniform());
        const Problem prob(n, 1.0, sigma);
        const double tR2 = 1.0 / (sigma * sigma);
        const double c = tR2 / static_cast<double>(n);
        // Keep (p-1)(kappa-c)/2 well inside the finite range of b31/b32.
        const double span = std::min(100.0 * tR2, 1200.0 / (p - 1.0));
        const double kappa = c + span * (1e-3 + rng.uniform());
        const std::string where =
            fmt("n=%lld sigma=%.4f p=%d kappa=%.6g K=%d", static_cast<long long>(n), sigma, p, kappa, K);
        const double b21v = b21(prob, p, kappa), b22v = b22(prob, p, kappa);
        rec.check(b21v <= b22v, "b21 <= b22", fmt("%s: b21 %.9g > b22 %.9g", where.c_str(), b21v, b22v));
        try {
            const double tight = omega_kappa(prob, p, kappa, K, false);
            const double loose = omega_kappa(prob, p, kappa, K, true);
            rec.check(tight <= loose, "omega_kappa <= omega_kappa_2",
                      fmt("%s: %.9g > %.9g", where.c_str(), tight, loose));
        } catch (const NumericError& e) {
            rec.check(false, "omega_kappa evaluation", where + ": " + e.what());
        }
    }
    tell(progress, "omega chain done");

    for (std::int64_t n : {100, 10'000}) {
        for (double sigma : {0.1, 0.5}) {
            for (int p : {2, 4, 8, 16}) {
                const Problem prob(n, 1.0, sigma);
                const double om = omega(prob, p).value;
                const double cap = k_rsig(prob, p) * p / std::sqrt(static_cast<double>(n));
                rec.check(om <= cap, "omega growth",
                          fmt("n=%lld sigma=%g p=%d: omega %.6g > %.6g", static_cast<long long>(n),
                              sigma, p, om, cap));
            }
        }
    }

    for (std::int64_t n : {4, 16}) {
        for (int p : {1, 2}) {
            const Problem prob(n, 1.0, 0.5);
            const double bound = prob.sigma * omega(prob, p).value;
            const WassersteinEstimate w = empirical_wasserstein_bernoulli(
                n, p, scale.coupling_samples, scale.coupling_bootstrap,
                mix64(scale.seed ^ stream_id(kCouplingStream, n, p)));
            rec.note(fmt("n=%lld p=%d W_p=%.6f (se %.2g, exact %.6f) sigma*omega=%.6f",
                         static_cast<long long>(n), p, w.value, w.bootstrap_se,
                         exact_wasserstein_bernoulli(n, p), bound));
            rec.check(w.value <= bound + 3.0 * w.bootstrap_se, "coupling W_p <= sigma*omega",
                      fmt("n=%lld p=%d: %.6f > %.6f", static_cast<long long>(n), p, w.value, bound));
        }
    }
    tell(progress, "coupling done");
    return rec.finish();
}

SuiteReport ebe_vs_bernstein_suite(const ValidationScale&) {
    Recorder rec("ebe_vs_bernstein");
    for (double n : {1e5, 3e5, 1e6, 3e6, 1e7, 3e7, 1e8}) {
        const SampleSummary summary{static_cast<std::int64_t>(n), 0.5, 0.0625};
        const double ebe = efficient_ebe_quantile(summary, 1.0, 0.05, Sided::one).value;
        const double eb = empirical_bernstein_quantile(summary, 1.0, 0.05);
        rec.note(fmt("n=%.0e ebe=%.6f eb=%.6f", n, ebe, eb));
        rec.check(ebe < eb, "ebe < empirical bernstein", fmt("n=%.0e: %.6f >= %.6f", n, ebe, eb));
    }
    return rec.finish();
}

SuiteReport stopping_suite(const ValidationScale& scale, bool check_ordering,
                           const Progress& progress) {
    Recorder rec("stopping");
    const StoppingConfig config;
    const auto n_h = hoeffding_stop_n(1.0, config.epsilon, config.delta);
    rec.check(n_h == 14979, "hoeffding stop n", fmt("got %lld", static_cast<long long>(n_h)));

    const int reps = std::max(scale.stop_correct_reps, scale.stop_mean_reps);
    const double limit = config.delta + mc_slack(config.delta, reps);
    for (int ell : {1, 10, 100}) {
        std::map<StopRule, double> mean_n;
        for (StopRule rule : {StopRule::hoeffding, StopRule::emp_bernstein, StopRule::ebe}) {
            int errors = 0;
            double total_n = 0.0;
            for (int rep = 0; rep < reps; ++rep) {
                // Common random numbers: every rule sees the same stream.
                UniformAverageStream stream(ell, scale.seed, stream_id(ell, rep));
                const StoppingTrace trace = run_stopping(stream, rule, config, 1.0, 0.5);
                if (!trace.correct) ++errors;
                if (rep < scale.stop_mean_reps) total_n += static_cast<double>(trace.final_n);
                const std::string where =
                    fmt("%s ell=%d rep=%d", to_string(rule).c_str(), ell, rep);
                rec.check(trace.spent_budget <= config.delta * (1.0 + 1e-12), "budget accounting",
                          fmt("%s: spent %.6g", where.c_str(), trace.spent_budget));
                const bool once = !trace.checks.empty() && trace.checks.back().stopped &&
                                  std::count_if(trace.checks.begin(), trace.checks.end(),
                                                [](const CheckRecord& c) { return c.stopped; }) == 1;
                rec.check(once && !trace.exhausted, "stopped exactly once", where);
            }
            const double freq = static_cast<double>(errors) / reps;
            mean_n[rule] = total_n / scale.stop_mean_reps;
            rec.note(fmt("ell=%d %s: mean stop n %.1f over %d reps, error frequency %.4f over %d",
                         ell, to_string(rule).c_str(), mean_n[rule], scale.stop_mean_reps, freq, reps));
            rec.check(freq <= limit, "error frequency",
                      fmt("%s ell=%d: %.4f > %.4f", to_string(rule).c_str(), ell, freq, limit));
            tell(progress, fmt("stopping ell=%d %s done", ell, to_string(rule).c_str()));
        }
        if (ell >= 10) {
            for (StopRule rule : {StopRule::emp_bernstein, StopRule::ebe})
                rec.check(mean_n[rule] <= mean_n[StopRule::hoeffding], "adaptive mean <= hoeffding",
                          fmt("%s ell=%d: %.1f > %.1f", to_string(rule).c_str(), ell, mean_n[rule],
                              mean_n[StopRule::hoeffding]));
            if (check_ordering)
                rec.check(mean_n[StopRule::ebe] <= mean_n[StopRule::emp_bernstein],
                          "mean ebe stop n <= mean eb stop n",
                          fmt("ell=%d: %.1f > %.1f", ell, mean_n[StopRule::ebe],
                              mean_n[StopRule::emp_bernstein]));
        }
    }
    return rec.finish();
}

}  // namespace effconc
