#include "effconc/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "effconc/numerics.hpp"
#include "effconc/wasserstein.hpp"

namespace effconc {

namespace {

void check_prob(double v, const char* what) {
    if (!(v > 0.0 && v < 1.0)) throw DomainError(std::string(what) + " must lie in (0,1)");
}

// Number of dyadic refinement levels around the best lattice point.
constexpr int kRefineLevels = 6;
// The lattice spacing is the largest (R/2) 2^-L giving at least this many
// intervals across the bracket.
constexpr double kLatticeIntervals = 16.0;

using SigmaEval = std::function<BoundResult(double)>;

BoundResult sup_over_bracket(const VarianceBracket& br, double sigma_hat, double R,
                             const SigmaEval& eval) {
    BoundResult best{-1.0, "", {}};
    auto visit = [&](double s) {
        BoundResult r = s > 0.0 ? eval(s) : BoundResult{0.0, "zero_variance", {}};
        if (r.value > best.value) {
            best = r;
        }
        return r.value;
    };

    const double lo = br.sigma_lo, hi = std::max(br.sigma_lo, br.sigma_hi);
    visit(hi);
    if (lo < hi) visit(lo);
    if (sigma_hat > lo && sigma_hat < hi) visit(sigma_hat);

    const double width = hi - lo;
    if (width <= 1e-12 * R) return best;
    const double top = 0.5 * R;
    const int L = std::max(0, static_cast<int>(std::ceil(std::log2(top * kLatticeIntervals / width))));
    const double h = std::ldexp(top, -L);
    const auto j_lo = static_cast<std::int64_t>(std::ceil(lo / h));
    const auto j_hi = static_cast<std::int64_t>(std::floor(hi / h));
    double lattice_best = -1.0, lattice_s = hi;
    for (std::int64_t j = j_lo; j <= j_hi; ++j) {
        const double s = static_cast<double>(j) * h;
        if (s < lo || s > hi) continue;
        const double v = visit(s);
        if (v > lattice_best) {
            lattice_best = v;
            lattice_s = s;
        }
    }
    // Hill-climb on successively finer dyadic lattices (values stay cacheable).
    double step = h;
    for (int level = 0; level < kRefineLevels; ++level) {
        step *= 0.5;
        for (double s : {lattice_s - step, lattice_s + step}) {
            if (s <= lo || s >= hi) continue;
            const double v = visit(s);
            if (v > lattice_best) {
                lattice_best = v;
                lattice_s = s;
            }
        }
    }
    return best;
}

void check_inputs(const SampleSummary& summary, double R, double delta, double a) {
    if (summary.n < 2) throw DomainError("empirical quantile: n must be >= 2");
    if (!(R > 0.0)) throw DomainError("empirical quantile: R must be positive");
    check_prob(delta, "delta");
    if (!(a > 0.0 && a < delta)) throw DomainError("empirical quantile: need 0 < a < delta");
    if (!(summary.emp_var >= 0.0 && summary.emp_var <= 0.25 * R * R * (1.0 + 1e-12)))
        throw DomainError("empirical quantile: empirical variance outside [0, R^2/4]");
}

}  // namespace

SampleSummary summarize(std::span<const double> data, double R) {
    if (!(R > 0.0)) throw DomainError("summarize: R must be positive");
    SampleSummary s;
    double m2 = 0.0;
    for (double w : data) {
        if (!(w >= 0.0 && w <= R))
            throw DomainError("summarize: datum " + std::to_string(s.n + 1) + " lies outside [0, R]");
        ++s.n;
        const double d = w - s.mean;
        s.mean += d / static_cast<double>(s.n);
        m2 += d * (w - s.mean);
    }
    if (s.n > 0) s.emp_var = std::clamp(m2 / static_cast<double>(s.n), 0.0, 0.25 * R * R);
    return s;
}

double ks_quantile(std::int64_t n, double alpha, Sided sided) {
    if (n < 1) throw DomainError("ks_quantile: n must be >= 1");
    check_prob(alpha, "ks_quantile: alpha");
    const double k = sided == Sided::two ? 2.0 : 1.0;
    return std::sqrt(std::log(k / alpha) / (2.0 * static_cast<double>(n)));
}

KSQuantiles ks_quantiles(std::int64_t n, double a) {
    return {ks_quantile(n, 0.5 * a, Sided::one), ks_quantile(n, 0.5 * a, Sided::two)};
}

double sigma_lower(double R, double emp_var, double q) {
    if (!(q < 1.0)) return 0.0;
    if (q == 0.0) return std::sqrt(emp_var);  // exact cancellation
    const double inner = std::max(0.0, R * R - (1.0 - q) * 4.0 * emp_var);
    const double t = (R * q + std::sqrt(inner)) / (1.0 - q);
    const double v = 0.25 * R * R - 0.25 * t * t;
    return v > 0.0 ? std::sqrt(v) : 0.0;
}

double sigma_upper(double R, const SampleSummary& summary, const KSQuantiles& ks, double a,
                   Sided sided) {
    if (summary.n < 2) throw DomainError("sigma_upper: n must be >= 2");
    const double n = static_cast<double>(summary.n);
    const double sh = std::sqrt(summary.emp_var);
    const double s1 = std::sqrt(n / (n - 1.0)) * sh + R * std::sqrt(2.0 * std::log(2.0 / a) / (n - 1.0));
    const double lo = sigma_lower(R, summary.emp_var, ks.two_sided);
    const double rs = rsig_at(R, std::min(lo, 0.5 * R));
    const double qs = sided == Sided::one ? ks.one_sided : ks.two_sided;
    const double s2 = std::sqrt(summary.emp_var + rs * rs * ks.two_sided + (R * qs) * (R * qs));
    return std::min({s1, s2, 0.5 * R});
}

VarianceBracket variance_bracket(double R, const SampleSummary& summary, double a, Sided sided) {
    const KSQuantiles ks = ks_quantiles(summary.n, a);
    VarianceBracket b;
    b.a = a;
    b.sigma_lo = std::min(sigma_lower(R, summary.emp_var, ks.two_sided), 0.5 * R);
    b.sigma_hi = sigma_upper(R, summary, ks, a, sided);
    return b;
}

double default_a(double delta, std::int64_t n, Sided sided) {
    check_prob(delta, "default_a: delta");
    if (n < 1) throw DomainError("default_a: n must be >= 1");
    const double z = std_normal_upper_quantile(sided == Sided::one ? delta : 0.5 * delta);
    const double a = delta / std::sqrt(static_cast<double>(n)) * z;
    return (a > 0.0 && a < delta) ? a : 0.5 * delta;
}

BoundResult empirical_quantile(const SampleSummary& summary, double R, double delta, double a,
                               const BaseQuantile& base_q, Sided sided) {
    check_inputs(summary, R, delta, a);
    const VarianceBracket br = variance_bracket(R, summary, a, sided);
    const double level = delta - a;
    BoundResult r = sup_over_bracket(br, std::sqrt(summary.emp_var), R, [&](double s) {
        return BoundResult{base_q(R, level, s), "empirical", {}};
    });
    r.value = std::max(0.0, r.value);
    return r;
}

namespace {

using EbeKey = std::tuple<std::int64_t, double, double, int, double>;
std::mutex g_ebe_mutex;
std::map<EbeKey, BoundResult> g_ebe_cache;

}  // namespace

BoundResult efficient_ebe_quantile(const SampleSummary& summary, double R, double delta,
                                   Sided sided) {
    const double a = default_a(delta, summary.n, sided);
    check_inputs(summary, R, delta, a);
    const VarianceBracket br = variance_bracket(R, summary, a, sided);
    const double level = delta - a;
    auto eval = [&](double s) {
        const EbeKey key{summary.n, R, level, sided == Sided::one ? 1 : 2, s};
        {
            std::lock_guard<std::mutex> lock(g_ebe_mutex);
            if (auto it = g_ebe_cache.find(key); it != g_ebe_cache.end()) return it->second;
        }
        const BoundResult r = efficient_quantile(Problem(summary.n, R, s), level, sided);
        std::lock_guard<std::mutex> lock(g_ebe_mutex);
        g_ebe_cache[key] = r;
        return r;
    };
    BoundResult r = sup_over_bracket(br, std::sqrt(summary.emp_var), R, eval);
    r.value = std::max(0.0, r.value);
    return r;
}

double empirical_bernstein_quantile(const SampleSummary& summary, double R, double delta) {
    if (summary.n < 2) throw DomainError("empirical_bernstein_quantile: n must be >= 2");
    check_prob(delta, "delta");
    const double n = static_cast<double>(summary.n);
    const double L = std::log(2.0 / delta);
    return std::sqrt(summary.emp_var) * std::sqrt(L * n / (n - 1.0)) +
           7.0 / 3.0 * R * L * std::sqrt(n) / (n - 1.0);
}

}  // namespace effconc
