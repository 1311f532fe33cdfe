#include "effconc/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "effconc/numerics.hpp"

namespace effconc {

double two_point_q(double R, double sigma) {
    if (!(R > 0.0 && sigma > 0.0 && 2.0 * sigma <= R * (1.0 + 1e-15)))
        throw DomainError("two-point model: need 0 < sigma <= R/2");
    const double disc = std::max(0.0, 1.0 - 4.0 * sigma * sigma / (R * R));
    return 0.5 - 0.5 * std::sqrt(disc);
}

BinomialSampler::BinomialSampler(std::int64_t n, double q) {
    if (n < 1) throw DomainError("binomial sampler: n must be >= 1");
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("binomial sampler: q must lie in [0,1]");
    if (q == 0.0 || q == 1.0) {
        offset_ = q == 0.0 ? 0 : n;
        cdf_ = {1.0};
        return;
    }
    const double nd = static_cast<double>(n);
    auto log_pmf = [&](double k) {
        return std::lgamma(nd + 1.0) - std::lgamma(k + 1.0) - std::lgamma(nd - k + 1.0) +
               k * std::log(q) + (nd - k) * std::log1p(-q);
    };
    const double mu = nd * q, sd = std::sqrt(nd * q * (1.0 - q));
    std::int64_t lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(mu - 40.0 * sd - 40.0));
    std::int64_t hi = std::min<std::int64_t>(n, static_cast<std::int64_t>(mu + 40.0 * sd + 40.0));
    offset_ = lo;
    cdf_.reserve(static_cast<std::size_t>(hi - lo + 1));
    double acc = 0.0;
    for (std::int64_t k = lo; k <= hi; ++k) {
        acc += std::exp(log_pmf(static_cast<double>(k)));
        cdf_.push_back(acc);
    }
    for (auto& c : cdf_) c /= acc;
}

std::int64_t BinomialSampler::sample(double u) const {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto idx = std::min<std::ptrdiff_t>(it - cdf_.begin(),
                                              static_cast<std::ptrdiff_t>(cdf_.size()) - 1);
    return offset_ + idx;
}

std::vector<std::int64_t> sample_counts(std::int64_t n, double q, std::int64_t reps,
                                        std::uint64_t seed, std::uint64_t stream) {
    const BinomialSampler sampler(n, q);
    CounterRng rng(seed, stream);
    std::vector<std::int64_t> out(static_cast<std::size_t>(reps));
    for (auto& k : out) k = sampler.sample(rng.uniform());
    return out;
}

double scaled_deviation(std::int64_t k, std::int64_t n, double R, double q) {
    const double nd = static_cast<double>(n);
    return std::sqrt(nd) * R * (static_cast<double>(k) / nd - q);
}

double mc_slack(double b, std::int64_t reps) {
    const double p = std::clamp(b, 0.0, 1.0);
    return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
}

namespace {

// W_p^p between a sorted sample given by per-value counts and matched
// normal quantiles z_i = sigma Phi^{-1}((i - 1/2)/N).
double wp_from_counts(const std::vector<std::int64_t>& counts, std::int64_t n,
                      const std::vector<double>& z, double p) {
    double acc = 0.0;
    std::size_t i = 0;
    for (std::int64_t k = 0; k <= n; ++k) {
        const double s = scaled_deviation(k, n, 1.0, 0.5);
        for (std::int64_t c = 0; c < counts[static_cast<std::size_t>(k)]; ++c, ++i)
            acc += std::pow(std::fabs(s - z[i]), p);
    }
    return std::pow(acc / static_cast<double>(z.size()), 1.0 / p);
}

}  // namespace

WassersteinEstimate empirical_wasserstein_bernoulli(std::int64_t n, double p,
                                                    std::int64_t samples, int bootstrap,
                                                    std::uint64_t seed) {
    if (samples < 2) throw DomainError("empirical wasserstein: need at least 2 samples");
    const std::size_t N = static_cast<std::size_t>(samples);
    std::vector<double> z(N);
    for (std::size_t i = 0; i < N; ++i)
        z[i] = 0.5 * std_normal_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(N));

    std::vector<std::int64_t> counts(static_cast<std::size_t>(n + 1), 0);
    for (auto k : sample_counts(n, 0.5, samples, seed, 0)) ++counts[static_cast<std::size_t>(k)];
    WassersteinEstimate out;
    out.value = wp_from_counts(counts, n, z, p);

    if (bootstrap > 1) {
        // Resampling from the empirical law = inverse CDF on the counts.
        std::vector<double> cdf(counts.size());
        double acc = 0.0;
        for (std::size_t k = 0; k < counts.size(); ++k) {
            acc += static_cast<double>(counts[k]) / static_cast<double>(N);
            cdf[k] = acc;
        }
        CounterRng rng(seed, 1);
        double s1 = 0.0, s2 = 0.0;
        for (int b = 0; b < bootstrap; ++b) {
            std::vector<std::int64_t> bc(counts.size(), 0);
            for (std::size_t i = 0; i < N; ++i) {
                const auto it = std::upper_bound(cdf.begin(), cdf.end(), rng.uniform() * acc);
                ++bc[std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), counts.size() - 1)];
            }
            const double v = wp_from_counts(bc, n, z, p);
            s1 += v;
            s2 += v * v;
        }
        const double m = s1 / bootstrap;
        out.bootstrap_se = std::sqrt(std::max(0.0, s2 / bootstrap - m * m) * bootstrap / (bootstrap - 1.0));
    }
    return out;
}

double exact_wasserstein_bernoulli(std::int64_t n, double p) {
    // Piecewise: on each atom's CDF interval [F_{k-1}, F_k) the sum quantile is
    // constant and the normal quantile is monotone.
    const double nd = static_cast<double>(n);
    double lower = 0.0, total = 0.0;
    for (std::int64_t k = 0; k <= n; ++k) {
        const double pk = std::exp(std::lgamma(nd + 1.0) - std::lgamma(k + 1.0) -
                                   std::lgamma(nd - k + 1.0) - nd * std::log(2.0));
        const double upper = k == n ? 1.0 : std::min(1.0, lower + pk);
        const double s = scaled_deviation(k, n, 1.0, 0.5);
        // Integrate in x = G^{-1}(t) to avoid the quantile singularities.
        const double xa = lower <= 0.0 ? -40.0 : 0.5 * std_normal_quantile(lower);
        const double xb = upper >= 1.0 ? 40.0 : 0.5 * std_normal_quantile(upper);
        if (xb > xa) {
            auto f = [&](double x) { return std::pow(std::fabs(s - x), p) * 2.0 * normal_pdf(2.0 * x); };
            const double split = std::clamp(s, xa, xb);
            total += integrate(f, xa, split, Tolerance{1e-15, 1e-12, 400}).value;
            total += integrate(f, split, xb, Tolerance{1e-15, 1e-12, 400}).value;
        }
        lower = upper;
    }
    return std::pow(total, 1.0 / p);
}

}  // namespace effconc
