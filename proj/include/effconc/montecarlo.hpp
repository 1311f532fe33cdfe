#pragma once

#include <cstdint>
#include <vector>

#include "effconc/rng.hpp"

namespace effconc {

// Success probability of the two-point law W = R * Bernoulli(q) with standard
// deviation sigma, taking the right-skewed root q <= 1/2.
double two_point_q(double R, double sigma);

// Inverse-CDF sampler for Binomial(n, q); pmf tails below 1e-300 are dropped.
class BinomialSampler {
public:
    BinomialSampler(std::int64_t n, double q);
    std::int64_t sample(double u) const;
    std::int64_t min_support() const { return offset_; }

private:
    std::int64_t offset_ = 0;
    std::vector<double> cdf_;
};

// K_1..K_reps ~ Binomial(n, q), drawn from CounterRng(seed, stream).
std::vector<std::int64_t> sample_counts(std::int64_t n, double q, std::int64_t reps,
                                        std::uint64_t seed, std::uint64_t stream);

// S_n = sqrt(n) (R K / n - R q) for the two-point model.
double scaled_deviation(std::int64_t k, std::int64_t n, double R, double q);

// 3 binomial standard errors at probability b over `reps` trials.
double mc_slack(double b, std::int64_t reps);

struct WassersteinEstimate {
    double value = 0.0;
    double bootstrap_se = 0.0;
};

// Empirical W_p between `samples` draws of S_n (Bernoulli(1/2) summands,
// R = 1) and matched N(0, 1/4) quantiles, with a bootstrap standard error.
WassersteinEstimate empirical_wasserstein_bernoulli(std::int64_t n, double p,
                                                    std::int64_t samples, int bootstrap,
                                                    std::uint64_t seed);

// Exact W_p between the law of S_n (same model) and N(0, 1/4), by
// integrating |F^{-1}(t) - G^{-1}(t)|^p over t in (0, 1).
double exact_wasserstein_bernoulli(std::int64_t n, double p);

}  // namespace effconc
