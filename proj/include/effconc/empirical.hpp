#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "effconc/bound_result.hpp"
#include "effconc/problem.hpp"

namespace effconc {

struct SampleSummary {
    std::int64_t n = 0;
    double mean = 0.0;
    double emp_var = 0.0;  // (1/n) sum (W_i - mean)^2
};

struct KSQuantiles {
    double one_sided = 0.0;
    double two_sided = 0.0;
};

struct VarianceBracket {
    double sigma_lo = 0.0;
    double sigma_hi = 0.0;
    double a = 0.0;
};

// Validates range [0, R] and computes the summary in one pass (Welford).
SampleSummary summarize(std::span<const double> data, double R);

// DKW closed forms: sqrt(log(2/alpha)/(2n)) two-sided, sqrt(log(1/alpha)/(2n))
// one-sided.
double ks_quantile(std::int64_t n, double alpha, Sided sided);
KSQuantiles ks_quantiles(std::int64_t n, double a);  // both at alpha = a/2

double sigma_lower(double R, double emp_var, double ks_two);
double sigma_upper(double R, const SampleSummary& summary, const KSQuantiles& ks, double a,
                   Sided sided);
VarianceBracket variance_bracket(double R, const SampleSummary& summary, double a, Sided sided);

// (delta/sqrt n) Phi^{-1}(1 - delta) one-sided, Phi^{-1}(1 - delta/2)
// two-sided; values >= delta fall back to delta/2.
double default_a(double delta, std::int64_t n, Sided sided);

using BaseQuantile = std::function<double(double R, double delta, double sigma)>;

// sup of base_q(R, delta - a, s) over s in the variance bracket: a dyadic
// lattice on the bracket, both endpoints and sigma-hat, then local dyadic
// refinement around the best lattice point. s = 0 contributes 0.
BoundResult empirical_quantile(const SampleSummary& summary, double R, double delta, double a,
                               const BaseQuantile& base_q, Sided sided);

// empirical_quantile with default a and base_q = efficient_quantile.
// Evaluations of base_q are cached per (n, R, delta - a, sided, s).
BoundResult efficient_ebe_quantile(const SampleSummary& summary, double R, double delta,
                                   Sided sided);

double empirical_bernstein_quantile(const SampleSummary& summary, double R, double delta);

}  // namespace effconc
