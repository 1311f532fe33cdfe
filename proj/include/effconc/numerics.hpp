#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace effconc {

/// Raised when an argument falls outside an operation's domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when an iterative routine cannot deliver its contract
/// (quadrature non-convergence, unattainable inversion).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnattainableError : public NumericError {
public:
    using NumericError::NumericError;
};

struct Tolerance {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_iter = 200;

    void validate() const;
};

// ---------------------------------------------------------------------------
// Standard normal distribution
// ---------------------------------------------------------------------------

double normal_pdf(double x);
double normal_cdf(double x);

/// Upper tail 1 - Phi(x), accurate in the far tail (no cancellation).
double std_normal_cdf_c(double x);

/// log(1 - Phi(x)); finite for every finite x.
double log_normal_cdf_c(double x);

/// Scaled complementary error function exp(x^2) erfc(x).
double erfcx(double x);

/// exp(w^2/2) * (1 - Phi(u)) evaluated without overflow; intended for w <= u.
double scaled_normal_tail(double w, double u);

/// Phi^{-1}(p) for p in (0,1).
double std_normal_quantile(double p);

/// Phi^{-1}(1 - tail) computed from the tail mass directly, so tiny tails keep
/// full relative precision.
double std_normal_upper_quantile(double tail);

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

/// ||Z||_p for Z ~ N(0,1).
double normal_pnorm(double p);

/// ||Binomial(n, q)||_p. Summation walks outward from the mode of the
/// (log-concave) summand and closes each side with a geometric bound on the
/// discarded mass, so the result never falls below the exact value by more
/// than rounding.
double binomial_pnorm(std::int64_t n, double q, double p);

/// Majorant sqrt(k!) (p-1)^{k/2} of the p-norm of the k-th Hermite polynomial
/// of a standard normal.
double hermite_moment_bound(int k, double p);

// ---------------------------------------------------------------------------
// Quadrature, 1-D optimisation, inversion
// ---------------------------------------------------------------------------

struct Integral {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive Gauss-Kronrod (7/15) quadrature over [a, b]. The interval is first
/// mapped through y = a + (b - a)(1 - cos(pi t))/2, which turns integrable
/// endpoint singularities of order |y - endpoint|^{-1/2} into bounded
/// integrands. Throws NumericError when max_iter subdivisions do not reach
/// max(abs_tol, rel_tol |I|).
Integral integrate(const std::function<double(double)>& f, double a, double b,
                   const Tolerance& tol = {});

/// Vector-valued adaptive Gauss-Kronrod on [a, b] without endpoint mapping.
/// `f(x, out)` writes `dim` integrand values; every component must meet the
/// tolerance. Intended for smooth families sharing one set of nodes.
std::vector<Integral> integrate_many(
    const std::function<void(double, std::span<double>)>& f, std::size_t dim,
    double a, double b, const Tolerance& tol = {});

struct Minimum {
    double argmin = 0.0;
    double value = 0.0;
};

/// Uniform grid of `grid_points` nodes on [lo, hi] followed by golden-section
/// search on the bracket around the best node. The returned value never
/// exceeds f at any grid node. +inf values are allowed and simply lose.
Minimum minimize_scalar(const std::function<double(double)>& f, double lo,
                        double hi, const Tolerance& tol = {},
                        int grid_points = 65);

/// Smallest u (up to bisection precision) with bound(u) <= delta, searched on a
/// uniform grid over [0, u_max] and refined by bisection. The returned point
/// always satisfies bound(u) <= delta. Throws UnattainableError when
/// bound(u_max) > delta.
double invert_monotone_tail(const std::function<double(double)>& bound,
                            double delta, double u_max, int grid_points = 64);

}  // namespace effconc
