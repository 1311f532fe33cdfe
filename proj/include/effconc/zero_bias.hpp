#pragma once

#include <string>

#include "effconc/bound_result.hpp"
#include "effconc/problem.hpp"

namespace effconc {

struct ZeroBiasTerms {
    double h_lambda_u = 0.0;  // h_u(lambda u)
    double h_u_u = 0.0;       // h_u(u)
    double delta_prime = 0.0;
    double q_n = 1.0;         // Q_n(lambda sigma u)
    double delta_n = 0.0;
    double v_up_sq = 0.0;
    double v_low_sq = 0.0;
    double beta_n = 0.0;
};

struct QnValue {
    double value = 1.0;
    std::string winner;  // "hoeffding", "bernstein" or "berry_esseen"
    double hoeffding_branch = 1.0;
    double bernstein_branch = 1.0;
    double be_branch = 1.0;  // +inf when v_low^2 <= 0
};

// (w + (1 + w^2) sqrt(2 pi) e^{w^2/2} Phi(w)) Phi^c(u), for w <= u.
double h_u(double w, double u);

// 2/(w + sqrt(w^2 + 8/pi)) - 8w/(pi (w + sqrt(w^2 + 8/pi))^2)
double b_growth(double w);

double delta_prime(double u);

QnValue q_n_terms(const Problem& prob, double u_arg);
double q_n(const Problem& prob, double u_arg);

ZeroBiasTerms zero_bias_terms(const Problem& prob, double u, double lambda);

// Bound on P(S_n > sigma u + R/sqrt(n)).
double zero_bias_tail(const Problem& prob, double u, double lambda);

// Bound on P(S_n > sigma u sqrt(n+1)/sqrt(n) + R_sigma/sqrt(n)).
double alt_zero_bias_tail(const Problem& prob, double u, double lambda);

// Bound on P(S_n > t): both variants with lambda on {0, 1/32, ..., 1}, the
// smaller one wins; 1 when t lies below both thresholds' reach.
BoundResult zero_bias_tail_at_threshold(const Problem& prob, double t);

// Number of evaluations where sigma sqrt(n) + R delta'_u <= 0 forced the
// trivial answer (expected to stay at zero).
long long zero_bias_fallback_count();

}  // namespace effconc
