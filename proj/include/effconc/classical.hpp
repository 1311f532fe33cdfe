#pragma once

#include "effconc/bound_result.hpp"
#include "effconc/problem.hpp"

namespace effconc {

// All tails bound P(S_n > sigma u) and lie in [0, 1].
double hoeffding_tail(const Problem& prob, double u);
double bernstein_tail(const Problem& prob, double u);
double berry_esseen_constant(const Problem& prob);
double nonuniform_be_constant(const Problem& prob);
// Both Berry-Esseen tails are clipped at the Hoeffding tail.
double berry_esseen_tail(const Problem& prob, double u);
double nonuniform_be_tail(const Problem& prob, double u);

// R_sigma log(2/delta)/(3 sqrt(n)) + sigma sqrt(2 log(2/delta)).
double bernstein_quantile(const Problem& prob, double delta);
// R sqrt(log(1/delta)/2) one-sided, R sqrt(log(2/delta)/2) two-sided.
double hoeffding_quantile(const Problem& prob, double delta, Sided sided);

// Minimum of zero-bias (both variants), Hoeffding, Bernstein, Berry-Esseen and
// non-uniform Berry-Esseen at threshold sigma u.
BoundResult default_onetail(const Problem& prob, double u);
// min(1, 2 onetail(u)), a bound on P(|S_n| > sigma u).
BoundResult default_twotail(const Problem& prob, double u);

// Search ceiling for quantile inversion: (R/sigma) sqrt(log(k/delta)/2) + 1,
// k = 1 one-sided and 2 two-sided, where Hoeffding alone is already <= delta.
double inversion_u_max(const Problem& prob, double delta, Sided sided);

// sigma u* with u* from inverting default_onetail / default_twotail.
BoundResult default_quantile(const Problem& prob, double delta, Sided sided);

}  // namespace effconc
