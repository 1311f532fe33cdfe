#pragma once

#include <functional>
#include <string>
#include <vector>

#include "effconc/bound_result.hpp"
#include "effconc/numerics.hpp"
#include "effconc/problem.hpp"

namespace effconc {

struct WassersteinConstants {
    double a_p = 0.0;
    double a_star = 0.0;
    double a_tilde = 0.0;
    double u_np = 0.0;
    double u_tilde = 0.0;
    double c_np = 0.0;
    double d_np = 0.0;
    double b_pn = 0.0;
    double m_nk = 0.0;
    int c_branch = 0;  // 1-based index of the winning candidate
    int d_branch = 0;
    int b_branch = 0;
};

struct OmegaSettings {
    int p = 2;
    double kappa = 0.0;
    int K_p = 1;
    Tolerance quad_tol{0.0, 1e-9, 200};
};

constexpr int kMaxTruncation = 40;

WassersteinConstants constants(const Problem& prob, int p, double kappa);

double b21(const Problem& prob, int p, double kappa);
double b22(const Problem& prob, int p, double kappa);
double b31(const Problem& prob, int p, double kappa, int K_p);
double b32(const Problem& prob, int p, double kappa);

// b31 for every truncation K_p = 1..kMaxTruncation from one shared set of
// integrals; entry K_p - 1 holds the value for K_p.
std::vector<double> b31_all(const Problem& prob, int p, double kappa);

// {||Z||_p (pi/2 - asin M) + b21 + b31} / M^{[p>2]}; loose swaps in b22, b32.
double omega_kappa(const Problem& prob, int p, double kappa, int K_p, bool loose);

struct OmegaValue {
    double value = 0.0;
    double kappa = 0.0;  // 0 for p = 1
    int K_p = 0;
};

// Memoised per (n, R, sigma, p). p = 1 gives R_sigma/(sigma sqrt n); p >= 2
// minimises over kappa and K_p. p > n + 1 is rejected.
OmegaValue omega(const Problem& prob, int p);

// Cheap lower bound on omega(prob, p): drops b31 (nonnegative).
double omega_lower_bound(const Problem& prob, int p);

double k_rsig(const Problem& prob, double p);

// p-candidates {1,2,3,4,6,8,12,16,24,32,48,64} capped at n + 1.
std::vector<int> p_candidates(const Problem& prob);

// Rounded efficiency-remark choice of p at deviation u, or 0 when the
// formula yields nothing admissible.
int heuristic_p(const Problem& prob, double u);

BoundResult wass_tail(const Problem& prob, double u,
                      const std::function<BoundResult(double)>& aux_onetail);
BoundResult wass_tail_two(const Problem& prob, double u,
                          const std::function<BoundResult(double)>& aux_twotail);
BoundResult wass_quantile(const Problem& prob, double delta, const BoundResult& aux_q,
                          Sided sided);

// The Wasserstein bounds paired with the default auxiliary bounds.
BoundResult efficient_tail(const Problem& prob, double u, Sided sided);
BoundResult efficient_quantile(const Problem& prob, double delta, Sided sided);

// Test hook: multiplies b21 by `scale` (1 restores normal behaviour).
void set_b21_scale_for_testing(double scale);

}  // namespace effconc
