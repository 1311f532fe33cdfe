#include "effconc/classical.hpp"

#include <algorithm>
#include <cmath>

#include "effconc/numerics.hpp"
#include "effconc/zero_bias.hpp"

namespace effconc {

namespace {

void check_u(double u) {
    if (!(u >= 0.0)) throw DomainError("tail bound: u must be >= 0");
}

void check_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("quantile: delta must lie in (0,1)");
}

}  // namespace

double hoeffding_tail(const Problem& prob, double u) {
    check_u(u);
    const double r = prob.sigma / prob.R;
    return std::min(1.0, std::exp(-2.0 * u * u * r * r));
}

double bernstein_tail(const Problem& prob, double u) {
    check_u(u);
    const double root_n = std::sqrt(static_cast<double>(prob.n));
    return std::min(1.0, std::exp(-u * u / (2.0 * (1.0 + prob.R * u / (3.0 * prob.sigma * root_n)))));
}

double berry_esseen_constant(const Problem& prob) {
    const double t = derive(prob).tilde_rsig;
    return std::min(0.3328 * (t + 0.429), 0.33554 * (t + 0.415));
}

double nonuniform_be_constant(const Problem& prob) {
    const double t = derive(prob).tilde_rsig;
    return std::min(17.36 * t, 15.70 * t + 0.646);
}

double berry_esseen_tail(const Problem& prob, double u) {
    check_u(u);
    const double root_n = std::sqrt(static_cast<double>(prob.n));
    const double v = std_normal_cdf_c(u) + berry_esseen_constant(prob) / root_n;
    return std::min({1.0, v, hoeffding_tail(prob, u)});
}

double nonuniform_be_tail(const Problem& prob, double u) {
    check_u(u);
    const double root_n = std::sqrt(static_cast<double>(prob.n));
    const double v =
        std_normal_cdf_c(u) + nonuniform_be_constant(prob) / (root_n * std::pow(1.0 + u, 3));
    return std::min({1.0, v, hoeffding_tail(prob, u)});
}

double bernstein_quantile(const Problem& prob, double delta) {
    check_delta(delta);
    const double L = std::log(2.0 / delta);
    const double root_n = std::sqrt(static_cast<double>(prob.n));
    return rsig(prob.R, prob.sigma) / (3.0 * root_n) * L + prob.sigma * std::sqrt(2.0 * L);
}

double hoeffding_quantile(const Problem& prob, double delta, Sided sided) {
    if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("quantile: delta must lie in (0,1]");
    const double k = sided == Sided::one ? 1.0 : 2.0;
    return prob.R * std::sqrt(std::max(0.0, std::log(k / delta)) / 2.0);
}

BoundResult default_onetail(const Problem& prob, double u) {
    check_u(u);
    BoundResult best = zero_bias_tail_at_threshold(prob, prob.sigma * u);
    auto consider = [&](double v, const char* name) {
        if (v < best.value) {
            best.value = v;
            best.winner = name;
            best.settings = {};
        }
    };
    consider(hoeffding_tail(prob, u), "hoeffding");
    consider(bernstein_tail(prob, u), "bernstein");
    consider(berry_esseen_tail(prob, u), "berry_esseen");
    consider(nonuniform_be_tail(prob, u), "nonuniform_be");
    best.value = std::clamp(best.value, 0.0, 1.0);
    return best;
}

BoundResult default_twotail(const Problem& prob, double u) {
    BoundResult r = default_onetail(prob, u);
    r.value = std::min(1.0, 2.0 * r.value);
    return r;
}

double inversion_u_max(const Problem& prob, double delta, Sided sided) {
    const double k = sided == Sided::one ? 1.0 : 2.0;
    return prob.R / prob.sigma * std::sqrt(std::log(k / delta) / 2.0) + 1.0;
}

BoundResult default_quantile(const Problem& prob, double delta, Sided sided) {
    check_delta(delta);
    auto tail = [&](double u) {
        return sided == Sided::one ? default_onetail(prob, u).value
                                   : default_twotail(prob, u).value;
    };
    const double u_star = invert_monotone_tail(tail, delta, inversion_u_max(prob, delta, sided));
    BoundResult r = sided == Sided::one ? default_onetail(prob, u_star)
                                        : default_twotail(prob, u_star);
    r.value = prob.sigma * u_star;
    return r;
}

}  // namespace effconc
