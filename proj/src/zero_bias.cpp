#include "effconc/zero_bias.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <cmath>
#include <numbers>

#include "effconc/numerics.hpp"

namespace effconc {

namespace {

std::atomic<long long> g_fallbacks{0};

constexpr double kSqrt2Pi = 2.5066282746310002;
constexpr int kLambdaGrid = 32;

struct Shared {
    double phic_u, h_uu, dprime;
};

Shared shared_terms(double u) {
    const double h = h_u(u, u);
    return {std_normal_cdf_c(u), h, h - b_growth(u) * normal_cdf(u)};
}

double assemble(double R, double sigma_root_n, const Shared& s, double h_lu, double q) {
    const double denom = sigma_root_n + R * s.dprime;
    if (!(denom > 0.0)) {
        ++g_fallbacks;
        return 1.0;
    }
    const double v = s.phic_u +
                     R / denom * (h_lu - s.dprime * s.phic_u + (s.h_uu - h_lu) * q);
    return std::clamp(v, 0.0, 1.0);
}

// Q at sample size m with the (R, sigma) of prob; the alternative bound uses
// m = n + 1.
QnValue q_terms_at(double m, double R, double sigma, double rs, double u_arg) {
    QnValue out;
    const double root_m = std::sqrt(m);
    const double delta_n = rs / (4.0 * root_m);
    const double x = std::max(u_arg - delta_n, 0.0);
    const double v_up_sq = sigma * sigma + (rs * rs - 6.0 * sigma * sigma) / (9.0 * m);
    const double v_low_sq = sigma * sigma * (1.0 - 89.0 / (144.0 * m));

    out.hoeffding_branch = std::exp(-2.0 * x * x / (R * R));
    const double bern_den = 2.0 * (v_up_sq + rs * x / (3.0 * root_m));
    out.bernstein_branch = bern_den > 0.0 ? std::exp(-x * x / bern_den) : 1.0;
    if (v_low_sq > 0.0) {
        const double v_low = std::sqrt(v_low_sq);
        const double rs_mod = rsig_at(R, std::sqrt(55.0) * sigma / 12.0);
        const double beta = std::min(0.25 * rs, rs_mod - rs) *
                            (sigma * sigma / (3.0 * m) + rs * rs / (9.0 * m));
        out.be_branch = std_normal_cdf_c((u_arg - delta_n) / v_low) +
                        0.56 / root_m * (rs * v_up_sq + beta) / (v_low_sq * v_low);
    } else {
        out.be_branch = std::numeric_limits<double>::infinity();
    }
    out.value = out.hoeffding_branch;
    out.winner = "hoeffding";
    if (out.bernstein_branch < out.value) {
        out.value = out.bernstein_branch;
        out.winner = "bernstein";
    }
    if (out.be_branch < out.value) {
        out.value = out.be_branch;
        out.winner = "berry_esseen";
    }
    out.value = std::clamp(out.value, 0.0, 1.0);
    return out;
}

}  // namespace

double h_u(double w, double u) {
    const double scaled = scaled_normal_tail(w, u);  // e^{w^2/2} Phi^c(u)
    return w * std_normal_cdf_c(u) + (1.0 + w * w) * kSqrt2Pi * normal_cdf(w) * scaled;
}

double b_growth(double w) {
    const double s = w + std::sqrt(w * w + 8.0 / std::numbers::pi);
    return 2.0 / s - 8.0 * w / (std::numbers::pi * s * s);
}

double delta_prime(double u) { return h_u(u, u) - b_growth(u) * normal_cdf(u); }

QnValue q_n_terms(const Problem& prob, double u_arg) {
    return q_terms_at(static_cast<double>(prob.n), prob.R, prob.sigma,
                      rsig(prob.R, prob.sigma), u_arg);
}

double q_n(const Problem& prob, double u_arg) { return q_n_terms(prob, u_arg).value; }

ZeroBiasTerms zero_bias_terms(const Problem& prob, double u, double lambda) {
    const double m = static_cast<double>(prob.n);
    const double rs = rsig(prob.R, prob.sigma);
    ZeroBiasTerms t;
    t.h_lambda_u = h_u(lambda * u, u);
    t.h_u_u = h_u(u, u);
    t.delta_prime = delta_prime(u);
    t.q_n = q_terms_at(m, prob.R, prob.sigma, rs, lambda * prob.sigma * u).value;
    t.delta_n = rs / (4.0 * std::sqrt(m));
    t.v_up_sq = prob.sigma * prob.sigma + (rs * rs - 6.0 * prob.sigma * prob.sigma) / (9.0 * m);
    t.v_low_sq = prob.sigma * prob.sigma * (1.0 - 89.0 / (144.0 * m));
    t.beta_n = std::min(0.25 * rs, rsig_at(prob.R, std::sqrt(55.0) * prob.sigma / 12.0) - rs) *
               (prob.sigma * prob.sigma / (3.0 * m) + rs * rs / (9.0 * m));
    return t;
}

double zero_bias_tail(const Problem& prob, double u, double lambda) {
    if (!(u >= 0.0)) throw DomainError("zero_bias_tail: u must be >= 0");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw DomainError("zero_bias_tail: lambda must lie in [0,1]");
    const double m = static_cast<double>(prob.n);
    const Shared s = shared_terms(u);
    const double q = q_terms_at(m, prob.R, prob.sigma, rsig(prob.R, prob.sigma),
                                lambda * prob.sigma * u).value;
    return assemble(prob.R, prob.sigma * std::sqrt(m), s, h_u(lambda * u, u), q);
}

double alt_zero_bias_tail(const Problem& prob, double u, double lambda) {
    if (!(u >= 0.0)) throw DomainError("alt_zero_bias_tail: u must be >= 0");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw DomainError("alt_zero_bias_tail: lambda must lie in [0,1]");
    const double m = static_cast<double>(prob.n);
    const Shared s = shared_terms(u);
    const double arg = lambda * prob.sigma * u * std::sqrt(m / (m + 1.0));
    const double q = q_terms_at(m + 1.0, prob.R, prob.sigma, rsig(prob.R, prob.sigma), arg).value;
    return assemble(prob.R, prob.sigma * std::sqrt(m + 1.0), s, h_u(lambda * u, u), q);
}

BoundResult zero_bias_tail_at_threshold(const Problem& prob, double t) {
    const double m = static_cast<double>(prob.n);
    const double root_m = std::sqrt(m);
    const double rs = rsig(prob.R, prob.sigma);
    BoundResult best{1.0, "trivial", {}};

    auto scan = [&](double u, bool alt) {
        const Shared s = shared_terms(u);
        const double m_eff = alt ? m + 1.0 : m;
        const double scale = alt ? std::sqrt(m / (m + 1.0)) : 1.0;
        const double srn = prob.sigma * std::sqrt(m_eff);
        for (int j = 0; j <= kLambdaGrid; ++j) {
            const double lambda = static_cast<double>(j) / kLambdaGrid;
            const double q = q_terms_at(m_eff, prob.R, prob.sigma, rs,
                                        lambda * prob.sigma * u * scale).value;
            const double v = assemble(prob.R, srn, s, h_u(lambda * u, u), q);
            if (v < best.value) {
                best.value = v;
                best.winner = alt ? "alt_zero_bias" : "zero_bias";
                best.settings = {};
                best.settings.lambda = lambda;
            }
        }
    };

    const double u1 = (t - prob.R / root_m) / prob.sigma;
    if (u1 >= 0.0) scan(u1, false);
    const double u2 = (t - rs / root_m) / prob.sigma * root_m / std::sqrt(m + 1.0);
    if (u2 >= 0.0) scan(u2, true);
    return best;
}

long long zero_bias_fallback_count() { return g_fallbacks.load(); }

}  // namespace effconc
