#include "effconc/wasserstein.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "effconc/classical.hpp"

namespace effconc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;
constexpr int kTerms = kMaxTruncation - 1;  // k = 1..K_p-1 with K_p <= 40
// exp overflows a double a little above 709.
constexpr double kMaxExponent = 700.0;

std::atomic<double> g_b21_scale{1.0};

double log_stirling_factor() { return 19.0 / 300.0 + 0.25 * std::log(kPi); }

// Everything that depends on (n, R, sigma, p) but not on kappa.
struct Statics {
    double n = 0.0, root_n = 0.0, p = 0.0;
    double tR = 0.0, tRs = 0.0, x = 0.0, c = 0.0;
    double zp = 0.0;
    WassersteinConstants k;  // m_nk left at 0
};

Statics make_statics(const Problem& prob, int p_int) {
    if (p_int < 2) throw DomainError("wasserstein constants: p must be >= 2");
    Statics s;
    const DerivedParams d = derive(prob);
    const double p = p_int;
    s.n = static_cast<double>(prob.n);
    s.root_n = std::sqrt(s.n);
    s.p = p;
    s.tR = d.tilde_R;
    s.tRs = d.tilde_rsig;
    s.x = std::max(0.0, s.tRs * s.tRs - 1.0);
    s.c = s.tR * s.tR / s.n;
    s.zp = normal_pnorm(p);

    WassersteinConstants& k = s.k;
    const double e = std::numbers::e;
    k.a_p = std::sqrt(e) * std::sqrt(p + 2.0) * std::pow(2.0 * e, 1.0 / p) / std::sqrt(2.0);
    k.a_star = (p + 2.0) * std::pow(s.n, 1.0 / p) / (2.0 * s.root_n);
    k.a_tilde = k.a_star * std::pow(s.tR, -2.0 / p);
    k.u_np = k.a_p + s.tR * k.a_tilde;
    k.u_tilde = std::sqrt(2.0) * k.a_p + std::pow(2.0, 1.0 / p) * s.tR * k.a_tilde;

    // C_{n,p}; the first branch's A coefficient is A_p.
    const double c1 = k.a_tilde * s.tR * std::pow(2.0, 1.0 / p) + std::sqrt(2.0) * k.a_p;
    double inner = std::pow(2.0, 1.0 / p) * std::pow(s.tR, 1.0 - 2.0 / p);
    if (p_int >= 4) {
        const double bin = binomial_pnorm(prob.n, 2.0 / (s.tR * s.tR), p / 2.0);
        inner = std::min(inner, s.tR / s.root_n * std::sqrt(bin));
    }
    const double c2 = s.zp * inner;
    k.c_np = std::min(c1, c2);
    k.c_branch = c1 <= c2 ? 1 : 2;

    // D_{n,p}
    const double x = s.x;
    const double mx = std::max(std::pow(x, 1.0 - 1.0 / p),
                               std::pow((std::pow(x, p) + x) / (x + 1.0), 1.0 / p));
    std::array<double, 4> dc = {
        std::sqrt(p - 1.0) * mx,
        mx * k.a_star + std::sqrt(x) * k.a_p,
        s.zp * std::pow(s.tRs, 2.0 * (1.0 - 2.0 / p)) * std::pow(x, 1.0 / p),
        kInf,
    };
    if (p_int >= 4) {
        const double q = 2.0 * x / std::pow(s.tRs, 4);
        const double bin = q > 0.0 ? binomial_pnorm(prob.n, std::min(q, 1.0), p / 2.0) : 0.0;
        dc[3] = s.zp * std::pow(2.0, -1.0 / p) * s.tR * s.tR / s.root_n * std::sqrt(bin);
    }
    const auto dmin = std::min_element(dc.begin(), dc.end());
    k.d_np = *dmin / (2.0 * s.root_n);
    k.d_branch = static_cast<int>(dmin - dc.begin()) + 1;

    // B_{p,n}
    const double b1 = s.tR * s.tR / s.n * binomial_pnorm(prob.n, 2.0 / (s.tR * s.tR), p);
    const double b2 = 1.0 + k.u_tilde * s.tR / s.root_n;
    k.b_pn = std::min(b1, b2);
    k.b_branch = b1 <= b2 ? 1 : 2;
    return s;
}

void check_kappa(const Statics& s, double kappa) {
    if (!(kappa > s.c)) throw DomainError("wasserstein: kappa must exceed R~^2/n");
}

double m_sq(const Statics& s, double kappa) { return 1.0 - s.c / kappa; }

double b21_of(const Statics& s, double kappa) {
    return g_b21_scale.load() * s.zp * s.k.d_np * m_sq(s, kappa);
}

double b22_of(const Statics& s) {
    const double p = s.p;
    return std::sqrt(p - 1.0) / (2.0 * s.root_n) *
           (std::pow(std::max(s.x, 1.0), 1.0 - 1.0 / p) * s.k.a_star + std::sqrt(s.x) * s.k.a_p);
}

double b32_of(const Statics& s, double kappa) {
    const double p = s.p;
    const double z = kappa - s.c;  // kappa M^2
    const double expo = 0.5 * (p - 1.0) * z;
    if (expo > kMaxExponent) return kInf;
    const double bracket = std::expm1(expo);
    const double m = std::sqrt(m_sq(s, kappa));
    const double stir = std::exp(log_stirling_factor());
    const double first = s.tR * (1.0 + s.tR * s.k.u_tilde / s.root_n) / std::sqrt(s.n * kappa) *
                         stir * std::sqrt(p - 1.0) / (4.0 * std::sqrt(3.0)) * bracket;
    const double second = s.k.c_np * s.tR * s.tR / (3.0 * s.n * kappa) * stir * bracket *
                          2.0 * std::atanh(m);
    return first + second;
}

// Integrals behind b31 after z = R~^2 (1/y - 1/n) and z = c sinh^2(s):
//   IC_k  = 2 int w^{2k} sech^2 ds,            k = 1..kTerms
//   IB_k  = 2 int w^{2k} sinh sech^2 ds,       k = 1..kTerms
//   RemC  = 2 int sech^2 expm1((p-1) w^2/2) ds
//   RemB  = 2 int sinh sech^2 expm1((p-1) w^2/2) ds
// with w^2 = c sinh^2(s) and s in [0, asinh(sqrt((kappa - c)/c))]. Every
// integrand is smooth and bounded in s.
std::vector<Integral> b31_integrals(const Statics& s, double kappa) {
    const double c = s.c;
    const double upper = std::asinh(std::sqrt((kappa - c) / c));
    const double pm1 = s.p - 1.0;
    auto f = [&](double t, std::span<double> out) {
        const double sh = std::sinh(t);
        const double ch = std::cosh(t);
        const double sech2 = 1.0 / (ch * ch);
        const double w2 = c * sh * sh;
        double pw = w2;
        for (int k = 0; k < kTerms; ++k) {
            out[static_cast<std::size_t>(k)] = 2.0 * pw * sech2;
            out[static_cast<std::size_t>(kTerms + k)] = 2.0 * pw * sh * sech2;
            pw *= w2;
        }
        const double em = std::expm1(0.5 * pm1 * w2);
        out[2 * kTerms] = 2.0 * sech2 * em;
        out[2 * kTerms + 1] = 2.0 * sh * sech2 * em;
    };
    return integrate_many(f, 2 * kTerms + 2, 0.0, upper, Tolerance{0.0, 1e-9, 400});
}

std::vector<double> b31_all_of(const Statics& s, double kappa) {
    std::vector<double> out(kMaxTruncation, kInf);
    if (0.5 * (s.p - 1.0) * (kappa - s.c) > kMaxExponent) return out;
    const auto I = b31_integrals(s, kappa);
    const double p = s.p;
    const double lpm1 = std::log(p - 1.0);
    const double lstir = log_stirling_factor();
    const double stir = std::exp(lstir);
    const double B = s.k.b_pn;
    const double C = s.k.c_np;

    // Hermite majorants sqrt(j!) (p-1)^{j/2} divided by the factorials.
    std::array<double, kTerms + 1> aB{}, gB{}, aC{}, gC{};
    for (int k = 1; k <= kTerms; ++k) {
        const double kk = k;
        aB[k] = std::exp(0.5 * std::lgamma(2 * kk + 2) + (kk + 0.5) * lpm1 - std::lgamma(2 * kk + 3));
        gB[k] = std::exp(-kk * std::log(2.0) + lstir + (kk + 0.5) * lpm1 - std::lgamma(kk + 1));
        aC[k] = std::exp(0.5 * std::lgamma(2 * kk + 1) + kk * lpm1 - std::lgamma(2 * kk + 2));
        gC[k] = std::exp(-kk * std::log(2.0) + kk * lpm1 + lstir - std::lgamma(kk + 1));
    }
    auto ic = [&](int k) { return I[static_cast<std::size_t>(k - 1)]; };
    auto ib = [&](int k) { return I[static_cast<std::size_t>(kTerms + k - 1)]; };
    const Integral remC = I[2 * kTerms];
    const Integral remB = I[2 * kTerms + 1];

    for (int K = 1; K <= kMaxTruncation; ++K) {
        const double kq = std::pow(static_cast<double>(K), 0.25);
        const double fB = kq / (2.0 * (K + 1) * std::sqrt(2.0 * K + 1));
        const double fC = kq / (2.0 * K + 1);
        double value = 0.0, err = 0.0, mag = 0.0;
        auto add = [&](double coef, const Integral& in) {
            const double term = coef * in.value;
            value += term;
            mag += std::fabs(term);
            err += std::fabs(coef) * in.error;
        };
        for (int k = 1; k < K; ++k) {
            add(0.5 * B * (aB[k] - fB * gB[k]), ib(k));
            add(0.5 * C * (aC[k] - fC * gC[k]), ic(k));
        }
        add(0.25 * B * stir * kq * std::sqrt(p - 1.0) / ((K + 1) * std::sqrt(2.0 * K + 1)), remB);
        add(0.5 * C * stir * fC, remC);
        const double v = value + err + 64.0 * std::numeric_limits<double>::epsilon() * mag;
        out[static_cast<std::size_t>(K - 1)] = std::isfinite(v) ? std::max(0.0, v) : kInf;
    }
    return out;
}

// ||Z||_p (pi/2 - asin M) with pi/2 - asin M = asin(sqrt(1 - M^2)).
double arc_term(const Statics& s, double kappa) {
    return s.zp * std::asin(std::sqrt(s.c / kappa));
}

double finish(const Statics& s, double kappa, double bracket) {
    if (s.p > 2.0) return bracket / std::sqrt(m_sq(s, kappa));
    return bracket;
}

struct OmegaKappaBest {
    double value = kInf;
    int K = 1;
};

OmegaKappaBest omega_kappa_best(const Statics& s, double kappa) {
    const auto b31s = b31_all_of(s, kappa);
    const auto it = std::min_element(b31s.begin(), b31s.end());
    OmegaKappaBest r;
    if (!std::isfinite(*it)) return r;
    r.K = static_cast<int>(it - b31s.begin()) + 1;
    r.value = finish(s, kappa, arc_term(s, kappa) + b21_of(s, kappa) + *it);
    return r;
}

struct KappaRange {
    double lo, hi;
};

KappaRange kappa_range(const Statics& s) {
    const double kappa0 = s.tR * s.tR / std::max(1.0, s.p - 1.0);
    const double lo = std::log(1.0001 * s.c);
    double hi = std::log(100.0 * std::max(kappa0, s.tR * s.tR));
    // Beyond this kappa every b31/b32 candidate overflows.
    hi = std::min(hi, std::log(s.c + 2.0 * kMaxExponent / (s.p - 1.0)));
    return {lo, std::max(hi, lo + 1e-6)};
}

using MemoKey = std::tuple<std::int64_t, double, double, int>;
std::mutex g_memo_mutex;
std::map<MemoKey, OmegaValue> g_memo;
std::map<MemoKey, double> g_lb_memo;

constexpr std::array<int, 12> kPCandidates = {1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64};

// rho = 1 - exp(-t) keeps resolution both near 0 and near 1.
constexpr double kTLo = 1e-5, kTHi = 30.0;
double rho_of(double t) { return -std::expm1(-t); }

}  // namespace

WassersteinConstants constants(const Problem& prob, int p, double kappa) {
    const Statics s = make_statics(prob, p);
    check_kappa(s, kappa);
    WassersteinConstants k = s.k;
    k.m_nk = std::sqrt(m_sq(s, kappa));
    return k;
}

double b21(const Problem& prob, int p, double kappa) {
    const Statics s = make_statics(prob, p);
    check_kappa(s, kappa);
    return b21_of(s, kappa);
}

double b22(const Problem& prob, int p, double kappa) {
    const Statics s = make_statics(prob, p);
    check_kappa(s, kappa);
    return b22_of(s);
}

std::vector<double> b31_all(const Problem& prob, int p, double kappa) {
    const Statics s = make_statics(prob, p);
    check_kappa(s, kappa);
    return b31_all_of(s, kappa);
}

double b31(const Problem& prob, int p, double kappa, int K_p) {
    if (K_p < 1 || K_p > kMaxTruncation)
        throw DomainError("b31: K_p must lie in 1..40");
    return b31_all(prob, p, kappa)[static_cast<std::size_t>(K_p - 1)];
}

double b32(const Problem& prob, int p, double kappa) {
    const Statics s = make_statics(prob, p);
    check_kappa(s, kappa);
    return b32_of(s, kappa);
}

double omega_kappa(const Problem& prob, int p, double kappa, int K_p, bool loose) {
    const Statics s = make_statics(prob, p);
    check_kappa(s, kappa);
    double bracket = arc_term(s, kappa);
    if (loose) {
        bracket += b22_of(s) + b32_of(s, kappa);
    } else {
        if (K_p < 1 || K_p > kMaxTruncation)
            throw DomainError("omega_kappa: K_p must lie in 1..40");
        bracket += b21_of(s, kappa) + b31_all_of(s, kappa)[static_cast<std::size_t>(K_p - 1)];
    }
    return finish(s, kappa, bracket);
}

OmegaValue omega(const Problem& prob, int p) {
    if (p < 1) throw DomainError("omega: p must be >= 1");
    if (p > prob.n + 1) throw DomainError("omega: p must not exceed n + 1");
    if (p == 1) {
        return {derive(prob).tilde_rsig / std::sqrt(static_cast<double>(prob.n)), 0.0, 0};
    }
    const MemoKey key{prob.n, prob.R, prob.sigma, p};
    const double scale = g_b21_scale.load();
    if (scale == 1.0) {
        std::lock_guard<std::mutex> lock(g_memo_mutex);
        if (auto it = g_memo.find(key); it != g_memo.end()) return it->second;
    }

    const Statics s = make_statics(prob, p);
    const KappaRange range = kappa_range(s);
    OmegaValue best{kInf, std::exp(range.hi), 1};
    auto objective = [&](double log_kappa) {
        const double kappa = std::exp(log_kappa);
        if (!(kappa > s.c)) return kInf;
        OmegaKappaBest r;
        try {
            r = omega_kappa_best(s, kappa);
        } catch (const NumericError&) {
            return kInf;  // this kappa is simply not a candidate
        }
        if (r.value < best.value) best = {r.value, kappa, r.K};
        return r.value;
    };
    minimize_scalar(objective, range.lo, range.hi, Tolerance{1e-4, 0.0, 60}, 17);

    if (scale == 1.0) {
        std::lock_guard<std::mutex> lock(g_memo_mutex);
        g_memo[key] = best;
    }
    return best;
}

double omega_lower_bound(const Problem& prob, int p) {
    if (p == 1) return omega(prob, 1).value;
    const MemoKey key{prob.n, prob.R, prob.sigma, p};
    {
        std::lock_guard<std::mutex> lock(g_memo_mutex);
        if (auto it = g_memo.find(key); it != g_memo.end()) return it->second.value;
        if (auto it = g_lb_memo.find(key); it != g_lb_memo.end()) return it->second;
    }
    const Statics s = make_statics(prob, p);
    const KappaRange range = kappa_range(s);
    auto f = [&](double log_kappa) {
        const double kappa = std::exp(log_kappa);
        if (!(kappa > s.c)) return kInf;
        return finish(s, kappa, arc_term(s, kappa) + b21_of(s, kappa));
    };
    // A dense scan; the result steers pruning only, never validity.
    const double lb = minimize_scalar(f, range.lo, range.hi, Tolerance{1e-6, 0.0, 100}, 257).value;
    std::lock_guard<std::mutex> lock(g_memo_mutex);
    g_lb_memo[key] = lb;
    return lb;
}

double k_rsig(const Problem& prob, double p) {
    const DerivedParams d = derive(prob);
    const double sigma = prob.sigma;
    const double tR = d.tilde_R;
    const double x = std::max(0.0, d.tilde_rsig * d.tilde_rsig - 1.0);
    const double e = std::numbers::e;
    const double n = static_cast<double>(prob.n);
    const double stir = std::exp(log_stirling_factor());
    const double ex = std::expm1(tR * tR / 2.0);
    const double ap_like = std::sqrt(e) * std::sqrt(2.0 * e) / std::sqrt(2.0);
    const double head = stir / (4.0 * std::sqrt(3.0)) * ex;

    double sum = 0.75 * sigma * (std::sqrt(x) * ap_like + head);
    sum += sigma * std::sqrt(2.0) * (1.0 + std::log(4.0)) *
           (std::pow(tR, 1.0 - 2.0 / p) * std::pow(8.0 * kPi, 0.25) / (3.0 * std::sqrt(e)) * stir * ex);
    sum += std::sqrt(4.0) * sigma * std::sqrt(std::max(x, 1.0)) / std::sqrt(2.0);
    sum += sigma * tR * ap_like * head;
    sum += 4.0 * sigma * std::pow(tR, 2.0 - 2.0 / p) / std::sqrt(2.0 * n) * head;
    sum += 1.0;
    return std::max(prob.R / sigma, sum);
}

std::vector<int> p_candidates(const Problem& prob) {
    std::vector<int> out;
    for (int p : kPCandidates)
        if (p <= prob.n + 1) out.push_back(p);
    return out;
}

int heuristic_p(const Problem& prob, double u) {
    const double phi = normal_pdf(u);
    if (!(phi > 0.0)) return 0;
    const double root_n = std::sqrt(static_cast<double>(prob.n));
    auto eval = [&](double K) {
        const double l = std::log(root_n / phi);
        if (!(l > 0.0)) return 0.0;
        const double arg = root_n / (K * phi * l);
        return arg > 1.0 ? std::log(arg) : 0.0;
    };
    double p = eval(k_rsig(prob, 2.0));
    if (p >= 2.0) p = eval(k_rsig(prob, p));
    if (!(p >= 0.5)) return 0;
    const double cap = static_cast<double>(std::min<std::int64_t>(prob.n + 1, 1 << 20));
    return static_cast<int>(std::clamp(std::round(p), 1.0, cap));
}

namespace {

std::vector<int> ordered_candidates(const Problem& prob, int heuristic) {
    std::vector<int> ps;
    if (heuristic >= 1 && heuristic <= prob.n + 1) ps.push_back(heuristic);
    for (int p : p_candidates(prob))
        if (p != heuristic) ps.push_back(p);
    return ps;
}

BoundResult tail_impl(const Problem& prob, double u, bool two,
                      const std::function<BoundResult(double)>& aux) {
    if (!(u >= 0.0)) throw DomainError("wass_tail: u must be >= 0");
    BoundResult best = aux(u);
    best.value = std::min(1.0, best.value);
    if (u == 0.0) return best;
    const double mult = two ? 2.0 : 1.0;
    const double log_u = std::log(u);

    for (int p : ordered_candidates(prob, heuristic_p(prob, u))) {
        auto value_at = [&](double omega_value, double rho) {
            if (!(rho > 0.0 && rho < 1.0)) return kInf;
            const double rem = std::exp(p * (std::log(omega_value) - std::log1p(-rho) - log_u));
            return mult * std_normal_cdf_c(rho * u) + rem;
        };
        // Pruning: a lower bound on omega gives a lower bound on the objective.
        const double lb = omega_lower_bound(prob, p);
        const double lb_best = minimize_scalar([&](double t) { return value_at(lb, rho_of(t)); },
                                               kTLo, kTHi, Tolerance{1e-6, 0.0, 60}, 33)
                                   .value;
        if (lb_best >= best.value) continue;

        const OmegaValue om = omega(prob, p);
        if (!std::isfinite(om.value)) continue;
        const Minimum m = minimize_scalar([&](double t) { return value_at(om.value, rho_of(t)); },
                                          kTLo, kTHi, Tolerance{1e-7, 0.0, 80}, 65);
        double value = m.value, rho = rho_of(m.argmin);
        const double rho_h = 1.0 - std::numbers::e * om.value / u;
        if (const double vh = value_at(om.value, rho_h); vh < value) {
            value = vh;
            rho = rho_h;
        }
        if (value < best.value) {
            best.value = value;
            best.winner = "wasserstein";
            best.settings = {};
            best.settings.p = p;
            best.settings.rho = rho;
            if (p >= 2) best.settings.kappa = om.kappa;
        }
    }
    best.value = std::clamp(best.value, 0.0, 1.0);
    return best;
}

}  // namespace

BoundResult wass_tail(const Problem& prob, double u,
                      const std::function<BoundResult(double)>& aux_onetail) {
    return tail_impl(prob, u, false, aux_onetail);
}

BoundResult wass_tail_two(const Problem& prob, double u,
                          const std::function<BoundResult(double)>& aux_twotail) {
    return tail_impl(prob, u, true, aux_twotail);
}

BoundResult wass_quantile(const Problem& prob, double delta, const BoundResult& aux_q,
                          Sided sided) {
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("wass_quantile: delta must lie in (0,1)");
    BoundResult best = aux_q;
    const double split = sided == Sided::one ? 1.0 : 0.5;
    const double sigma = prob.sigma;
    const int hp = heuristic_p(prob, std_normal_upper_quantile(split * delta));

    for (int p : ordered_candidates(prob, hp)) {
        auto value_at = [&](double omega_value, double rho) {
            if (!(rho > 0.0 && rho < 1.0)) return kInf;
            const double first =
                sigma * std::exp(std::log(omega_value) - (std::log(delta) + std::log1p(-rho)) / p);
            return first + sigma * std_normal_upper_quantile(split * delta * rho);
        };
        const double lb = omega_lower_bound(prob, p);
        const double lb_best = minimize_scalar([&](double t) { return value_at(lb, rho_of(t)); },
                                               kTLo, kTHi, Tolerance{1e-6, 0.0, 60}, 33)
                                   .value;
        if (lb_best >= best.value) continue;

        const OmegaValue om = omega(prob, p);
        if (!std::isfinite(om.value)) continue;
        const Minimum m = minimize_scalar([&](double t) { return value_at(om.value, rho_of(t)); },
                                          kTLo, kTHi, Tolerance{1e-7, 0.0, 80}, 65);
        if (m.value < best.value) {
            best.value = m.value;
            best.winner = "wasserstein";
            best.settings = {};
            best.settings.p = p;
            best.settings.rho = rho_of(m.argmin);
            if (p >= 2) best.settings.kappa = om.kappa;
        }
    }
    best.value = std::max(0.0, best.value);
    return best;
}

BoundResult efficient_tail(const Problem& prob, double u, Sided sided) {
    if (sided == Sided::one)
        return wass_tail(prob, u, [&](double v) { return default_onetail(prob, v); });
    return wass_tail_two(prob, u, [&](double v) { return default_twotail(prob, v); });
}

BoundResult efficient_quantile(const Problem& prob, double delta, Sided sided) {
    return wass_quantile(prob, delta, default_quantile(prob, delta, sided), sided);
}

void set_b21_scale_for_testing(double scale) { g_b21_scale.store(scale); }

}  // namespace effconc
