#include "effconc/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace effconc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kInvSqrtPi = std::numbers::inv_sqrtpi;

double finite_or_inf(double v) { return std::isnan(v) ? kInf : v; }

// exp(x^2) with the rounding error of x*x folded back in.
double exp_square(double x) {
    const double xx = x * x;
    const double err = std::fma(x, x, -xx);
    return std::exp(xx) * (1.0 + err);
}

// Continued fraction for erfcx, used for x >= 10 where it converges in a few
// dozen terms.
double erfcx_cf(double x) {
    double f = x;
    for (int k = 80; k >= 1; --k) f = x + 0.5 * k / f;
    return kInvSqrtPi / f;
}

}  // namespace

void Tolerance::validate() const {
    if (!(abs_tol >= 0.0) || !(rel_tol >= 0.0) || abs_tol + rel_tol <= 0.0)
        throw DomainError("tolerance: abs_tol + rel_tol must be positive");
    if (max_iter < 1) throw DomainError("tolerance: max_iter must be >= 1");
}

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) * kInvSqrtPi / kSqrt2;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double std_normal_cdf_c(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double erfcx(double x) {
    if (x < 0.0) {
        if (x < -26.6) return kInf;
        return 2.0 * exp_square(x) - erfcx(-x);
    }
    if (x < 10.0) return exp_square(x) * std::erfc(x);
    return erfcx_cf(x);
}

double log_normal_cdf_c(double x) {
    if (x < 5.0) return std::log(std_normal_cdf_c(x));
    return std::log(0.5 * erfcx(x / kSqrt2)) - 0.5 * x * x;
}

double scaled_normal_tail(double w, double u) {
    if (u < 5.0) return std::exp(0.5 * w * w) * std_normal_cdf_c(u);
    return 0.5 * erfcx(u / kSqrt2) * std::exp(0.5 * (w - u) * (w + u));
}

namespace {

// AS241 (Wichura 1988), lower-tail form; accurate to about 1e-16 before
// refinement.
double as241(double p) {
    constexpr double split1 = 0.425, split2 = 5.0;
    constexpr double const1 = 0.180625, const2 = 1.6;
    constexpr std::array<double, 8> a = {
        3.3871328727963666080E0, 1.3314166789178437745E+2,
        1.9715909503065514427E+3, 1.3731693765509461125E+4,
        4.5921953931549871457E+4, 6.7265770927008700853E+4,
        3.3430575583588128105E+4, 2.5090809287301226727E+3};
    constexpr std::array<double, 8> b = {
        1.0, 4.2313330701600911252E+1, 6.8718700749205790830E+2,
        5.3941960214247511077E+3, 2.1213794301586595867E+4,
        3.9307895800092710610E+4, 2.8729085735721942674E+4,
        5.2264952788528545610E+3};
    constexpr std::array<double, 8> c = {
        1.42343711074968357734E0, 4.63033784615654529590E0,
        5.76949722146069140550E0, 3.64784832476320460504E0,
        1.27045825245236838258E0, 2.41780725177450611770E-1,
        2.27238449892691845833E-2, 7.74545014278341407640E-4};
    constexpr std::array<double, 8> d = {
        1.0, 2.05319162663775882187E0, 1.67638483018380384940E0,
        6.89767334985100004550E-1, 1.48103976427480074590E-1,
        1.51986665636164571966E-2, 5.47593808499534494600E-4,
        1.05075007164441684324E-9};
    constexpr std::array<double, 8> e = {
        6.65790464350110377720E0, 5.46378491116411436990E0,
        1.78482653991729133580E0, 2.96560571828504891230E-1,
        2.65321895265761230930E-2, 1.24266094738807843860E-3,
        2.71155556874348757815E-5, 2.01033439929228813265E-7};
    constexpr std::array<double, 8> f = {
        1.0, 5.99832206555887937690E-1, 1.36929880922735805310E-1,
        1.48753612908506148525E-2, 7.86869131145613259100E-4,
        1.84631831751005468180E-5, 1.42151175831644588870E-7,
        2.04426310338993978564E-15};
    auto poly = [](const std::array<double, 8>& k, double r) {
        double s = 0.0;
        for (int i = 7; i >= 0; --i) s = s * r + k[static_cast<std::size_t>(i)];
        return s;
    };

    const double q = p - 0.5;
    if (std::fabs(q) <= split1) {
        const double r = const1 - q * q;
        return q * poly(a, r) / poly(b, r);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= split2) {
        r -= const2;
        val = poly(c, r) / poly(d, r);
    } else {
        r -= split2;
        val = poly(e, r) / poly(f, r);
    }
    return q < 0.0 ? -val : val;
}

// Phi^{-1}(p) for p <= 1/2 with one Halley step against the accurate tail.
double lower_quantile(double p) {
    double x = as241(p);
    const double pdf = normal_pdf(x);
    if (pdf > 0.0) {
        const double err = (std_normal_cdf_c(-x) - p) / pdf;
        x -= err / (1.0 + 0.5 * x * err);
    }
    return x;
}

}  // namespace

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("std_normal_quantile: p must lie in (0,1)");
    if (p <= 0.5) return lower_quantile(p);
    return -lower_quantile(1.0 - p);
}

double std_normal_upper_quantile(double tail) {
    if (!(tail > 0.0 && tail < 1.0))
        throw DomainError("std_normal_upper_quantile: tail must lie in (0,1)");
    if (tail <= 0.5) return -lower_quantile(tail);
    return lower_quantile(1.0 - tail);
}

double normal_pnorm(double p) {
    if (!(p >= 1.0)) throw DomainError("normal_pnorm: p must be >= 1");
    const double log_moment =
        std::lgamma(0.5 * (p + 1.0)) - 0.5 * std::log(std::numbers::pi);
    return kSqrt2 * std::exp(log_moment / p);
}

double binomial_pnorm(std::int64_t n, double q, double p) {
    if (n < 1) throw DomainError("binomial_pnorm: n must be >= 1");
    if (!(q >= 0.0 && q <= 1.0))
        throw DomainError("binomial_pnorm: q must lie in [0,1]");
    if (!(p >= 1.0)) throw DomainError("binomial_pnorm: p must be >= 1");
    const double nd = static_cast<double>(n);
    if (q == 0.0) return 0.0;
    if (q == 1.0) return nd;
    if (n == 1) return std::pow(q, 1.0 / p);

    const double odds = q / (1.0 - q);
    // ratio t_{k+1}/t_k of the summands t_k = P(V = k) k^p, k >= 1
    auto ratio = [&](double k) {
        return (nd - k) / (k + 1.0) * odds * std::pow((k + 1.0) / k, p);
    };
    auto log_term = [&](double k) {
        return std::lgamma(nd + 1.0) - std::lgamma(k + 1.0) -
               std::lgamma(nd - k + 1.0) + k * std::log(q) +
               (nd - k) * std::log1p(-q) + p * std::log(k);
    };

    std::int64_t mode = std::clamp<std::int64_t>(
        static_cast<std::int64_t>(std::floor((nd + 1.0) * q)), 1, n);
    while (mode < n && ratio(static_cast<double>(mode)) > 1.0) ++mode;
    while (mode > 1 && ratio(static_cast<double>(mode - 1)) < 1.0) --mode;

    constexpr double kCut = 1e-18;
    double sum = 1.0;  // t_mode / t_mode
    double t = 1.0;
    std::int64_t k = mode;
    while (k < n) {
        const double r = ratio(static_cast<double>(k));
        t *= r;
        ++k;
        sum += t;
        if (t < kCut * sum) {
            const double r_next = k < n ? ratio(static_cast<double>(k)) : 0.0;
            if (r_next < 1.0) sum += t * r_next / (1.0 - r_next);
            break;
        }
    }
    t = 1.0;
    k = mode;
    while (k > 1) {
        const double r = 1.0 / ratio(static_cast<double>(k - 1));
        t *= r;
        --k;
        sum += t;
        if (t < kCut * sum) {
            const double r_next = k > 1 ? 1.0 / ratio(static_cast<double>(k - 1)) : 0.0;
            if (r_next < 1.0) sum += t * r_next / (1.0 - r_next);
            break;
        }
    }
    return std::exp((log_term(static_cast<double>(mode)) + std::log(sum)) / p);
}

double hermite_moment_bound(int k, double p) {
    if (k < 0) throw DomainError("hermite_moment_bound: k must be >= 0");
    if (!(p >= 1.0)) throw DomainError("hermite_moment_bound: p must be >= 1");
    if (k == 0) return 1.0;
    const double log_value =
        0.5 * std::lgamma(k + 1.0) + 0.5 * k * std::log(p - 1.0);
    if (log_value > 709.0)
        throw NumericError("hermite_moment_bound: overflow in log space");
    return std::exp(log_value);
}

// ---------------------------------------------------------------------------
// Gauss-Kronrod 7/15
// ---------------------------------------------------------------------------

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for kXgk[1], kXgk[3], kXgk[5], kXgk[7].
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    std::vector<Integral> parts;
};

Panel gk15(const std::function<void(double, std::span<double>)>& f,
           std::size_t dim, double a, double b, std::vector<double>& buf) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::vector<double> kron(dim, 0.0), gauss(dim, 0.0);
    buf.resize(dim);
    auto check = [&](std::span<const double> v) {
        for (double x : v)
            if (!std::isfinite(x))
                throw NumericError("integrate: integrand is not finite");
    };
    f(center, buf);
    check(buf);
    for (std::size_t i = 0; i < dim; ++i) {
        kron[i] = kWgk[7] * buf[i];
        gauss[i] = kWg[3] * buf[i];
    }
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        for (double x : {center - dx, center + dx}) {
            f(x, buf);
            check(buf);
            for (std::size_t i = 0; i < dim; ++i) {
                kron[i] += kWgk[j] * buf[i];
                if (j % 2 == 1) gauss[i] += kWg[j / 2] * buf[i];
            }
        }
    }
    Panel p{a, b, std::vector<Integral>(dim)};
    for (std::size_t i = 0; i < dim; ++i) {
        p.parts[i].value = kron[i] * half;
        p.parts[i].error = std::fabs((kron[i] - gauss[i]) * half);
    }
    return p;
}

}  // namespace

std::vector<Integral> integrate_many(
    const std::function<void(double, std::span<double>)>& f, std::size_t dim,
    double a, double b, const Tolerance& tol) {
    tol.validate();
    if (!(a <= b)) throw DomainError("integrate: require a <= b");
    std::vector<Integral> total(dim);
    if (a == b || dim == 0) return total;

    std::vector<double> buf;
    std::vector<Panel> panels;
    panels.push_back(gk15(f, dim, a, b, buf));

    auto sum_up = [&] {
        for (auto& t : total) t = {};
        for (const auto& p : panels)
            for (std::size_t i = 0; i < dim; ++i) {
                total[i].value += p.parts[i].value;
                total[i].error += p.parts[i].error;
            }
    };
    auto allowed = [&](std::size_t i) {
        return std::max(tol.abs_tol, tol.rel_tol * std::fabs(total[i].value));
    };
    constexpr double kRoundoff = 50.0 * std::numeric_limits<double>::epsilon();

    sum_up();
    for (int iter = 0;; ++iter) {
        bool done = true;
        for (std::size_t i = 0; i < dim; ++i)
            if (total[i].error > allowed(i) &&
                total[i].error > kRoundoff * std::fabs(total[i].value))
                done = false;
        if (done) return total;
        if (iter >= tol.max_iter)
            throw NumericError("integrate: no convergence within max_iter subdivisions");

        std::size_t worst = 0;
        double worst_score = -1.0;
        for (std::size_t j = 0; j < panels.size(); ++j) {
            double score = 0.0;
            for (std::size_t i = 0; i < dim; ++i)
                score = std::max(score, panels[j].parts[i].error / allowed(i));
            if (score > worst_score) {
                worst_score = score;
                worst = j;
            }
        }
        const double lo = panels[worst].a, hi = panels[worst].b;
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi))
            throw NumericError("integrate: interval collapsed below machine precision");
        panels[worst] = gk15(f, dim, lo, mid, buf);
        panels.push_back(gk15(f, dim, mid, hi, buf));
        sum_up();
    }
}

Integral integrate(const std::function<double(double)>& f, double a, double b,
                   const Tolerance& tol) {
    if (!(a <= b)) throw DomainError("integrate: require a <= b");
    if (a == b) return {};
    const double width = b - a;
    const double pi = std::numbers::pi;
    auto mapped = [&](double t, std::span<double> out) {
        const double y = a + 0.5 * width * (1.0 - std::cos(pi * t));
        out[0] = f(std::clamp(y, a, b)) * 0.5 * width * pi * std::sin(pi * t);
    };
    return integrate_many(mapped, 1, 0.0, 1.0, tol).front();
}

Minimum minimize_scalar(const std::function<double(double)>& f, double lo,
                        double hi, const Tolerance& tol, int grid_points) {
    tol.validate();
    if (!(lo < hi)) throw DomainError("minimize_scalar: require lo < hi");
    grid_points = std::max(grid_points, 3);

    const double step = (hi - lo) / (grid_points - 1);
    Minimum best{lo, kInf};
    int best_j = 0;
    for (int j = 0; j < grid_points; ++j) {
        const double x = j + 1 == grid_points ? hi : lo + j * step;
        const double v = finite_or_inf(f(x));
        if (v < best.value || (best.value == kInf && j == 0)) {
            best = {x, v};
            best_j = j;
        }
    }
    if (best.value == kInf) return best;

    double a = lo + std::max(best_j - 1, 0) * step;
    double b = std::min(hi, lo + (best_j + 1) * step);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = finite_or_inf(f(x1)), f2 = finite_or_inf(f(x2));
    for (int iter = 0; iter < tol.max_iter; ++iter) {
        if (b - a <= tol.abs_tol + tol.rel_tol * std::fabs(0.5 * (a + b))) break;
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = finite_or_inf(f(x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = finite_or_inf(f(x2));
        }
        if (f1 < best.value) best = {x1, f1};
        if (f2 < best.value) best = {x2, f2};
    }
    return best;
}

double invert_monotone_tail(const std::function<double(double)>& bound,
                            double delta, double u_max, int grid_points) {
    if (!(delta > 0.0)) throw DomainError("invert_monotone_tail: delta must be > 0");
    if (!(u_max >= 0.0)) throw DomainError("invert_monotone_tail: u_max must be >= 0");
    grid_points = std::max(grid_points, 2);
    if (bound(0.0) <= delta) return 0.0;
    if (!(bound(u_max) <= delta))
        throw UnattainableError("invert_monotone_tail: bound(u_max) exceeds delta");

    const double step = u_max / grid_points;
    double lo = 0.0, hi = u_max;
    for (int j = 1; j < grid_points; ++j) {
        const double u = j * step;
        if (bound(u) <= delta) {
            hi = u;
            break;
        }
        lo = u;
    }
    for (int iter = 0; iter < 60 && hi - lo > 1e-9 * std::max(1.0, hi); ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (bound(mid) <= delta)
            hi = mid;
        else
            lo = mid;
    }
    if (!(bound(hi) <= delta))
        throw NumericError("invert_monotone_tail: postcondition bound(u*) <= delta violated");
    return hi;
}

}  // namespace effconc
