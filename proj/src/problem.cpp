#include "effconc/problem.hpp"

#include <cmath>

#include "effconc/numerics.hpp"

namespace effconc {

namespace {

double rsig_impl(double R, double s) {
    const double disc = R * R - 4.0 * s * s;
    if (disc < -1e-15 * R * R)
        throw DomainError("rsig: sigma exceeds R/2");
    return 0.5 * R + 0.5 * std::sqrt(std::max(disc, 0.0));
}

}  // namespace

Problem::Problem(std::int64_t n_, double R_, double sigma_) : n(n_), R(R_), sigma(sigma_) {
    if (n < 1) throw DomainError("problem: n must be >= 1");
    if (!(R > 0.0) || !std::isfinite(R)) throw DomainError("problem: R must be positive");
    if (!(sigma > 0.0)) throw DomainError("problem: sigma must be positive");
    rsig_impl(R, sigma);
}

double rsig(double R, double sigma) {
    if (!(R > 0.0)) throw DomainError("rsig: R must be positive");
    if (!(sigma > 0.0)) throw DomainError("rsig: sigma must be positive");
    return rsig_impl(R, sigma);
}

double rsig_at(double R, double sigma_prime) {
    if (!(R > 0.0)) throw DomainError("rsig_at: R must be positive");
    if (!(sigma_prime >= 0.0)) throw DomainError("rsig_at: sigma' must be >= 0");
    return rsig_impl(R, sigma_prime);
}

DerivedParams derive(const Problem& prob) {
    const double rs = rsig(prob.R, prob.sigma);
    return {rs, prob.R / prob.sigma, rs / prob.sigma};
}

}  // namespace effconc
