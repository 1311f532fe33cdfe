#pragma once

#include <cstdint>

namespace effconc {

enum class Sided { one, two };

// n i.i.d. summands supported on an interval of length R with standard
// deviation sigma. Construction enforces 0 < sigma <= R/2 (Popoviciu).
struct Problem {
    std::int64_t n;
    double R;
    double sigma;

    Problem(std::int64_t n, double R, double sigma);
};

struct DerivedParams {
    double rsig;        // R_sigma
    double tilde_R;     // R / sigma
    double tilde_rsig;  // R_sigma / sigma
};

// R/2 + sqrt(R^2 - 4 sigma^2)/2. A negative discriminant down to -1e-15 R^2 is
// treated as rounding noise and clamped to zero.
double rsig(double R, double sigma);

// Same closed form at an arbitrary sigma' in [0, R/2].
double rsig_at(double R, double sigma_prime);

DerivedParams derive(const Problem& prob);

}  // namespace effconc
