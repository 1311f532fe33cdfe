#pragma once

#include <optional>
#include <string>

namespace effconc {

struct BoundSettings {
    std::optional<double> p;
    std::optional<double> rho;
    std::optional<double> kappa;
    std::optional<double> lambda;
};

// A tail probability or a quantile, the name of the sub-bound that achieved
// it, and the optimiser point that produced it.
struct BoundResult {
    double value = 1.0;
    std::string winner;
    BoundSettings settings;
};

}  // namespace effconc
