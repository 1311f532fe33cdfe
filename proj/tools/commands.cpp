#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "effconc/classical.hpp"
#include "effconc/numerics.hpp"
#include "effconc/wasserstein.hpp"
#include "effconc/zero_bias.hpp"

namespace effconc::cli {

namespace {

BoundResult plain(double v, const char* name, Sided sided) {
    return {sided == Sided::one ? v : std::min(1.0, 2.0 * v), name, {}};
}

}  // namespace

const std::vector<NamedTail>& tail_registry() {
    static const std::vector<NamedTail> registry{
        {"hoeffding", [](const Problem& p, double u, Sided s) { return plain(hoeffding_tail(p, u), "hoeffding", s); }},
        {"bernstein", [](const Problem& p, double u, Sided s) { return plain(bernstein_tail(p, u), "bernstein", s); }},
        {"berry_esseen", [](const Problem& p, double u, Sided s) { return plain(berry_esseen_tail(p, u), "berry_esseen", s); }},
        {"nonuniform_be", [](const Problem& p, double u, Sided s) { return plain(nonuniform_be_tail(p, u), "nonuniform_be", s); }},
        {"zero_bias",
         [](const Problem& p, double u, Sided s) {
             BoundResult r = zero_bias_tail_at_threshold(p, p.sigma * u);
             if (s == Sided::two) r.value = std::min(1.0, 2.0 * r.value);
             return r;
         }},
        {"default",
         [](const Problem& p, double u, Sided s) {
             return s == Sided::one ? default_onetail(p, u) : default_twotail(p, u);
         }},
        {"efficient", [](const Problem& p, double u, Sided s) { return efficient_tail(p, u, s); }},
    };
    return registry;
}

std::vector<std::string> quantile_bound_names() {
    std::vector<std::string> names;
    for (const auto& t : tail_registry()) names.push_back(t.name);
    return names;
}

BoundResult named_quantile(const std::string& name, const Problem& prob, double delta, Sided sided) {
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0,1)");
    if (name == "hoeffding") return {hoeffding_quantile(prob, delta, sided), "hoeffding", {}};
    if (name == "bernstein" && sided == Sided::two)
        return {bernstein_quantile(prob, delta), "bernstein", {}};
    if (name == "default") return default_quantile(prob, delta, sided);
    if (name == "efficient") return efficient_quantile(prob, delta, sided);
    const auto& reg = tail_registry();
    const auto it = std::find_if(reg.begin(), reg.end(), [&](const NamedTail& t) { return t.name == name; });
    if (it == reg.end()) throw DomainError("unknown bound '" + name + "'");
    auto tail = [&](double u) { return it->tail(prob, u, sided).value; };
    const double u_star = invert_monotone_tail(tail, delta, inversion_u_max(prob, delta, sided));
    BoundResult r = it->tail(prob, u_star, sided);
    r.value = prob.sigma * u_star;
    return r;
}

std::vector<std::string> split_list(const std::string& text, const std::vector<std::string>& all) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (item == "all") {
            out.insert(out.end(), all.begin(), all.end());
        } else {
            if (!all.empty() && std::find(all.begin(), all.end(), item) == all.end())
                throw DomainError("unknown name '" + item + "'");
            out.push_back(item);
        }
    }
    if (out.empty()) throw DomainError("empty list");
    return out;
}

namespace {

double parse_real(const std::string& s) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw DomainError("not a number: '" + s + "'");
    }
    if (pos != s.size()) throw DomainError("not a number: '" + s + "'");
    return v;
}

}  // namespace

std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_list(text, {})) out.push_back(parse_real(item));
    return out;
}

std::vector<double> parse_delta_list(const std::string& text) {
    auto out = parse_real_list(text);
    for (double d : out)
        if (!(d > 0.0 && d < 1.0)) throw DomainError("--delta values must lie in (0,1)");
    return out;
}

std::vector<long long> parse_n_grid(const std::string& text, int per_decade) {
    std::vector<long long> out;
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        for (double v : parse_real_list(text)) out.push_back(std::llround(v));
    } else {
        if (per_decade < 1) throw DomainError("points per decade must be >= 1");
        const double lo = parse_real(text.substr(0, dots));
        const double hi = parse_real(text.substr(dots + 2));
        if (!(lo >= 1.0 && hi >= lo)) throw DomainError("bad n range '" + text + "'");
        const double l0 = std::log10(lo), l1 = std::log10(hi);
        const int steps = static_cast<int>(std::floor((l1 - l0) * per_decade + 1e-9));
        for (int i = 0; i <= steps; ++i) {
            const long long n = std::llround(std::pow(10.0, l0 + static_cast<double>(i) / per_decade));
            if (out.empty() || n != out.back()) out.push_back(n);
        }
    }
    for (long long n : out)
        if (n < 1) throw DomainError("n must be >= 1");
    return out;
}

}  // namespace effconc::cli
