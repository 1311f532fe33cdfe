#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "effconc/classical.hpp"
#include "effconc/empirical.hpp"
#include "effconc/numerics.hpp"
#include "effconc/stopping.hpp"
#include "selftest.hpp"
#include "table.hpp"

namespace effconc::cli {
namespace {

Sided parse_sided(const std::string& s) {
    if (s == "one") return Sided::one;
    if (s == "two") return Sided::two;
    throw DomainError("--sided must be 'one' or 'two'");
}

const char* sided_name(Sided s) { return s == Sided::one ? "one" : "two"; }

// Writes to --out when given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw DomainError("cannot open '" + path + "' for writing");
        }
    }
    std::ostream& os() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

struct Common {
    bool json = false;
    bool csv = false;
    std::string out;
    Format format() const { return json ? Format::json : Format::csv; }
};

void add_common(CLI::App* cmd, Common& c) {
    auto* j = cmd->add_flag("--json", c.json, "JSON lines output");
    auto* k = cmd->add_flag("--csv", c.csv, "CSV output (default)");
    j->excludes(k);
    cmd->add_option("--out", c.out, "output file (default stdout)");
}

// ---------------------------------------------------------------- tail

struct TailArgs {
    long long n = 0;
    double r = 1.0;
    std::string sigma;
    std::string u;
    std::string bounds = "all";
    std::string sided = "one";
    Common common;
};

Table tail_table(const TailArgs& a) {
    Table t{{"bound", "n", "r", "sigma", "u", "sided", "value", "winner", "is_min"}, {}};
    const auto names = split_list(a.bounds, quantile_bound_names());
    const Sided sided = parse_sided(a.sided);
    for (double sigma : parse_real_list(a.sigma)) {
        const Problem prob(a.n, a.r, sigma);
        for (double u : parse_real_list(a.u)) {
            std::vector<BoundResult> res;
            double best = INFINITY;
            for (const auto& name : names) {
                const auto& reg = tail_registry();
                const auto it = std::find_if(reg.begin(), reg.end(),
                                             [&](const NamedTail& x) { return x.name == name; });
                res.push_back(it->tail(prob, u, sided));
                best = std::min(best, res.back().value);
            }
            for (std::size_t i = 0; i < names.size(); ++i)
                t.add({names[i], a.n, a.r, sigma, u, std::string(sided_name(sided)), res[i].value,
                       res[i].winner, res[i].value == best});
        }
    }
    return t;
}

// ---------------------------------------------------------------- quantile

struct QuantileArgs {
    std::string n;
    int per_decade = 1;
    double r = 1.0;
    std::string sigma;
    std::string delta = "0.05";
    std::string bounds = "hoeffding,bernstein,berry_esseen,nonuniform_be,efficient";
    std::string sided = "two";
    Common common;
};

Table quantile_table(const QuantileArgs& a) {
    Table t{{"bound", "n", "r", "sigma", "delta", "sided", "value", "ratio", "winner", "p", "rho"}, {}};
    const auto names = split_list(a.bounds, quantile_bound_names());
    const Sided sided = parse_sided(a.sided);
    const auto deltas = parse_delta_list(a.delta);
    for (double sigma : parse_real_list(a.sigma)) {
        for (long long n : parse_n_grid(a.n, a.per_decade)) {
            const Problem prob(n, a.r, sigma);
            for (double delta : deltas) {
                const double ref =
                    sigma * std_normal_upper_quantile(sided == Sided::one ? delta : 0.5 * delta);
                for (const auto& name : names) {
                    const BoundResult q = named_quantile(name, prob, delta, sided);
                    t.add({name, n, a.r, sigma, delta, std::string(sided_name(sided)), q.value,
                           q.value / ref, q.winner, q.settings.p.value_or(NAN),
                           q.settings.rho.value_or(NAN)});
                }
            }
        }
    }
    return t;
}

// ---------------------------------------------------------------- empirical

struct EmpiricalArgs {
    std::string file;
    long long n = 0;
    double mean = NAN;
    std::string empvar;
    double r = 1.0;
    std::string delta = "0.05";
    std::string sided = "one";
    int per_decade = 1;
    std::string n_grid;
    Common common;
};

SampleSummary read_sample_file(const std::string& path, double R) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open '" + path + "'");
    std::vector<double> data;
    std::string line;
    long long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::istringstream ss(line);
        ss.imbue(std::locale::classic());
        double v;
        std::string rest;
        if (!(ss >> v) || (ss >> rest))
            throw DomainError(path + ":" + std::to_string(lineno) + ": not a number: '" + line + "'");
        if (!(v >= 0.0 && v <= R))
            throw DomainError(path + ":" + std::to_string(lineno) + ": value " + line +
                              " outside [0, R]");
        data.push_back(v);
    }
    if (data.size() < 2) throw DomainError(path + ": need at least 2 values");
    return summarize(data, R);
}

void empirical_rows(Table& t, const SampleSummary& s, double R, double delta, Sided sided) {
    const double root_n = std::sqrt(static_cast<double>(s.n));
    auto row = [&](const std::string& name, double q, const std::string& winner) {
        const double hw = q / root_n;
        // One-sided bounds give an upper confidence limit only.
        const double lower = sided == Sided::one ? -INFINITY : s.mean - hw;
        t.add({name, static_cast<long long>(s.n), s.mean, s.emp_var, R, delta,
               std::string(sided_name(sided)), q, hw, lower, s.mean + hw, winner});
    };
    const BoundResult ebe = efficient_ebe_quantile(s, R, delta, sided);
    row("ebe", ebe.value, ebe.winner);
    row("emp_bernstein",
        empirical_bernstein_quantile(s, R, sided == Sided::one ? delta : 0.5 * delta), "emp_bernstein");
    row("hoeffding", hoeffding_quantile(Problem(s.n, R, 0.5 * R), delta, sided), "hoeffding");
}

Table empirical_table(const EmpiricalArgs& a) {
    Table t{{"bound", "n", "mean", "emp_var", "r", "delta", "sided", "quantile", "half_width",
             "lower", "upper", "winner"},
            {}};
    const Sided sided = parse_sided(a.sided);
    const auto deltas = parse_delta_list(a.delta);
    if (!a.file.empty()) {
        const SampleSummary s = read_sample_file(a.file, a.r);
        for (double d : deltas) empirical_rows(t, s, a.r, d, sided);
        return t;
    }
    std::vector<long long> ns;
    if (!a.n_grid.empty()) ns = parse_n_grid(a.n_grid, a.per_decade);
    else if (a.n >= 2) ns = {a.n};
    else throw DomainError("empirical: give --file, or --n (or --n-grid) with --empvar");
    if (a.empvar.empty()) throw DomainError("empirical: --empvar is required in summary mode");
    const double mean = std::isnan(a.mean) ? 0.5 * a.r : a.mean;
    for (double v : parse_real_list(a.empvar))
        for (long long n : ns)
            for (double d : deltas) empirical_rows(t, SampleSummary{n, mean, v}, a.r, d, sided);
    return t;
}

// ---------------------------------------------------------------- stop

struct StopArgs {
    std::string ell = "1,10,100";
    int reps = 10;
    std::string rules = "hoeffding,eb,ebe";
    unsigned long long seed = 20240611;
    double epsilon = 0.01;
    double delta = 0.1;
    bool summary = false;
    Common common;
};

void run_stop(const StopArgs& a, std::ostream& os) {
    if (a.reps < 1) throw DomainError("--reps must be >= 1");
    StoppingConfig config;
    config.epsilon = a.epsilon;
    config.delta = a.delta;
    config.validate();
    std::vector<int> ells;
    for (double v : parse_real_list(a.ell)) {
        if (v < 1 || v != std::floor(v)) throw DomainError("--ell entries must be positive integers");
        ells.push_back(static_cast<int>(v));
    }
    std::vector<StopRule> rules;
    for (const auto& name : split_list(a.rules, {})) rules.push_back(parse_stop_rule(name));

    Table summary{{"ell", "rule", "reps", "mean_n", "sd_n", "min_n", "max_n", "error_rate"}, {}};
    Table trace_json{{"replication", "rule", "ell", "check_index", "n", "half_width", "stopped", "correct"}, {}};
    const bool csv = a.common.format() == Format::csv;
    if (!a.summary && csv) write_trace_header(os);
    for (int ell : ells) {
        for (StopRule rule : rules) {
            double sum = 0, sum2 = 0, lo = INFINITY, hi = 0;
            int errors = 0;
            for (int rep = 0; rep < a.reps; ++rep) {
                UniformAverageStream stream(ell, a.seed, stream_id(static_cast<std::uint64_t>(ell),
                                                                   static_cast<std::uint64_t>(rep)));
                const StoppingTrace tr = run_stopping(stream, rule, config, 1.0, 0.5);
                const double fn = static_cast<double>(tr.final_n);
                sum += fn;
                sum2 += fn * fn;
                lo = std::min(lo, fn);
                hi = std::max(hi, fn);
                if (!tr.correct) ++errors;
                if (a.summary) continue;
                if (csv) {
                    write_trace_rows(os, rep, rule, ell, tr);
                } else {
                    for (const auto& c : tr.checks)
                        trace_json.add({static_cast<long long>(rep), to_string(rule),
                                        static_cast<long long>(ell), static_cast<long long>(c.index),
                                        static_cast<long long>(c.n), c.half_width, c.stopped, tr.correct});
                }
            }
            const double m = sum / a.reps;
            const double sd = a.reps > 1 ? std::sqrt(std::max(0.0, (sum2 - a.reps * m * m) / (a.reps - 1))) : 0.0;
            summary.add({static_cast<long long>(ell), to_string(rule), static_cast<long long>(a.reps), m,
                         sd, lo, hi, static_cast<double>(errors) / a.reps});
        }
    }
    if (a.summary) write_table(os, summary, a.common.format());
    else if (!csv) write_table(os, trace_json, Format::json);
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
    int figure = 1;
    std::string n;
    int per_decade = 2;
    std::string sigma;
    std::string delta;
    std::string bounds;
    std::string ell = "1,10,100";
    int reps = 10;
    unsigned long long seed = 20240611;
    Common common;
};

void run_sweep(const SweepArgs& a, std::ostream& os) {
    switch (a.figure) {
        case 1: {
            QuantileArgs q;
            q.n = a.n.empty() ? "1e2..1e8" : a.n;
            q.per_decade = a.per_decade;
            q.sigma = a.sigma.empty() ? "0.1,0.25,0.5" : a.sigma;
            q.delta = a.delta.empty() ? "0.05" : a.delta;
            if (!a.bounds.empty()) q.bounds = a.bounds;
            q.sided = "two";
            write_table(os, quantile_table(q), a.common.format());
            return;
        }
        case 2: {
            EmpiricalArgs e;
            e.n_grid = a.n.empty() ? "1e2..1e8" : a.n;
            e.per_decade = a.per_decade;
            e.empvar.clear();
            for (double s : parse_real_list(a.sigma.empty() ? "0.1,0.25,0.5" : a.sigma)) {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g,", s * s);
                e.empvar += buf;
            }
            e.delta = a.delta.empty() ? "0.05" : a.delta;
            e.sided = "one";
            write_table(os, empirical_table(e), a.common.format());
            return;
        }
        case 3: {
            StopArgs s;
            s.ell = a.ell;
            s.reps = a.reps;
            s.seed = a.seed;
            s.common = a.common;
            run_stop(s, os);
            return;
        }
        default:
            throw DomainError("--figure must be 1, 2 or 3");
    }
}

int guarded(const std::function<void()>& body) {
    try {
        body();
        return kOk;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kNumeric;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
}

}  // namespace
}  // namespace effconc::cli

int main(int argc, char** argv) {
    using namespace effconc::cli;
    std::ios::sync_with_stdio(false);
    CLI::App app{"Finite-sample concentration and quantile bounds for bounded means"};
    app.require_subcommand(1);

    TailArgs tail;
    auto* c_tail = app.add_subcommand("tail", "tail bounds on P(S_n > sigma u)");
    c_tail->add_option("--n", tail.n, "sample size")->required()->check(CLI::PositiveNumber);
    c_tail->add_option("--r", tail.r, "range R of each summand");
    c_tail->add_option("--sigma", tail.sigma, "standard deviation (comma list)")->required();
    c_tail->add_option("--u", tail.u, "standardized threshold (comma list)")->required();
    c_tail->add_option("--bounds", tail.bounds, "comma list or 'all'");
    c_tail->add_option("--sided", tail.sided, "one|two");
    add_common(c_tail, tail.common);

    QuantileArgs quant;
    auto* c_quant = app.add_subcommand("quantile", "quantile bounds for S_n or |S_n|");
    auto* q_n = c_quant->add_option("--n", quant.n, "sample size or comma list");
    auto* q_sweep = c_quant->add_option("--sweep", quant.n, "log-spaced range, e.g. 1e2..1e8");
    q_n->excludes(q_sweep);
    c_quant->add_option("--per-decade", quant.per_decade, "sweep points per decade");
    c_quant->add_option("--r", quant.r, "range R");
    c_quant->add_option("--sigma", quant.sigma, "standard deviation (comma list)")->required();
    c_quant->add_option("--delta", quant.delta, "confidence level(s)");
    c_quant->add_option("--bounds", quant.bounds, "comma list or 'all'");
    c_quant->add_option("--sided", quant.sided, "one|two");
    add_common(c_quant, quant.common);

    EmpiricalArgs emp;
    auto* c_emp = app.add_subcommand("empirical", "variance-free quantile bounds from data or a summary");
    c_emp->add_option("--file", emp.file, "one value per line");
    c_emp->add_option("--n", emp.n, "summary mode: sample size");
    c_emp->add_option("--n-grid", emp.n_grid, "summary mode: n list or range");
    c_emp->add_option("--per-decade", emp.per_decade, "points per decade for --n-grid ranges");
    c_emp->add_option("--mean", emp.mean, "summary mode: sample mean");
    c_emp->add_option("--empvar", emp.empvar, "summary mode: (1/n) sum of squared deviations");
    c_emp->add_option("--r", emp.r, "range R");
    c_emp->add_option("--delta", emp.delta, "confidence level(s)");
    c_emp->add_option("--sided", emp.sided, "one|two");
    add_common(c_emp, emp.common);

    StopArgs stop;
    auto* c_stop = app.add_subcommand("stop", "(epsilon, delta) stopping benchmark on averaged uniforms");
    c_stop->add_option("--ell", stop.ell, "comma list of ell values");
    c_stop->add_option("--reps", stop.reps, "replications per (ell, rule)");
    c_stop->add_option("--rules", stop.rules, "comma list of hoeffding, eb, ebe");
    c_stop->add_option("--seed", stop.seed, "random seed");
    c_stop->add_option("--epsilon", stop.epsilon, "absolute error target");
    c_stop->add_option("--delta", stop.delta, "failure probability");
    c_stop->add_flag("--summary", stop.summary, "per (ell, rule) stop-time summary instead of traces");
    add_common(c_stop, stop.common);

    SweepArgs sweep;
    auto* c_sweep = app.add_subcommand("sweep", "figure-style sweeps as CSV");
    c_sweep->add_option("--figure", sweep.figure, "1 quantiles, 2 empirical quantiles, 3 stopping")->required();
    c_sweep->add_option("--n", sweep.n, "n list or range");
    c_sweep->add_option("--per-decade", sweep.per_decade, "points per decade");
    c_sweep->add_option("--sigma", sweep.sigma, "sigma (or empirical sigma) list");
    c_sweep->add_option("--delta", sweep.delta, "confidence level(s)");
    c_sweep->add_option("--bounds", sweep.bounds, "figure 1 bound list");
    c_sweep->add_option("--ell", sweep.ell, "figure 3 ell list");
    c_sweep->add_option("--reps", sweep.reps, "figure 3 replications");
    c_sweep->add_option("--seed", sweep.seed, "figure 3 seed");
    add_common(c_sweep, sweep.common);

    SelftestArgs self;
    auto* c_self = app.add_subcommand("selftest", "simulation oracles and invariant suites");
    add_selftest_options(c_self, self);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    if (*c_tail)
        return guarded([&] {
            Sink sink(tail.common.out);
            write_table(sink.os(), tail_table(tail), tail.common.format());
        });
    if (*c_quant)
        return guarded([&] {
            if (quant.n.empty()) throw effconc::DomainError("quantile: give --n or --sweep");
            Sink sink(quant.common.out);
            write_table(sink.os(), quantile_table(quant), quant.common.format());
        });
    if (*c_emp)
        return guarded([&] {
            Sink sink(emp.common.out);
            write_table(sink.os(), empirical_table(emp), emp.common.format());
        });
    if (*c_stop)
        return guarded([&] {
            Sink sink(stop.common.out);
            run_stop(stop, sink.os());
        });
    if (*c_sweep)
        return guarded([&] {
            Sink sink(sweep.common.out);
            run_sweep(sweep, sink.os());
        });
    if (*c_self) {
        int status = kOk;
        const int rc = guarded([&] { status = run_selftest(self, std::cout); });
        return rc != kOk ? rc : status;
    }
    return kUsage;
}
