#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <stdexcept>

#include <CLI11.hpp>

#include "kruns/cli.hpp"
#include "kruns/distributions.hpp"
#include "kruns/embedding.hpp"
#include "kruns/oracle.hpp"
#include "kruns/stein.hpp"

namespace kruns::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Options shared by the computing subcommands.
struct Common {
    int k1 = 0;
    int k2 = 0;
    std::vector<long> n;
    std::vector<std::string> p;
    std::vector<std::string> q;
    std::string mode = "double";
    std::string format = "csv";
    std::string output;

    bool exact() const { return mode == "exact"; }
};

void add_pattern_options(CLI::App* sub, Common& c) {
    sub->add_option("--k1", c.k1, "failure-run length")->required();
    sub->add_option("--k2", c.k2, "success-run length")->required();
}

void add_params_options(CLI::App* sub, Common& c) {
    auto* p = sub->add_option("--p", c.p, "success probability (list allowed: 0.2,0.5)")->delimiter(',');
    auto* q = sub->add_option("--q", c.q, "failure probability (list allowed)")->delimiter(',');
    p->excludes(q);
}

void add_output_options(CLI::App* sub, Common& c) {
    sub->add_option("--mode", c.mode, "arithmetic mode")->check(CLI::IsMember({"exact", "double"}));
    sub->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--output", c.output, "write to this file instead of standard output");
}

RunsPattern pattern_of(const Common& c) {
    try {
        return RunsPattern(c.k1, c.k2);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

std::vector<TrialParams> params_of(const Common& c) {
    if (c.p.empty() == c.q.empty()) throw UsageError("give exactly one of --p or --q");
    std::vector<TrialParams> out;
    try {
        for (const auto& s : c.p) out.push_back(TrialParams::from_p(parse_rational(s)));
        for (const auto& s : c.q) out.push_back(TrialParams::from_q(parse_rational(s)));
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return out;
}

std::vector<long> n_grid(const Common& c) {
    if (c.n.empty()) throw UsageError("--n is required");
    for (long n : c.n) {
        if (n < 0) throw UsageError("--n must be nonnegative");
    }
    return c.n;
}

nlohmann::ordered_json base_config(const std::string& command, const Common& c) {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["k1"] = c.k1;
    j["k2"] = c.k2;
    j["n"] = c.n;
    if (!c.p.empty()) j["p"] = c.p;
    if (!c.q.empty()) j["q"] = c.q;
    j["mode"] = c.mode;
    return j;
}

template <Scalar T>
Cell num(const T& v) {
    return to_double(v);
}

Cell exact_text(const Rational& v) { return to_string(v); }

void emit(const Report& r, const Common& c, std::ostream& out) {
    const std::string text = c.format == "json" ? to_json(r) : to_csv(r);
    if (c.output.empty()) {
        out << text;
        return;
    }
    std::ofstream f(c.output, std::ios::binary);
    if (!f) throw UsageError("cannot open output file " + c.output);
    f << text;
}

// pmf -----------------------------------------------------------------------

struct PmfArgs {
    std::string method = "recursive";
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
};

template <Scalar T>
Pmf<T> pmf_by(const std::string& method, long n, const TrialParams& pr, const RunsPattern& pat) {
    if (method == "recursive") return pmf_recursive<T>(n, pr, pat).row(n);
    if (method == "embedding") return pmf_embedding<T>(build_chain<T>(pr, pat), n);
    if (method == "brute") {
        if (n > kBruteForceMaxN) throw UsageError("brute force is capped at n = 22");
        return brute_force_pmf<T>(n, pr, pat).pmf;
    }
    Pmf<T> out;
    out.n = n;
    for (long m = 0; m <= pat.max_count(n); ++m) out.probs.push_back(pmf_closed<T>(m, n, pr, pat));
    return out;
}

// An occurrence needs k+1 trials and later ones k each, so P(M = m) is
// structurally zero beyond floor((n-1)/k). Those rows are not printed.
long printed_max(long n, const RunsPattern& pat) { return n <= pat.k() ? 0 : (n - 1) / pat.k(); }

Report cmd_pmf(const Common& c, const PmfArgs& a) {
    const auto pat = pattern_of(c);
    const auto params = params_of(c);
    const auto ns = n_grid(c);
    Report r;
    r.config = base_config("pmf", c);
    r.config["method"] = a.method;
    const bool mc = a.method == "monte-carlo";
    if (mc) {
        r.config["trials"] = a.trials;
        r.config["seed"] = a.seed;
    }
    r.columns = {"n", "p", "m", "probability"};
    if (mc) r.columns.push_back("std_error");
    if (c.exact() && !mc) r.columns.push_back("exact");
    for (const auto& pr : params) {
        for (long n : ns) {
            const double pd = pr.p<double>();
            if (mc) {
                auto est = monte_carlo_pmf(n, a.trials, a.seed, pr, pat);
                for (long m = 0; m <= printed_max(n, pat); ++m) {
                    const auto i = static_cast<std::size_t>(m);
                    r.rows.push_back({n, pd, m, est.pmf[m], i < est.std_error.size() ? est.std_error[i] : 0.0});
                }
            } else if (c.exact()) {
                auto law = pmf_by<Rational>(a.method, n, pr, pat);
                for (long m = 0; m <= printed_max(n, pat); ++m) {
                    r.rows.push_back({n, pd, m, num(law[m]), exact_text(law[m])});
                }
            } else {
                auto law = pmf_by<double>(a.method, n, pr, pat);
                for (long m = 0; m <= printed_max(n, pat); ++m) r.rows.push_back({n, pd, m, law[m]});
            }
        }
    }
    return r;
}

// moments -------------------------------------------------------------------

template <Scalar T>
void moment_rows(Report& r, const Common& c, const TrialParams& pr, const RunsPattern& pat, long n, int j_max) {
    auto mu = moments_recursive<T>(n, j_max, pr, pat);
    for (int j = 1; j <= j_max; ++j) {
        const T& v = mu[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)];
        std::vector<Cell> row{n, pr.p<double>(), static_cast<std::int64_t>(j), num(v)};
        if constexpr (is_exact_v<T>) row.push_back(exact_text(v));
        r.rows.push_back(std::move(row));
    }
    (void)c;
}

Report cmd_moments(const Common& c, int j_max) {
    if (j_max < 1) throw UsageError("--j-max must be at least 1");
    const auto pat = pattern_of(c);
    const auto params = params_of(c);
    const auto ns = n_grid(c);
    Report r;
    r.config = base_config("moments", c);
    r.config["j_max"] = j_max;
    r.columns = {"n", "p", "j", "moment"};
    if (c.exact()) r.columns.push_back("exact");
    for (const auto& pr : params) {
        for (long n : ns) {
            if (c.exact()) {
                moment_rows<Rational>(r, c, pr, pat, n, j_max);
            } else {
                moment_rows<double>(r, c, pr, pat, n, j_max);
            }
        }
    }
    return r;
}

// waiting -------------------------------------------------------------------

struct WaitingArgs {
    std::vector<int> r{1};
    long m_max = -1;
    int moments = 0;
};

template <Scalar T>
void waiting_rows(Report& rep, const TrialParams& pr, const RunsPattern& pat, const WaitingArgs& a) {
    for (int r : a.r) {
        if (a.moments > 0) {
            auto mu = waiting_moments<T>(r, a.moments, pr, pat);
            for (int j = 1; j <= a.moments; ++j) {
                const T& v = mu[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)];
                std::vector<Cell> row{pr.p<double>(), static_cast<std::int64_t>(r), static_cast<std::int64_t>(j), num(v)};
                if constexpr (is_exact_v<T>) row.push_back(exact_text(v));
                rep.rows.push_back(std::move(row));
            }
            continue;
        }
        const long m_max = a.m_max >= 0 ? a.m_max : 4L * r * pat.k() + 8;
        auto f = waiting_pmf<T>(r, m_max, pr, pat);
        for (long m = 0; m <= m_max; ++m) {
            std::vector<Cell> row{pr.p<double>(), static_cast<std::int64_t>(r), m, num(f[m])};
            if constexpr (is_exact_v<T>) row.push_back(exact_text(f[m]));
            rep.rows.push_back(std::move(row));
        }
    }
}

Report cmd_waiting(const Common& c, const WaitingArgs& a) {
    for (int r : a.r) {
        if (r < 1) throw UsageError("--r must be at least 1");
    }
    const auto pat = pattern_of(c);
    const auto params = params_of(c);
    Report rep;
    rep.config = base_config("waiting", c);
    rep.config.erase("n");
    rep.config["r"] = a.r;
    if (a.moments > 0) {
        rep.config["moments"] = a.moments;
        rep.columns = {"p", "r", "j", "moment"};
    } else {
        rep.config["m_max"] = a.m_max;
        rep.columns = {"p", "r", "m", "probability"};
    }
    if (c.exact()) rep.columns.push_back("exact");
    for (const auto& pr : params) {
        if (c.exact()) {
            waiting_rows<Rational>(rep, pr, pat, a);
        } else {
            waiting_rows<double>(rep, pr, pat, a);
        }
    }
    return rep;
}

// bounds --------------------------------------------------------------------

struct BoundArgs {
    std::string family = "poisson";
    bool one = false;
    bool two = false;
    std::string convention = "max-count";
    std::string fixed;
    bool no_floor = false;
    bool assume_c7 = false;
};

Family parse_family(const std::string& s) {
    if (s == "poisson") return Family::Poisson;
    if (s == "pseudo-binomial") return Family::PseudoBinomial;
    return Family::NegativeBinomial;
}

template <Scalar T>
std::vector<Cell> bound_cells(const BoundReport<T>& rep) {
    Cell m1 = std::string(), m2 = std::string();
    if (rep.target) {
        std::visit(
            [&](const auto& t) {
                using V = std::decay_t<decltype(t)>;
                if constexpr (std::is_same_v<V, PoissonTarget<T>>) {
                    m1 = num(t.lambda);
                } else {
                    m1 = num(t.alpha);
                    m2 = num(t.p);
                }
            },
            *rep.target);
    }
    Cell bound = rep.applicable() ? num(rep.bound) : Cell(rep.marker());
    std::string note = rep.notes;
    return {m1, m2, bound, std::string(rep.applicable() ? (rep.c7_assumed ? "ASSUMED(c7)" : "ok") : rep.marker()), note};
}

Report cmd_bounds(const Common& c, const BoundArgs& a) {
    const auto pat = pattern_of(c);
    const auto params = params_of(c);
    const auto ns = n_grid(c);
    if (a.one && a.two) throw UsageError("--one and --two are exclusive");
    const int parameters = a.two ? 2 : 1;
    const Family fam = parse_family(a.family);
    if (parameters == 2 && fam == Family::Poisson) throw UsageError("there is no two-parameter Poisson bound");

    BoundOptions opts;
    if (a.convention == "max-count") opts.convention = OneParamConvention::AlphaMaxCount;
    if (a.convention == "n-minus-k") opts.convention = OneParamConvention::AlphaNMinusK;
    if (a.convention == "fixed-alpha") opts.convention = OneParamConvention::FixedAlpha;
    if (a.convention == "fixed-p") opts.convention = OneParamConvention::FixedP;
    if (a.convention.rfind("fixed-", 0) == 0) {
        if (a.fixed.empty()) throw UsageError("--convention " + a.convention + " needs --fixed");
        try {
            opts.fixed = parse_rational(a.fixed);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    opts.floor_alpha_two_param = !a.no_floor;
    opts.assume_c7 = a.assume_c7;

    Report r;
    r.config = base_config("bounds", c);
    r.config["family"] = a.family;
    r.config["parameters"] = parameters;
    r.config["convention"] = a.convention;
    if (!a.fixed.empty()) r.config["fixed"] = a.fixed;
    r.config["floor_alpha"] = opts.floor_alpha_two_param;
    r.config["assume_c7"] = opts.assume_c7;
    r.columns = {"family", "parameters", "k1", "k2", "n", "p", "q", "matched_1", "matched_2", "bound", "status", "note"};
    r.precision["bound"] = 6;
    for (const auto& pr : params) {
        for (long n : ns) {
            std::vector<Cell> head{family_name(fam), static_cast<std::int64_t>(parameters), static_cast<std::int64_t>(c.k1),
                                   static_cast<std::int64_t>(c.k2), n, to_double(pr.p_exact()), to_double(pr.q_exact())};
            std::vector<Cell> tail = c.exact() ? bound_cells(compute_bound<Rational>(fam, parameters, n, pr, pat, opts))
                                               : bound_cells(compute_bound<double>(fam, parameters, n, pr, pat, opts));
            head.insert(head.end(), tail.begin(), tail.end());
            r.rows.push_back(std::move(head));
        }
    }
    return r;
}

// table ---------------------------------------------------------------------

Report cmd_table(const std::string& preset, bool assume_c7, const std::string& mode) {
    if (preset != "paper-table-1") throw UsageError("unknown preset " + preset);
    const auto opts = reference_table_options(assume_c7);
    Report r;
    r.config["command"] = "table";
    r.config["preset"] = preset;
    r.config["mode"] = mode;
    r.config["p"] = "0.89";
    r.config["assume_c7"] = assume_c7;
    r.columns = {"parameters", "family", "k1", "k2", "n", "q", "bound", "status"};
    r.precision["bound"] = 6;
    const std::pair<int, Family> kinds[] = {{1, Family::Poisson}, {1, Family::PseudoBinomial}, {1, Family::NegativeBinomial},
                                            {2, Family::PseudoBinomial}, {2, Family::NegativeBinomial}};
    for (auto [np, fam] : kinds) {
        for (const auto& cell : reference_table_cells()) {
            const auto pr = reference_table_params(cell.q);
            RunsPattern pat(cell.k1, cell.k2);
            std::vector<Cell> row{std::string(np == 1 ? "one" : "two"), family_name(fam), static_cast<std::int64_t>(cell.k1),
                                  static_cast<std::int64_t>(cell.k2), cell.n, to_double(cell.q)};
            auto fill = [&](const auto& rep) {
                row.push_back(rep.applicable() ? num(rep.bound) : Cell(rep.marker()));
                row.push_back(std::string(rep.applicable() ? (rep.c7_assumed ? "ASSUMED(c7)" : "ok") : rep.marker()));
            };
            if (mode == "exact") {
                fill(compute_bound<Rational>(fam, np, cell.n, pr, pat, opts));
            } else {
                fill(compute_bound<double>(fam, np, cell.n, pr, pat, opts));
            }
            r.rows.push_back(std::move(row));
        }
    }
    return r;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact law of (k1,k2)-runs counts, waiting times and Stein bounds", "kruns"};
    app.require_subcommand(1);

    Common c;
    PmfArgs pmf_args;
    int j_max = 4;
    WaitingArgs wait_args;
    BoundArgs bound_args;
    std::string preset;
    VerifyOptions vopts;
    std::string verify_format = "csv";

    auto* pmf = app.add_subcommand("pmf", "probability mass function of M");
    add_pattern_options(pmf, c);
    pmf->add_option("--n", c.n, "trial count (list allowed)")->delimiter(',');
    add_params_options(pmf, c);
    add_output_options(pmf, c);
    pmf->add_option("--method", pmf_args.method, "computation route")
        ->check(CLI::IsMember({"recursive", "embedding", "closed", "brute", "monte-carlo"}));
    pmf->add_option("--trials", pmf_args.trials, "Monte Carlo sample size");
    pmf->add_option("--seed", pmf_args.seed, "Monte Carlo seed (default 1)");

    auto* moments = app.add_subcommand("moments", "raw moments E[M^j]");
    add_pattern_options(moments, c);
    moments->add_option("--n", c.n, "trial count (list allowed)")->delimiter(',');
    add_params_options(moments, c);
    add_output_options(moments, c);
    moments->add_option("--j-max", j_max, "highest moment order");

    auto* waiting = app.add_subcommand("waiting", "law of the waiting time for the r-th occurrence");
    add_pattern_options(waiting, c);
    add_params_options(waiting, c);
    add_output_options(waiting, c);
    waiting->add_option("--r", wait_args.r, "occurrence index (list allowed)")->delimiter(',');
    waiting->add_option("--m-max", wait_args.m_max, "last trial index to tabulate");
    waiting->add_option("--moments", wait_args.moments, "emit moments up to this order instead of the PMF");

    auto* bounds = app.add_subcommand("bounds", "total-variation bounds");
    add_pattern_options(bounds, c);
    bounds->add_option("--n", c.n, "trial count (list allowed)")->delimiter(',');
    add_params_options(bounds, c);
    add_output_options(bounds, c);
    bounds->add_option("--family", bound_args.family, "target family")
        ->check(CLI::IsMember({"poisson", "pseudo-binomial", "negative-binomial"}));
    bounds->add_flag("--one", bound_args.one, "one-parameter bound (default)");
    bounds->add_flag("--two", bound_args.two, "two-parameter bound");
    bounds->add_option("--convention", bound_args.convention, "one-parameter matching")
        ->check(CLI::IsMember({"max-count", "n-minus-k", "fixed-alpha", "fixed-p"}));
    bounds->add_option("--fixed", bound_args.fixed, "value for the fixed-alpha / fixed-p conventions");
    bounds->add_flag("--no-floor", bound_args.no_floor, "use alpha instead of floor(alpha) in the two-parameter prefactor");
    bounds->add_flag("--assume-c7", bound_args.assume_c7, "use c6 in place of the undefined c7");

    auto* table = app.add_subcommand("table", "reproduce a reference table of bounds");
    table->add_option("--preset", preset, "table preset")->required()->check(CLI::IsMember({"paper-table-1"}));
    table->add_flag("--assume-c7", bound_args.assume_c7, "use c6 in place of the undefined c7");
    add_output_options(table, c);

    auto* verify = app.add_subcommand("verify", "run the property suite on a small grid");
    verify->add_option("--max-n", vopts.max_n, "largest trial count checked")->check(CLI::Range(0L, kBruteForceMaxN));
    verify->add_flag("--waiting", vopts.waiting, "also check the waiting-time law");
    verify->add_flag("--inject-fault", vopts.inject_fault, "perturb the embedding chain (the suite must fail)");
    verify->add_option("--seed", vopts.seed, "seed for random test functions and sampling");
    verify->add_option("--trials", vopts.trials, "Monte Carlo sample size");
    verify->add_option("--format", verify_format, "output format")->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (pmf->parsed()) emit(cmd_pmf(c, pmf_args), c, out);
        if (moments->parsed()) emit(cmd_moments(c, j_max), c, out);
        if (waiting->parsed()) emit(cmd_waiting(c, wait_args), c, out);
        if (bounds->parsed()) emit(cmd_bounds(c, bound_args), c, out);
        if (table->parsed()) emit(cmd_table(preset, bound_args.assume_c7, c.mode), c, out);
        if (verify->parsed()) {
            auto results = run_verify_suite(vopts);
            Report r;
            r.config["command"] = "verify";
            r.config["max_n"] = vopts.max_n;
            r.config["waiting"] = vopts.waiting;
            r.config["inject_fault"] = vopts.inject_fault;
            r.config["seed"] = vopts.seed;
            r.columns = {"check", "status", "detail"};
            bool all = true;
            for (const auto& res : results) {
                all = all && res.passed;
                r.rows.push_back({res.name, std::string(res.passed ? "PASS" : "FAIL"), res.detail});
            }
            out << (verify_format == "json" ? to_json(r) : to_csv(r));
            return all ? kOk : kVerifyFailed;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::length_error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kOk;
}

}  // namespace kruns::cli
