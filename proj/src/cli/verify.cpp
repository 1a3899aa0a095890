#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>

#include "kruns/cli.hpp"
#include "kruns/distributions.hpp"
#include "kruns/embedding.hpp"
#include "kruns/oracle.hpp"
#include "kruns/stein.hpp"

namespace kruns::cli {

namespace {

struct GridCell {
    int k1;
    int k2;
    Rational p;
};

std::vector<GridCell> small_grid() {
    std::vector<GridCell> g;
    for (int k1 = 1; k1 <= 3; ++k1)
        for (int k2 = 1; k2 <= 3; ++k2)
            for (Rational p : {Rational(1, 5), Rational(1, 2), Rational(4, 5)}) g.push_back({k1, k2, p});
    return g;
}

std::string describe(const GridCell& c, long n) {
    std::ostringstream os;
    os << "k1=" << c.k1 << " k2=" << c.k2 << " p=" << to_string(c.p) << " n=" << n;
    return os.str();
}

// Runs `body` on every (cell, n) until it returns false; records the first failure.
CheckResult sweep(const std::string& name, long n_min, long max_n,
                  const std::function<bool(const GridCell&, const TrialParams&, const RunsPattern&, long)>& body) {
    CheckResult res{name, true, ""};
    std::size_t cases = 0;
    for (const auto& cell : small_grid()) {
        auto params = TrialParams::from_p(cell.p);
        RunsPattern pattern(cell.k1, cell.k2);
        for (long n = n_min; n <= max_n; ++n) {
            ++cases;
            if (!body(cell, params, pattern, n)) {
                res.passed = false;
                res.detail = describe(cell, n);
                return res;
            }
        }
    }
    res.detail = std::to_string(cases) + " cases";
    return res;
}

EmbeddingChain<Rational> chain_for(const TrialParams& params, const RunsPattern& pattern, bool fault) {
    auto ch = build_chain<Rational>(params, pattern);
    if (fault) {
        // shift half of the success mass out of state 0
        Rational half = ch.A[0][0] / 2;
        ch.A[0][0] -= half;
        ch.A[0][1] += half;
    }
    return ch;
}

}  // namespace

std::vector<CheckResult> run_verify_suite(const VerifyOptions& opts) {
    std::vector<CheckResult> out;
    const long N = opts.max_n;

    out.push_back(sweep("pmf_four_way", 0, N, [&](const GridCell&, const TrialParams& pr, const RunsPattern& pat, long n) {
        auto rec = pmf_recursive<Rational>(n, pr, pat).row(n);
        auto emb = pmf_embedding<Rational>(chain_for(pr, pat, opts.inject_fault), n);
        auto bf = brute_force_pmf<Rational>(n, pr, pat).pmf;
        if (rec.probs != emb.probs || rec.probs != bf.probs) return false;
        for (long m = 0; m < static_cast<long>(rec.size()); ++m) {
            if (pmf_closed<Rational>(m, n, pr, pat) != rec[m]) return false;
        }
        return true;
    }));

    out.push_back(sweep("indicator_vs_scan", 0, std::min<long>(N, 12), [&](const GridCell& c, const TrialParams&, const RunsPattern& pat, long n) {
        if (c.p != Rational(1, 2)) return true;  // independent of p
        for (std::uint32_t x = 0; x < (1u << n); ++x) {
            if (count_occurrences(x, static_cast<int>(n), pat) != count_by_scan(x, static_cast<int>(n), pat)) return false;
        }
        return true;
    }));

    out.push_back(sweep("chain_row_stochastic", 0, 0, [&](const GridCell&, const TrialParams& pr, const RunsPattern& pat, long) {
        return rows_stochastic(chain_for(pr, pat, opts.inject_fault));
    }));

    out.push_back(sweep("pgf_normalization", 0, N, [&](const GridCell&, const TrialParams& pr, const RunsPattern& pat, long n) {
        return pgf_recursive<Rational>(n, pr, pat)(Rational(1)) == 1 && pgf_closed<Rational>(n, pr, pat, Rational(1)) == 1;
    }));

    out.push_back(sweep("moments", 0, N, [&](const GridCell&, const TrialParams& pr, const RunsPattern& pat, long n) {
        auto mu = moments_recursive<Rational>(n, 4, pr, pat);
        auto row = pmf_recursive<Rational>(n, pr, pat).row(n);
        for (int j = 1; j <= 4; ++j) {
            if (mu[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)] != row.moment(j)) return false;
        }
        const long k = pat.k();
        Rational mean = row.moment(1);
        if (n >= k + 1 && mean != mean_formula<Rational>(n, pr, pat)) return false;
        Rational var = row.moment(2) - mean * mean;
        if (n >= 2 * k + 2 && var != mean - s_nk<Rational>(n, pr, pat)) return false;
        return true;
    }));

    out.push_back(sweep("star_identity", 1, N, [&](const GridCell&, const TrialParams& pr, const RunsPattern& pat, long n) {
        auto tab = pmf_recursive<Rational>(n, pr, pat);
        const long l_max = std::min<long>(3 * pat.k(), n);
        auto st = star_tables<Rational>(tab, n, l_max, pr, pat);
        Rational a = a_of_p<Rational>(pr, pat);
        for (long l = 1; l <= l_max; ++l) {
            for (long m = 0; m <= pat.max_count(n); ++m) {
                Rational rhs = tab.at(m, n - l) - a * (st.p_star(m, l) - st.p_star(m - 1, l));
                if (rhs != tab.at(m, n)) return false;
            }
        }
        return true;
    }));

    out.push_back(sweep("tv_dual_route", 0, N, [&](const GridCell&, const TrialParams& pr, const RunsPattern& pat, long n) {
        return tv_consecutive<Rational>(n, pr, pat) == tv_consecutive_expansion<Rational>(n, pr, pat);
    }));

    out.push_back(sweep("perturbed_stein", 0, std::min<long>(N, 12), [&](const GridCell& c, const TrialParams& pr, const RunsPattern& pat, long n) {
        if (n < pat.k() + 2 || c.p == Rational(4, 5)) return true;
        std::mt19937_64 gen(opts.seed + static_cast<std::uint64_t>(n));
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        std::vector<double> vals(static_cast<std::size_t>(n + 8));
        for (auto& v : vals) v = U(gen);
        vals[0] = 0.0;
        TestFunction<double> g = [&](long m) { return (m < 0 || m >= static_cast<long>(vals.size())) ? 0.0 : vals[static_cast<std::size_t>(m)]; };
        const GibbsSpec<double> specs[] = {{1.5, 1.0, 0.0, -1}, {0.4, 3.5, -1.0, -1}, {1.0 / 3, 2.5, 1.0, -1}};
        auto law = pmf_recursive<double>(n, pr, pat).row(n);
        for (const auto& spec : specs) {
            double res = stein_expectation<double>(spec, g, law) + perturbed_expectation<double>(g, n, pr, pat, spec);
            if (std::fabs(res) > 1e-8) return false;
        }
        return true;
    }));

    out.push_back(sweep("bound_validity", 0, N, [&](const GridCell&, const TrialParams& pr, const RunsPattern& pat, long n) {
        if (n < 3 * pat.k()) return true;
        auto law = to_double_pmf(brute_force_pmf<Rational>(n, pr, pat).pmf);
        BoundOptions bo;
        bo.assume_c7 = true;
        const std::pair<Family, int> kinds[] = {{Family::Poisson, 1}, {Family::PseudoBinomial, 1}, {Family::NegativeBinomial, 1},
                                                {Family::PseudoBinomial, 2}, {Family::NegativeBinomial, 2}};
        for (auto [f, np] : kinds) {
            auto rep = compute_bound<double>(f, np, n, pr, pat, bo);
            if (!rep.applicable()) continue;
            auto chk = verify_bound_against(rep, law);
            if (chk.binding && chk.margin < 0) return false;
        }
        return true;
    }));

    {
        CheckResult mc{"monte_carlo", true, ""};
        auto pr = TrialParams::from_p(Rational(1, 2));
        RunsPattern pat(1, 1);
        const long n = std::min<long>(N, 12);
        auto est = monte_carlo_pmf(n, opts.trials, opts.seed, pr, pat);
        auto exact = pmf_recursive<double>(n, pr, pat).row(n);
        for (long m = 0; m < static_cast<long>(exact.size()); ++m) {
            double sigma = std::sqrt(exact[m] * (1 - exact[m]) / static_cast<double>(opts.trials));
            if (std::fabs(est.pmf[m] - exact[m]) > 4 * sigma + 1e-12) {
                mc.passed = false;
                mc.detail = "k1=1 k2=1 p=1/2 n=" + std::to_string(n) + " m=" + std::to_string(m);
                break;
            }
        }
        if (mc.passed) mc.detail = std::to_string(opts.trials) + " trials";
        out.push_back(mc);
    }

    if (opts.waiting) {
        out.push_back(sweep("waiting_pgf_at_one", 0, 0, [&](const GridCell&, const TrialParams& pr, const RunsPattern& pat, long) {
            for (int r = 1; r <= 5; ++r) {
                if (waiting_pgf<Rational>(r, pr, pat, Rational(1)) != 1) return false;
                if (uncorrected_waiting_pgf<Rational>(r, pr, pat, Rational(1)) != 1 / pr.q<Rational>()) return false;
            }
            return true;
        }));
        out.push_back(sweep("waiting_duality", 0, N, [&](const GridCell&, const TrialParams& pr, const RunsPattern& pat, long n) {
            auto row = pmf_recursive<Rational>(n, pr, pat).row(n);
            for (int r = 1; r <= 2; ++r) {
                auto f = waiting_pmf<Rational>(r, n, pr, pat);
                Rational cdf = 0, tail = 0;
                for (long m = 0; m <= n; ++m) cdf += f[m];
                for (long m = r; m < static_cast<long>(row.size()); ++m) tail += row[m];
                if (cdf != tail) return false;
            }
            return true;
        }));
    }
    return out;
}

}  // namespace kruns::cli
