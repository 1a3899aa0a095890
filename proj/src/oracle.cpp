#include "kruns/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "kruns/distributions.hpp"

namespace kruns {

int count_occurrences(const std::vector<std::uint8_t>& trials, const RunsPattern& pattern) {
    const long n = static_cast<long>(trials.size());
    const long k1 = pattern.k1();
    const long k = pattern.k();
    auto e = [&](long i) { return trials[static_cast<std::size_t>(i - 1)] != 0; };  // 1-based
    int count = 0;
    for (long l = k + 1; l <= n; ++l) {
        const long b = l - k - 1;  // position of the leading success; 0 at the left edge
        bool ok = !e(l);
        if (b >= 1) ok = ok && e(b);
        for (long i = 1; ok && i <= k1; ++i) ok = !e(b + i);
        for (long i = b + k1 + 1; ok && i < l; ++i) ok = e(i);
        count += ok ? 1 : 0;
    }
    return count;
}

int count_occurrences(std::uint32_t bits, int n, const RunsPattern& pattern) {
    std::vector<std::uint8_t> trials(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) trials[static_cast<std::size_t>(i)] = (bits >> i) & 1u;
    return count_occurrences(trials, pattern);
}

int count_by_scan(std::uint32_t bits, int n, const RunsPattern& pattern) {
    std::string text = "S";
    for (int i = 0; i < n; ++i) text += ((bits >> i) & 1u) ? 'S' : 'F';
    const std::string word = "S" + std::string(pattern.k1(), 'F') + std::string(pattern.k2(), 'S') + "F";
    int count = 0;
    for (auto pos = text.find(word); pos != std::string::npos; pos = text.find(word, pos + 1)) ++count;
    return count;
}

template <Scalar T>
EnumerationResult<T> brute_force_pmf(long n, const TrialParams& params, const RunsPattern& pattern) {
    if (n < 0) throw std::invalid_argument("n must be nonnegative");
    if (n > kBruteForceMaxN) throw std::length_error("exhaustive enumeration is capped at n = 22");
    const int k1 = pattern.k1();
    const int k2 = pattern.k2();
    const int k = pattern.k();
    const long top = pattern.max_count(n);

    // window of trials l-k-1..l for indicator l >= k+2, and 1..k+1 for l = k+1
    const std::uint32_t inner_mask = (1u << (k + 2)) - 1;
    const std::uint32_t inner_val = 1u | (((1u << k2) - 1) << (k1 + 1));
    const std::uint32_t edge_mask = (1u << (k + 1)) - 1;
    const std::uint32_t edge_val = ((1u << k2) - 1) << k1;
    auto indicator = [&](std::uint32_t x, long l) -> int {
        if (l == k + 1) return (x & edge_mask) == edge_val;
        return ((x >> (l - k - 2)) & inner_mask) == inner_val;
    };

    EnumerationResult<T> res;
    res.n = n;
    res.sequence_count = std::uint64_t{1} << n;
    res.counts.assign(static_cast<std::size_t>(top + 1), std::vector<std::uint64_t>(static_cast<std::size_t>(n + 1), 0));

    std::vector<int> ind(static_cast<std::size_t>(n + 2), 0);
    std::uint32_t x = 0;
    int m = 0;
    int successes = 0;
    for (long l = k + 1; l <= n; ++l) {
        ind[static_cast<std::size_t>(l)] = indicator(x, l);
        m += ind[static_cast<std::size_t>(l)];
    }
    res.counts[static_cast<std::size_t>(m)][0] += 1;

    for (std::uint64_t g = 1; g < res.sequence_count; ++g) {
        const int bit = __builtin_ctzll(g);
        x ^= (1u << bit);
        successes += ((x >> bit) & 1u) ? 1 : -1;
        const long pos = bit + 1;
        const long lo = std::max<long>(pos, k + 1);
        const long hi = std::min<long>(pos + k + 1, n);
        for (long l = lo; l <= hi; ++l) {
            int v = indicator(x, l);
            m += v - ind[static_cast<std::size_t>(l)];
            ind[static_cast<std::size_t>(l)] = v;
        }
        res.counts[static_cast<std::size_t>(m)][static_cast<std::size_t>(successes)] += 1;
    }

    const T p = params.p<T>();
    const T q = params.q<T>();
    std::vector<T> weight(static_cast<std::size_t>(n + 1));
    for (long s = 0; s <= n; ++s) {
        T w = pow_int<T>(p, s) * pow_int<T>(q, n - s);
        weight[static_cast<std::size_t>(s)] = w;
    }
    res.pmf.n = n;
    res.pmf.probs.assign(static_cast<std::size_t>(top + 1), from_int<T>(0));
    for (long mm = 0; mm <= top; ++mm) {
        for (long s = 0; s <= n; ++s) {
            auto c = res.counts[static_cast<std::size_t>(mm)][static_cast<std::size_t>(s)];
            if (c == 0) continue;
            T term = from_bigint<T>(BigInt(static_cast<unsigned long>(c))) * weight[static_cast<std::size_t>(s)];
            res.pmf.probs[static_cast<std::size_t>(mm)] += term;
        }
    }
    return res;
}

SampleEstimate monte_carlo_pmf(long n, std::uint64_t trials, std::uint64_t seed, const TrialParams& params,
                               const RunsPattern& pattern) {
    if (n < 0) throw std::invalid_argument("n must be nonnegative");
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    const double p = params.p<double>();
    const long top = pattern.max_count(n);
    std::mt19937_64 gen(seed);
    std::vector<std::uint64_t> hits(static_cast<std::size_t>(top + 1), 0);
    std::vector<std::uint8_t> seq(static_cast<std::size_t>(n));
    constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
    for (std::uint64_t t = 0; t < trials; ++t) {
        for (auto& s : seq) s = static_cast<double>(gen() >> 11) * scale < p;
        hits[static_cast<std::size_t>(count_occurrences(seq, pattern))] += 1;
    }
    SampleEstimate est;
    est.trials = trials;
    est.seed = seed;
    est.pmf.n = n;
    for (auto h : hits) {
        double f = static_cast<double>(h) / static_cast<double>(trials);
        est.pmf.probs.push_back(f);
        est.std_error.push_back(std::sqrt(f * (1.0 - f) / static_cast<double>(trials)));
    }
    return est;
}

template <Scalar T>
T exact_tv(const Pmf<T>& a, const Pmf<T>& b) {
    const long len = static_cast<long>(std::max(a.size(), b.size()));
    T sum = from_int<T>(0);
    for (long m = 0; m < len; ++m) sum += abs_of(T(a[m] - b[m]));
    T half = sum / from_int<T>(2);
    return half;
}

double exact_tv(const Pmf<double>& a, const TruncatedLaw& b) {
    const long len = static_cast<long>(std::max(a.size(), b.probs.size()));
    double sum = 0.0;
    for (long m = 0; m < len; ++m) sum += std::fabs(a[m] - b[m]);
    return std::clamp(0.5 * sum + b.tail, 0.0, 1.0);
}

TruncatedLaw target_law(const TargetFamily<double>& target) {
    return materialize(gibbs_spec<double>(target));
}

namespace {

template <Scalar T>
TargetFamily<double> to_double_target(const TargetFamily<T>& t) {
    if (auto* po = std::get_if<PoissonTarget<T>>(&t)) return PoissonTarget<double>{to_double(po->lambda)};
    if (auto* pb = std::get_if<PseudoBinomialTarget<T>>(&t)) {
        return PseudoBinomialTarget<double>{to_double(pb->alpha), to_double(pb->p)};
    }
    const auto& nb = std::get<NegativeBinomialTarget<T>>(t);
    return NegativeBinomialTarget<double>{to_double(nb.alpha), to_double(nb.p)};
}

}  // namespace

template <Scalar T>
BoundCheck verify_bound_against(const BoundReport<T>& report, const Pmf<double>& law_of_m) {
    if (!report.applicable() || !report.target) throw Inapplicable("report carries no numeric bound");
    BoundCheck out;
    out.tv = exact_tv(law_of_m, target_law(to_double_target<T>(*report.target)));
    const double bound = to_double(report.bound);
    out.margin = bound - out.tv;
    out.binding = bound < 1.0;
    return out;
}

template <Scalar T>
BoundCheck verify_bound(const BoundReport<T>& report, long n, const TrialParams& params, const RunsPattern& pattern) {
    if (!report.applicable() || !report.target) throw Inapplicable("report carries no numeric bound");
    Pmf<double> law;
    if (n <= kBruteForceMaxN) {
        law = to_double_pmf(brute_force_pmf<Rational>(n, params, pattern).pmf);
    } else {
        law = to_double_pmf(pmf_recursive<Rational>(n, params, pattern).row(n));
    }
    return verify_bound_against<T>(report, law);
}

#define KRUNS_INSTANTIATE(T)                                                                              \
    template EnumerationResult<T> brute_force_pmf<T>(long, const TrialParams&, const RunsPattern&);        \
    template T exact_tv<T>(const Pmf<T>&, const Pmf<T>&);                                                  \
    template BoundCheck verify_bound_against<T>(const BoundReport<T>&, const Pmf<double>&);                \
    template BoundCheck verify_bound<T>(const BoundReport<T>&, long, const TrialParams&, const RunsPattern&);

KRUNS_INSTANTIATE(double)
KRUNS_INSTANTIATE(Rational)

}  // namespace kruns
