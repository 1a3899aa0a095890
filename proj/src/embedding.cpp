#include "kruns/embedding.hpp"

#include <algorithm>
#include <stdexcept>

namespace kruns {

template <Scalar T>
EmbeddingChain<T> build_chain(const TrialParams& params, const RunsPattern& pattern) {
    const auto md = make_model<T>(params, pattern);
    const int k1 = pattern.k1();
    const int k2 = pattern.k2();
    const std::size_t S = static_cast<std::size_t>(pattern.k() + 2);
    const T zero = from_int<T>(0);

    EmbeddingChain<T> ch{pattern, {}, std::vector<T>(S, zero), Matrix<T>(S, std::vector<T>(S, zero)),
                         Matrix<T>(S, std::vector<T>(S, zero))};
    ch.pi0[0] = from_int<T>(1);

    for (int i = 0; i <= k1; ++i) ch.state_labels.push_back("(.," + std::to_string(i) + ")");
    ch.state_labels.push_back("(.," + std::to_string(k1) + "+)");
    for (int i = 1; i <= k2; ++i) ch.state_labels.push_back("(.," + std::to_string(k1 + i) + ")");

    const std::size_t plus = static_cast<std::size_t>(k1 + 1);
    auto succ_state = [&](int i) { return static_cast<std::size_t>(k1 + 1 + i); };  // (.,k1+i)

    for (int i = 0; i < k1; ++i) {
        ch.A[i][0] = md.p;
        ch.A[i][i + 1] = md.q;
    }
    ch.A[k1][plus] = md.q;
    ch.A[k1][succ_state(1)] = md.p;
    ch.A[plus][0] = md.p;
    ch.A[plus][plus] = md.q;
    for (int i = 1; i < k2; ++i) {
        ch.A[succ_state(i)][succ_state(i + 1)] = md.p;
        ch.A[succ_state(i)][1] = md.q;
    }
    // completion state: one more success spoils the run, a failure completes it
    ch.A[succ_state(k2)][0] = md.p;
    ch.B[succ_state(k2)][1] = md.q;
    return ch;
}

template <Scalar T>
bool rows_stochastic(const EmbeddingChain<T>& chain, double tol) {
    for (std::size_t i = 0; i < chain.state_count(); ++i) {
        T s = from_int<T>(0);
        for (std::size_t j = 0; j < chain.state_count(); ++j) s += chain.A[i][j] + chain.B[i][j];
        if (to_double(abs_of(T(s - from_int<T>(1)))) > tol) return false;
    }
    return true;
}

template <Scalar T>
Pmf<T> pmf_embedding(const EmbeddingChain<T>& chain, long n) {
    if (n < 0) throw std::invalid_argument("n must be nonnegative");
    const std::size_t S = chain.state_count();
    const std::size_t levels = static_cast<std::size_t>(chain.pattern.max_count(n)) + 1;
    const T zero = from_int<T>(0);

    std::vector<std::vector<T>> cur(levels, std::vector<T>(S, zero));
    cur[0] = chain.pi0;
    std::vector<std::vector<T>> next(levels, std::vector<T>(S, zero));

    for (long step = 0; step < n; ++step) {
        for (auto& row : next) std::fill(row.begin(), row.end(), zero);
        for (std::size_t x = 0; x < levels; ++x) {
            for (std::size_t i = 0; i < S; ++i) {
                const T& v = cur[x][i];
                if (v == 0) continue;
                for (std::size_t j = 0; j < S; ++j) {
                    if (chain.A[i][j] != 0) next[x][j] += v * chain.A[i][j];
                    if (chain.B[i][j] != 0 && x + 1 < levels) next[x + 1][j] += v * chain.B[i][j];
                }
            }
        }
        std::swap(cur, next);
    }

    Pmf<T> out;
    out.n = n;
    out.probs.assign(levels, zero);
    for (std::size_t x = 0; x < levels; ++x) {
        for (const auto& v : cur[x]) out.probs[x] += v;
    }
    return out;
}

template <Scalar T>
std::vector<T> series_divide(const std::vector<T>& num, const std::vector<T>& den, long n_max) {
    if (den.empty() || den[0] == 0) throw std::invalid_argument("series division by a series with zero constant term");
    std::vector<T> out(static_cast<std::size_t>(n_max + 1), from_int<T>(0));
    for (long i = 0; i <= n_max; ++i) {
        T acc = i < static_cast<long>(num.size()) ? num[static_cast<std::size_t>(i)] : from_int<T>(0);
        long top = std::min<long>(i, static_cast<long>(den.size()) - 1);
        for (long j = 1; j <= top; ++j) acc -= den[static_cast<std::size_t>(j)] * out[static_cast<std::size_t>(i - j)];
        out[static_cast<std::size_t>(i)] = acc / den[0];
    }
    return out;
}

template <Scalar T>
T dgf_check(const TrialParams& params, const RunsPattern& pattern, long n_max, const T& t) {
    const auto md = make_model<T>(params, pattern);
    const std::size_t k = static_cast<std::size_t>(md.k);
    const T one = from_int<T>(1);
    T c = md.a * (one - t);

    std::vector<T> num(k + 2, from_int<T>(0));
    num[0] = one;
    num[k] = c;
    num[k + 1] = -c * md.q;

    std::vector<T> den(k + 3, from_int<T>(0));
    den[0] = one;
    den[1] = -one;
    den[k] += c;
    den[k + 1] -= c * (md.p + md.q);
    den[k + 2] += c * md.qp;

    auto coeffs = series_divide<T>(num, den, n_max);
    auto chain = build_chain<T>(params, pattern);
    T worst = from_int<T>(0);
    for (long n = 0; n <= n_max; ++n) {
        auto pmf = pmf_embedding<T>(chain, n);
        T phi = from_int<T>(0);
        T tp = one;
        for (const auto& x : pmf.probs) {
            phi += x * tp;
            tp *= t;
        }
        T dev = abs_of(T(phi - coeffs[static_cast<std::size_t>(n)]));
        if (dev > worst) worst = dev;
    }
    return worst;
}

#define KRUNS_INSTANTIATE(T)                                                                         \
    template EmbeddingChain<T> build_chain<T>(const TrialParams&, const RunsPattern&);               \
    template bool rows_stochastic<T>(const EmbeddingChain<T>&, double);                              \
    template Pmf<T> pmf_embedding<T>(const EmbeddingChain<T>&, long);                                \
    template std::vector<T> series_divide<T>(const std::vector<T>&, const std::vector<T>&, long);    \
    template T dgf_check<T>(const TrialParams&, const RunsPattern&, long, const T&);

KRUNS_INSTANTIATE(double)
KRUNS_INSTANTIATE(Rational)

}  // namespace kruns
