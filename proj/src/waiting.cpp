#include "kruns/distributions.hpp"

#include <algorithm>
#include <stdexcept>

namespace kruns {

namespace {

// a t^k (1-qt)(1-pt) / (1 - t + a t^k (1-qt)(1-pt))
template <Scalar T>
T occurrence_ratio(const Model<T>& md, const T& t) {
    const T one = from_int<T>(1);
    T g = md.a * pow_int<T>(t, md.k) * (one - md.q * t) * (one - md.p * t);
    T den = one - t + g;
    if (den == 0) throw std::domain_error("waiting-time PGF has a pole at this t");
    T r = g / den;
    return r;
}

template <Scalar T>
T one_minus_pt(const Model<T>& md, const T& t) {
    T v = from_int<T>(1) - md.p * t;
    if (v == 0) throw std::domain_error("waiting-time PGF has a pole at t = 1/p");
    return v;
}

}  // namespace

template <Scalar T>
T waiting_pgf(int r, const TrialParams& params, const RunsPattern& pattern, const T& t) {
    if (r < 1) throw std::invalid_argument("r must be at least 1");
    const auto md = make_model<T>(params, pattern);
    T lead = md.q * t / one_minus_pt(md, t);
    T val = lead * pow_int<T>(occurrence_ratio(md, t), r);
    return val;
}

template <Scalar T>
T uncorrected_waiting_pgf(int r, const TrialParams& params, const RunsPattern& pattern, const T& t) {
    if (r < 1) throw std::invalid_argument("r must be at least 1");
    const auto md = make_model<T>(params, pattern);
    T val = pow_int<T>(occurrence_ratio(md, t), r) / one_minus_pt(md, t);
    return val;
}

template <Scalar T>
WaitingPmf<T> waiting_pmf(int r, long m_max, const TrialParams& params, const RunsPattern& pattern) {
    if (r < 1) throw std::invalid_argument("r must be at least 1");
    if (m_max < 0) throw std::invalid_argument("m_max must be nonnegative");
    const auto md = make_model<T>(params, pattern);
    const long k = md.k;
    const std::size_t len = static_cast<std::size_t>(m_max + 1);
    const T zero = from_int<T>(0);

    std::vector<T> prev(len, zero);  // f_{r-1}
    prev[0] = from_int<T>(1);
    std::vector<T> cur(len, zero);
    auto at = [&](const std::vector<T>& f, long m) { return (m < 0 || m > m_max) ? zero : f[static_cast<std::size_t>(m)]; };

    for (int level = 1; level <= r; ++level) {
        std::fill(cur.begin(), cur.end(), zero);
        for (long m = level * k + 1; m <= m_max; ++m) {
            T val;
            if (level == 1) {
                // f_1(k+1) and f_1(k+2) seed the recursion
                if (m == k + 1) {
                    val = md.q * md.a;
                } else if (m == k + 2) {
                    val = md.qp * md.a;
                } else {
                    T bracket = at(cur, m - k) - at(cur, m - k - 1) + md.qp * at(cur, m - k - 2);
                    val = at(cur, m - 1) - md.a * bracket;
                }
            } else {
                T bracket = at(prev, m - k) - at(cur, m - k) - at(prev, m - k - 1) + at(cur, m - k - 1) +
                            md.qp * at(prev, m - k - 2) - md.qp * at(cur, m - k - 2);
                val = at(cur, m - 1) + md.a * bracket;
            }
            cur[static_cast<std::size_t>(m)] = val;
        }
        std::swap(prev, cur);
    }
    return WaitingPmf<T>{r, prev};
}

template <Scalar T>
std::vector<std::vector<T>> waiting_moments(int r, int j_max, const TrialParams& params,
                                            const RunsPattern& pattern) {
    if (r < 1) throw std::invalid_argument("r must be at least 1");
    if (j_max < 1) throw std::invalid_argument("j_max must be at least 1");
    const auto md = make_model<T>(params, pattern);
    const long k = md.k;
    const std::size_t J = static_cast<std::size_t>(j_max + 1);

    // c[e] = k^e - (k+1)^e + qp (k+2)^e
    std::vector<T> c(J);
    for (long e = 0; e <= j_max; ++e) {
        T v = pow_int<T>(from_int<T>(k), e) - pow_int<T>(from_int<T>(k + 1), e) +
              md.qp * pow_int<T>(from_int<T>(k + 2), e);
        c[static_cast<std::size_t>(e)] = v;
    }
    // the l = j terms leave a qp mu_{r,j} on one side
    T pivot = md.a * md.qp;
    if (pivot == 0) throw std::domain_error("singular waiting-moment solve");

    std::vector<std::vector<T>> mu(static_cast<std::size_t>(r + 1), std::vector<T>(J, from_int<T>(0)));
    mu[0][0] = from_int<T>(1);
    for (int level = 1; level <= r; ++level) {
        auto& cur = mu[static_cast<std::size_t>(level)];
        const auto& prev = mu[static_cast<std::size_t>(level - 1)];
        for (long j = 0; j <= j_max; ++j) {
            T rhs = from_int<T>(0);
            for (long l = 0; l < j; ++l) {
                const std::size_t L = static_cast<std::size_t>(l);
                const T& ce = c[static_cast<std::size_t>(j - l)];
                T term;
                if (level == 1) {
                    term = cur[L] * (from_int<T>(1) - md.a * ce);
                } else {
                    term = cur[L] + md.a * ce * (prev[L] - cur[L]);
                }
                rhs += from_bigint<T>(binomial(j, l)) * term;
            }
            if (level == 1) {
                T tail = md.q * md.a *
                         (pow_int<T>(from_int<T>(k + 1), j) - md.q * pow_int<T>(from_int<T>(k + 2), j));
                rhs += tail;
            } else {
                rhs += pivot * prev[static_cast<std::size_t>(j)];
            }
            cur[static_cast<std::size_t>(j)] = rhs / pivot;
        }
    }
    return mu;
}

#define KRUNS_INSTANTIATE(T)                                                                        \
    template T waiting_pgf<T>(int, const TrialParams&, const RunsPattern&, const T&);                \
    template T uncorrected_waiting_pgf<T>(int, const TrialParams&, const RunsPattern&, const T&);    \
    template WaitingPmf<T> waiting_pmf<T>(int, long, const TrialParams&, const RunsPattern&);        \
    template std::vector<std::vector<T>> waiting_moments<T>(int, int, const TrialParams&,            \
                                                            const RunsPattern&);

KRUNS_INSTANTIATE(double)
KRUNS_INSTANTIATE(Rational)

}  // namespace kruns
