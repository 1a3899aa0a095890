#pragma once

// Law of M: recursions and closed forms for the PMF, PGF and moments, the
// star tables used by the two-parameter bounds, d_TV(M, M+1), and the law of
// the waiting time for the r-th occurrence.

#include <vector>

#include "kruns/core.hpp"
#include "kruns/pmf.hpp"

namespace kruns {

template <Scalar T>
PmfTable<T> pmf_recursive(long n, const TrialParams& params, const RunsPattern& pattern);

template <Scalar T>
Polynomial<T> pgf_recursive(long n, const TrialParams& params, const RunsPattern& pattern);

// mu[nu][j] = E[(M^nu)^j] for nu <= n, j <= j_max.
template <Scalar T>
std::vector<std::vector<T>> moments_recursive(long n, int j_max, const TrialParams& params,
                                              const RunsPattern& pattern);

// Multinomial closed forms. In double mode these are refused for n > 60
// (std::domain_error): the alternating sums cancel catastrophically.
inline constexpr long kClosedFormDoubleLimit = 60;

template <Scalar T>
T pgf_closed(long n, const TrialParams& params, const RunsPattern& pattern, const T& t);

template <Scalar T>
T pmf_closed(long m, long n, const TrialParams& params, const RunsPattern& pattern);

template <Scalar T>
struct StarTables {
    long n = 0;
    long l_max = 0;
    // star[m][l] for l = 0..k+l_max+1 (column 0 unused), star2[m][l] for l = 0..l_max.
    std::vector<std::vector<T>> star;
    std::vector<std::vector<T>> star2;

    T p_star(long m, long l) const { return get(star, m, l); }
    T p_star_star(long m, long l) const { return get(star2, m, l); }

private:
    static T get(const std::vector<std::vector<T>>& tab, long m, long l) {
        if (m < 0 || m >= static_cast<long>(tab.size())) return from_int<T>(0);
        const auto& row = tab[static_cast<std::size_t>(m)];
        if (l < 0 || l >= static_cast<long>(row.size())) return from_int<T>(0);
        return row[static_cast<std::size_t>(l)];
    }
};

// table must cover trial counts up to n.
template <Scalar T>
StarTables<T> star_tables(const PmfTable<T>& table, long n, long l_max, const TrialParams& params,
                          const RunsPattern& pattern);

// d_TV(M^n, M^n + 1) from the PMF.
template <Scalar T>
T tv_consecutive(long n, const TrialParams& params, const RunsPattern& pattern);

// Same quantity through the multinomial expansion of (1-t) phi_n(t).
template <Scalar T>
T tv_consecutive_expansion(long n, const TrialParams& params, const RunsPattern& pattern);

// PGF of the waiting time W_r for the r-th occurrence. Throws
// std::domain_error at a pole.
template <Scalar T>
T waiting_pgf(int r, const TrialParams& params, const RunsPattern& pattern, const T& t);

// The same expression without the leading qt/(1-pt) factor, multiplied by
// 1/(1-pt) instead. It is not a PGF: its value at t = 1 is 1/q.
template <Scalar T>
T uncorrected_waiting_pgf(int r, const TrialParams& params, const RunsPattern& pattern, const T& t);

template <Scalar T>
struct WaitingPmf {
    int r = 0;
    std::vector<T> probs;  // probs[m] = P(W_r = m), m = 0..m_max

    T operator[](long m) const {
        if (m < 0 || m >= static_cast<long>(probs.size())) return from_int<T>(0);
        return probs[static_cast<std::size_t>(m)];
    }
};

template <Scalar T>
WaitingPmf<T> waiting_pmf(int r, long m_max, const TrialParams& params, const RunsPattern& pattern);

// mu[r'][j] = E[W_{r'}^j] for r' = 0..r, j = 0..j_max. Throws std::domain_error
// when the solve is singular.
template <Scalar T>
std::vector<std::vector<T>> waiting_moments(int r, int j_max, const TrialParams& params,
                                            const RunsPattern& pattern);

}  // namespace kruns
