#pragma once

// Markov chain embedding of M: k+2 chain states, a within-level matrix A and
// a level-up matrix B. The PMF comes from a DP over (count, state).

#include <string>
#include <vector>

#include "kruns/core.hpp"
#include "kruns/pmf.hpp"

namespace kruns {

template <Scalar T>
using Matrix = std::vector<std::vector<T>>;

template <Scalar T>
struct EmbeddingChain {
    RunsPattern pattern;
    std::vector<std::string> state_labels;
    std::vector<T> pi0;
    Matrix<T> A;
    Matrix<T> B;

    std::size_t state_count() const { return pi0.size(); }
};

// State order: (.,0) ... (.,k1), (.,k1+), (.,k1+1) ... (.,k1+k2).
template <Scalar T>
EmbeddingChain<T> build_chain(const TrialParams& params, const RunsPattern& pattern);

template <Scalar T>
bool rows_stochastic(const EmbeddingChain<T>& chain, double tol = 0.0);

template <Scalar T>
Pmf<T> pmf_embedding(const EmbeddingChain<T>& chain, long n);

// Largest |[z^n] Phi(t, z) - phi_n(t)| over n <= n_max, with Phi expanded by
// power-series long division and phi_n from pmf_embedding.
template <Scalar T>
T dgf_check(const TrialParams& params, const RunsPattern& pattern, long n_max, const T& t);

// First n_max+1 coefficients of num/den; den[0] must be nonzero.
template <Scalar T>
std::vector<T> series_divide(const std::vector<T>& num, const std::vector<T>& den, long n_max);

}  // namespace kruns
