#pragma once

// Ground truth for the rest of the library: exhaustive enumeration of all
// 2^n trial sequences, Monte Carlo sampling, and exact total variation.

#include <cstdint>
#include <vector>

#include "kruns/core.hpp"
#include "kruns/pmf.hpp"
#include "kruns/stein.hpp"

namespace kruns {

inline constexpr long kBruteForceMaxN = 22;

// Indicator definition of M. trials[i] != 0 marks a success.
int count_occurrences(const std::vector<std::uint8_t>& trials, const RunsPattern& pattern);

// Trial i (1-based) is a success iff bit i-1 of `bits` is set.
int count_occurrences(std::uint32_t bits, int n, const RunsPattern& pattern);

// Independent coding of the same count: searches "S F^k1 S^k2 F" in the trial
// string prefixed by one virtual success.
int count_by_scan(std::uint32_t bits, int n, const RunsPattern& pattern);

template <Scalar T>
struct EnumerationResult {
    Pmf<T> pmf;
    long n = 0;
    std::uint64_t sequence_count = 0;
    // counts[m][s]: sequences with M = m and s successes
    std::vector<std::vector<std::uint64_t>> counts;
};

// Refuses n > 22 with std::length_error.
template <Scalar T>
EnumerationResult<T> brute_force_pmf(long n, const TrialParams& params, const RunsPattern& pattern);

struct SampleEstimate {
    Pmf<double> pmf;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<double> std_error;
};

// Sequential std::mt19937_64 stream; trial i is a success iff the top 53 bits
// of the next draw, scaled to [0,1), are below p.
SampleEstimate monte_carlo_pmf(long n, std::uint64_t trials, std::uint64_t seed, const TrialParams& params,
                               const RunsPattern& pattern);

template <Scalar T>
T exact_tv(const Pmf<T>& a, const Pmf<T>& b);

// Half the l1 distance plus the target's truncation tail, clipped to [0,1].
double exact_tv(const Pmf<double>& a, const TruncatedLaw& b);

// Materialized law of a bound's matched target.
TruncatedLaw target_law(const TargetFamily<double>& target);

struct BoundCheck {
    double margin = 0.0;  // bound - d_TV
    double tv = 0.0;
    bool binding = true;  // false when bound >= 1 (trivially true)
};

// Compares a report with the exact d_TV between its target and M^n (brute
// force for n <= 22, exact recursion beyond). Throws Inapplicable for
// reports without a numeric bound.
template <Scalar T>
BoundCheck verify_bound_against(const BoundReport<T>& report, const Pmf<double>& law_of_m);

template <Scalar T>
BoundCheck verify_bound(const BoundReport<T>& report, long n, const TrialParams& params, const RunsPattern& pattern);

}  // namespace kruns
