#pragma once

// Discrete Gibbs measures, their Stein operators, the perturbed operator for
// M, moment matching and the total-variation bounds.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "kruns/core.hpp"
#include "kruns/pmf.hpp"

namespace kruns {

// gamma(m) proportional to e^{U(m)} w^m / m! with
// e^{U(m+1)-U(m)} = ratio_a + ratio_b m. support_end < 0 means unbounded.
template <Scalar T>
struct GibbsSpec {
    T w;
    T ratio_a;
    T ratio_b;
    long support_end = -1;
};

// A law on {0, ..., probs.size()-1}; tail bounds the mass cut off beyond.
struct TruncatedLaw {
    std::vector<double> probs;
    double tail = 0.0;

    double operator[](long m) const {
        if (m < 0 || m >= static_cast<long>(probs.size())) return 0.0;
        return probs[static_cast<std::size_t>(m)];
    }
};

enum class Family { Poisson, PseudoBinomial, NegativeBinomial };

std::string family_name(Family f);

template <Scalar T>
struct PoissonTarget {
    T lambda;
};

// Binomial form with real trial count alpha, truncated at floor(alpha).
template <Scalar T>
struct PseudoBinomialTarget {
    T alpha;
    T p;
};

// P(m) = Gamma(alpha+m) / (Gamma(alpha) m!) p^alpha (1-p)^m
template <Scalar T>
struct NegativeBinomialTarget {
    T alpha;
    T p;
};

template <Scalar T>
using TargetFamily = std::variant<PoissonTarget<T>, PseudoBinomialTarget<T>, NegativeBinomialTarget<T>>;

template <Scalar T>
GibbsSpec<T> gibbs_spec(const TargetFamily<T>& target);

// Weights built multiplicatively from the ratio encoding (in log space) and
// normalized. Unbounded laws stop once the remaining mass is provably below
// tail_eps relative to the accumulated mass.
TruncatedLaw materialize(const GibbsSpec<double>& spec, double tail_eps = 1e-15);

double gibbs_pmf(const GibbsSpec<double>& spec, long m);

template <Scalar T>
using TestFunction = std::function<T(long)>;

// w (ratio_a + ratio_b m) g(m+1) - m g(m); the first term is dropped from
// support_end on when the support is bounded.
template <Scalar T>
T stein_apply(const GibbsSpec<T>& spec, const TestFunction<T>& g, long m);

// E[stein_apply(spec, g, X)] for X ~ law
double stein_expectation(const GibbsSpec<double>& spec, const TestFunction<double>& g, const TruncatedLaw& law);

// Same expectation for X = M^n with the given PMF.
template <Scalar T>
T stein_expectation(const GibbsSpec<T>& spec, const TestFunction<T>& g, const Pmf<T>& pmf);

// E[U g(M^n)] for the correction term U of the perturbed operator. Added to
// stein_expectation(spec, g, law of M^n) it gives zero for every g. n >= k+2.
// Only the affine ratio enters; spec.support_end must be -1.
template <Scalar T>
T perturbed_expectation(const TestFunction<T>& g, long n, const TrialParams& params,
                        const RunsPattern& pattern, const GibbsSpec<T>& spec);

class Inapplicable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// lambda = E[M^n] = q(1 + (n-k-1)p)a(p); needs n >= k+1.
template <Scalar T>
T match_poisson(long n, const TrialParams& params, const RunsPattern& pattern);

template <Scalar T>
struct TwoParamMatch {
    T alpha;
    T p;
};

// Mean and variance matching. Pseudo-binomial needs s_{n,k} > 0, negative
// binomial s_{n,k} < 0; otherwise Inapplicable is thrown.
template <Scalar T>
TwoParamMatch<T> match_two_parameter(long n, const TrialParams& params, const RunsPattern& pattern,
                                     Family family);

enum class BoundStatus {
    Ok,
    InapplicableN,    // n below the range where the bound holds
    InapplicableSnk,  // wrong sign of s_{n,k}
    Degenerate,       // matched parameters outside their domain
    BlockedC7,        // needs c^{(7)}, which has no formula
};

// How the free parameter is fixed in one-parameter matching.
enum class OneParamConvention {
    AlphaMaxCount,  // alpha = floor(n/k), the largest value M can take
    AlphaNMinusK,   // alpha = n - k
    FixedAlpha,     // alpha given in BoundOptions::fixed
    FixedP,         // p given in BoundOptions::fixed
};

struct BoundOptions {
    OneParamConvention convention = OneParamConvention::AlphaMaxCount;
    std::optional<Rational> fixed;
    bool floor_alpha_two_param = true;
    // Substitute c^{(6)} for the undefined c^{(7)} in the two-parameter
    // negative binomial bound. The result is tagged as assumed.
    bool assume_c7 = false;
};

template <Scalar T>
struct BoundReport {
    Family family = Family::Poisson;
    int parameters = 1;
    long n = 0;
    std::optional<TargetFamily<T>> target;
    T bound{};
    BoundStatus status = BoundStatus::Ok;
    bool n_condition_ok = false;
    bool snk_sign_ok = true;
    bool c7_assumed = false;
    std::string notes;

    bool applicable() const { return status == BoundStatus::Ok; }
    // Literal cell text for non-numeric results: NA(s_nk), NA(n), NA(degenerate), BLOCKED(c7).
    std::string marker() const;
};

template <Scalar T>
BoundReport<T> bound_poisson_one(long n, const TrialParams& params, const RunsPattern& pattern);

template <Scalar T>
BoundReport<T> bound_pb_one(long n, const TrialParams& params, const RunsPattern& pattern,
                            const BoundOptions& opts = {});

template <Scalar T>
BoundReport<T> bound_nb_one(long n, const TrialParams& params, const RunsPattern& pattern,
                            const BoundOptions& opts = {});

template <Scalar T>
BoundReport<T> bound_pb_two(long n, const TrialParams& params, const RunsPattern& pattern,
                            const BoundOptions& opts = {});

template <Scalar T>
BoundReport<T> bound_nb_two(long n, const TrialParams& params, const RunsPattern& pattern,
                            const BoundOptions& opts = {});

template <Scalar T>
BoundReport<T> compute_bound(Family family, int parameters, long n, const TrialParams& params,
                             const RunsPattern& pattern, const BoundOptions& opts = {});

// Reference grid of bound values: (k1,k2,n) in {(3,4,50), (3,5,150),
// (4,5,250)}, q in {0.11,...,0.14}, with p held at 0.89 in every column, the
// two-parameter pseudo-binomial alpha left unfloored.
struct TableCell {
    int k1;
    int k2;
    long n;
    Rational q;
};

std::vector<TableCell> reference_table_cells();
TrialParams reference_table_params(const Rational& q);
BoundOptions reference_table_options(bool assume_c7);

}  // namespace kruns
