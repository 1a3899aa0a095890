#pragma once

// Parameters, scalar constants and the coefficient machinery shared by the
// distribution, Stein and bound code.

#include <initializer_list>
#include <utility>
#include <vector>

#include "kruns/rational.hpp"

namespace kruns {

// Success probability p of the Bernoulli trials. q is derived as 1 - p,
// except for parameter sets built with unnormalized(), which carry an
// independent q (used only to reproduce reference tables that hold p fixed
// while varying q).
class TrialParams {
public:
    static TrialParams from_p(const Rational& p);
    static TrialParams from_q(const Rational& q);
    static TrialParams unnormalized(const Rational& p, const Rational& q);

    template <Scalar T>
    T p() const { return from_rational<T>(p_); }

    template <Scalar T>
    T q() const {
        if (normalized_) {
            if constexpr (is_exact_v<T>) {
                return Rational(1 - p_);
            } else {
                return 1.0 - nearest_double(p_);
            }
        }
        return from_rational<T>(q_);
    }

    const Rational& p_exact() const { return p_; }
    Rational q_exact() const { return normalized_ ? Rational(1 - p_) : q_; }
    bool normalized() const { return normalized_; }

private:
    TrialParams(Rational p, Rational q, bool normalized);
    Rational p_;
    Rational q_;
    bool normalized_ = true;
};

class RunsPattern {
public:
    RunsPattern(int k1, int k2);
    int k1() const { return k1_; }
    int k2() const { return k2_; }
    int k() const { return k1_ + k2_; }

    // Largest possible value of M for n trials.
    int max_count(long n) const { return n < 0 ? 0 : static_cast<int>(n / k()); }

    bool operator==(const RunsPattern&) const = default;

private:
    int k1_;
    int k2_;
};

// p, q, a(p) and k bundled in one arithmetic mode.
template <Scalar T>
struct Model {
    T p;
    T q;
    T a;
    T qp;
    int k1;
    int k2;
    int k;
};

template <Scalar T>
Model<T> make_model(const TrialParams& params, const RunsPattern& pattern);

template <Scalar T>
T a_of_p(const TrialParams& params, const RunsPattern& pattern);

// Mean minus variance of M for n trials.
template <Scalar T>
T s_nk(long n, const TrialParams& params, const RunsPattern& pattern);

// Mean of M for n >= k+1 trials: q(1 + (n-k-1)p)a(p).
template <Scalar T>
T mean_formula(long n, const TrialParams& params, const RunsPattern& pattern);

// (delta, delta1)
template <Scalar T>
std::pair<T, T> delta_consts(const TrialParams& params, const RunsPattern& pattern);

// (k+1)^e1 / (k+2)^e2. Rational mode is exact, double mode works in log space.
template <Scalar T>
T power_ratio(int k, long e1, long e2);

// c^{(i)}_{n,k} for i in 1..6; other indices throw std::out_of_range.
template <Scalar T>
T c_const(int i, long n, const RunsPattern& pattern);

template <Scalar T>
T floor_of(const T& x);

// Multinomial coefficient N! / (parts[0]! parts[1]! ...). Returns 0 when a
// part is negative or the parts do not add up to N.
BigInt multinomial(long N, std::initializer_list<long> parts);
BigInt binomial(long n, long r);

template <Scalar T>
struct SequenceConstants {
    T q;
    T qp;
    int k;

    T a_coeff(int i) const;        // (1, -1, qp)
    long d_limit(int i, long n) const;  // (n-k-2, n-k-1, n-k-2)
    T b(int i, long n) const;

    static SequenceConstants make(const TrialParams& params, const RunsPattern& pattern);
};

template <Scalar T>
struct Polynomial {
    std::vector<T> coeffs;  // coeffs[j] multiplies x^j

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    T coeff(int j) const {
        if (j < 0 || j >= static_cast<int>(coeffs.size())) return from_int<T>(0);
        return coeffs[static_cast<std::size_t>(j)];
    }
    T operator()(const T& x) const {
        T acc = from_int<T>(0);
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
        return acc;
    }
};

// B_s(l): coefficient of t^l in C_s(t). Requires 0 <= l <= floor(s/k); larger
// l throws std::out_of_range.
template <Scalar T>
T coeff_B(long s, long l, const TrialParams& params, const RunsPattern& pattern);

// All B_s(l) for l = 0..floor(s/k).
template <Scalar T>
std::vector<T> coeff_B_row(long s, const TrialParams& params, const RunsPattern& pattern);

// C_s as a polynomial in u = a(p)(t-1), degree <= floor(s/k).
template <Scalar T>
Polynomial<T> poly_C(long s, const TrialParams& params, const RunsPattern& pattern);

// Rewrites a polynomial in u = a(t-1) into powers of t.
template <Scalar T>
Polynomial<T> u_to_t(const Polynomial<T>& in_u, const T& a);

}  // namespace kruns
