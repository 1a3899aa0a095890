#include "kruns/core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kruns {

TrialParams::TrialParams(Rational p, Rational q, bool normalized)
    : p_(std::move(p)), q_(std::move(q)), normalized_(normalized) {}

TrialParams TrialParams::from_p(const Rational& p) {
    if (p <= 0 || p >= 1) throw std::invalid_argument("p must lie strictly between 0 and 1");
    return TrialParams(p, Rational(1 - p), true);
}

TrialParams TrialParams::from_q(const Rational& q) {
    if (q <= 0 || q >= 1) throw std::invalid_argument("q must lie strictly between 0 and 1");
    return TrialParams(Rational(1 - q), q, true);
}

TrialParams TrialParams::unnormalized(const Rational& p, const Rational& q) {
    if (p <= 0 || p >= 1 || q <= 0 || q >= 1) {
        throw std::invalid_argument("p and q must lie strictly between 0 and 1");
    }
    return TrialParams(p, q, p + q == 1);
}

RunsPattern::RunsPattern(int k1, int k2) : k1_(k1), k2_(k2) {
    if (k1 < 1 || k2 < 1) throw std::invalid_argument("k1 and k2 must both be at least 1");
}

template <Scalar T>
Model<T> make_model(const TrialParams& params, const RunsPattern& pattern) {
    Model<T> m;
    m.p = params.p<T>();
    m.q = params.q<T>();
    m.a = pow_int<T>(m.q, pattern.k1()) * pow_int<T>(m.p, pattern.k2());
    m.qp = m.q * m.p;
    m.k1 = pattern.k1();
    m.k2 = pattern.k2();
    m.k = pattern.k();
    return m;
}

template <Scalar T>
T a_of_p(const TrialParams& params, const RunsPattern& pattern) {
    return make_model<T>(params, pattern).a;
}

template <Scalar T>
T s_nk(long n, const TrialParams& params, const RunsPattern& pattern) {
    const auto md = make_model<T>(params, pattern);
    const long k = md.k;
    const T& q = md.q;
    T q2 = q * q;
    T bracket = from_int<T>(n * (2 * k + 3) - (3 * k + 5) * (k + 1)) * q2 * md.p * md.p
              - from_int<T>(2 * (k + 1)) * q2 * q
              + from_int<T>(2 * n - 2 * k + 1) * q2
              - from_int<T>(2 * (n - 2 * k)) * q;
    T result = bracket * md.a * md.a;
    return result;
}

template <Scalar T>
T mean_formula(long n, const TrialParams& params, const RunsPattern& pattern) {
    const auto md = make_model<T>(params, pattern);
    T result = md.q * (from_int<T>(1) + from_int<T>(n - md.k - 1) * md.p) * md.a;
    return result;
}

template <Scalar T>
std::pair<T, T> delta_consts(const TrialParams& params, const RunsPattern& pattern) {
    const auto md = make_model<T>(params, pattern);
    const long k = md.k;
    T base = from_int<T>(1) + md.q + md.qp;
    T two_q = from_int<T>(2) + md.q;
    T delta = two_q + base * from_int<T>(k + 1);
    T delta1 = (two_q + base * from_int<T>(2 * k + 1)) * from_int<T>(k + 1);
    return {delta, delta1};
}

template <Scalar T>
T power_ratio(int k, long e1, long e2) {
    if constexpr (is_exact_v<T>) {
        Rational r = pow_int<Rational>(Rational(k + 1), e1) / pow_int<Rational>(Rational(k + 2), e2);
        return r;
    } else {
        return std::exp(static_cast<double>(e1) * std::log(k + 1.0) -
                        static_cast<double>(e2) * std::log(k + 2.0));
    }
}

template <Scalar T>
T c_const(int i, long n, const RunsPattern& pattern) {
    const long k = pattern.k();
    auto I = [](long v) { return from_int<T>(v); };
    T r;
    switch (i) {
        case 1:
            r = I(n - 2 * k - 2) + power_ratio<T>(pattern.k(), n - k, n - k - 1);
            return r;
        case 2:
            r = I(n - 3 * k) + I(k) * power_ratio<T>(pattern.k(), n - 2 * k, n - 2 * k);
            return r;
        case 3:
            r = I(n - 5 * k) + I(k * (n * k + 6 * k + 4 - k * k)) *
                                   power_ratio<T>(pattern.k(), n - 3 * k - 1, n - 3 * k + 1);
            return r;
        case 4:
            r = I(n * (3 * k + 1) - (11 * k * k + 9 * k + 2)) +
                I(2 * n * k + k * k + 7 * k + 2) * power_ratio<T>(pattern.k(), n - 2 * k, n - 2 * k);
            return r;
        case 5:
            r = I((n - 2 * k - 2) * (k + 1)) + power_ratio<T>(pattern.k(), n - k + 1, n - k - 1);
            return r;
        case 6:
            r = I(n * (k * k + 3 * k + 20) - (17 * k * k * k + 63 * k * k + 72 * k + 24)) +
                I(2 * (n + 3 * k + 6)) * power_ratio<T>(pattern.k(), n - k + 1, n - k - 1);
            return r;
        default:
            throw std::out_of_range("c constant index " + std::to_string(i) +
                                    " is not defined (only 1..6 exist)");
    }
}

template <>
double floor_of<double>(const double& x) {
    return std::floor(x);
}

template <>
Rational floor_of<Rational>(const Rational& x) {
    BigInt f;
    mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return Rational(f);
}

BigInt binomial(long n, long r) {
    if (n < 0 || r < 0 || r > n) return BigInt(0);
    BigInt out;
    mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(r));
    return out;
}

BigInt multinomial(long N, std::initializer_list<long> parts) {
    long total = 0;
    for (long x : parts) {
        if (x < 0) return BigInt(0);
        total += x;
    }
    if (total != N) return BigInt(0);
    BigInt out(1);
    long remaining = N;
    for (long x : parts) {
        out *= binomial(remaining, x);
        remaining -= x;
    }
    return out;
}

template <Scalar T>
T SequenceConstants<T>::a_coeff(int i) const {
    switch (i) {
        case 1: return from_int<T>(1);
        case 2: return from_int<T>(-1);
        case 3: return qp;
        default: throw std::out_of_range("sequence index must be 1, 2 or 3");
    }
}

template <Scalar T>
long SequenceConstants<T>::d_limit(int i, long n) const {
    switch (i) {
        case 1: return n - k - 2;
        case 2: return n - k - 1;
        case 3: return n - k - 2;
        default: throw std::out_of_range("sequence index must be 1, 2 or 3");
    }
}

template <Scalar T>
T SequenceConstants<T>::b(int i, long n) const {
    switch (i) {
        case 1: return from_int<T>(n + 1);
        case 3: return from_int<T>(n);
        case 2:
            if (n == k + 1) {
                T v = -q * from_int<T>(k + 2);
                return v;
            } else {
                T v = from_int<T>(n + 1) - q;
                return v;
            }
        default: throw std::out_of_range("sequence index must be 1, 2 or 3");
    }
}

template <Scalar T>
SequenceConstants<T> SequenceConstants<T>::make(const TrialParams& params, const RunsPattern& pattern) {
    const auto md = make_model<T>(params, pattern);
    return SequenceConstants<T>{md.q, md.qp, md.k};
}

namespace {

// Visits every (l, r) with l*k + r*(k+1) <= s, passing j = s - lk - r(k+1)
// and N = j + l + r.
template <class F>
void for_each_lr(long s, long k, F&& f) {
    for (long l = 0; l * k <= s; ++l) {
        for (long r = 0; l * k + r * (k + 1) <= s; ++r) {
            long j = s - l * k - r * (k + 1);
            f(l, r, j, j + l + r);
        }
    }
}

}  // namespace

template <Scalar T>
std::vector<T> coeff_B_row(long s, const TrialParams& params, const RunsPattern& pattern) {
    if (s < 0) throw std::out_of_range("coeff_B needs s >= 0");
    const auto md = make_model<T>(params, pattern);
    const long k = md.k;
    std::vector<T> row(static_cast<std::size_t>(s / k + 1), from_int<T>(0));
    for_each_lr(s, k, [&](long l, long r, long j, long N) {
        // common factor of every t-power: multinomial (k+1)^j / (k+2)^(N+1) 2^l a^(l+r)
        T base = from_bigint<T>(multinomial(N, {j, l, r})) * power_ratio<T>(pattern.k(), j, N + 1) *
                 from_bigint<T>(BigInt(1) << static_cast<mp_bitcnt_t>(l)) * pow_int<T>(md.a, l + r);
        for (long m = 0; m <= l + r; ++m) {
            T term = base * from_bigint<T>(binomial(l + r, m));
            if ((l - m) % 2 != 0) term = -term;
            row[static_cast<std::size_t>(m)] += term;
        }
    });
    return row;
}

template <Scalar T>
T coeff_B(long s, long l, const TrialParams& params, const RunsPattern& pattern) {
    if (s < 0 || l < 0 || l > s / pattern.k()) {
        throw std::out_of_range("B_s(l) requires 0 <= l <= floor(s/k)");
    }
    return coeff_B_row<T>(s, params, pattern)[static_cast<std::size_t>(l)];
}

template <Scalar T>
Polynomial<T> poly_C(long s, const TrialParams& params, const RunsPattern& pattern) {
    if (s < 0) throw std::out_of_range("C_s needs s >= 0");
    const long k = pattern.k();
    (void)params;  // in the variable u = a(t-1) the coefficients do not involve p
    Polynomial<T> poly;
    poly.coeffs.assign(static_cast<std::size_t>(s / k + 1), from_int<T>(0));
    for_each_lr(s, k, [&](long l, long m, long j, long N) {
        T term = from_bigint<T>(multinomial(N, {j, l, m})) * power_ratio<T>(pattern.k(), j, N + 1) *
                 from_bigint<T>(BigInt(1) << static_cast<mp_bitcnt_t>(l));
        if (m % 2 != 0) term = -term;
        poly.coeffs[static_cast<std::size_t>(l + m)] += term;
    });
    return poly;
}

template <Scalar T>
Polynomial<T> u_to_t(const Polynomial<T>& in_u, const T& a) {
    Polynomial<T> out;
    out.coeffs.assign(in_u.coeffs.size(), from_int<T>(0));
    T apow = from_int<T>(1);
    for (long L = 0; L < static_cast<long>(in_u.coeffs.size()); ++L) {
        T scaled = in_u.coeffs[static_cast<std::size_t>(L)] * apow;
        for (long m = 0; m <= L; ++m) {
            T term = scaled * from_bigint<T>(binomial(L, m));
            if ((L - m) % 2 != 0) term = -term;
            out.coeffs[static_cast<std::size_t>(m)] += term;
        }
        apow = apow * a;
    }
    return out;
}

#define KRUNS_INSTANTIATE(T)                                                              \
    template Model<T> make_model<T>(const TrialParams&, const RunsPattern&);              \
    template T a_of_p<T>(const TrialParams&, const RunsPattern&);                         \
    template T s_nk<T>(long, const TrialParams&, const RunsPattern&);                     \
    template T mean_formula<T>(long, const TrialParams&, const RunsPattern&);             \
    template std::pair<T, T> delta_consts<T>(const TrialParams&, const RunsPattern&);     \
    template T power_ratio<T>(int, long, long);                                           \
    template T c_const<T>(int, long, const RunsPattern&);                                 \
    template struct SequenceConstants<T>;                                                 \
    template std::vector<T> coeff_B_row<T>(long, const TrialParams&, const RunsPattern&); \
    template T coeff_B<T>(long, long, const TrialParams&, const RunsPattern&);            \
    template Polynomial<T> poly_C<T>(long, const TrialParams&, const RunsPattern&);       \
    template Polynomial<T> u_to_t<T>(const Polynomial<T>&, const T&);

KRUNS_INSTANTIATE(double)
KRUNS_INSTANTIATE(Rational)

}  // namespace kruns
