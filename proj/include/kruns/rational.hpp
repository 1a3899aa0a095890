#pragma once

// Arithmetic modes. Every computation in the library is templated on a
// Scalar: either IEEE double or an exact GMP rational. A single result is
// never computed in mixed modes.

#include <cmath>
#include <concepts>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace kruns {

using Rational = mpq_class;
using BigInt = mpz_class;

template <class T>
concept Scalar = std::same_as<T, double> || std::same_as<T, Rational>;

/// Parses "0.89", "89/100", "8.9e-1" or an integer into an exact rational.
/// Anything else (nan, inf, symbolic input) throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// Exact rational value of a finite double (binary expansion, no rounding).
Rational rational_from_double(double x);

std::string to_string(const Rational& r);

/// Nearest double, ties to even. (mpq_get_d truncates toward zero.)
double nearest_double(const Rational& r);

template <Scalar T>
inline constexpr bool is_exact_v = std::same_as<T, Rational>;

template <Scalar T>
T from_rational(const Rational& r) {
    if constexpr (is_exact_v<T>) {
        return r;
    } else {
        return nearest_double(r);
    }
}

template <Scalar T>
T from_bigint(const BigInt& z) {
    if constexpr (is_exact_v<T>) {
        return Rational(z);
    } else {
        return nearest_double(Rational(z));
    }
}

template <Scalar T>
T from_int(long v) {
    if constexpr (is_exact_v<T>) {
        return Rational(v);
    } else {
        return static_cast<double>(v);
    }
}

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return nearest_double(x); }

inline double abs_of(double x) { return std::fabs(x); }
inline Rational abs_of(const Rational& x) { return abs(x); }

/// base^e by repeated squaring; negative exponents invert.
template <Scalar T>
T pow_int(const T& base, long e) {
    if (e < 0) {
        T one = from_int<T>(1);
        T inv = one / base;
        return pow_int<T>(inv, -e);
    }
    T result = from_int<T>(1);
    T b = base;
    while (e > 0) {
        if (e & 1) result = result * b;
        e >>= 1;
        if (e > 0) b = b * b;
    }
    return result;
}

}  // namespace kruns
