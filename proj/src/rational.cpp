#include "kruns/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kruns {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

BigInt pow10(unsigned long e) {
    BigInt r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
    return r;
}

// Decimal with optional sign, fraction and exponent.
Rational parse_decimal(std::string_view text) {
    std::string_view s = text;
    bool negative = false;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    long exponent = 0;
    if (auto epos = s.find_first_of("eE"); epos != std::string_view::npos) {
        std::string_view exp_part = s.substr(epos + 1);
        s = s.substr(0, epos);
        bool exp_negative = false;
        if (!exp_part.empty() && (exp_part.front() == '+' || exp_part.front() == '-')) {
            exp_negative = exp_part.front() == '-';
            exp_part.remove_prefix(1);
        }
        if (!all_digits(exp_part) || exp_part.size() > 6) {
            throw std::invalid_argument("malformed exponent in '" + std::string(text) + "'");
        }
        exponent = std::stol(std::string(exp_part));
        if (exp_negative) exponent = -exponent;
    }
    std::string digits;
    long frac_len = 0;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        std::string_view int_part = s.substr(0, dot);
        std::string_view frac_part = s.substr(dot + 1);
        if ((!int_part.empty() && !all_digits(int_part)) ||
            (!frac_part.empty() && !all_digits(frac_part)) ||
            (int_part.empty() && frac_part.empty())) {
            throw std::invalid_argument("not a rational number: '" + std::string(text) + "'");
        }
        digits = std::string(int_part) + std::string(frac_part);
        frac_len = static_cast<long>(frac_part.size());
    } else {
        if (!all_digits(s)) {
            throw std::invalid_argument("not a rational number: '" + std::string(text) + "'");
        }
        digits = std::string(s);
    }
    BigInt num(digits, 10);
    long scale = exponent - frac_len;
    Rational r;
    if (scale >= 0) {
        r = Rational(num * pow10(static_cast<unsigned long>(scale)));
    } else {
        r = Rational(num, pow10(static_cast<unsigned long>(-scale)));
        r.canonicalize();
    }
    return negative ? Rational(-r) : r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) throw std::invalid_argument("empty number");

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Rational num = parse_decimal(text.substr(0, slash));
        Rational den = parse_decimal(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
        Rational r = num / den;
        return r;
    }
    return parse_decimal(text);
}

Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite value has no rational form");
    Rational r(x);
    return r;
}

double nearest_double(const Rational& r) {
    const double t = r.get_d();
    if (!std::isfinite(t) || Rational(t) == r) return t;
    const double away = std::nextafter(t, r > 0 ? HUGE_VAL : -HUGE_VAL);
    if (!std::isfinite(away)) return t;
    const Rational dt = abs(Rational(r - Rational(t)));
    const Rational da = abs(Rational(r - Rational(away)));
    if (dt < da) return t;
    if (da < dt) return away;
    int e = 0;
    const double mant = std::frexp(t, &e);
    return std::fmod(std::ldexp(mant, 53), 2.0) == 0.0 ? t : away;
}

std::string to_string(const Rational& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_str();
}

}  // namespace kruns
