#include "kruns/distributions.hpp"
#include "kruns/stein.hpp"

namespace kruns {

template <Scalar T>
std::string BoundReport<T>::marker() const {
    switch (status) {
        case BoundStatus::Ok: return "";
        case BoundStatus::InapplicableN: return "NA(n)";
        case BoundStatus::InapplicableSnk: return "NA(s_nk)";
        case BoundStatus::Degenerate: return "NA(degenerate)";
        case BoundStatus::BlockedC7: return "BLOCKED(c7)";
    }
    return "NA";
}

template <Scalar T>
T match_poisson(long n, const TrialParams& params, const RunsPattern& pattern) {
    if (n < pattern.k() + 1) throw Inapplicable("Poisson matching needs n >= k+1");
    return mean_formula<T>(n, params, pattern);
}

template <Scalar T>
TwoParamMatch<T> match_two_parameter(long n, const TrialParams& params, const RunsPattern& pattern,
                                     Family family) {
    const T lambda = match_poisson<T>(n, params, pattern);
    const T s = s_nk<T>(n, params, pattern);
    if (family == Family::PseudoBinomial) {
        if (!(s > 0)) throw Inapplicable("pseudo-binomial matching needs s_nk > 0");
        T alpha = lambda * lambda / s;
        T p = s / lambda;
        return {alpha, p};
    }
    if (family == Family::NegativeBinomial) {
        if (!(s < 0)) throw Inapplicable("negative binomial matching needs s_nk < 0");
        T alpha = -lambda * lambda / s;
        T p = lambda / (lambda - s);
        return {alpha, p};
    }
    throw std::invalid_argument("two-parameter matching is defined for pseudo-binomial and negative binomial only");
}

namespace {

template <Scalar T>
struct Common {
    Model<T> md;
    T lambda;
    T s;
    T delta;
    T delta1;
    T pre;  // 2 + qp
};

template <Scalar T>
Common<T> common(long n, const TrialParams& params, const RunsPattern& pattern) {
    Common<T> c;
    c.md = make_model<T>(params, pattern);
    c.lambda = mean_formula<T>(n, params, pattern);
    c.s = s_nk<T>(n, params, pattern);
    auto [d, d1] = delta_consts<T>(params, pattern);
    c.delta = d;
    c.delta1 = d1;
    c.pre = from_int<T>(2) + c.md.qp;
    return c;
}

template <Scalar T>
BoundReport<T> start(Family f, int parameters, long n, long n_min, const RunsPattern& pattern) {
    BoundReport<T> r;
    r.family = f;
    r.parameters = parameters;
    r.n = n;
    r.n_condition_ok = n >= n_min * pattern.k();
    if (!r.n_condition_ok) {
        r.status = BoundStatus::InapplicableN;
        r.notes = "needs n >= " + std::to_string(n_min) + "k";
    }
    return r;
}

const char* convention_note(OneParamConvention c) {
    switch (c) {
        case OneParamConvention::AlphaMaxCount: return "alpha fixed to floor(n/k)";
        case OneParamConvention::AlphaNMinusK: return "alpha fixed to n-k";
        case OneParamConvention::FixedAlpha: return "alpha fixed by caller";
        case OneParamConvention::FixedP: return "p fixed by caller";
    }
    return "";
}

// Returns the fixed alpha, or nothing when p is the fixed parameter.
template <Scalar T>
std::optional<T> one_param_alpha(long n, const RunsPattern& pattern, const BoundOptions& opts) {
    switch (opts.convention) {
        case OneParamConvention::AlphaMaxCount: return from_int<T>(pattern.max_count(n));
        case OneParamConvention::AlphaNMinusK: return from_int<T>(n - pattern.k());
        case OneParamConvention::FixedAlpha:
            if (!opts.fixed) throw std::invalid_argument("fixed-alpha convention needs a value");
            return from_rational<T>(*opts.fixed);
        case OneParamConvention::FixedP:
            if (!opts.fixed) throw std::invalid_argument("fixed-p convention needs a value");
            return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace

template <Scalar T>
BoundReport<T> bound_poisson_one(long n, const TrialParams& params, const RunsPattern& pattern) {
    auto r = start<T>(Family::Poisson, 1, n, 3, pattern);
    if (!r.n_condition_ok) return r;
    const auto c = common<T>(n, params, pattern);
    const auto& md = c.md;
    const long k = md.k;
    r.target = PoissonTarget<T>{c.lambda};
    T brace = from_int<T>(n - k) * c.delta + md.qp * from_int<T>(k + 1) * c_const<T>(1, n, pattern) +
              c_const<T>(2, n, pattern);
    T factor = c.pre * md.a / (md.q * (from_int<T>(1) + from_int<T>(n - k - 1) * md.p));
    r.bound = factor * brace;
    return r;
}

template <Scalar T>
BoundReport<T> bound_pb_one(long n, const TrialParams& params, const RunsPattern& pattern,
                            const BoundOptions& opts) {
    auto r = start<T>(Family::PseudoBinomial, 1, n, 3, pattern);
    if (!r.n_condition_ok) return r;
    r.notes = convention_note(opts.convention);
    const auto c = common<T>(n, params, pattern);
    const auto& md = c.md;
    const long k = md.k;

    T alpha, p;
    if (auto a = one_param_alpha<T>(n, pattern, opts)) {
        alpha = *a;
        if (!(alpha > 0)) {
            r.status = BoundStatus::Degenerate;
            return r;
        }
        p = c.lambda / alpha;
    } else {
        p = from_rational<T>(*opts.fixed);
        alpha = c.lambda / p;
    }
    T fl = floor_of<T>(alpha);
    if (!(p > 0 && p < 1) || fl < 1) {
        r.status = BoundStatus::Degenerate;
        return r;
    }
    r.target = PseudoBinomialTarget<T>{alpha, p};
    T qv = from_int<T>(1) - p;
    T brace = from_int<T>(n - k) * (p + c.delta * md.a) +
              md.qp * from_int<T>(k + 1) * c_const<T>(1, n, pattern) * md.a + c_const<T>(2, n, pattern) * md.a;
    T factor = c.pre * md.a / (fl * p * qv);
    r.bound = factor * brace;
    return r;
}

template <Scalar T>
BoundReport<T> bound_nb_one(long n, const TrialParams& params, const RunsPattern& pattern,
                            const BoundOptions& opts) {
    auto r = start<T>(Family::NegativeBinomial, 1, n, 3, pattern);
    if (!r.n_condition_ok) return r;
    r.notes = convention_note(opts.convention);
    const auto c = common<T>(n, params, pattern);
    const auto& md = c.md;
    const long k = md.k;
    const T one = from_int<T>(1);

    // mean alpha qhat / phat = lambda
    T alpha, qh;
    if (auto a = one_param_alpha<T>(n, pattern, opts)) {
        alpha = *a;
        if (!(alpha > 0)) {
            r.status = BoundStatus::Degenerate;
            return r;
        }
        qh = c.lambda / (alpha + c.lambda);
    } else {
        T ph = from_rational<T>(*opts.fixed);
        if (!(ph > 0 && ph < 1)) {
            r.status = BoundStatus::Degenerate;
            return r;
        }
        qh = one - ph;
        alpha = c.lambda * ph / qh;
    }
    T ph = one - qh;
    if (!(alpha * qh > 0)) {
        r.status = BoundStatus::Degenerate;
        return r;
    }
    r.target = NegativeBinomialTarget<T>{alpha, ph};
    T brace = from_int<T>(n - k) * (qh + c.delta * ph * md.a) +
              (md.qp * from_int<T>(k + 1) * c_const<T>(1, n, pattern) + c_const<T>(2, n, pattern)) * ph * md.a;
    T factor = c.pre * md.a / (alpha * qh);
    r.bound = factor * brace;
    return r;
}

template <Scalar T>
BoundReport<T> bound_pb_two(long n, const TrialParams& params, const RunsPattern& pattern,
                            const BoundOptions& opts) {
    auto r = start<T>(Family::PseudoBinomial, 2, n, 5, pattern);
    if (!r.n_condition_ok) return r;
    const auto c = common<T>(n, params, pattern);
    const auto& md = c.md;
    const long k = md.k;
    r.snk_sign_ok = c.s > 0;
    if (!r.snk_sign_ok) {
        r.status = BoundStatus::InapplicableSnk;
        r.notes = "needs s_nk > 0";
        return r;
    }
    auto m = match_two_parameter<T>(n, params, pattern, Family::PseudoBinomial);
    T denom_alpha = opts.floor_alpha_two_param ? floor_of<T>(m.alpha) : m.alpha;
    if (!(m.p > 0 && m.p < 1) || floor_of<T>(m.alpha) < 1) {
        r.status = BoundStatus::Degenerate;
        return r;
    }
    r.target = PseudoBinomialTarget<T>{m.alpha, m.p};
    if (!opts.floor_alpha_two_param) r.notes = "alpha not floored in the prefactor";

    auto C = [&](int i) { return c_const<T>(i, n, pattern); };
    const T qp = md.qp;
    const T two = from_int<T>(2);
    T first = (from_int<T>(4 * (n - k)) * c.delta1 + (qp + two * c.delta) * C(2) + C(3) + C(4) +
               qp * qp / two * C(6)) * md.a;
    T second = (from_int<T>(n - k) * c.delta + C(2) + C(5)) * m.p;
    T factor = two * c.pre * md.a * md.a / (denom_alpha * m.p * (from_int<T>(1) - m.p));
    T tv = tv_consecutive<T>(n - 3 * k - 3, params, pattern);
    r.bound = factor * (first + second) * tv;
    return r;
}

template <Scalar T>
BoundReport<T> bound_nb_two(long n, const TrialParams& params, const RunsPattern& pattern,
                            const BoundOptions& opts) {
    auto r = start<T>(Family::NegativeBinomial, 2, n, 5, pattern);
    if (!r.n_condition_ok) return r;
    const auto c = common<T>(n, params, pattern);
    const auto& md = c.md;
    const long k = md.k;
    r.snk_sign_ok = c.s < 0;
    if (!r.snk_sign_ok) {
        r.status = BoundStatus::InapplicableSnk;
        r.notes = "needs s_nk < 0";
        return r;
    }
    auto m = match_two_parameter<T>(n, params, pattern, Family::NegativeBinomial);
    r.target = NegativeBinomialTarget<T>{m.alpha, m.p};
    if (!opts.assume_c7) {
        r.status = BoundStatus::BlockedC7;
        r.notes = "c7 has no formula; rerun with the c7 assumption to get a value";
        return r;
    }
    r.c7_assumed = true;
    r.notes = "ASSUMED(c7): c7 replaced by c6";

    auto C = [&](int i) { return c_const<T>(i, n, pattern); };
    const T qp = md.qp;
    const T two = from_int<T>(2);
    const T ph = m.p;
    const T qh = from_int<T>(1) - m.p;
    T c7 = C(6);
    T first = (from_int<T>(4 * (n - k)) * c.delta1 + (two * c.delta + qp) * C(3) + C(4) + qp * C(5) +
               qp * qp / two * c7) * ph * md.a;
    T second = (from_int<T>(n - k) * c.delta + C(3) + qp * C(6)) * qh;
    T factor = two * c.pre * md.a * md.a / (m.alpha * qh);
    T tv = tv_consecutive<T>(n - 3 * k - 2, params, pattern);
    r.bound = factor * (first + second) * tv;
    return r;
}

template <Scalar T>
BoundReport<T> compute_bound(Family family, int parameters, long n, const TrialParams& params,
                             const RunsPattern& pattern, const BoundOptions& opts) {
    if (parameters == 1) {
        switch (family) {
            case Family::Poisson: return bound_poisson_one<T>(n, params, pattern);
            case Family::PseudoBinomial: return bound_pb_one<T>(n, params, pattern, opts);
            case Family::NegativeBinomial: return bound_nb_one<T>(n, params, pattern, opts);
        }
    }
    if (parameters == 2) {
        if (family == Family::PseudoBinomial) return bound_pb_two<T>(n, params, pattern, opts);
        if (family == Family::NegativeBinomial) return bound_nb_two<T>(n, params, pattern, opts);
    }
    throw std::invalid_argument("no " + std::to_string(parameters) + "-parameter bound for " + family_name(family));
}

std::vector<TableCell> reference_table_cells() {
    std::vector<TableCell> cells;
    const int shapes[3][3] = {{3, 4, 50}, {3, 5, 150}, {4, 5, 250}};
    for (const auto& s : shapes) {
        for (int hundredths = 11; hundredths <= 14; ++hundredths) {
            cells.push_back({s[0], s[1], s[2], Rational(hundredths, 100)});
        }
    }
    return cells;
}

TrialParams reference_table_params(const Rational& q) {
    return TrialParams::unnormalized(Rational(89, 100), q);
}

BoundOptions reference_table_options(bool assume_c7) {
    BoundOptions o;
    o.convention = OneParamConvention::AlphaMaxCount;
    o.floor_alpha_two_param = false;
    o.assume_c7 = assume_c7;
    return o;
}

#define KRUNS_INSTANTIATE(T)                                                                            \
    template struct BoundReport<T>;                                                                      \
    template T match_poisson<T>(long, const TrialParams&, const RunsPattern&);                           \
    template TwoParamMatch<T> match_two_parameter<T>(long, const TrialParams&, const RunsPattern&, Family); \
    template BoundReport<T> bound_poisson_one<T>(long, const TrialParams&, const RunsPattern&);          \
    template BoundReport<T> bound_pb_one<T>(long, const TrialParams&, const RunsPattern&, const BoundOptions&); \
    template BoundReport<T> bound_nb_one<T>(long, const TrialParams&, const RunsPattern&, const BoundOptions&); \
    template BoundReport<T> bound_pb_two<T>(long, const TrialParams&, const RunsPattern&, const BoundOptions&); \
    template BoundReport<T> bound_nb_two<T>(long, const TrialParams&, const RunsPattern&, const BoundOptions&); \
    template BoundReport<T> compute_bound<T>(Family, int, long, const TrialParams&, const RunsPattern&,  \
                                             const BoundOptions&);

KRUNS_INSTANTIATE(double)
KRUNS_INSTANTIATE(Rational)

}  // namespace kruns
