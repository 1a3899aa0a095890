#include "kruns/distributions.hpp"

#include <stdexcept>

namespace kruns {

namespace {

template <Scalar T>
std::vector<T> base_row(long nu, const Model<T>& md) {
    if (nu < md.k) return {from_int<T>(1)};
    if (nu == md.k) return {from_int<T>(1), from_int<T>(0)};
    T qa = md.q * md.a;
    T rest = from_int<T>(1) - qa;
    return {rest, qa};  // nu == k+1
}

void require_nonnegative(long n) {
    if (n < 0) throw std::invalid_argument("trial count must be nonnegative");
}

template <Scalar T>
void gate_closed_form(long n) {
    if constexpr (!is_exact_v<T>) {
        if (n > kClosedFormDoubleLimit) {
            throw std::domain_error("closed form refused in double mode for n > 60; use exact mode");
        }
    }
}

// ptilde[m] = [t^m] (1-t)^i psi_n(t), psi_n being the z^n coefficient of
// 1/(1 - z - u z^k (1 - z + qp z^2)) with u = a(t-1).
template <Scalar T>
std::vector<T> psi_tilde(long n, int i, const Model<T>& md) {
    if (n < 0) return {};
    const long k = md.k;
    std::vector<T> out(static_cast<std::size_t>(n / k + i + 1), from_int<T>(0));
    for (long l = 0; l * k <= n; ++l) {
        for (long r = 0; l * k + r * (k + 1) <= n; ++r) {
            for (long v = 0; l * k + r * (k + 1) + v * (k + 2) <= n; ++v) {
                long j = n - l * k - r * (k + 1) - v * (k + 2);
                long L = l + r + v;
                T base = from_bigint<T>(multinomial(j + L, {j, l, r, v})) * pow_int<T>(md.a, L) *
                         pow_int<T>(md.qp, v);
                for (long m = 0; m <= L + i; ++m) {
                    T term = base * from_bigint<T>(binomial(L + i, m));
                    if ((l + v - m) % 2 != 0) term = -term;
                    out[static_cast<std::size_t>(m)] += term;
                }
            }
        }
    }
    return out;
}

template <Scalar T>
T entry(const std::vector<T>& v, long m) {
    if (m < 0 || m >= static_cast<long>(v.size())) return from_int<T>(0);
    return v[static_cast<std::size_t>(m)];
}

// psi_n at a given u = a(t-1).
template <Scalar T>
T psi_at(long n, const Model<T>& md, const T& u) {
    if (n < 0) return from_int<T>(0);
    const long k = md.k;
    T total = from_int<T>(0);
    for (long l = 0; l * k <= n; ++l) {
        for (long r = 0; l * k + r * (k + 1) <= n; ++r) {
            for (long v = 0; l * k + r * (k + 1) + v * (k + 2) <= n; ++v) {
                long j = n - l * k - r * (k + 1) - v * (k + 2);
                T term = from_bigint<T>(multinomial(j + l + r + v, {j, l, r, v})) * pow_int<T>(md.qp, v) *
                         pow_int<T>(u, l + r + v);
                if (r % 2 != 0) term = -term;
                total += term;
            }
        }
    }
    return total;
}

}  // namespace

template <Scalar T>
PmfTable<T> pmf_recursive(long n, const TrialParams& params, const RunsPattern& pattern) {
    require_nonnegative(n);
    const auto md = make_model<T>(params, pattern);
    const long k = md.k;
    PmfTable<T> tab;
    tab.rows.reserve(static_cast<std::size_t>(n + 1));
    for (long nu = 0; nu <= n; ++nu) {
        Pmf<T> row;
        row.n = nu;
        if (nu <= k + 1) {
            row.probs = base_row(nu, md);
        } else {
            const long L = nu / k;
            row.probs.resize(static_cast<std::size_t>(L + 1));
            for (long m = 0; m <= L; ++m) {
                auto P = [&](long mm, long v) { return tab.at(mm, v); };
                T bracket = (P(m, nu - k) - P(m - 1, nu - k)) - (P(m, nu - k - 1) - P(m - 1, nu - k - 1)) +
                            md.qp * (P(m, nu - k - 2) - P(m - 1, nu - k - 2));
                T val = P(m, nu - 1) - md.a * bracket;
                row.probs[static_cast<std::size_t>(m)] = val;
            }
        }
        tab.rows.push_back(std::move(row));
    }
    return tab;
}

template <Scalar T>
Polynomial<T> pgf_recursive(long n, const TrialParams& params, const RunsPattern& pattern) {
    require_nonnegative(n);
    const auto md = make_model<T>(params, pattern);
    const long k = md.k;
    std::vector<Polynomial<T>> phi;
    phi.reserve(static_cast<std::size_t>(n + 1));
    auto get = [&](long nu) -> const Polynomial<T>* {
        return nu < 0 ? nullptr : &phi[static_cast<std::size_t>(nu)];
    };
    for (long nu = 0; nu <= n; ++nu) {
        if (nu <= k + 1) {
            phi.push_back(Polynomial<T>{base_row(nu, md)});
            continue;
        }
        const long deg = nu / k;
        // X = phi_{nu-k} - phi_{nu-k-1} + qp phi_{nu-k-2}
        std::vector<T> X(static_cast<std::size_t>(deg + 1), from_int<T>(0));
        auto add = [&](const Polynomial<T>* poly, const T& c) {
            if (!poly) return;
            for (int j = 0; j <= poly->degree(); ++j) X[static_cast<std::size_t>(j)] += c * poly->coeffs[static_cast<std::size_t>(j)];
        };
        add(get(nu - k), from_int<T>(1));
        add(get(nu - k - 1), from_int<T>(-1));
        add(get(nu - k - 2), md.qp);
        Polynomial<T> next;
        next.coeffs.assign(static_cast<std::size_t>(deg + 1), from_int<T>(0));
        const Polynomial<T>& prev = phi.back();
        for (long m = 0; m <= deg; ++m) {
            // a (t - 1) X contributes a (X_{m-1} - X_m) to t^m
            T val = prev.coeff(static_cast<int>(m)) + md.a * (entry(X, m - 1) - entry(X, m));
            next.coeffs[static_cast<std::size_t>(m)] = val;
        }
        phi.push_back(std::move(next));
    }
    return phi.back();
}

template <Scalar T>
std::vector<std::vector<T>> moments_recursive(long n, int j_max, const TrialParams& params,
                                              const RunsPattern& pattern) {
    require_nonnegative(n);
    if (j_max < 1) throw std::invalid_argument("j_max must be at least 1");
    const auto md = make_model<T>(params, pattern);
    const long k = md.k;
    const std::size_t J = static_cast<std::size_t>(j_max + 1);
    std::vector<std::vector<T>> mu;
    mu.reserve(static_cast<std::size_t>(n + 1));
    auto M = [&](long nu, long l) {
        if (nu < 0) return from_int<T>(0);
        return mu[static_cast<std::size_t>(nu)][static_cast<std::size_t>(l)];
    };
    for (long nu = 0; nu <= n; ++nu) {
        std::vector<T> row(J, from_int<T>(0));
        row[0] = from_int<T>(1);
        if (nu == k + 1) {
            for (std::size_t j = 1; j < J; ++j) row[j] = md.q * md.a;
        } else if (nu > k + 1) {
            for (long j = 1; j <= j_max; ++j) {
                T acc = from_int<T>(0);
                for (long l = 0; l < j; ++l) {
                    T inner = M(nu - k, l) - M(nu - k - 1, l) + md.qp * M(nu - k - 2, l);
                    acc += from_bigint<T>(binomial(j, l)) * inner;
                }
                T val = M(nu - 1, j) + md.a * acc;
                row[static_cast<std::size_t>(j)] = val;
            }
        }
        mu.push_back(std::move(row));
    }
    return mu;
}

template <Scalar T>
T pgf_closed(long n, const TrialParams& params, const RunsPattern& pattern, const T& t) {
    require_nonnegative(n);
    gate_closed_form<T>(n);
    const auto md = make_model<T>(params, pattern);
    T u = md.a * (t - from_int<T>(1));
    T val = psi_at(n, md, u) - u * (psi_at(n - md.k, md, u) - md.q * psi_at(n - md.k - 1, md, u));
    return val;
}

template <Scalar T>
T pmf_closed(long m, long n, const TrialParams& params, const RunsPattern& pattern) {
    require_nonnegative(n);
    gate_closed_form<T>(n);
    if (m < 0 || m > pattern.max_count(n)) return from_int<T>(0);
    const auto md = make_model<T>(params, pattern);
    const auto p0 = psi_tilde(n, 0, md);
    const auto pk = psi_tilde(n - md.k, 0, md);
    const auto pk1 = psi_tilde(n - md.k - 1, 0, md);
    T val = entry(p0, m) + md.a * ((entry(pk, m) - entry(pk, m - 1)) - md.q * (entry(pk1, m) - entry(pk1, m - 1)));
    return val;
}

template <Scalar T>
StarTables<T> star_tables(const PmfTable<T>& table, long n, long l_max, const TrialParams& params,
                          const RunsPattern& pattern) {
    if (l_max < 1) throw std::invalid_argument("l_max must be at least 1");
    if (table.n() < n) throw std::invalid_argument("PMF table does not reach n");
    const auto md = make_model<T>(params, pattern);
    const long k = md.k;
    const long rows = n / k + 1;
    const long star_cols = k + l_max + 2;

    StarTables<T> st;
    st.n = n;
    st.l_max = l_max;
    st.star.assign(static_cast<std::size_t>(rows), std::vector<T>(static_cast<std::size_t>(star_cols), from_int<T>(0)));
    st.star2.assign(static_cast<std::size_t>(rows), std::vector<T>(static_cast<std::size_t>(l_max + 1), from_int<T>(0)));

    for (long m = 0; m < rows; ++m) {
        auto P = [&](long nu) { return table.at(m, nu); };
        auto& srow = st.star[static_cast<std::size_t>(m)];
        for (long l = 1; l < star_cols; ++l) {
            T acc = P(n - k) - P(n - k - l);
            for (long u = 0; u < l; ++u) {
                acc += md.qp * P(n - k - u - 2);
                if (u == n - k) acc -= P(n - k - u);
                if (u == n - k - 1) acc += md.q * P(n - k - u - 1);
            }
            srow[static_cast<std::size_t>(l)] = acc;
        }
        auto S = [&](long l) { return st.p_star(m, l); };
        auto& s2row = st.star2[static_cast<std::size_t>(m)];
        for (long l = 1; l <= l_max; ++l) {
            T acc = S(k) - S(k + l);
            for (long u = 0; u < l; ++u) {
                acc += md.qp * S(k + u + 2);
                if (u == n - k) acc -= S(k + u);
                if (u == n - k - 1) acc += md.q * S(k + u + 1);
            }
            s2row[static_cast<std::size_t>(l)] = acc;
        }
    }
    return st;
}

template <Scalar T>
T tv_consecutive(long n, const TrialParams& params, const RunsPattern& pattern) {
    require_nonnegative(n);
    const auto tab = pmf_recursive<T>(n, params, pattern);
    const auto& row = tab.row(n);
    T sum = from_int<T>(0);
    for (long m = 0; m <= pattern.max_count(n) + 1; ++m) sum += abs_of(T(row[m] - row[m - 1]));
    T half = sum / from_int<T>(2);
    return half;
}

template <Scalar T>
T tv_consecutive_expansion(long n, const TrialParams& params, const RunsPattern& pattern) {
    require_nonnegative(n);
    gate_closed_form<T>(n);
    const auto md = make_model<T>(params, pattern);
    const auto p1 = psi_tilde(n, 1, md);
    const auto pk = psi_tilde(n - md.k, 2, md);
    const auto pk1 = psi_tilde(n - md.k - 1, 2, md);
    T sum = from_int<T>(0);
    for (long m = 0; m <= pattern.max_count(n) + 1; ++m) {
        T v = entry(p1, m) + md.a * (entry(pk, m) - md.q * entry(pk1, m));
        sum += abs_of(v);
    }
    T half = sum / from_int<T>(2);
    return half;
}

#define KRUNS_INSTANTIATE(T)                                                                               \
    template PmfTable<T> pmf_recursive<T>(long, const TrialParams&, const RunsPattern&);                    \
    template Polynomial<T> pgf_recursive<T>(long, const TrialParams&, const RunsPattern&);                  \
    template std::vector<std::vector<T>> moments_recursive<T>(long, int, const TrialParams&,                \
                                                              const RunsPattern&);                          \
    template T pgf_closed<T>(long, const TrialParams&, const RunsPattern&, const T&);                       \
    template T pmf_closed<T>(long, long, const TrialParams&, const RunsPattern&);                           \
    template StarTables<T> star_tables<T>(const PmfTable<T>&, long, long, const TrialParams&,               \
                                          const RunsPattern&);                                              \
    template T tv_consecutive<T>(long, const TrialParams&, const RunsPattern&);                             \
    template T tv_consecutive_expansion<T>(long, const TrialParams&, const RunsPattern&);

KRUNS_INSTANTIATE(double)
KRUNS_INSTANTIATE(Rational)

}  // namespace kruns
