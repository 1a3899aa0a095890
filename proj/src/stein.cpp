#include "kruns/stein.hpp"

#include <cmath>
#include <limits>

#include "kruns/distributions.hpp"

namespace kruns {

std::string family_name(Family f) {
    switch (f) {
        case Family::Poisson: return "poisson";
        case Family::PseudoBinomial: return "pseudo-binomial";
        case Family::NegativeBinomial: return "negative-binomial";
    }
    return "unknown";
}

template <Scalar T>
GibbsSpec<T> gibbs_spec(const TargetFamily<T>& target) {
    const T one = from_int<T>(1);
    if (auto* po = std::get_if<PoissonTarget<T>>(&target)) {
        return GibbsSpec<T>{po->lambda, one, from_int<T>(0), -1};
    }
    if (auto* pb = std::get_if<PseudoBinomialTarget<T>>(&target)) {
        T w = pb->p / (one - pb->p);
        long end = static_cast<long>(to_double(floor_of<T>(pb->alpha)));
        return GibbsSpec<T>{w, pb->alpha, from_int<T>(-1), end};
    }
    const auto& nb = std::get<NegativeBinomialTarget<T>>(target);
    T w = one - nb.p;
    return GibbsSpec<T>{w, nb.alpha, one, -1};
}

namespace {

double log_add(double x, double y) {
    if (x == -std::numeric_limits<double>::infinity()) return y;
    if (y == -std::numeric_limits<double>::infinity()) return x;
    double hi = std::max(x, y);
    return hi + std::log1p(std::exp(std::min(x, y) - hi));
}

}  // namespace

TruncatedLaw materialize(const GibbsSpec<double>& spec, double tail_eps) {
    if (!(spec.w > 0)) throw std::invalid_argument("Gibbs weight w must be positive");
    auto ratio = [&](long m) { return spec.w * (spec.ratio_a + spec.ratio_b * static_cast<double>(m)) / static_cast<double>(m + 1); };

    std::vector<double> logh{0.0};
    double log_beta = 0.0;
    double tail = 0.0;
    if (spec.support_end >= 0) {
        for (long m = 0; m < spec.support_end; ++m) {
            double r = ratio(m);
            if (!(r > 0)) throw std::invalid_argument("Gibbs ratio is not positive on the support");
            logh.push_back(logh.back() + std::log(r));
            log_beta = log_add(log_beta, logh.back());
        }
    } else {
        const double limit = spec.w * spec.ratio_b;
        if (!(limit < 1)) throw std::invalid_argument("unbounded Gibbs law is not summable");
        const long cap = 50'000'000;
        for (long m = 0;; ++m) {
            double r = ratio(m);
            if (!(r > 0)) throw std::invalid_argument("Gibbs ratio is not positive on the support");
            // m -> r_m is monotone, so every later ratio is at most rho
            double rho = std::max(r, limit);
            if (rho < 1) {
                double log_rest = logh.back() + std::log(rho) - std::log1p(-rho);
                if (log_rest - log_beta < std::log(tail_eps)) {
                    tail = std::exp(log_rest - log_beta);
                    break;
                }
            }
            if (m >= cap) throw std::runtime_error("Gibbs law did not converge");
            logh.push_back(logh.back() + std::log(r));
            log_beta = log_add(log_beta, logh.back());
        }
    }
    TruncatedLaw law;
    law.probs.reserve(logh.size());
    for (double lh : logh) law.probs.push_back(std::exp(lh - log_beta));
    law.tail = tail;
    return law;
}

double gibbs_pmf(const GibbsSpec<double>& spec, long m) {
    if (m < 0 || (spec.support_end >= 0 && m > spec.support_end)) return 0.0;
    return materialize(spec)[m];
}

template <Scalar T>
T stein_apply(const GibbsSpec<T>& spec, const TestFunction<T>& g, long m) {
    // past the last support point gamma(m+1) = 0, so the ratio term drops out
    if (spec.support_end >= 0 && m >= spec.support_end) return -from_int<T>(m) * g(m);
    T v = spec.w * (spec.ratio_a + spec.ratio_b * from_int<T>(m)) * g(m + 1) - from_int<T>(m) * g(m);
    return v;
}

double stein_expectation(const GibbsSpec<double>& spec, const TestFunction<double>& g, const TruncatedLaw& law) {
    double s = 0.0;
    for (long m = 0; m < static_cast<long>(law.probs.size()); ++m) s += law[m] * stein_apply<double>(spec, g, m);
    return s;
}

template <Scalar T>
T stein_expectation(const GibbsSpec<T>& spec, const TestFunction<T>& g, const Pmf<T>& pmf) {
    T s = from_int<T>(0);
    for (long m = 0; m < static_cast<long>(pmf.size()); ++m) s += pmf[m] * stein_apply<T>(spec, g, m);
    return s;
}

template <Scalar T>
T perturbed_expectation(const TestFunction<T>& g, long n, const TrialParams& params,
                        const RunsPattern& pattern, const GibbsSpec<T>& spec) {
    const long k = pattern.k();
    if (n < k + 2) throw std::invalid_argument("the perturbed operator needs n >= k+2");
    if (spec.support_end >= 0) throw std::invalid_argument("the perturbed operator takes an unbounded spec");
    const auto md = make_model<T>(params, pattern);
    const auto seq = SequenceConstants<T>::make(params, pattern);
    const auto tab = pmf_recursive<T>(n, params, pattern);
    const long top = pattern.max_count(n);

    T total = from_int<T>(0);
    for (long m = 0; m <= top; ++m) total -= spec.ratio_a * spec.w * g(m + 1) * tab.at(m, n);

    const T wb = spec.w * spec.ratio_b;
    std::vector<std::vector<T>> B;
    for (long s = 0; s <= n - k - 1; ++s) B.push_back(coeff_B_row<T>(s, params, pattern));

    for (int i = 1; i <= 3; ++i) {
        for (long s = 0; s <= seq.d_limit(i, n); ++s) {
            T outer = md.a * seq.a_coeff(i) * seq.b(i, n - s);
            const long nu = n - k - s - i + 1;
            const auto& Bs = B[static_cast<std::size_t>(s)];
            for (long l = 0; l < static_cast<long>(Bs.size()); ++l) {
                T coef = outer * Bs[static_cast<std::size_t>(l)];
                T inner = from_int<T>(0);
                for (long m = 0; m <= top; ++m) {
                    T pm = tab.at(m, nu);
                    if (pm == 0) continue;
                    inner += (g(m + l + 1) - wb * g(m + l + 2)) * pm;
                }
                total += coef * inner;
            }
        }
    }
    return total;
}

#define KRUNS_INSTANTIATE(T)                                                                     \
    template GibbsSpec<T> gibbs_spec<T>(const TargetFamily<T>&);                                  \
    template T stein_apply<T>(const GibbsSpec<T>&, const TestFunction<T>&, long);                 \
    template T stein_expectation<T>(const GibbsSpec<T>&, const TestFunction<T>&, const Pmf<T>&);  \
    template T perturbed_expectation<T>(const TestFunction<T>&, long, const TrialParams&,         \
                                        const RunsPattern&, const GibbsSpec<T>&);

KRUNS_INSTANTIATE(double)
KRUNS_INSTANTIATE(Rational)

}  // namespace kruns
