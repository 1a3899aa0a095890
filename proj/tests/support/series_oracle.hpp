#pragma once

// Independent expansion of the generating function of the C_s polynomials,
//   1 / ((k+2) - (k+1) z - a (t-1) z^k (2 - z)),
// at a fixed numeric t by plain power-series long division in z.

#include <vector>

#include "kruns/core.hpp"

namespace kruns::testing {

template <Scalar T>
std::vector<T> c_series_at(const T& t, long s_max, const TrialParams& params, const RunsPattern& pattern) {
    const int k = pattern.k();
    const T a = a_of_p<T>(params, pattern);
    const T u = a * (t - from_int<T>(1));
    std::vector<T> den(static_cast<std::size_t>(k + 2), from_int<T>(0));
    den[0] = from_int<T>(k + 2);
    den[1] = from_int<T>(-(k + 1));
    den[static_cast<std::size_t>(k)] -= from_int<T>(2) * u;
    den[static_cast<std::size_t>(k + 1)] += u;

    std::vector<T> c(static_cast<std::size_t>(s_max + 1), from_int<T>(0));
    for (long s = 0; s <= s_max; ++s) {
        T acc = from_int<T>(s == 0 ? 1 : 0);
        for (long j = 1; j <= s && j < static_cast<long>(den.size()); ++j) {
            acc -= den[static_cast<std::size_t>(j)] * c[static_cast<std::size_t>(s - j)];
        }
        c[static_cast<std::size_t>(s)] = acc / den[0];
    }
    return c;
}

}  // namespace kruns::testing
