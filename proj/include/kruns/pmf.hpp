#pragma once

#include <cstddef>
#include <vector>

#include "kruns/rational.hpp"

namespace kruns {

// Law of M for n trials, indexed from 0. Out-of-range reads give 0.
template <Scalar T>
struct Pmf {
    long n = 0;
    std::vector<T> probs;

    T operator[](long m) const {
        if (m < 0 || m >= static_cast<long>(probs.size())) return from_int<T>(0);
        return probs[static_cast<std::size_t>(m)];
    }
    std::size_t size() const { return probs.size(); }

    T total() const {
        T s = from_int<T>(0);
        for (const auto& x : probs) s += x;
        return s;
    }
    T moment(int j) const {
        T s = from_int<T>(0);
        for (std::size_t m = 0; m < probs.size(); ++m) {
            T term = pow_int<T>(from_int<T>(static_cast<long>(m)), j) * probs[m];
            s += term;
        }
        return s;
    }
};

// Rows 0..n of the law of M; at(m, nu) is zero for nu < 0 or m off support.
template <Scalar T>
struct PmfTable {
    std::vector<Pmf<T>> rows;

    long n() const { return static_cast<long>(rows.size()) - 1; }
    const Pmf<T>& row(long nu) const { return rows.at(static_cast<std::size_t>(nu)); }
    T at(long m, long nu) const {
        if (nu < 0 || nu >= static_cast<long>(rows.size())) return from_int<T>(0);
        return rows[static_cast<std::size_t>(nu)][m];
    }
};

template <Scalar T>
Pmf<double> to_double_pmf(const Pmf<T>& in) {
    Pmf<double> out;
    out.n = in.n;
    out.probs.reserve(in.probs.size());
    for (const auto& x : in.probs) out.probs.push_back(to_double(x));
    return out;
}

}  // namespace kruns
