#pragma once

#include <random>

#include "hout/tensor.hpp"

namespace hout::testing {

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Vector random_vector(std::mt19937_64& rng, int d, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    Vector v(d);
    for (int i = 0; i < d; ++i) v[i] = gauss(rng);
    return v;
}

inline Vector random_unit_vector(std::mt19937_64& rng, int d) {
    Vector v = random_vector(rng, d);
    while (v.norm() == 0.0) v = random_vector(rng, d);
    return v.normalized();
}

inline SymTensor random_symmetric_tensor(std::mt19937_64& rng, int order, int dim, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    SymTensor t(order, dim);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = gauss(rng);
    return symmetrize(t);
}

// Independent direct-summation oracle for the full contraction
// sum T_{i1..ik} v_{i1}...v_{ik}; deliberately naive.
inline double brute_contract_all(const SymTensor& t, const Vector& v) {
    double acc = 0.0;
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
        const auto idx = t.unravel(flat);
        double prod = t[flat];
        for (int m = 0; m < t.order(); ++m) prod *= v[idx[m]];
        acc += prod;
    }
    return acc;
}

// Same, leaving the first slot open.
inline Vector brute_contract_all_but_one(const SymTensor& t, const Vector& v) {
    Vector out = Vector::Zero(t.dim());
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
        const auto idx = t.unravel(flat);
        double prod = t[flat];
        for (int m = 1; m < t.order(); ++m) prod *= v[idx[m]];
        out[idx[0]] += prod;
    }
    return out;
}

}  // namespace hout::testing
