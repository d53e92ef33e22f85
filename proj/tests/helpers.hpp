#pragma once

#include <random>
#include <vector>

#include "placeopt/placeopt.hpp"

namespace helpers {

using placeopt::Mat;
using placeopt::Vec;

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

template <int D>
Vec<D> random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec<D> v;
    double n = 0.0;
    do {
        for (int k = 0; k < D; ++k) v[k] = gauss(rng);
        n = v.norm();
    } while (n < 1e-6);
    return v / n;
}

template <int D>
std::vector<Vec<D>> random_bearings(int n, std::mt19937_64& rng) {
    std::vector<Vec<D>> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(random_unit<D>(rng));
    return out;
}

inline std::vector<double> random_coefficients(int n, std::mt19937_64& rng, double lo = 0.2,
                                               double hi = 1.5) {
    std::uniform_real_distribution<double> uni(lo, hi);
    std::vector<double> c(static_cast<std::size_t>(n));
    for (auto& v : c) v = uni(rng);
    return c;
}

/// Random regular sequence of length n with respect to d (rejection sampled).
inline placeopt::CoefficientSequence random_regular(int n, int d, std::mt19937_64& rng) {
    for (;;) {
        placeopt::CoefficientSequence c(random_coefficients(n, rng, 0.6, 1.4));
        if (placeopt::is_regular(c, d)) return c;
    }
}

template <int D>
Mat<D, D> random_rotation(std::mt19937_64& rng) {
    if constexpr (D == 2) {
        std::uniform_real_distribution<double> uni(0.0, 2.0 * std::numbers::pi);
        return placeopt::OrthogonalTransform<2>::rotation(uni(rng)).matrix;
    } else {
        std::normal_distribution<double> gauss(0.0, 1.0);
        double w, x, y, z, n;
        do {
            w = gauss(rng);
            x = gauss(rng);
            y = gauss(rng);
            z = gauss(rng);
            n = std::sqrt(w * w + x * x + y * y + z * z);
        } while (n < 1e-6);
        w /= n;
        x /= n;
        y /= n;
        z /= n;
        Mat<3, 3> m;
        m(0, 0) = 1 - 2 * (y * y + z * z);
        m(0, 1) = 2 * (x * y - w * z);
        m(0, 2) = 2 * (x * z + w * y);
        m(1, 0) = 2 * (x * y + w * z);
        m(1, 1) = 1 - 2 * (x * x + z * z);
        m(1, 2) = 2 * (y * z - w * x);
        m(2, 0) = 2 * (x * z - w * y);
        m(2, 1) = 2 * (y * z + w * x);
        m(2, 2) = 1 - 2 * (x * x + y * y);
        return m;
    }
}

/// Haar-ish random orthogonal matrix: a rotation, half the time composed
/// with a coordinate reflection.
template <int D>
Mat<D, D> random_orthogonal(std::mt19937_64& rng) {
    Mat<D, D> m = random_rotation<D>(rng);
    if (rng() & 1u)
        for (int r = 0; r < D; ++r) m(r, 0) = -m(r, 0);
    return m;
}

inline std::vector<int> random_signs(int n, std::mt19937_64& rng) {
    std::vector<int> s(static_cast<std::size_t>(n));
    for (auto& v : s) v = (rng() & 1u) ? 1 : -1;
    return s;
}

inline std::vector<int> random_permutation(int n, std::mt19937_64& rng) {
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
    return p;
}

template <int D>
placeopt::Placement<D> random_placement(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.5, 3.0);
    std::vector<double> ranges(static_cast<std::size_t>(n));
    for (auto& r : ranges) r = uni(rng);
    return placeopt::Placement<D>::from_bearings(Vec<D>{}, random_bearings<D>(n, rng), ranges);
}

}  // namespace helpers
