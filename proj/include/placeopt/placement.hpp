#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "placeopt/errors.hpp"
#include "placeopt/linalg.hpp"

namespace placeopt {

/// Unit vector pointing from the target towards a sensor at relative
/// position r. Throws degenerate_geometry_error when r has zero length.
template <int D>
Vec<D> bearing_of(const Vec<D>& r) {
    const double n = r.norm();
    if (n == 0.0)
        throw degenerate_geometry_error("sensor coincides with the target: no bearing");
    if (!std::isfinite(n)) throw contract_error("bearing_of: non-finite input");
    return r / n;
}

/// Relative sensor-target geometry in dimension D: the target estimate and
/// one relative position per sensor, with bearings and ranges cached.
template <int D>
class Placement {
    static_assert(D == 2 || D == 3);

public:
    static constexpr int dimension = D;

    Placement(Vec<D> target, std::vector<Vec<D>> relative_positions)
        : target_(target), relative_(std::move(relative_positions)) {
        const int n = static_cast<int>(relative_.size());
        if (n < D)
            throw contract_error("placement needs at least d sensors (n >= d)");
        bearings_.reserve(relative_.size());
        ranges_.reserve(relative_.size());
        for (const auto& r : relative_) {
            bearings_.push_back(bearing_of(r));  // throws on a zero range
            ranges_.push_back(r.norm());
        }
    }

    /// Build from unit bearings and per-sensor ranges.
    static Placement from_bearings(Vec<D> target, const std::vector<Vec<D>>& bearings,
                                   const std::vector<double>& ranges) {
        if (bearings.size() != ranges.size())
            throw contract_error("from_bearings: bearings/ranges size mismatch");
        std::vector<Vec<D>> rel;
        rel.reserve(bearings.size());
        for (std::size_t i = 0; i < bearings.size(); ++i) {
            if (std::abs(bearings[i].norm() - 1.0) > 1e-9)
                throw contract_error("from_bearings: bearing " + std::to_string(i) +
                                     " is not unit length");
            if (!(ranges[i] > 0.0))
                throw contract_error("from_bearings: range " + std::to_string(i) +
                                     " must be positive");
            rel.push_back(ranges[i] * bearings[i]);
        }
        return Placement(target, std::move(rel));
    }

    /// Bearings with every range set to one.
    static Placement from_bearings(const std::vector<Vec<D>>& bearings) {
        return from_bearings(Vec<D>{}, bearings, std::vector<double>(bearings.size(), 1.0));
    }

    int size() const { return static_cast<int>(relative_.size()); }
    const Vec<D>& target() const { return target_; }
    const Vec<D>& relative(int i) const { return relative_[static_cast<std::size_t>(i)]; }
    const Vec<D>& bearing(int i) const { return bearings_[static_cast<std::size_t>(i)]; }
    double range(int i) const { return ranges_[static_cast<std::size_t>(i)]; }
    Vec<D> sensor_position(int i) const { return target_ + relative(i); }
    const std::vector<Vec<D>>& bearings() const { return bearings_; }
    const std::vector<double>& ranges() const { return ranges_; }

private:
    Vec<D> target_;
    std::vector<Vec<D>> relative_;
    std::vector<Vec<D>> bearings_;
    std::vector<double> ranges_;
};

/// A d x d matrix U with U^T U = I (rotation, reflection, or both).
template <int D>
struct OrthogonalTransform {
    Mat<D, D> matrix;

    explicit OrthogonalTransform(const Mat<D, D>& u) : matrix(u) {
        const Mat<D, D> g = u.transposed() * u - Mat<D, D>::identity();
        if (g.frobenius_norm() > 1e-12)
            throw contract_error("matrix is not orthogonal");
    }

    static OrthogonalTransform identity() { return OrthogonalTransform(Mat<D, D>::identity()); }

    /// Counter-clockwise plane rotation (D == 2).
    static OrthogonalTransform rotation(double angle)
        requires(D == 2)
    {
        Mat<2, 2> m;
        m(0, 0) = std::cos(angle);
        m(0, 1) = -std::sin(angle);
        m(1, 0) = std::sin(angle);
        m(1, 1) = std::cos(angle);
        return OrthogonalTransform(m);
    }

    /// Rotation about a (non-zero) axis by the given angle (D == 3).
    static OrthogonalTransform rotation(const Vec<3>& axis, double angle)
        requires(D == 3)
    {
        const Vec<3> u = bearing_of(axis);
        const double c = std::cos(angle), s = std::sin(angle);
        Mat<3, 3> m;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = (1.0 - c) * u[i] * u[j];
        m(0, 0) += c;
        m(1, 1) += c;
        m(2, 2) += c;
        m(0, 1) -= s * u[2];
        m(1, 0) += s * u[2];
        m(0, 2) += s * u[1];
        m(2, 0) -= s * u[1];
        m(1, 2) -= s * u[0];
        m(2, 1) += s * u[0];
        return OrthogonalTransform(m);
    }
};

/// Per-sensor +1/-1 flips about the target.
struct SignPattern {
    std::vector<int> signs;

    explicit SignPattern(std::vector<int> s) : signs(std::move(s)) {
        for (int v : signs)
            if (v != 1 && v != -1) throw contract_error("sign pattern entries must be +1 or -1");
    }

    static SignPattern all_plus(int n) { return SignPattern(std::vector<int>(static_cast<std::size_t>(n), 1)); }

    int size() const { return static_cast<int>(signs.size()); }
    int operator[](int i) const { return signs[static_cast<std::size_t>(i)]; }
};

/// Image of a placement under the equivalence moves: relabel sensors by perm,
/// flip selected sensors about the target, and apply a global orthogonal
/// transform. Sensor i of the input lands at slot perm[i] of the output:
/// r'_{perm(i)} = signs_i * U r_i. The target is unchanged.
template <int D>
Placement<D> transform_placement(const Placement<D>& pl, const OrthogonalTransform<D>& u,
                                 const SignPattern& signs, const std::vector<int>& perm) {
    const int n = pl.size();
    if (signs.size() != n || static_cast<int>(perm.size()) != n)
        throw contract_error("transform_placement: sign/permutation size mismatch");
    std::vector<bool> hit(perm.size(), false);
    for (int v : perm) {
        if (v < 0 || v >= n || hit[static_cast<std::size_t>(v)])
            throw contract_error("transform_placement: not a permutation");
        hit[static_cast<std::size_t>(v)] = true;
    }
    std::vector<Vec<D>> rel(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        rel[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] =
            static_cast<double>(signs[i]) * (u.matrix * pl.relative(i));
    return Placement<D>(pl.target(), std::move(rel));
}

}  // namespace placeopt
