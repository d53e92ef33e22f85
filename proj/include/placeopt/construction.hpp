#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "placeopt/coefficients.hpp"
#include "placeopt/errors.hpp"
#include "placeopt/flow.hpp"
#include "placeopt/linalg.hpp"
#include "placeopt/optimality.hpp"
#include "placeopt/placement.hpp"
#include "placeopt/sensors.hpp"

namespace placeopt {

/// Split of the squared weights (on the non-increasing ordering) into three
/// triangle sides, plus the two interior angles adjacent to the first side.
/// Drives the planar construction: a closed triangle of doubled-angle
/// resultants yields a tight bearing set after halving the angles.
struct TriangleDecomposition {
    int n0 = 0;  // 1-based split index into the sorted sequence
    double l1 = 0.0, l2 = 0.0, l3 = 0.0;
    double alpha12 = 0.0, alpha13 = 0.0;
};

inline TriangleDecomposition triangle_decomposition(const CoefficientSequence& coeffs) {
    const int n = coeffs.size();
    if (n < 2) throw contract_error("triangle decomposition needs n >= 2");
    if (!is_regular(coeffs, 2))
        throw infeasible_error(
            "no tight planar placement exists: the largest squared weight exceeds half the "
            "total squared weight");
    const double total = coeffs.sum_squares();
    const double half = 0.5 * total;
    const double slack = 1e-12 * total;

    // smallest split with prefix(n0-1) <= half <= prefix(n0) on sorted squares
    int n0 = -1;
    double prefix = 0.0;  // sum of the first n0-1 sorted squares
    for (int k = 2; k <= n; ++k) {
        const double ck = coeffs.sorted_value(k - 2);
        const double with_prev = prefix + ck * ck;  // prefix(k-1)
        const double ck0 = coeffs.sorted_value(k - 1);
        if (with_prev <= half + slack && with_prev + ck0 * ck0 >= half - slack) {
            n0 = k;
            prefix = with_prev;
            break;
        }
        prefix = with_prev;
    }
    if (n0 < 0) throw internal_error("triangle decomposition: no split index found");

    TriangleDecomposition tri;
    tri.n0 = n0;
    tri.l1 = prefix;
    tri.l2 = coeffs.sorted_value(n0 - 1) * coeffs.sorted_value(n0 - 1);
    tri.l3 = std::max(0.0, total - tri.l1 - tri.l2);
    tri.alpha12 = std::acos(
        std::clamp((tri.l1 * tri.l1 + tri.l2 * tri.l2 - tri.l3 * tri.l3) /
                       (2.0 * tri.l1 * tri.l2),
                   -1.0, 1.0));
    tri.alpha13 = tri.l3 > slack
                      ? std::acos(std::clamp(
                            (tri.l1 * tri.l1 + tri.l3 * tri.l3 - tri.l2 * tri.l2) /
                                (2.0 * tri.l1 * tri.l3),
                            -1.0, 1.0))
                      : 0.0;
    return tri;
}

/// Tight planar bearing set for any regular weight sequence: rank the
/// weights, split them by the triangle decomposition, assign the three
/// halved angles, then flip each bearing so its first visible entry is
/// positive and map back to the input order. Ranges are left at one.
inline Placement<2> construct_2d(const CoefficientSequence& coeffs) {
    const auto tri = triangle_decomposition(coeffs);
    const int n = coeffs.size();
    const double th_mid = (std::numbers::pi + tri.alpha12) / 2.0;
    const double th_tail = (std::numbers::pi - tri.alpha13) / 2.0;
    std::vector<Vec<2>> bearings(static_cast<std::size_t>(n));
    for (int rank = 0; rank < n; ++rank) {
        double th = 0.0;
        if (rank < tri.n0 - 1)
            th = 0.0;
        else if (rank == tri.n0 - 1)
            th = th_mid;
        else
            th = th_tail;
        Vec<2> g{{std::cos(th), std::sin(th)}};
        detail::normalize_column_sign(g);
        bearings[static_cast<std::size_t>(coeffs.sorted_index(rank))] = g;
    }
    return Placement<2>::from_bearings(bearings);
}

/// n == d: the canonical axis-aligned orthogonal basis (optimal for any
/// weights).
template <int D>
Placement<D> construct_square(const CoefficientSequence& coeffs) {
    if (coeffs.size() != D)
        throw contract_error("square construction requires exactly n = d sensors");
    std::vector<Vec<D>> bearings(static_cast<std::size_t>(D));
    for (int i = 0; i < D; ++i) bearings[static_cast<std::size_t>(i)][i] = 1.0;
    return Placement<D>::from_bearings(bearings);
}

/// Entries x_j = sign_j * sqrt(sum c^2/d - c_j^2) completing the scaled
/// frame matrix to a scaled orthogonal square; exists iff the weights are
/// regular.
inline std::vector<double> augmentation_vector(const CoefficientSequence& coeffs, int d,
                                               const SignPattern& signs) {
    const int n = coeffs.size();
    if (n != d + 1) throw contract_error("augmentation vector requires n = d + 1");
    if (signs.size() != n) throw contract_error("augmentation vector: sign pattern size mismatch");
    if (!is_regular(coeffs, d))
        throw infeasible_error(
            "no tight placement exists: the weight sequence is irregular for this dimension");
    const double s2 = coeffs.sum_squares() / d;
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double cj = coeffs.value(j);
        x[static_cast<std::size_t>(j)] =
            signs[j] * std::sqrt(std::max(0.0, s2 - cj * cj));
    }
    return x;
}

namespace detail {

template <int D>
Placement<D> dplus1_from_augmentation(const CoefficientSequence& coeffs,
                                      const std::vector<double>& x) {
    const double s = std::sqrt(coeffs.sum_squares() / D);
    Mat<D + 1, 1> xm;
    for (int j = 0; j <= D; ++j) xm(j, 0) = x[static_cast<std::size_t>(j)];
    const auto f = svd_full(xm);
    // rows of the frame matrix: the orthogonal complement of x, scaled
    Mat<D, D + 1> phi;
    for (int r = 0; r < D; ++r)
        for (int c = 0; c <= D; ++c) phi(r, c) = s * f.u(c, r + 1);
    std::vector<Vec<D>> bearings;
    bearings.reserve(static_cast<std::size_t>(D + 1));
    for (int j = 0; j <= D; ++j) bearings.push_back(bearing_of(phi.col(j)));
    return Placement<D>::from_bearings(bearings);
}

}  // namespace detail

/// n == d + 1: unique tight placement (up to equivalence) built by
/// completing the augmentation vector to a scaled orthogonal square via the
/// singular value decomposition.
template <int D>
Placement<D> construct_dplus1(const CoefficientSequence& coeffs, const SignPattern& signs) {
    if (coeffs.size() != D + 1)
        throw contract_error("this construction requires exactly n = d + 1 sensors");
    const auto x = augmentation_vector(coeffs, D, signs);
    return detail::dplus1_from_augmentation<D>(coeffs, x);
}

template <int D>
Placement<D> construct_dplus1(const CoefficientSequence& coeffs) {
    return construct_dplus1<D>(coeffs, SignPattern::all_plus(coeffs.size()));
}

/// n == 5 in three dimensions: build the dual planar tight set for the
/// complementary weights sqrt(sum c^2/3 - c_j^2), then lift it through the
/// orthogonal complement of its row space.
inline Placement<3> construct_3d_five(const CoefficientSequence& coeffs) {
    if (coeffs.size() != 5) throw contract_error("the lifted construction requires n = 5");
    if (!is_regular(coeffs, 3))
        throw infeasible_error(
            "no tight placement exists: the weight sequence is irregular for dimension 3");
    const double s2 = coeffs.sum_squares() / 3.0;
    std::vector<double> dual(5);
    for (int j = 0; j < 5; ++j) {
        const double cj = coeffs.value(j);
        const double dj2 = s2 - cj * cj;
        if (dj2 <= 1e-12 * s2)
            throw infeasible_error(
                "lifted construction degenerates: a weight sits on the regularity boundary");
        dual[static_cast<std::size_t>(j)] = std::sqrt(dj2);
    }
    const CoefficientSequence dual_seq(dual);
    if (!is_regular(dual_seq, 2))
        throw internal_error("lifted construction: complementary weights are not regular");
    const Placement<2> planar = construct_2d(dual_seq);

    Mat<5, 2> a;  // transposed dual frame matrix
    for (int j = 0; j < 5; ++j)
        for (int r = 0; r < 2; ++r)
            a(j, r) = dual[static_cast<std::size_t>(j)] * planar.bearing(j)[r];
    const auto f = svd_full(a);
    const double s = std::sqrt(s2);
    std::vector<Vec<3>> bearings;
    bearings.reserve(5);
    for (int j = 0; j < 5; ++j) {
        Vec<3> phi_col;
        for (int r = 0; r < 3; ++r) phi_col[r] = s * f.u(j, r + 2);
        bearings.push_back(bearing_of(phi_col));
    }
    return Placement<3>::from_bearings(bearings);
}

/// Irregular weights: the k0 dominant sensors take the first k0 canonical
/// axes; the residual set is built tight inside the remaining axes (one
/// axis: collinear; two axes: the planar construction embedded).
template <int D>
Placement<D> construct_irregular(const CoefficientSequence& coeffs) {
    const auto rep = irregularity(coeffs, D);
    if (rep.k0 == 0)
        throw contract_error(
            "construct_irregular: the weight sequence is regular; use the regular path");
    const int n = coeffs.size();
    std::vector<Vec<D>> bearings(static_cast<std::size_t>(n));
    for (std::size_t t = 0; t < rep.dominant.size(); ++t) {
        Vec<D> e;
        e[static_cast<int>(t)] = 1.0;
        bearings[static_cast<std::size_t>(rep.dominant[t])] = e;
    }
    const int m = D - rep.k0;
    if (m == 1) {
        Vec<D> e;
        e[D - 1] = 1.0;
        for (int ri : rep.residual) bearings[static_cast<std::size_t>(ri)] = e;
    } else {
        // m == 2 (D == 3, k0 == 1): plane spanned by the last two axes
        std::vector<double> res_values;
        res_values.reserve(rep.residual.size());
        for (int ri : rep.residual) res_values.push_back(coeffs.value(ri));
        const Placement<2> planar = construct_2d(CoefficientSequence(res_values));
        for (std::size_t j = 0; j < rep.residual.size(); ++j) {
            Vec<D> g;
            g[D - 2] = planar.bearing(static_cast<int>(j))[0];
            g[D - 1] = planar.bearing(static_cast<int>(j))[1];
            bearings[static_cast<std::size_t>(rep.residual[j])] = g;
        }
    }
    return Placement<D>::from_bearings(bearings);
}

/// Concatenation of disjoint tight sub-placements; tight again, with the
/// squared-weight masses adding. Each part must already be tight for its own
/// weights.
template <int D>
Placement<D> union_placements(
    const std::vector<std::pair<Placement<D>, std::vector<double>>>& parts,
    double part_tol = 1e-9) {
    if (parts.empty()) throw contract_error("union: no parts given");
    for (std::size_t p = 0; p < parts.size(); ++p) {
        const auto& [pl, cvals] = parts[p];
        if (static_cast<int>(cvals.size()) != pl.size())
            throw contract_error("union: part " + std::to_string(p) +
                                 " weight count mismatch");
        const CoefficientSequence cs(cvals);
        const FrameOperator<D> op(cs, pl.bearings());
        if (detail::regular_deviation(op.matrix(), cs.sum_squares()) > part_tol)
            throw contract_error("union: part " + std::to_string(p) +
                                 " is not a tight placement");
        if ((pl.target() - parts.front().first.target()).norm() > 1e-9)
            throw contract_error("union: part " + std::to_string(p) +
                                 " has a different target");
    }
    std::vector<Vec<D>> rel;
    for (const auto& [pl, cvals] : parts)
        for (int i = 0; i < pl.size(); ++i) rel.push_back(pl.relative(i));
    return Placement<D>(parts.front().first.target(), std::move(rel));
}

namespace detail {

/// Greedy cover of the sorted weights by subsets of size 3..5, each regular
/// in dimension 3: peel the largest remaining weight together with the
/// smallest remaining ones (large weights need many small partners to pass
/// the fundamental inequality). Can miss feasible covers; callers fall back
/// to the numerical flow.
inline std::optional<std::vector<std::vector<int>>> greedy_regular_partition(
    const CoefficientSequence& coeffs) {
    std::vector<int> remaining = coeffs.sort_order();  // descending
    std::vector<std::vector<int>> parts;
    while (!remaining.empty()) {
        const int count = static_cast<int>(remaining.size());
        if (count < 3) return std::nullopt;
        bool placed = false;
        for (int size = 3; size <= 5 && !placed; ++size) {
            if (count < size) break;
            const int left = count - size;
            if (left != 0 && left < 3) continue;
            std::vector<int> subset;
            subset.push_back(remaining.front());
            for (int k = 0; k < size - 1; ++k)
                subset.push_back(remaining[static_cast<std::size_t>(count - 1 - k)]);
            std::vector<double> vals;
            vals.reserve(subset.size());
            for (int idx : subset) vals.push_back(coeffs.value(idx));
            if (is_regular(CoefficientSequence(vals), 3)) {
                parts.push_back(subset);
                remaining.erase(remaining.begin());
                remaining.erase(remaining.end() - (size - 1), remaining.end());
                placed = true;
            }
        }
        if (!placed) return std::nullopt;
    }
    return parts;
}

/// A regular sequence sitting on the fundamental-inequality boundary
/// (max c^2 = sum c^2 / d within relative 1e-9) admits an exact split: the
/// boundary weight takes the first axis and the rest is built tight in the
/// complement. Returns nothing when the residual fails its own regularity.
template <int D>
std::optional<Placement<D>> boundary_split(const CoefficientSequence& coeffs) {
    const double total = coeffs.sum_squares();
    const double m2 = coeffs.max_value() * coeffs.max_value();
    if (m2 < (total / D) * (1.0 - 1e-9)) return std::nullopt;
    const int n = coeffs.size();
    std::vector<Vec<D>> bearings(static_cast<std::size_t>(n));
    Vec<D> e1;
    e1[0] = 1.0;
    bearings[static_cast<std::size_t>(coeffs.sorted_index(0))] = e1;
    std::vector<int> residual;
    std::vector<double> res_values;
    for (int r = 1; r < n; ++r) {
        residual.push_back(coeffs.sorted_index(r));
        res_values.push_back(coeffs.sorted_value(r));
    }
    if constexpr (D == 2) {
        Vec<2> e2{{0.0, 1.0}};
        for (int ri : residual) bearings[static_cast<std::size_t>(ri)] = e2;
    } else {
        const CoefficientSequence res_seq(res_values);
        if (!is_regular(res_seq, 2)) return std::nullopt;
        const Placement<2> planar = construct_2d(res_seq);
        for (std::size_t j = 0; j < residual.size(); ++j) {
            Vec<3> g;
            g[1] = planar.bearing(static_cast<int>(j))[0];
            g[2] = planar.bearing(static_cast<int>(j))[1];
            bearings[static_cast<std::size_t>(residual[j])] = g;
        }
    }
    return Placement<D>::from_bearings(bearings);
}

/// Numerical fallback: descend the flow from seeded random bearings until a
/// placement certifies tight. Deterministic in the seed order; the first
/// certified result wins.
template <int D>
std::optional<Placement<D>> flow_refine(const CoefficientSequence& coeffs,
                                        std::uint64_t base_seed, int attempts) {
    FlowConfig config;
    config.dt = 1e-3;
    config.t_end = 400.0;
    config.convergence_tol = 1e-13;
    config.max_restarts = 0;
    for (int a = 0; a < attempts; ++a) {
        std::mt19937_64 rng(base_seed + static_cast<std::uint64_t>(a));
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<Vec<D>> bearings(static_cast<std::size_t>(coeffs.size()));
        for (auto& g : bearings) {
            double nr = 0.0;
            do {
                for (int k = 0; k < D; ++k) g[k] = gauss(rng);
                nr = g.norm();
            } while (nr < 1e-6);
            g = g / nr;
        }
        try {
            const auto traj = simulate<D>(Placement<D>::from_bearings(bearings), coeffs, config);
            if (traj.outcome == FlowOutcome::ConvergedOptimal)
                return traj.final_sample().placement;
        } catch (const error&) {
            // a diverged attempt just moves on to the next seed
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// Build an optimal placement for the given weights: dispatches to the
/// irregular assembly, the orthogonal basis, the planar construction, the
/// augmented square, the lifted five-sensor construction, or a partition
/// into tight subsets, in that order; when no analytic route applies the
/// numerical flow refines seeded random starts. The output always passes
/// certification before being returned.
template <int D>
Placement<D> construct(const CoefficientSequence& coeffs, std::uint64_t seed = 1) {
    static_assert(D == 2 || D == 3);
    const int n = coeffs.size();
    if (n < D) throw contract_error("construct: needs at least d sensors");

    std::optional<Placement<D>> result;
    double certify_tol = 1e-9;
    const auto rep = irregularity(coeffs, D);
    if (rep.k0 >= 1) {
        result = construct_irregular<D>(coeffs);
    } else if (n == D) {
        result = construct_square<D>(coeffs);
    } else if constexpr (D == 2) {
        result = construct_2d(coeffs);
    } else {
        if (n == D + 1) {
            result = construct_dplus1<D>(coeffs);
        } else if (n == 5) {
            try {
                result = construct_3d_five(coeffs);
            } catch (const infeasible_error&) {
                // regularity-boundary degeneracy; fall through to the flow
            }
        } else {
            if (const auto parts = detail::greedy_regular_partition(coeffs)) {
                std::vector<Vec<3>> bearings(static_cast<std::size_t>(n));
                bool ok = true;
                for (const auto& part : *parts) {
                    std::vector<double> vals;
                    vals.reserve(part.size());
                    for (int idx : part) vals.push_back(coeffs.value(idx));
                    try {
                        const Placement<3> sub = construct<3>(CoefficientSequence(vals), seed);
                        for (std::size_t j = 0; j < part.size(); ++j)
                            bearings[static_cast<std::size_t>(part[j])] =
                                sub.bearing(static_cast<int>(j));
                    } catch (const error&) {
                        ok = false;
                        break;
                    }
                }
                if (ok) result = Placement<3>::from_bearings(bearings);
            }
        }
        if (!result) {
            certify_tol = 1e-6;
            result = detail::boundary_split<D>(coeffs);
        }
        if (!result) {
            certify_tol = 1e-6;
            result = detail::flow_refine<D>(coeffs, seed, 5);
            if (!result)
                throw internal_error(
                    "construct: the numerical fallback found no certifiable placement");
        }
    }

    const auto cert = certify<D>(result->bearings(), coeffs, certify_tol);
    if (!cert.verdict) {
        std::ostringstream oss;
        oss << "construct: output failed certification (objective " << cert.objective
            << ", bound " << cert.bound << ", error " << cert.error << ")";
        throw internal_error(oss.str());
    }
    return *result;
}

}  // namespace placeopt
