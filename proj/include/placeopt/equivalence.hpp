#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "placeopt/coefficients.hpp"
#include "placeopt/errors.hpp"
#include "placeopt/linalg.hpp"
#include "placeopt/placement.hpp"

namespace placeopt {

template <int D>
struct EquivalenceWitness {
    OrthogonalTransform<D> transform;
    SignPattern signs;
    std::vector<int> permutation;  // slot i of b matches sensor permutation[i] of a
};

template <int D>
struct EquivalenceResult {
    bool equivalent = false;
    std::optional<EquivalenceWitness<D>> witness;
};

namespace detail {

/// Permutations that only shuffle sensors whose weights coincide within
/// 1e-9 * max weight, enumerated as a product of per-group permutations.
class GroupedPermutations {
public:
    explicit GroupedPermutations(const CoefficientSequence& coeffs) {
        const int n = coeffs.size();
        const double tie = 1e-9 * coeffs.max_value();
        for (int r = 0; r < n; ++r) {
            if (r > 0 && coeffs.sorted_value(r - 1) - coeffs.sorted_value(r) > tie)
                groups_.emplace_back();
            if (groups_.empty()) groups_.emplace_back();
            groups_.back().push_back(coeffs.sorted_index(r));
        }
        for (auto& g : groups_) std::sort(g.begin(), g.end());
        arrangements_ = groups_;
        done_ = false;
    }

    bool done() const { return done_; }

    /// Current permutation: perm[slot] = source index, where the slots of
    /// each group are its members in ascending order.
    std::vector<int> current() const {
        std::size_t n = 0;
        for (const auto& g : groups_) n += g.size();
        std::vector<int> perm(n);
        for (std::size_t gi = 0; gi < groups_.size(); ++gi)
            for (std::size_t j = 0; j < groups_[gi].size(); ++j)
                perm[static_cast<std::size_t>(groups_[gi][j])] = arrangements_[gi][j];
        return perm;
    }

    void advance() {
        for (std::size_t gi = 0; gi < arrangements_.size(); ++gi) {
            if (std::next_permutation(arrangements_[gi].begin(), arrangements_[gi].end()))
                return;
            // wrapped around; carry into the next group
        }
        done_ = true;
    }

private:
    std::vector<std::vector<int>> groups_;
    std::vector<std::vector<int>> arrangements_;
    bool done_ = false;
};

}  // namespace detail

/// Decide whether two placements differ only by a sensor relabeling among
/// equal weights, per-sensor flips about the target, and one global
/// orthogonal transform. The search enumerates sign patterns and
/// weight-compatible permutations and aligns each candidate by orthogonal
/// Procrustes, so it is exact but combinatorial; sizes above n = 8 are
/// rejected. On success the witness satisfies
///   || signs_i * U * g_a[perm[i]] - g_b[i] || <= tol   for every i.
template <int D>
EquivalenceResult<D> placements_equivalent(const Placement<D>& a, const Placement<D>& b,
                                           const CoefficientSequence& coeffs,
                                           double tol = 1e-6) {
    const int n = a.size();
    if (b.size() != n) throw contract_error("placements_equivalent: sensor counts differ");
    if (coeffs.size() != n)
        throw contract_error("placements_equivalent: weight count mismatch");
    if (n > 8)
        throw unsupported_error("placements_equivalent supports at most 8 sensors");
    if (!(tol > 0.0)) throw contract_error("placements_equivalent: tol must be positive");

    // |dot| tables are invariant under every equivalence move; mismatch
    // beyond the tolerance budget rules a permutation out before alignment.
    std::vector<std::vector<double>> dots_a(static_cast<std::size_t>(n)),
        dots_b(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        dots_a[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(n));
        dots_b[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            dots_a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                a.bearing(i).dot(a.bearing(j));
            dots_b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                b.bearing(i).dot(b.bearing(j));
        }
    }
    const double prune_tol = 3.0 * tol + tol * tol;

    EquivalenceResult<D> out;
    for (detail::GroupedPermutations perms(coeffs); !perms.done(); perms.advance()) {
        const std::vector<int> perm = perms.current();

        bool ruled_out = false;
        for (int i = 0; i < n && !ruled_out; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double da = std::abs(
                    dots_a[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]
                          [static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])]);
                const double db =
                    std::abs(dots_b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
                if (std::abs(da - db) > prune_tol) {
                    ruled_out = true;
                    break;
                }
            }
        if (ruled_out) continue;

        // A global flip of all signs is absorbed by U -> -U composed with a
        // reflection, so the first sign can be pinned to +1.
        std::vector<int> signs(static_cast<std::size_t>(n), 1);
        const std::uint32_t sign_count = 1u << (n - 1);
        for (std::uint32_t bits = 0; bits < sign_count; ++bits) {
            for (int i = 1; i < n; ++i)
                signs[static_cast<std::size_t>(i)] = (bits >> (i - 1)) & 1u ? -1 : 1;

            // cheap sign screen on pairs with decisive dot products
            bool sign_bad = false;
            for (int i = 0; i < n && !sign_bad; ++i)
                for (int j = i + 1; j < n; ++j) {
                    const double db =
                        dots_b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                    if (std::abs(db) <= prune_tol) continue;
                    const double da =
                        signs[static_cast<std::size_t>(i)] * signs[static_cast<std::size_t>(j)] *
                        dots_a[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]
                              [static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])];
                    if (da * db < 0.0) {
                        sign_bad = true;
                        break;
                    }
                }
            if (sign_bad) continue;

            std::vector<Vec<D>> src, dst;
            src.reserve(static_cast<std::size_t>(n));
            dst.reserve(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                src.push_back(static_cast<double>(signs[static_cast<std::size_t>(i)]) *
                              a.bearing(perm[static_cast<std::size_t>(i)]));
                dst.push_back(b.bearing(i));
            }
            const Mat<D, D> u = procrustes(src, dst);
            double worst = 0.0;
            for (int i = 0; i < n; ++i)
                worst = std::max(worst,
                                 (u * src[static_cast<std::size_t>(i)] -
                                  dst[static_cast<std::size_t>(i)])
                                     .norm());
            if (worst <= tol) {
                out.equivalent = true;
                out.witness = EquivalenceWitness<D>{OrthogonalTransform<D>(u),
                                                    SignPattern(signs), perm};
                return out;
            }
        }
    }
    return out;
}

}  // namespace placeopt
