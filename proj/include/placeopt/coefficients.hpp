#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "placeopt/errors.hpp"

namespace placeopt {

/// A sequence of positive sensor weights. Input order is preserved; the
/// non-increasing view needed by the irregularity test and the constructors
/// is exposed through sort_order(), so every result can be mapped back to
/// the original sensor indices.
class CoefficientSequence {
public:
    explicit CoefficientSequence(std::vector<double> values) : values_(std::move(values)) {
        if (values_.empty()) throw contract_error("coefficient sequence must be non-empty");
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!(values_[i] > 0.0) || !std::isfinite(values_[i]))
                throw contract_error("coefficient " + std::to_string(i) +
                                     " must be positive and finite");
        }
        sort_order_.resize(values_.size());
        std::iota(sort_order_.begin(), sort_order_.end(), 0);
        std::stable_sort(sort_order_.begin(), sort_order_.end(),
                         [&](int i, int j) { return values_[static_cast<std::size_t>(i)] >
                                                    values_[static_cast<std::size_t>(j)]; });
    }

    int size() const { return static_cast<int>(values_.size()); }
    double value(int i) const { return values_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& values() const { return values_; }

    /// Original index of the sensor with the rank-th largest coefficient.
    int sorted_index(int rank) const { return sort_order_[static_cast<std::size_t>(rank)]; }
    double sorted_value(int rank) const { return values_[static_cast<std::size_t>(sorted_index(rank))]; }
    const std::vector<int>& sort_order() const { return sort_order_; }

    double sum_squares() const {
        double s = 0.0;
        for (double c : values_) s += c * c;
        return s;
    }
    double sum_fourth_powers() const {
        double s = 0.0;
        for (double c : values_) s += c * c * c * c;
        return s;
    }
    double max_value() const { return sorted_value(0); }

private:
    std::vector<double> values_;
    std::vector<int> sort_order_;
};

struct IrregularityReport {
    int k0 = 0;
    int dimension = 0;
    bool regular = true;
    std::vector<int> dominant;  // original indices of the k0 largest weights
    std::vector<int> residual;  // original indices of the rest, still sorted
};

/// Irregularity of the sequence with respect to dimension d: the smallest
/// k >= 0 such that, on the non-increasing sequence, the (k+1)-th squared
/// value is at most the mean of the remaining squared mass spread over d-k
/// dimensions. Always 0 <= k0 <= d-1. Equality counts as satisfying the
/// threshold, with an absolute slack of 1e-12 times the total squared mass
/// so boundary sequences classify deterministically.
inline IrregularityReport irregularity(const CoefficientSequence& coeffs, int d) {
    const int n = coeffs.size();
    if (d < 1 || d > n)
        throw contract_error("irregularity: dimension must satisfy 1 <= d <= n");
    const double slack = 1e-12 * coeffs.sum_squares();
    double tail = coeffs.sum_squares();
    int k0 = d - 1;
    for (int k = 0; k < d; ++k) {
        const double head = coeffs.sorted_value(k);
        if (head * head <= tail / (d - k) + slack) {
            k0 = k;
            break;
        }
        tail -= head * head;
    }
    IrregularityReport rep;
    rep.k0 = k0;
    rep.dimension = d;
    rep.regular = (k0 == 0);
    for (int r = 0; r < k0; ++r) rep.dominant.push_back(coeffs.sorted_index(r));
    for (int r = k0; r < n; ++r) rep.residual.push_back(coeffs.sorted_index(r));
    return rep;
}

/// Fundamental inequality: max_j c_j^2 <= (1/d) sum_i c_i^2. Equivalent to
/// irregularity(coeffs, d).k0 == 0.
inline bool is_regular(const CoefficientSequence& coeffs, int d) {
    const int n = coeffs.size();
    if (d < 1 || d > n)
        throw contract_error("is_regular: dimension must satisfy 1 <= d <= n");
    const double total = coeffs.sum_squares();
    const double m = coeffs.max_value();
    return m * m <= total / d + 1e-12 * total;
}

/// Range form of the fundamental inequality for equal-noise bearing or RSS
/// networks: true when no sensor is much closer to the target than the rest.
inline bool range_regularity_check(const std::vector<double>& ranges, int d) {
    std::vector<double> inv;
    inv.reserve(ranges.size());
    for (std::size_t i = 0; i < ranges.size(); ++i) {
        if (!(ranges[i] > 0.0) || !std::isfinite(ranges[i]))
            throw contract_error("range " + std::to_string(i) + " must be positive");
        inv.push_back(1.0 / ranges[i]);
    }
    return is_regular(CoefficientSequence(std::move(inv)), d);
}

}  // namespace placeopt
