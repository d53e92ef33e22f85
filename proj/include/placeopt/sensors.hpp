#pragma once

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "placeopt/coefficients.hpp"
#include "placeopt/errors.hpp"
#include "placeopt/linalg.hpp"
#include "placeopt/placement.hpp"

namespace placeopt {

enum class SensorKind { BearingOnly, RangeOnly, Rss };

/// Symbolic measurement model of each kind (metadata only; measurements are
/// never evaluated here).
constexpr std::string_view measurement_model(SensorKind kind) {
    switch (kind) {
        case SensorKind::BearingOnly: return "r/|r|";
        case SensorKind::RangeOnly: return "|r|";
        case SensorKind::Rss: return "ln|r|";
    }
    return "?";
}

constexpr std::string_view kind_name(SensorKind kind) {
    switch (kind) {
        case SensorKind::BearingOnly: return "bearing-only";
        case SensorKind::RangeOnly: return "range-only";
        case SensorKind::Rss: return "rss";
    }
    return "?";
}

struct SensorSpec {
    SensorKind kind;
    double sigma;  // measurement noise standard deviation
    double range;  // sensor-target distance; irrelevant to the weight of a
                   // range-only sensor

    SensorSpec(SensorKind k, double sigma_, double range_)
        : kind(k), sigma(sigma_), range(range_) {
        if (!(sigma > 0.0) || !std::isfinite(sigma))
            throw contract_error("sensor sigma must be positive");
        if (!(range > 0.0) || !std::isfinite(range))
            throw contract_error("sensor range must be positive");
    }
};

/// Sensor weight: 1/(sigma*range) for bearing-only and RSS sensors,
/// 1/sigma for range-only sensors.
inline double coefficient(const SensorSpec& spec) {
    switch (spec.kind) {
        case SensorKind::BearingOnly:
        case SensorKind::Rss: return 1.0 / (spec.sigma * spec.range);
        case SensorKind::RangeOnly: return 1.0 / spec.sigma;
    }
    throw contract_error("unknown sensor kind");
}

namespace detail {

inline SensorKind common_kind(const std::vector<SensorSpec>& specs) {
    if (specs.empty()) throw contract_error("sensor list must be non-empty");
    const SensorKind k = specs.front().kind;
    for (const auto& s : specs)
        if (s.kind != k)
            throw unsupported_error("networks with mixed sensor kinds are not supported");
    return k;
}

}  // namespace detail

/// Weights of the specs evaluated at the actual geometry: sigma comes from
/// each spec, the range from the placement, so the weights stay consistent
/// with the positions being analyzed.
template <int D>
CoefficientSequence coefficients_for(const Placement<D>& pl, const std::vector<SensorSpec>& specs) {
    if (static_cast<int>(specs.size()) != pl.size())
        throw contract_error("placement and sensor list differ in size");
    detail::common_kind(specs);
    std::vector<double> c;
    c.reserve(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const SensorSpec actual(specs[i].kind, specs[i].sigma, pl.range(static_cast<int>(i)));
        c.push_back(coefficient(actual));
    }
    return CoefficientSequence(std::move(c));
}

/// The d x d operator sum_i c_i^2 g_i g_i^T of a weighted bearing set, with
/// its spectrum. The extreme eigenvalues are the frame bounds.
template <int D>
class FrameOperator {
    static_assert(D == 2 || D == 3);

public:
    FrameOperator(const CoefficientSequence& coeffs, const std::vector<Vec<D>>& bearings) {
        if (coeffs.size() != static_cast<int>(bearings.size()))
            throw contract_error("frame operator: weights/bearings size mismatch");
        for (std::size_t i = 0; i < bearings.size(); ++i) {
            if (std::abs(bearings[i].norm() - 1.0) > 1e-9)
                throw contract_error("frame operator: bearing " + std::to_string(i) +
                                     " is not unit length");
        }
        for (std::size_t i = 0; i < bearings.size(); ++i) {
            const double w = coeffs.value(static_cast<int>(i));
            matrix_ += (w * w) * outer(bearings[i], bearings[i]);
        }
        eigenvalues_ = sym_eigenvalues(matrix_);
        for (auto& mu : eigenvalues_)
            if (mu < 0.0 && mu >= -1e-12) mu = 0.0;  // PSD up to round-off
    }

    const Mat<D, D>& matrix() const { return matrix_; }
    const std::array<double, D>& eigenvalues() const { return eigenvalues_; }
    double lower_frame_bound() const { return eigenvalues_.back(); }
    double upper_frame_bound() const { return eigenvalues_.front(); }
    double mean_eigenvalue() const { return matrix_.trace() / D; }

private:
    Mat<D, D> matrix_;
    std::array<double, D> eigenvalues_{};
};

template <int D>
FrameOperator<D> frame_operator(const CoefficientSequence& coeffs,
                                const std::vector<Vec<D>>& bearings) {
    return FrameOperator<D>(coeffs, bearings);
}

template <int D>
FrameOperator<D> frame_operator(const Placement<D>& pl, const std::vector<SensorSpec>& specs) {
    return FrameOperator<D>(coefficients_for(pl, specs), pl.bearings());
}

/// Squared Frobenius norm of the operator; equals the sum of squared
/// eigenvalues and the frame potential of the weighted bearings.
template <int D>
double objective(const FrameOperator<D>& op) {
    return op.matrix().frobenius_sq();
}

/// Fisher information matrix of a single-kind network at a placement.
template <int D>
class Fim {
    static_assert(D == 2 || D == 3);

public:
    Fim(SensorKind kind, const CoefficientSequence& coeffs, const std::vector<Vec<D>>& bearings) {
        const FrameOperator<D> op(coeffs, bearings);
        if (kind == SensorKind::BearingOnly) {
            matrix_ = coeffs.sum_squares() * Mat<D, D>::identity() - op.matrix();
        } else {
            matrix_ = op.matrix();
        }
        eigenvalues_ = sym_eigenvalues(matrix_);
        for (auto& l : eigenvalues_)
            if (l < 0.0 && l >= -1e-12) l = 0.0;
    }

    const Mat<D, D>& matrix() const { return matrix_; }
    const std::array<double, D>& eigenvalues() const { return eigenvalues_; }
    double mean_eigenvalue() const { return matrix_.trace() / D; }

private:
    Mat<D, D> matrix_;
    std::array<double, D> eigenvalues_{};
};

template <int D>
Fim<D> fim(const Placement<D>& pl, const std::vector<SensorSpec>& specs) {
    const SensorKind kind = detail::common_kind(specs);
    return Fim<D>(kind, coefficients_for(pl, specs), pl.bearings());
}

/// det F against its upper bound (mean eigenvalue)^d, plus the deviation
/// ||F - mean*I||^2 that vanishes exactly at the bound.
struct CriteriaReport {
    double det_f = 0.0;
    double lambda_bar_pow_d = 0.0;
    double deviation = 0.0;
};

template <int D>
CriteriaReport criteria_report(const Fim<D>& f) {
    CriteriaReport rep;
    double prod = 1.0;
    for (double l : f.eigenvalues()) prod *= l;
    rep.det_f = prod;
    rep.lambda_bar_pow_d = std::pow(f.mean_eigenvalue(), D);
    const Mat<D, D> dev = f.matrix() - f.mean_eigenvalue() * Mat<D, D>::identity();
    rep.deviation = dev.frobenius_sq();
    return rep;
}

}  // namespace placeopt
