#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "placeopt/coefficients.hpp"
#include "placeopt/errors.hpp"
#include "placeopt/linalg.hpp"
#include "placeopt/optimality.hpp"
#include "placeopt/placement.hpp"
#include "placeopt/sensors.hpp"

namespace placeopt {

enum class Integrator { ExplicitEuler, RungeKutta4 };
enum class FlowOutcome { ConvergedOptimal, ConvergedCritical, TimedOut };

constexpr std::string_view outcome_name(FlowOutcome o) {
    switch (o) {
        case FlowOutcome::ConvergedOptimal: return "converged-optimal";
        case FlowOutcome::ConvergedCritical: return "converged-critical";
        case FlowOutcome::TimedOut: return "timed-out";
    }
    return "?";
}

struct FlowConfig {
    double dt = 1e-3;
    double t_end = 100.0;
    Integrator integrator = Integrator::RungeKutta4;
    /// Project each range back to its initial value after every step
    /// (pure flow only). Off by default so conservation is genuinely tested.
    bool renormalize = false;
    double convergence_tol = 1e-6;
    /// Declare a non-optimal critical point when the largest per-sensor
    /// velocity stays below stall_threshold for stall_window recorded
    /// samples while the optimality error is still above convergence_tol.
    int stall_window = 100;
    double stall_threshold = 1e-10;
    std::uint64_t seed = 0;
    int max_restarts = 3;
    /// Record every stride-th step; 0 keeps roughly 10^4 samples.
    int sample_stride = 0;
    /// Per-sensor required third-coordinate offsets; non-empty switches on
    /// the external altitude potential (range-only networks, d = 3).
    std::vector<double> altitude_targets;
    /// Altitude deviation allowed at convergence (altitude runs only).
    double altitude_tol = 1e-3;

    void validate(int n) const {
        if (!(dt > 0.0)) throw contract_error("flow: dt must be positive");
        if (!(t_end > dt)) throw contract_error("flow: t_end must exceed dt");
        if (!(convergence_tol > 0.0)) throw contract_error("flow: convergence_tol must be positive");
        if (stall_window < 1) throw contract_error("flow: stall_window must be >= 1");
        if (!(stall_threshold > 0.0)) throw contract_error("flow: stall_threshold must be positive");
        if (max_restarts < 0) throw contract_error("flow: max_restarts must be >= 0");
        if (!altitude_targets.empty() && static_cast<int>(altitude_targets.size()) != n)
            throw contract_error("flow: altitude_targets size must match the sensor count");
        if (!(altitude_tol > 0.0)) throw contract_error("flow: altitude_tol must be positive");
    }
};

template <int D>
struct FlowSample {
    double t = 0.0;
    Placement<D> placement;
    double lyapunov = 0.0;
    double optimality_error = 0.0;
    std::vector<double> gradient_norms;  // per-sensor velocity magnitudes
};

template <int D>
struct Trajectory {
    std::vector<FlowSample<D>> samples;
    FlowOutcome outcome = FlowOutcome::TimedOut;
    int restarts = 0;

    const FlowSample<D>& final_sample() const {
        if (samples.empty()) throw internal_error("trajectory has no samples");
        return samples.back();
    }
};

/// Per-sensor descent direction -P_i G g_i with P_i = I - g_i g_i^T; each
/// velocity is orthogonal to its own relative position, so the pure flow
/// conserves every sensor-target range.
template <int D>
std::vector<Vec<D>> control_velocity(const Placement<D>& pl, const CoefficientSequence& coeffs) {
    const FrameOperator<D> op(coeffs, pl.bearings());
    std::vector<Vec<D>> v;
    v.reserve(static_cast<std::size_t>(pl.size()));
    for (int i = 0; i < pl.size(); ++i) {
        const Vec<D>& g = pl.bearing(i);
        const Vec<D> gg = op.matrix() * g;
        v.push_back(-1.0 * (gg - g.dot(gg) * g));
    }
    return v;
}

/// Descent potential of the pure flow: one quarter of the optimality error.
template <int D>
double lyapunov(const Placement<D>& pl, const CoefficientSequence& coeffs) {
    return 0.25 * optimality_error<D>(pl.bearings(), coeffs);
}

namespace detail {

template <int D>
struct FlowState {
    std::vector<Vec<D>> rel;

    bool finite() const {
        for (const auto& r : rel)
            for (int i = 0; i < D; ++i)
                if (!std::isfinite(r[i])) return false;
        return true;
    }
};

template <int D>
struct FlowEval {
    std::vector<Vec<D>> velocities;
    double objective = 0.0;
    double potential = 0.0;       // descent potential guarded for monotonicity
    double error = 0.0;           // objective minus lower bound, clamped
    double max_altitude_dev = 0.0;
    double max_velocity = 0.0;
};

/// Shared velocity/potential evaluation for both flow variants. In the pure
/// variant the velocity is -P_i G g_i and the potential is (error)/4; with
/// altitude targets the velocity is the full negative gradient of
/// ||G||^2 + sum_i (r_i[2] - target_i)^2 through g_i = r_i/|r_i|.
template <int D>
FlowEval<D> evaluate_flow(const FlowState<D>& st, const CoefficientSequence& coeffs,
                          const std::vector<double>& altitudes, double bound, double t) {
    const int n = static_cast<int>(st.rel.size());
    FlowEval<D> out;
    out.velocities.resize(static_cast<std::size_t>(n));

    std::vector<Vec<D>> bearings(static_cast<std::size_t>(n));
    std::vector<double> ranges(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double nr = st.rel[static_cast<std::size_t>(i)].norm();
        if (!(nr > 1e-12))
            throw numerical_error("flow: sensor " + std::to_string(i) +
                                  " reached the target near t = " + std::to_string(t));
        ranges[static_cast<std::size_t>(i)] = nr;
        bearings[static_cast<std::size_t>(i)] = st.rel[static_cast<std::size_t>(i)] / nr;
    }

    Mat<D, D> g;
    for (int i = 0; i < n; ++i) {
        const double c = coeffs.value(i);
        g += (c * c) * outer(bearings[static_cast<std::size_t>(i)],
                             bearings[static_cast<std::size_t>(i)]);
    }
    out.objective = g.frobenius_sq();
    out.error = clamp_error(out.objective - bound, bound);

    const bool with_altitude = !altitudes.empty();
    for (int i = 0; i < n; ++i) {
        const Vec<D>& gi = bearings[static_cast<std::size_t>(i)];
        const Vec<D> ggi = g * gi;
        Vec<D> v = -1.0 * (ggi - gi.dot(ggi) * gi);  // -P_i G g_i
        if (with_altitude) {
            const double c = coeffs.value(i);
            v *= 4.0 * c * c / ranges[static_cast<std::size_t>(i)];
            const double dev = st.rel[static_cast<std::size_t>(i)][D - 1] -
                               altitudes[static_cast<std::size_t>(i)];
            v[D - 1] -= 2.0 * dev;
            out.max_altitude_dev = std::max(out.max_altitude_dev, std::abs(dev));
        }
        out.velocities[static_cast<std::size_t>(i)] = v;
        out.max_velocity = std::max(out.max_velocity, v.norm());
    }

    if (with_altitude) {
        double ext = 0.0;
        for (int i = 0; i < n; ++i) {
            const double dev = st.rel[static_cast<std::size_t>(i)][D - 1] -
                               altitudes[static_cast<std::size_t>(i)];
            ext += dev * dev;
        }
        out.potential = out.objective + ext;
    } else {
        out.potential = 0.25 * out.error;
    }
    return out;
}

template <int D>
std::vector<Vec<D>> velocities_at(const std::vector<Vec<D>>& rel,
                                  const CoefficientSequence& coeffs,
                                  const std::vector<double>& altitudes, double bound, double t) {
    FlowState<D> st{rel};
    return evaluate_flow<D>(st, coeffs, altitudes, bound, t).velocities;
}

}  // namespace detail

/// Integrate the gradient flow from the given placement. Terminates early
/// with ConvergedOptimal when the optimality error (and, with altitude
/// targets, the worst altitude deviation) drops to convergence_tol, with
/// ConvergedCritical when the velocities stall at a non-optimal critical
/// point, and with TimedOut at t_end otherwise. A step that increases the
/// descent potential beyond round-off raises step_size_error.
template <int D>
Trajectory<D> simulate(const Placement<D>& initial, const CoefficientSequence& coeffs,
                       const FlowConfig& config) {
    const int n = initial.size();
    if (coeffs.size() != n) throw contract_error("simulate: weight count mismatch");
    config.validate(n);
    const bool with_altitude = !config.altitude_targets.empty();
    if (with_altitude && D != 3)
        throw contract_error("altitude targets require a three-dimensional flow");

    const double bound = lower_bound(coeffs, D);
    const long total_steps = static_cast<long>(std::ceil(config.t_end / config.dt - 1e-9));
    long stride = config.sample_stride > 0 ? config.sample_stride
                                           : std::max(1L, total_steps / 10000L);

    detail::FlowState<D> state{std::vector<Vec<D>>(initial.size())};
    for (int i = 0; i < n; ++i) state.rel[static_cast<std::size_t>(i)] = initial.relative(i);
    const std::vector<double> initial_ranges = initial.ranges();

    Trajectory<D> traj;
    auto record = [&](double t, const detail::FlowEval<D>& ev) {
        std::vector<double> norms;
        norms.reserve(ev.velocities.size());
        for (const auto& v : ev.velocities) norms.push_back(v.norm());
        traj.samples.push_back(FlowSample<D>{t, Placement<D>(initial.target(), state.rel),
                                             with_altitude ? ev.potential : 0.25 * ev.error,
                                             ev.error, std::move(norms)});
    };

    auto eval = detail::evaluate_flow<D>(state, coeffs, config.altitude_targets, bound, 0.0);
    record(0.0, eval);

    auto converged = [&](const detail::FlowEval<D>& ev) {
        return ev.error <= config.convergence_tol &&
               (!with_altitude || ev.max_altitude_dev <= config.altitude_tol);
    };

    if (converged(eval)) {
        traj.outcome = FlowOutcome::ConvergedOptimal;
        return traj;
    }

    int stall_count = 0;
    const double dt = config.dt;
    for (long step = 1; step <= total_steps; ++step) {
        const double t_prev = (step - 1) * dt;
        const double t = step * dt;

        std::vector<Vec<D>> next(state.rel.size());
        if (config.integrator == Integrator::ExplicitEuler) {
            for (std::size_t i = 0; i < state.rel.size(); ++i)
                next[i] = state.rel[i] + dt * eval.velocities[i];
        } else {
            const auto& k1 = eval.velocities;
            std::vector<Vec<D>> tmp(state.rel.size());
            for (std::size_t i = 0; i < state.rel.size(); ++i)
                tmp[i] = state.rel[i] + 0.5 * dt * k1[i];
            const auto k2 = detail::velocities_at<D>(tmp, coeffs, config.altitude_targets,
                                                     bound, t_prev);
            for (std::size_t i = 0; i < state.rel.size(); ++i)
                tmp[i] = state.rel[i] + 0.5 * dt * k2[i];
            const auto k3 = detail::velocities_at<D>(tmp, coeffs, config.altitude_targets,
                                                     bound, t_prev);
            for (std::size_t i = 0; i < state.rel.size(); ++i)
                tmp[i] = state.rel[i] + dt * k3[i];
            const auto k4 = detail::velocities_at<D>(tmp, coeffs, config.altitude_targets,
                                                     bound, t_prev);
            for (std::size_t i = 0; i < state.rel.size(); ++i)
                next[i] = state.rel[i] +
                          (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }

        detail::FlowState<D> candidate{std::move(next)};
        if (!candidate.finite())
            throw numerical_error("flow: non-finite state at t = " + std::to_string(t) +
                                  "; last valid t = " + std::to_string(t_prev));
        if (config.renormalize && !with_altitude) {
            for (std::size_t i = 0; i < candidate.rel.size(); ++i) {
                const double nr = candidate.rel[i].norm();
                if (nr > 0.0) candidate.rel[i] *= initial_ranges[i] / nr;
            }
        }

        const double v_prev = eval.potential;
        auto next_eval =
            detail::evaluate_flow<D>(candidate, coeffs, config.altitude_targets, bound, t);
        if (next_eval.potential > v_prev + 1e-9 * std::max(1.0, v_prev))
            throw step_size_error(
                "flow: the descent potential increased across a step (dt = " +
                std::to_string(dt) + " is too large; decrease dt)");

        state = std::move(candidate);
        eval = std::move(next_eval);

        const bool is_sample = (step % stride == 0) || step == total_steps;
        bool done = false;
        if (converged(eval)) {
            traj.outcome = FlowOutcome::ConvergedOptimal;
            done = true;
        } else if (is_sample) {
            if (eval.max_velocity < config.stall_threshold)
                ++stall_count;
            else
                stall_count = 0;
            if (stall_count >= config.stall_window) {
                traj.outcome = FlowOutcome::ConvergedCritical;
                done = true;
            }
        }
        if (is_sample || done) record(t, eval);
        if (done) return traj;
    }
    traj.outcome = FlowOutcome::TimedOut;
    return traj;
}

template <int D>
Trajectory<D> simulate(const Placement<D>& initial, const std::vector<SensorSpec>& specs,
                       const FlowConfig& config) {
    const SensorKind kind = detail::common_kind(specs);
    if (!config.altitude_targets.empty() && kind != SensorKind::RangeOnly)
        throw contract_error("altitude targets are supported for range-only networks only");
    return simulate<D>(initial, coefficients_for(initial, specs), config);
}

namespace detail {

/// Rotate each bearing by `angle` radians about a random direction.
template <int D>
Placement<D> perturb_bearings(const Placement<D>& pl, double angle, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Vec<D>> bearings;
    bearings.reserve(static_cast<std::size_t>(pl.size()));
    for (int i = 0; i < pl.size(); ++i) {
        if constexpr (D == 2) {
            const double sign = gauss(rng) >= 0.0 ? 1.0 : -1.0;
            const auto u = OrthogonalTransform<2>::rotation(sign * angle);
            bearings.push_back(u.matrix * pl.bearing(i));
        } else {
            Vec<3> axis;
            double na = 0.0;
            do {
                for (int k = 0; k < 3; ++k) axis[k] = gauss(rng);
                na = axis.norm();
            } while (na < 1e-6);
            const auto u = OrthogonalTransform<3>::rotation(axis, angle);
            bearings.push_back(u.matrix * pl.bearing(i));
        }
    }
    return Placement<D>::from_bearings(pl.target(), bearings, pl.ranges());
}

}  // namespace detail

/// Run the flow, and on convergence to a non-optimal critical point (or a
/// timeout) retry from slightly perturbed initial bearings, up to
/// config.max_restarts times. The returned trajectory is the successful
/// run's (or the last attempt's), with the restart count filled in.
template <int D>
Trajectory<D> simulate_with_restarts(const Placement<D>& initial,
                                     const CoefficientSequence& coeffs,
                                     const FlowConfig& config) {
    Trajectory<D> traj = simulate<D>(initial, coeffs, config);
    int attempt = 0;
    while (traj.outcome != FlowOutcome::ConvergedOptimal && attempt < config.max_restarts) {
        ++attempt;
        std::mt19937_64 rng(config.seed + static_cast<std::uint64_t>(attempt) * 0x9e3779b97f4a7c15ull);
        const Placement<D> restart = detail::perturb_bearings(initial, 1e-2, rng);
        traj = simulate<D>(restart, coeffs, config);
        traj.restarts = attempt;
    }
    return traj;
}

template <int D>
Trajectory<D> simulate_with_restarts(const Placement<D>& initial,
                                     const std::vector<SensorSpec>& specs,
                                     const FlowConfig& config) {
    const SensorKind kind = detail::common_kind(specs);
    if (!config.altitude_targets.empty() && kind != SensorKind::RangeOnly)
        throw contract_error("altitude targets are supported for range-only networks only");
    return simulate_with_restarts<D>(initial, coefficients_for(initial, specs), config);
}

struct CompatibilityViolation {
    double t = 0.0;
    int sensor = 0;
    double altitude_deviation = 0.0;
};

struct CompatibilityReport {
    bool compatible = true;
    std::string note;
    std::optional<CompatibilityViolation> violation;
};

/// Heuristic check that the altitude potential cannot cancel the placement
/// gradient: along the sampled states, wherever the altitude gradient is
/// non-zero it must not be orthogonal to the relative position. States with
/// a vanishing altitude gradient are vacuous and only noted.
inline CompatibilityReport check_compatibility(const Trajectory<3>& traj,
                                               const FlowConfig& config) {
    if (config.altitude_targets.empty())
        throw contract_error("check_compatibility requires altitude targets");
    CompatibilityReport rep;
    bool any_active = false;
    for (const auto& s : traj.samples) {
        for (int i = 0; i < s.placement.size(); ++i) {
            const Vec<3>& r = s.placement.relative(i);
            const double dev = r[2] - config.altitude_targets[static_cast<std::size_t>(i)];
            if (std::abs(dev) <= 1e-12 * std::max(1.0, std::abs(config.altitude_targets[static_cast<std::size_t>(i)])))
                continue;  // zero gradient: vacuous here
            any_active = true;
            // gradient is along the vertical axis; orthogonality to r means
            // a horizontal relative position
            if (std::abs(r[2]) / r.norm() < 1e-9) {
                rep.compatible = false;
                rep.violation = CompatibilityViolation{s.t, i, dev};
                rep.note = "altitude gradient orthogonal to the relative position";
                return rep;
            }
        }
    }
    if (!any_active)
        rep.note = "altitude gradient vanished at every sampled state; check is vacuous";
    return rep;
}

}  // namespace placeopt
