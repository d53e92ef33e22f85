// Command-line frontend: scenario files in, placement reports and
// trajectory tables out.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "placeopt/placeopt.hpp"

namespace {

// exit codes, stable for scripting
constexpr int kExitOk = 0;
constexpr int kExitNotOptimal = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitCritical = 3;
constexpr int kExitTimedOut = 4;
constexpr int kExitUsage = 64;
constexpr int kExitDegenerate = 65;
constexpr int kExitNumerical = 70;

struct CommonOpts {
    std::string scenario_path;
    std::string output;
    double tol = 1e-6;
    std::optional<std::uint64_t> seed;
    std::string format = "text";
};

void emit_report(const placeopt::PlacementReport& rep, const CommonOpts& opts) {
    if (opts.format == "structured")
        std::cout << placeopt::report_to_json(rep).dump(2) << "\n";
    else
        placeopt::write_report_text(std::cout, rep);
    if (!opts.output.empty()) {
        std::ofstream txt(opts.output + ".txt");
        placeopt::write_report_text(txt, rep);
        std::ofstream js(opts.output + ".json");
        js << placeopt::report_to_json(rep).dump(2) << "\n";
    }
}

template <int D>
placeopt::Vec<D> target_of(const placeopt::Scenario& sc) {
    placeopt::Vec<D> t;
    for (int k = 0; k < D; ++k) t[k] = sc.target[static_cast<std::size_t>(k)];
    return t;
}

std::vector<placeopt::SensorSpec> specs_with_ranges(const placeopt::Scenario& sc,
                                                    const std::vector<double>& ranges) {
    std::vector<placeopt::SensorSpec> specs;
    specs.reserve(sc.sensors.size());
    for (std::size_t i = 0; i < sc.sensors.size(); ++i)
        specs.emplace_back(sc.sensors[i].kind, sc.sensors[i].sigma, ranges[i]);
    return specs;
}

template <int D>
placeopt::Placement<D> placement_from_positions(const placeopt::Scenario& sc) {
    std::vector<placeopt::Vec<D>> rel;
    rel.reserve(sc.sensors.size());
    const auto target = target_of<D>(sc);
    for (const auto& s : sc.sensors) {
        placeopt::Vec<D> p;
        for (int k = 0; k < D; ++k) p[k] = (*s.position)[static_cast<std::size_t>(k)];
        rel.push_back(p - target);
    }
    return placeopt::Placement<D>(target, std::move(rel));
}

template <int D>
int run_construct(const placeopt::Scenario& sc, const CommonOpts& opts) {
    std::vector<double> cvals;
    std::vector<double> ranges;
    for (const auto& s : sc.sensors) {
        const double range = s.range.value_or(1.0);
        const placeopt::SensorSpec spec(s.kind, s.sigma, range);
        cvals.push_back(placeopt::coefficient(spec));
        ranges.push_back(range);
    }
    const placeopt::CoefficientSequence coeffs(cvals);
    const std::uint64_t seed = opts.seed.value_or(sc.flow.seed ? sc.flow.seed : 1);

    placeopt::Placement<D> bearing_set = [&] {
        switch (sc.method) {
            case placeopt::ConstructionMethod::Planar:
                if constexpr (D == 2) return placeopt::construct_2d(coeffs);
                throw placeopt::contract_error("planar method requires dimension 2");
            case placeopt::ConstructionMethod::Square:
                return placeopt::construct_square<D>(coeffs);
            case placeopt::ConstructionMethod::Augmented: {
                auto signs = sc.signs ? placeopt::SignPattern(*sc.signs)
                                      : placeopt::SignPattern::all_plus(coeffs.size());
                return placeopt::construct_dplus1<D>(coeffs, signs);
            }
            case placeopt::ConstructionMethod::Lifted:
                if constexpr (D == 3) return placeopt::construct_3d_five(coeffs);
                throw placeopt::contract_error("lifted method requires dimension 3");
            case placeopt::ConstructionMethod::Irregular:
                return placeopt::construct_irregular<D>(coeffs);
            case placeopt::ConstructionMethod::Auto: break;
        }
        return placeopt::construct<D>(coeffs, seed);
    }();

    const auto placed = placeopt::Placement<D>::from_bearings(
        target_of<D>(sc), bearing_set.bearings(), ranges);
    const auto specs = specs_with_ranges(sc, ranges);
    const auto rep = placeopt::build_report<D>(placed, specs, opts.tol);
    emit_report(rep, opts);
    return rep.verdict ? kExitOk : kExitNotOptimal;
}

template <int D>
int run_check(const placeopt::Scenario& sc, const CommonOpts& opts) {
    const auto pl = placement_from_positions<D>(sc);
    const auto specs = specs_with_ranges(sc, pl.ranges());
    const auto rep = placeopt::build_report<D>(pl, specs, opts.tol);
    emit_report(rep, opts);
    return rep.verdict ? kExitOk : kExitNotOptimal;
}

template <int D>
int run_simulate(const placeopt::Scenario& sc, const CommonOpts& opts) {
    if (!sc.has_flow)
        throw placeopt::contract_error("simulate needs a [flow] section in the scenario");
    const auto pl = placement_from_positions<D>(sc);
    const auto specs = specs_with_ranges(sc, pl.ranges());
    placeopt::FlowConfig config = sc.flow;
    if (opts.seed) config.seed = *opts.seed;

    const auto traj = placeopt::simulate_with_restarts<D>(pl, specs, config);

    if (!opts.output.empty()) {
        std::ofstream out(opts.output);
        placeopt::write_trajectory_csv(out, traj);
    } else {
        placeopt::write_trajectory_csv(std::cout, traj);
    }

    const auto& last = traj.final_sample();
    if (opts.format == "structured") {
        nlohmann::json j;
        j["outcome"] = std::string(placeopt::outcome_name(traj.outcome));
        j["restarts"] = traj.restarts;
        j["t_final"] = last.t;
        j["optimality_error"] = last.optimality_error;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "outcome " << placeopt::outcome_name(traj.outcome) << " after t = "
                  << last.t << " (restarts " << traj.restarts << "), optimality error "
                  << last.optimality_error << "\n";
    }
    switch (traj.outcome) {
        case placeopt::FlowOutcome::ConvergedOptimal: return kExitOk;
        case placeopt::FlowOutcome::ConvergedCritical: return kExitCritical;
        case placeopt::FlowOutcome::TimedOut: return kExitTimedOut;
    }
    return kExitNumerical;
}

int run_irregularity(const std::vector<double>& values, int d, const std::string& format) {
    const placeopt::CoefficientSequence coeffs(values);
    const auto rep = placeopt::irregularity(coeffs, d);
    if (format == "structured") {
        nlohmann::json j;
        j["k0"] = rep.k0;
        j["dimension"] = rep.dimension;
        j["regular"] = rep.regular;
        j["dominant"] = rep.dominant;
        j["residual"] = rep.residual;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "k0 = " << rep.k0 << " with respect to d = " << d << " ("
                  << (rep.regular ? "regular" : "irregular") << ")\n";
        std::cout << "dominant indices:";
        for (int i : rep.dominant) std::cout << " " << i;
        std::cout << "\nresidual indices:";
        for (int i : rep.residual) std::cout << " " << i;
        std::cout << "\n";
    }
    return kExitOk;
}

template <int D>
int dispatch(const std::string& cmd, const placeopt::Scenario& sc, const CommonOpts& opts) {
    if (cmd == "construct") {
        if (!sc.construct_mode)
            throw placeopt::contract_error(
                "construct needs a construct-mode scenario (ranges, no positions)");
        return run_construct<D>(sc, opts);
    }
    if (cmd == "check") {
        if (sc.construct_mode)
            throw placeopt::contract_error("check needs sensor positions in the scenario");
        return run_check<D>(sc, opts);
    }
    if (sc.construct_mode)
        throw placeopt::contract_error("simulate needs sensor positions in the scenario");
    return run_simulate<D>(sc, opts);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"optimal sensor-target placement: analytic construction, certification, "
                 "and gradient-flow refinement"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::vector<double> irr_values;
    int irr_dim = 3;

    auto add_common = [&](CLI::App* sub, bool with_scenario = true) {
        if (with_scenario)
            sub->add_option("scenario", opts.scenario_path, "scenario file path")->required();
        sub->add_option("--output", opts.output, "output path (reports: base name; simulate: csv)");
        sub->add_option("--tol", opts.tol, "certificate tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--seed", opts.seed, "seed override for randomized stages");
        sub->add_option("--format", opts.format, "text | structured")
            ->check(CLI::IsMember({"text", "structured"}));
    };

    add_common(app.add_subcommand("construct", "build a certified optimal placement"));
    add_common(app.add_subcommand("check", "certify a given placement"));
    add_common(app.add_subcommand("simulate", "integrate the gradient flow"));
    auto* irr = app.add_subcommand("irregularity", "classify a coefficient sequence");
    irr->add_option("values", irr_values, "positive coefficients")->required();
    irr->add_option("--d", irr_dim, "dimension")->required();
    irr->add_option("--format", opts.format, "text | structured")
        ->check(CLI::IsMember({"text", "structured"}));

    CLI11_PARSE(app, argc, argv);
    const std::string cmd = app.get_subcommands().front()->get_name();

    try {
        if (cmd == "irregularity") return run_irregularity(irr_values, irr_dim, opts.format);
        const auto sc = placeopt::parse_scenario_file(opts.scenario_path);
        return sc.dimension == 2 ? dispatch<2>(cmd, sc, opts) : dispatch<3>(cmd, sc, opts);
    } catch (const placeopt::scenario_parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const placeopt::degenerate_geometry_error& e) {
        std::cerr << "degenerate geometry: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const placeopt::infeasible_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const placeopt::step_size_error& e) {
        std::cerr << "step-size error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const placeopt::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const placeopt::contract_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const placeopt::unsupported_error& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return kExitUsage;
    } catch (const placeopt::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
