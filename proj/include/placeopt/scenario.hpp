#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "placeopt/construction.hpp"
#include "placeopt/coefficients.hpp"
#include "placeopt/errors.hpp"
#include "placeopt/flow.hpp"
#include "placeopt/optimality.hpp"
#include "placeopt/placement.hpp"
#include "placeopt/sensors.hpp"

namespace placeopt {

class scenario_parse_error : public error {
public:
    scenario_parse_error(int line, int column, const std::string& what)
        : error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                what),
          line_(line),
          column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

enum class ConstructionMethod { Auto, Planar, Square, Augmented, Lifted, Irregular };

struct ScenarioSensor {
    SensorKind kind = SensorKind::BearingOnly;
    double sigma = 1.0;
    std::optional<double> range;
    std::optional<std::array<double, 3>> position;
};

/// Parsed scenario file. Exactly one of two modes:
///  - construct mode: every sensor gives a range and no position;
///  - placement mode: every sensor gives a position (checking/simulation).
struct Scenario {
    int dimension = 2;
    std::array<double, 3> target{0.0, 0.0, 0.0};
    std::vector<ScenarioSensor> sensors;
    bool construct_mode = true;

    bool has_flow = false;
    FlowConfig flow;

    ConstructionMethod method = ConstructionMethod::Auto;
    std::optional<std::vector<int>> signs;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& tok, int line, int col) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw scenario_parse_error(line, col, "expected a number, got '" + tok + "'");
    }
    if (used != tok.size() || !std::isfinite(v))
        throw scenario_parse_error(line, col, "expected a finite number, got '" + tok + "'");
    return v;
}

inline std::vector<double> parse_numbers(const std::string& text, int line, int col) {
    std::istringstream iss(text);
    std::vector<double> out;
    std::string tok;
    while (iss >> tok) out.push_back(parse_number(tok, line, col));
    return out;
}

}  // namespace detail

/// Line-oriented scenario grammar:
///   key = value pairs, blank lines and '#' comments ignored;
///   top-level keys: dimension, target;
///   section headers [sensor], [flow], [construction] switch context;
///   vector values are whitespace-separated numbers.
inline Scenario parse_scenario(std::istream& in) {
    Scenario sc;
    enum class Section { Top, Sensor, Flow, Construction };
    Section section = Section::Top;
    bool saw_dimension = false;

    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw scenario_parse_error(line_no, 1, "unterminated section header");
            const std::string name = detail::trim(line.substr(1, line.size() - 2));
            if (name == "sensor") {
                section = Section::Sensor;
                sc.sensors.emplace_back();
            } else if (name == "flow") {
                section = Section::Flow;
                sc.has_flow = true;
            } else if (name == "construction") {
                section = Section::Construction;
            } else {
                throw scenario_parse_error(line_no, 1, "unknown section [" + name + "]");
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw scenario_parse_error(line_no, 1, "expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        const int vcol = static_cast<int>(raw.find('=')) + 2;
        if (key.empty()) throw scenario_parse_error(line_no, 1, "empty key");
        if (value.empty()) throw scenario_parse_error(line_no, vcol, "empty value for '" + key + "'");

        switch (section) {
            case Section::Top: {
                if (key == "dimension") {
                    const double d = detail::parse_number(value, line_no, vcol);
                    if (d != 2.0 && d != 3.0)
                        throw scenario_parse_error(line_no, vcol, "dimension must be 2 or 3");
                    sc.dimension = static_cast<int>(d);
                    saw_dimension = true;
                } else if (key == "target") {
                    const auto nums = detail::parse_numbers(value, line_no, vcol);
                    if (nums.size() != static_cast<std::size_t>(sc.dimension))
                        throw scenario_parse_error(line_no, vcol,
                                                   "target needs 'dimension' components");
                    for (std::size_t i = 0; i < nums.size(); ++i) sc.target[i] = nums[i];
                } else {
                    throw scenario_parse_error(line_no, 1, "unknown top-level key '" + key + "'");
                }
                break;
            }
            case Section::Sensor: {
                auto& s = sc.sensors.back();
                if (key == "kind") {
                    if (value == "bearing" || value == "bearing-only")
                        s.kind = SensorKind::BearingOnly;
                    else if (value == "range" || value == "range-only")
                        s.kind = SensorKind::RangeOnly;
                    else if (value == "rss")
                        s.kind = SensorKind::Rss;
                    else
                        throw scenario_parse_error(line_no, vcol,
                                                   "kind must be bearing, range, or rss");
                } else if (key == "sigma") {
                    s.sigma = detail::parse_number(value, line_no, vcol);
                    if (!(s.sigma > 0.0))
                        throw scenario_parse_error(line_no, vcol, "sigma must be positive");
                } else if (key == "range") {
                    s.range = detail::parse_number(value, line_no, vcol);
                    if (!(*s.range > 0.0))
                        throw scenario_parse_error(line_no, vcol, "range must be positive");
                } else if (key == "position") {
                    const auto nums = detail::parse_numbers(value, line_no, vcol);
                    if (nums.size() != static_cast<std::size_t>(sc.dimension))
                        throw scenario_parse_error(line_no, vcol,
                                                   "position needs 'dimension' components");
                    std::array<double, 3> p{0.0, 0.0, 0.0};
                    for (std::size_t i = 0; i < nums.size(); ++i) p[i] = nums[i];
                    s.position = p;
                } else {
                    throw scenario_parse_error(line_no, 1, "unknown sensor key '" + key + "'");
                }
                break;
            }
            case Section::Flow: {
                auto& f = sc.flow;
                if (key == "dt")
                    f.dt = detail::parse_number(value, line_no, vcol);
                else if (key == "t_end")
                    f.t_end = detail::parse_number(value, line_no, vcol);
                else if (key == "integrator") {
                    if (value == "euler")
                        f.integrator = Integrator::ExplicitEuler;
                    else if (value == "rk4")
                        f.integrator = Integrator::RungeKutta4;
                    else
                        throw scenario_parse_error(line_no, vcol,
                                                   "integrator must be euler or rk4");
                } else if (key == "convergence_tol")
                    f.convergence_tol = detail::parse_number(value, line_no, vcol);
                else if (key == "stall_window")
                    f.stall_window = static_cast<int>(detail::parse_number(value, line_no, vcol));
                else if (key == "stall_threshold")
                    f.stall_threshold = detail::parse_number(value, line_no, vcol);
                else if (key == "seed")
                    f.seed = static_cast<std::uint64_t>(detail::parse_number(value, line_no, vcol));
                else if (key == "max_restarts")
                    f.max_restarts = static_cast<int>(detail::parse_number(value, line_no, vcol));
                else if (key == "sample_stride")
                    f.sample_stride = static_cast<int>(detail::parse_number(value, line_no, vcol));
                else if (key == "renormalize") {
                    if (value == "on" || value == "true")
                        f.renormalize = true;
                    else if (value == "off" || value == "false")
                        f.renormalize = false;
                    else
                        throw scenario_parse_error(line_no, vcol, "renormalize must be on or off");
                } else if (key == "altitude_targets")
                    f.altitude_targets = detail::parse_numbers(value, line_no, vcol);
                else if (key == "altitude_tol")
                    f.altitude_tol = detail::parse_number(value, line_no, vcol);
                else
                    throw scenario_parse_error(line_no, 1, "unknown flow key '" + key + "'");
                break;
            }
            case Section::Construction: {
                if (key == "method") {
                    if (value == "auto")
                        sc.method = ConstructionMethod::Auto;
                    else if (value == "planar")
                        sc.method = ConstructionMethod::Planar;
                    else if (value == "square")
                        sc.method = ConstructionMethod::Square;
                    else if (value == "augmented")
                        sc.method = ConstructionMethod::Augmented;
                    else if (value == "lifted")
                        sc.method = ConstructionMethod::Lifted;
                    else if (value == "irregular")
                        sc.method = ConstructionMethod::Irregular;
                    else
                        throw scenario_parse_error(line_no, vcol,
                                                   "unknown construction method '" + value + "'");
                } else if (key == "signs") {
                    std::istringstream iss(value);
                    std::vector<int> signs;
                    std::string tok;
                    while (iss >> tok) {
                        if (tok == "+" || tok == "+1")
                            signs.push_back(1);
                        else if (tok == "-" || tok == "-1")
                            signs.push_back(-1);
                        else
                            throw scenario_parse_error(line_no, vcol,
                                                       "signs must be + or - entries");
                    }
                    sc.signs = signs;
                } else {
                    throw scenario_parse_error(line_no, 1,
                                               "unknown construction key '" + key + "'");
                }
                break;
            }
        }
    }

    if (!saw_dimension) throw scenario_parse_error(line_no + 1, 1, "missing 'dimension'");
    if (sc.sensors.empty()) throw scenario_parse_error(line_no + 1, 1, "no [sensor] sections");

    int with_position = 0, construct_ready = 0;
    for (const auto& s : sc.sensors) {
        if (s.position) ++with_position;
        // a range-only sensor may omit its range (it does not affect the
        // weight; the placement radius defaults to one)
        if (s.range || s.kind == SensorKind::RangeOnly) ++construct_ready;
    }
    const int n = static_cast<int>(sc.sensors.size());
    if (with_position == n)
        sc.construct_mode = false;
    else if (with_position == 0 && construct_ready == n)
        sc.construct_mode = true;
    else
        throw scenario_parse_error(
            line_no + 1, 1,
            "sensors must either all give 'range' (construct mode) or all give 'position'");
    return sc;
}

inline Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open scenario file '" + path + "'");
    return parse_scenario(in);
}

/// Flat, dimension-erased summary of a placement analysis.
struct PlacementReport {
    int dimension = 2;
    std::string kind;
    std::vector<double> target;

    struct Row {
        double sigma = 0.0;
        double range = 0.0;
        double coefficient = 0.0;
        std::vector<double> bearing;
        std::vector<double> position;
    };
    std::vector<Row> sensors;

    int k0 = 0;
    std::string regime;
    bool regular = true;

    double objective = 0.0;
    double bound = 0.0;
    double error = 0.0;
    double tol = 0.0;
    bool verdict = false;
    double regular_deviation = 0.0;
    double max_cross_dot = 0.0;
    double subspace_deviation = 0.0;

    double det_f = 0.0;
    double lambda_bar_pow_d = 0.0;
    double fim_deviation = 0.0;
};

template <int D>
PlacementReport build_report(const Placement<D>& pl, const std::vector<SensorSpec>& specs,
                             double tol) {
    const CoefficientSequence coeffs = coefficients_for(pl, specs);
    const auto cert = certify<D>(pl.bearings(), coeffs, tol);
    const auto f = fim(pl, specs);
    const auto crit = criteria_report(f);
    const auto rep = irregularity(coeffs, D);

    PlacementReport out;
    out.dimension = D;
    out.kind = std::string(kind_name(specs.front().kind));
    for (int i = 0; i < D; ++i) out.target.push_back(pl.target()[i]);
    for (int i = 0; i < pl.size(); ++i) {
        PlacementReport::Row row;
        row.sigma = specs[static_cast<std::size_t>(i)].sigma;
        row.range = pl.range(i);
        row.coefficient = coeffs.value(i);
        for (int k = 0; k < D; ++k) {
            row.bearing.push_back(pl.bearing(i)[k]);
            row.position.push_back(pl.sensor_position(i)[k]);
        }
        out.sensors.push_back(std::move(row));
    }
    out.k0 = rep.k0;
    out.regime = std::string(regime_name(cert.regime));
    out.regular = rep.regular;
    out.objective = cert.objective;
    out.bound = cert.bound;
    out.error = cert.error;
    out.tol = cert.tol;
    out.verdict = cert.verdict;
    out.regular_deviation = cert.regular_deviation;
    out.max_cross_dot = cert.max_cross_dot;
    out.subspace_deviation = cert.subspace_deviation;
    out.det_f = crit.det_f;
    out.lambda_bar_pow_d = crit.lambda_bar_pow_d;
    out.fim_deviation = crit.deviation;
    return out;
}

/// Text rendering at 12 significant digits.
inline void write_report_text(std::ostream& os, const PlacementReport& rep) {
    os << std::setprecision(12);
    os << "dimension        " << rep.dimension << "\n";
    os << "sensor kind      " << rep.kind << "\n";
    os << "sensors          " << rep.sensors.size() << "\n";
    os << "target          ";
    for (double v : rep.target) os << " " << v;
    os << "\n\n";
    for (std::size_t i = 0; i < rep.sensors.size(); ++i) {
        const auto& s = rep.sensors[i];
        os << "sensor " << i << ": sigma " << s.sigma << ", range " << s.range
           << ", coefficient " << s.coefficient << "\n";
        os << "  bearing  ";
        for (double v : s.bearing) os << " " << v;
        os << "\n  position ";
        for (double v : s.position) os << " " << v;
        os << "\n";
    }
    os << "\n";
    os << "irregularity k0  " << rep.k0 << (rep.regular ? " (regular)" : " (irregular)") << "\n";
    os << "regime           " << rep.regime << "\n";
    os << "objective        " << rep.objective << "\n";
    os << "lower bound      " << rep.bound << "\n";
    os << "optimality error " << rep.error << "\n";
    os << "det F            " << rep.det_f << "\n";
    os << "mean-eig^d       " << rep.lambda_bar_pow_d << "\n";
    os << "FIM deviation    " << rep.fim_deviation << "\n";
    os << "certificate      " << (rep.verdict ? "optimal" : "not optimal") << " (tol "
       << rep.tol << ")\n";
}

inline nlohmann::json report_to_json(const PlacementReport& rep) {
    nlohmann::json j;
    j["dimension"] = rep.dimension;
    j["kind"] = rep.kind;
    j["target"] = rep.target;
    j["sensors"] = nlohmann::json::array();
    for (const auto& s : rep.sensors) {
        j["sensors"].push_back({{"sigma", s.sigma},
                                {"range", s.range},
                                {"coefficient", s.coefficient},
                                {"bearing", s.bearing},
                                {"position", s.position}});
    }
    j["irregularity"] = {{"k0", rep.k0}, {"regular", rep.regular}};
    j["regime"] = rep.regime;
    j["objective"] = rep.objective;
    j["bound"] = rep.bound;
    j["optimality_error"] = rep.error;
    j["det_f"] = rep.det_f;
    j["lambda_bar_pow_d"] = rep.lambda_bar_pow_d;
    j["fim_deviation"] = rep.fim_deviation;
    j["certificate"] = {{"verdict", rep.verdict},
                        {"tol", rep.tol},
                        {"regular_deviation", rep.regular_deviation},
                        {"max_cross_dot", rep.max_cross_dot},
                        {"subspace_deviation", rep.subspace_deviation}};
    return j;
}

/// Delimited trajectory table: one row per (time, sensor) pair with columns
/// t, sensor, position components, V, optimality_error. Decimated by a
/// uniform stride over samples so at most max_rows rows are written; the
/// final sample is always included.
template <int D>
void write_trajectory_csv(std::ostream& os, const Trajectory<D>& traj, long max_rows = 10000) {
    os << std::setprecision(12);
    os << "t,sensor";
    const char* axes[3] = {"x", "y", "z"};
    for (int k = 0; k < D; ++k) os << "," << axes[k];
    os << ",V,optimality_error\n";
    if (traj.samples.empty()) return;
    const long n = static_cast<long>(traj.samples.front().placement.size());
    const long total = static_cast<long>(traj.samples.size()) * n;
    const long stride = std::max(1L, (total + max_rows - 1) / max_rows);
    for (std::size_t si = 0; si < traj.samples.size(); ++si) {
        const bool last = si + 1 == traj.samples.size();
        if (static_cast<long>(si) % stride != 0 && !last) continue;
        const auto& s = traj.samples[si];
        for (int i = 0; i < s.placement.size(); ++i) {
            os << s.t << "," << i;
            for (int k = 0; k < D; ++k) os << "," << s.placement.sensor_position(i)[k];
            os << "," << s.lyapunov << "," << s.optimality_error << "\n";
        }
    }
}

}  // namespace placeopt
