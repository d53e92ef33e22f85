#include <catch_amalgamated.hpp>

#include <sstream>

#include "helpers.hpp"
#include "placeopt/scenario.hpp"

using namespace placeopt;
using Catch::Approx;

TEST_CASE("parse a construct-mode scenario") {
    std::istringstream in(R"(# six bearing sensors on known circles
dimension = 2
target = 1 -2

[sensor]
kind = bearing
sigma = 1
range = 5

[sensor]
kind = bearing
sigma = 1
range = 6
)");
    const auto sc = parse_scenario(in);
    CHECK(sc.dimension == 2);
    CHECK(sc.construct_mode);
    CHECK(sc.target[0] == 1.0);
    CHECK(sc.target[1] == -2.0);
    REQUIRE(sc.sensors.size() == 2);
    CHECK(sc.sensors[0].kind == SensorKind::BearingOnly);
    CHECK(*sc.sensors[1].range == 6.0);
    CHECK_FALSE(sc.has_flow);
}

TEST_CASE("parse a simulate-mode scenario with a flow block") {
    std::istringstream in(R"(dimension = 3
[sensor]
kind = range
sigma = 0.5
position = 1 0 0
[sensor]
kind = range
sigma = 0.5
position = 0 2 0
[sensor]
kind = range
sigma = 0.5
position = 0 0 3
[flow]
dt = 1e-3
t_end = 50
integrator = rk4
convergence_tol = 1e-8
seed = 9
renormalize = off
altitude_targets = 1 1 0
)");
    const auto sc = parse_scenario(in);
    CHECK_FALSE(sc.construct_mode);
    CHECK(sc.has_flow);
    CHECK(sc.flow.dt == Approx(1e-3));
    CHECK(sc.flow.t_end == Approx(50.0));
    CHECK(sc.flow.seed == 9);
    CHECK(sc.flow.altitude_targets == std::vector<double>{1.0, 1.0, 0.0});
    CHECK((*sc.sensors[2].position)[2] == 3.0);
}

TEST_CASE("range-only sensors may omit the range in construct mode") {
    std::istringstream in(R"(dimension = 2
[sensor]
kind = range
sigma = 1
[sensor]
kind = range
sigma = 2
)");
    CHECK(parse_scenario(in).construct_mode);
}

TEST_CASE("parse errors carry line numbers") {
    auto expect_line = [](const std::string& text, int line) {
        std::istringstream in(text);
        try {
            parse_scenario(in);
            FAIL("expected scenario_parse_error");
        } catch (const scenario_parse_error& e) {
            CHECK(e.line() == line);
        }
    };
    expect_line("dimension = 4\n", 1);
    expect_line("dimension = 2\nbogus_key = 1\n", 2);
    expect_line("dimension = 2\n[sensor]\nkind = sonar\n", 3);
    expect_line("dimension = 2\n[sensor]\nsigma = -1\n", 3);
    expect_line("dimension = 2\n[weird]\n", 2);
    expect_line("dimension = 2\n[sensor]\nsigma == 1\n", 3);

    // mixed modes
    std::istringstream mixed(R"(dimension = 2
[sensor]
kind = bearing
sigma = 1
range = 5
[sensor]
kind = bearing
sigma = 1
position = 0 1
)");
    CHECK_THROWS_AS(parse_scenario(mixed), scenario_parse_error);

    std::istringstream nodim("[sensor]\nkind = bearing\nsigma = 1\nrange = 2\n");
    CHECK_THROWS_AS(parse_scenario(nodim), scenario_parse_error);
}

TEST_CASE("report fields stay consistent with the library values") {
    std::vector<double> ranges{5, 6, 7, 8, 9, 10};
    std::vector<SensorSpec> specs;
    for (double r : ranges) specs.emplace_back(SensorKind::BearingOnly, 1.0, r);
    std::vector<double> cvals;
    for (const auto& s : specs) cvals.push_back(coefficient(s));
    const CoefficientSequence coeffs(cvals);
    const auto bearings = construct_2d(coeffs);
    const auto pl = Placement<2>::from_bearings(Vec<2>{}, bearings.bearings(), ranges);

    const auto rep = build_report<2>(pl, specs, 1e-6);
    CHECK(rep.dimension == 2);
    CHECK(rep.kind == "bearing-only");
    CHECK(rep.verdict);
    CHECK(rep.k0 == 0);
    CHECK(rep.error == Approx(rep.objective - rep.bound).margin(1e-12));
    CHECK(rep.sensors.size() == 6);
    CHECK(rep.sensors[0].coefficient == Approx(0.2));

    const auto j = report_to_json(rep);
    CHECK(j["objective"].get<double>() == rep.objective);
    CHECK(j["certificate"]["verdict"].get<bool>() == rep.verdict);
    CHECK(j["sensors"].size() == 6);

    std::ostringstream text;
    write_report_text(text, rep);
    CHECK(text.str().find("certificate      optimal") != std::string::npos);
}

TEST_CASE("trajectory tables are decimated and keep the last sample") {
    FlowConfig config;
    config.t_end = 30.0;
    config.dt = 1e-3;
    config.sample_stride = 1;  // force many samples
    config.convergence_tol = 1e-30;
    config.stall_threshold = 1e-300;
    auto rng = helpers::make_rng(91);
    const auto start = Placement<2>::from_bearings(helpers::random_bearings<2>(3, rng));
    const auto traj = simulate<2>(start, CoefficientSequence({1, 1, 1}), config);
    REQUIRE(traj.samples.size() > 10001);

    std::ostringstream os;
    write_trajectory_csv(os, traj);
    std::istringstream is(os.str());
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == "t,sensor,x,y,V,optimality_error");
    long rows = 0;
    std::string last;
    while (std::getline(is, line)) {
        ++rows;
        last = line;
    }
    CHECK(rows <= 10000);
    // last row belongs to the final sample
    const double t_final = traj.final_sample().t;
    std::ostringstream expect;
    expect << std::setprecision(12) << t_final << ",";
    CHECK(last.rfind(expect.str(), 0) == 0);
}
