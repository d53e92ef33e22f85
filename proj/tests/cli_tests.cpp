// End-to-end checks of the command-line tool: spawns the built binary
// against the scenario corpus and asserts exit codes and outputs.
// usage: cli_tests <path-to-cli> <scenario-dir>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

int g_failures = 0;

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& cmd) {
    RunResult res;
    FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
    if (!pipe) return res;
    std::array<char, 4096> buf{};
    while (std::size_t got = fread(buf.data(), 1, buf.size(), pipe))
        res.output.append(buf.data(), got);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

void check(bool ok, const std::string& label, const std::string& detail = "") {
    std::printf("%-4s %s%s%s\n", ok ? "ok" : "FAIL", label.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++g_failures;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: cli_tests <cli> <scenario-dir>\n";
        return 2;
    }
    const std::string cli = argv[1];
    const std::string dir = argv[2];
    auto scen = [&](const std::string& name) { return dir + "/" + name; };

    // construct: planar worked example, structured output
    {
        const auto r = run(cli + " construct " + scen("planar_six_bearing.txt") +
                           " --format structured");
        check(r.exit_code == 0, "construct planar example exits 0",
              "exit " + std::to_string(r.exit_code));
        const auto j = nlohmann::json::parse(r.output, nullptr, false);
        bool ok = !j.is_discarded() && j["certificate"]["verdict"].get<bool>();
        const double want[6][2] = {{1.0, 0.0},      {0.8563, -0.5165}, {0.2155, 0.9765},
                                   {0.2155, 0.9765}, {0.2155, 0.9765}, {0.2155, 0.9765}};
        if (ok) {
            for (int i = 0; i < 6; ++i) {
                const auto b = j["sensors"][i]["bearing"];
                ok = ok && std::abs(b[0].get<double>() - want[i][0]) <= 1e-3 &&
                     std::abs(b[1].get<double>() - want[i][1]) <= 1e-3;
            }
            ok = ok && j["irregularity"]["k0"].get<int>() == 0;
        }
        check(ok, "planar example report carries the expected bearings and verdict");

        // round-trip: feed the constructed positions back through check
        if (!j.is_discarded()) {
            std::ofstream rt("cli_roundtrip_check.txt");
            rt << "dimension = 2\ntarget = 0 0\n";
            for (const auto& s : j["sensors"]) {
                rt << "\n[sensor]\nkind = bearing\nsigma = " << s["sigma"].get<double>()
                   << "\nposition = " << s["position"][0].get<double>() << " "
                   << s["position"][1].get<double>() << "\n";
            }
            rt.close();
            const auto rc = run(cli + " check cli_roundtrip_check.txt");
            check(rc.exit_code == 0, "constructed placement passes check (round trip)",
                  "exit " + std::to_string(rc.exit_code));
        }
    }

    // construct: two sensors subtend a right angle
    {
        const auto r =
            run(cli + " construct " + scen("two_bearing.txt") + " --format structured");
        const auto j = nlohmann::json::parse(r.output, nullptr, false);
        bool ok = r.exit_code == 0 && !j.is_discarded();
        if (ok) {
            const auto a = j["sensors"][0]["bearing"], b = j["sensors"][1]["bearing"];
            const double dot = a[0].get<double>() * b[0].get<double>() +
                               a[1].get<double>() * b[1].get<double>();
            ok = std::abs(dot) < 1e-9;
        }
        check(ok, "two-sensor construction subtends 90 degrees");
    }

    // construct: dominant sensor, irregular split report
    {
        const auto r =
            run(cli + " construct " + scen("dominant_d3.txt") + " --format structured");
        const auto j = nlohmann::json::parse(r.output, nullptr, false);
        bool ok = r.exit_code == 0 && !j.is_discarded();
        if (ok) {
            ok = j["irregularity"]["k0"].get<int>() == 1 &&
                 j["regime"].get<std::string>() == "irregular" &&
                 j["certificate"]["verdict"].get<bool>();
            // dominant bearing orthogonal to the rest
            const auto g0 = j["sensors"][0]["bearing"];
            for (int i = 1; i < 4 && ok; ++i) {
                const auto gi = j["sensors"][i]["bearing"];
                double dot = 0.0;
                for (int k = 0; k < 3; ++k)
                    dot += g0[k].get<double>() * gi[k].get<double>();
                ok = std::abs(dot) < 1e-9;
            }
        }
        check(ok, "dominant-weight construction reports k0 = 1 with the split geometry");
    }

    // construct: forced planar method on irregular weights is infeasible
    {
        const auto r = run(cli + " construct " + scen("infeasible_planar.txt"));
        check(r.exit_code == 2, "infeasible planar construction exits 2",
              "exit " + std::to_string(r.exit_code));
    }

    // check: octahedron passes, perturbed fails, degenerate input
    {
        const auto r1 = run(cli + " check " + scen("octahedron_check.txt"));
        check(r1.exit_code == 0, "octahedron check exits 0",
              "exit " + std::to_string(r1.exit_code));
        const auto r2 = run(cli + " check " + scen("octahedron_perturbed.txt"));
        check(r2.exit_code == 1, "perturbed octahedron check exits 1",
              "exit " + std::to_string(r2.exit_code));
        const auto r3 = run(cli + " check " + scen("degenerate_check.txt"));
        check(r3.exit_code == 65, "sensor on the target exits 65",
              "exit " + std::to_string(r3.exit_code));
    }

    // simulate: tetrahedron flow converges, table is well-formed
    {
        const auto r = run(cli + " simulate " + scen("tetrahedron_flow.txt") +
                           " --output cli_traj.csv --format structured");
        check(r.exit_code == 0, "tetrahedron flow exits 0",
              "exit " + std::to_string(r.exit_code));
        const auto j = nlohmann::json::parse(r.output, nullptr, false);
        check(!j.is_discarded() && j["outcome"].get<std::string>() == "converged-optimal" &&
                  j["optimality_error"].get<double>() < 1e-6,
              "flow summary reports convergence below 1e-6");

        std::ifstream csv("cli_traj.csv");
        std::string line;
        bool ok = static_cast<bool>(std::getline(csv, line));
        ok = ok && line == "t,sensor,x,y,z,V,optimality_error";
        long rows = 0;
        std::string last;
        while (std::getline(csv, line)) {
            ++rows;
            last = line;
        }
        ok = ok && rows > 0 && rows <= 10000;
        // final error column agrees with the summary
        if (ok) {
            const auto pos = last.rfind(',');
            const double final_err = std::stod(last.substr(pos + 1));
            ok = final_err < 1e-6;
        }
        check(ok, "trajectory table is bounded and ends below tolerance",
              std::to_string(rows) + " rows");
    }

    // simulate: the air/ground scenario converges
    {
        const auto r = run(cli + " simulate " + scen("uav_ugv.txt") +
                           " --output cli_uav.csv");
        check(r.exit_code == 0, "air/ground altitude scenario exits 0",
              "exit " + std::to_string(r.exit_code));
    }

    // simulate: an oversized step is rejected
    {
        const auto r = run(cli + " simulate " + scen("bad_dt.txt"));
        check(r.exit_code == 70 && r.output.find("decrease dt") != std::string::npos,
              "oversized dt exits 70 with advice",
              "exit " + std::to_string(r.exit_code));
    }

    // parse errors carry the line number and exit 64
    {
        const auto r = run(cli + " construct " + scen("parse_error.txt"));
        check(r.exit_code == 64 && r.output.find("line 3") != std::string::npos,
              "parse error exits 64 with a location", "exit " + std::to_string(r.exit_code));
    }

    // irregularity subcommand
    {
        const auto r1 = run(cli + " irregularity 10 1 1 1 --d 3");
        check(r1.exit_code == 0 && r1.output.find("k0 = 1") != std::string::npos,
              "irregularity of a dominant sequence is 1");
        const auto r2 = run(cli + " irregularity 10 10 1 1 --d 3");
        check(r2.exit_code == 0 && r2.output.find("k0 = 2") != std::string::npos,
              "irregularity with two dominants is 2");
        const auto r3 = run(cli + " irregularity 1 1 1 1 --d 3");
        check(r3.exit_code == 0 && r3.output.find("k0 = 0") != std::string::npos,
              "equal weights are regular");
        const auto r4 = run(cli + " irregularity -- -1 1 1 --d 2");
        check(r4.exit_code == 64, "nonpositive weights exit 64",
              "exit " + std::to_string(r4.exit_code));
    }

    if (g_failures == 0)
        std::printf("cli: all checks passed\n");
    else
        std::printf("cli: %d check(s) failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
