/*
 Copyright 2026 The invopt Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <sys/wait.h>

#include "invopt/commands.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string scenario(const std::string& name) { return std::string(INVOPT_SCENARIO_DIR) + "/" + name + ".json"; }

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("invopt_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + "'" + INVOPT_CLI_PATH + "' " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, sep);) out.push_back(cell);
    return out;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string line; std::getline(ss, line);) out.push_back(line);
    return out;
}

} // namespace

TEST(Cli, VerifyExitCodeMatchesReport) {
    const fs::path out = scratch("verify_robust");
    EXPECT_EQ(cli("verify " + scenario("three_inverter_robust") + " --out " + out.string()), 0);
    const json report = json::parse(slurp(out / "report.json"));
    EXPECT_TRUE(report["overallPass"].get<bool>());
    EXPECT_EQ(report["scenario"]["penalties"]["xi"], 2.8);
    bool sawWorstCase = false;
    for (const auto& c : report["checks"]) {
        EXPECT_TRUE(c["pass"].get<bool>()) << c.dump();
        if (c["name"].get<std::string>().find("worst_case") != std::string::npos) sawWorstCase = true;
    }
    EXPECT_TRUE(sawWorstCase);
    EXPECT_NE(slurp(out / "report.txt").find("PASS"), std::string::npos);
}

TEST(Cli, UnhalvedDriftVariantFailsVerification) {
    const fs::path out = scratch("literal");
    EXPECT_EQ(cli("verify " + scenario("example2_linear") + " --paper-literal --out " + out.string()), 1);
    const json report = json::parse(slurp(out / "report.json"));
    EXPECT_FALSE(report["overallPass"].get<bool>());
    EXPECT_EQ(cli("verify " + scenario("example2_linear") + " --out " + out.string()), 0);
}

TEST(Cli, ConfigErrorsExitTwo) {
    const fs::path dir = scratch("config");
    std::ofstream(dir / "bad.json") << R"j({"model": {"kind": "sine"}, "penalties": {"R": -1}})j";
    std::ofstream(dir / "broken.json") << "{ \"model\": ";
    EXPECT_EQ(cli("verify " + (dir / "bad.json").string()), 2);
    EXPECT_EQ(cli("verify " + (dir / "broken.json").string()), 2);
    EXPECT_EQ(cli("verify " + (dir / "missing.json").string()), 2);
    EXPECT_NE(cli("explode " + scenario("example1_sine")), 0);
}

TEST(Cli, SimulateCsvLayoutAndDeterminism) {
    const fs::path a = scratch("sim_a");
    const fs::path b = scratch("sim_b");
    const std::string base = "simulate " + scenario("three_inverter_robust") + " --T 0.5 --out ";
    ASSERT_EQ(cli(base + a.string()), 0);
    ASSERT_EQ(cli(base + b.string()), 0);
    const std::string csv = slurp(a / "trajectory.csv");
    EXPECT_EQ(csv, slurp(b / "trajectory.csv"));

    const auto rows = lines(csv);
    ASSERT_GT(rows.size(), 2u);
    const auto header = split(rows[0]);
    ASSERT_EQ(header.size(), 1u + 6u + 3u + 3u + 4u);
    EXPECT_EQ(header.front(), "t");
    EXPECT_EQ(header[header.size() - 4], "V");
    EXPECT_EQ(header[header.size() - 3], "q");
    EXPECT_EQ(header[header.size() - 2], "L");
    EXPECT_EQ(header.back(), "J_running");
    EXPECT_EQ(rows.size(), 1u + 501u);
    // 17 significant digits round-trip doubles
    const auto cells = split(rows[2]);
    ASSERT_EQ(cells.size(), header.size());
    const double t1 = std::stod(cells[0]);
    std::ostringstream expect;
    expect.precision(17);
    expect << t1;
    EXPECT_EQ(cells[0], expect.str());
    EXPECT_NEAR(t1, 1e-3, 1e-15);
    const double v = std::stod(cells[header.size() - 4]);
    std::ostringstream vs;
    vs.precision(17);
    vs << v;
    EXPECT_EQ(cells[header.size() - 4], vs.str());
}

TEST(Cli, StepAndHorizonOverrides) {
    const fs::path out = scratch("override");
    ASSERT_EQ(cli("simulate " + scenario("example1_sine") + " --h 0.01 --T 1 --out " + out.string()), 0);
    const auto rows = lines(slurp(out / "trajectory.csv"));
    EXPECT_EQ(rows.size(), 1u + 101u);
    EXPECT_NEAR(std::stod(split(rows.back())[0]), 1.0, 1e-12);
    EXPECT_EQ(cli("simulate " + scenario("example1_sine") + " --h -1 --out " + out.string()), 2);
}

TEST(Cli, SweepSummaryOrdersSettling) {
    const fs::path out = scratch("sweep");
    ASSERT_EQ(cli("sweep " + scenario("three_inverter_nominal_R1") + " --out " + out.string(), "INVOPT_THREADS=1"), 0);
    const auto rows = lines(slurp(out / "sweep_summary.csv"));
    ASSERT_EQ(rows.size(), 3u);
    const auto header = split(rows[0]);
    ASSERT_EQ(header.size(), 7u);
    EXPECT_EQ(header[3], "settling_time");
    const auto r1 = split(rows[1]);
    const auto r2 = split(rows[2]);
    EXPECT_NEAR(std::stod(r1[1]), 0.3, 1e-12);
    EXPECT_NEAR(std::stod(r2[1]), 0.03, 1e-12);
    EXPECT_LT(std::stod(r2[3]), std::stod(r1[3]));
    EXPECT_TRUE(fs::exists(out / "trajectory_0.csv"));
    EXPECT_TRUE(fs::exists(out / "trajectory_1.csv"));

    const fs::path par = scratch("sweep_parallel");
    ASSERT_EQ(cli("sweep " + scenario("three_inverter_nominal_R1") + " --out " + par.string(), "INVOPT_THREADS=4"), 0);
    EXPECT_EQ(slurp(out / "sweep_summary.csv"), slurp(par / "sweep_summary.csv"));
    EXPECT_EQ(slurp(out / "trajectory_1.csv"), slurp(par / "trajectory_1.csv"));
}

TEST(Cli, ThreadCapFromEnvironment) {
    ::setenv("INVOPT_THREADS", "3", 1);
    EXPECT_EQ(invopt::sweep_thread_count(), 3u);
    ::setenv("INVOPT_THREADS", "0", 1);
    EXPECT_GE(invopt::sweep_thread_count(), 1u);
    ::unsetenv("INVOPT_THREADS");
    EXPECT_GE(invopt::sweep_thread_count(), 1u);
}

TEST(Cli, DesignArtifact) {
    const fs::path out = scratch("design_linear");
    ASSERT_EQ(cli("design " + scenario("example2_linear") + " --out " + out.string()), 0);
    const json d = json::parse(slurp(out / "design.json"));
    EXPECT_TRUE(d.contains("scenario"));
    EXPECT_TRUE(d["admissibility"]["pass"].get<bool>());
    const json& lin = d["linear"];
    for (const char* key : {"P", "Q", "Q_unhalved_drift", "are_check"}) EXPECT_TRUE(lin.contains(key)) << key;
    const auto Q = lin["Q"];
    ASSERT_EQ(Q.size(), 2u);
    EXPECT_NEAR(Q[0][1].get<double>(), Q[1][0].get<double>(), 1e-12);

    const fs::path osc = scratch("design_osc");
    ASSERT_EQ(cli("design " + scenario("three_inverter_nominal_R1") + " --out " + osc.string()), 0);
    const json e = json::parse(slurp(osc / "design.json"))["oscillator"];
    EXPECT_TRUE(e.contains("delta_s"));
    EXPECT_TRUE(e.contains("K"));
    // K = coupling * R^-1 * coupling with unit coupling and R = 0.1 I
    EXPECT_NEAR(e["K"][0][0].get<double>(), 10.0, 1e-12);
}

TEST(Cli, DomainExitIsRuntimeError) {
    const fs::path out = scratch("escape");
    std::ofstream(out / "escape.json") << R"j({
      "model": {"kind": "oscillator", "edges": [[1, 2], [2, 3], [1, 3]], "inertia": 0.01, "damping": 0.1,
                "theta0": [0.02, 0.015, 0.0]},
      "penalties": {"R": "0.01*I(3)", "S": "I(3)", "xi": 2.8},
      "simulation": {"disturbance": "worst_case", "T": 10}
    })j";
    EXPECT_EQ(cli("simulate " + (out / "escape.json").string() + " --out " + out.string()), 3);
}
