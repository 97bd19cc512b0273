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

#include <iostream>

#include <CLI11.hpp>

#include "invopt/commands.hpp"
#include "invopt/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"invopt: inverse optimal control design, verification and simulation"};
    // --h is the step size, so help is long-form only
    app.set_help_flag("--help", "print this help and exit");
    std::string command;
    std::string scenarioPath;
    invopt::CommandOptions options;
    std::string outDir;
    std::uint64_t seed = 0;
    double h = 0.0;
    double T = 0.0;

    app.add_option("command", command, "design | verify | simulate | sweep")
        ->required()
        ->check(CLI::IsMember({"design", "verify", "simulate", "sweep"}));
    app.add_option("scenario", scenarioPath, "scenario JSON file")->required();
    auto* outOpt = app.add_option("--out", outDir, "output directory");
    auto* seedOpt = app.add_option("--seed", seed, "seed for sampling and random disturbances");
    app.add_flag("--paper-literal", options.paperLiteral,
                 "linear models: check the Q variant whose drift term is not halved");
    auto* hOpt = app.add_option("--h", h, "integration step");
    auto* tOpt = app.add_option("--T", T, "horizon");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : invopt::kExitConfig;
    }
    if (*outOpt) options.outDir = outDir;
    if (*seedOpt) options.seed = seed;
    if (*hOpt) options.h = h;
    if (*tOpt) options.T = T;

    try {
        invopt::Scenario scenario = invopt::parse_scenario(scenarioPath);
        return invopt::run_command(command, std::move(scenario), options, std::cout);
    } catch (const invopt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return invopt::kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return invopt::kExitRuntime;
    }
}
