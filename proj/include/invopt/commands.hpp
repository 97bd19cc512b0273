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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "invopt/scenario.hpp"

namespace invopt {

/// Command-line overrides applied on top of a parsed scenario.
struct CommandOptions {
    std::optional<std::filesystem::path> outDir;
    std::optional<std::uint64_t> seed;
    /// Linear models: verify the variant of Q whose drift term is not halved.
    bool paperLiteral = false;
    std::optional<double> h;
    std::optional<double> T;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

/// Applies CLI overrides to the scenario (and its resolved echo).
void apply_overrides(Scenario& scenario, const CommandOptions& options);

/// Runs design | verify | simulate | sweep and writes its artifacts. Returns the exit code;
/// errors propagate as exceptions (ConfigError -> 2, anything else -> 3 in the CLI).
int run_command(const std::string& command, Scenario scenario, const CommandOptions& options,
                std::ostream& log);

/// Trajectory as CSV: t, state labels, u_i, w_i (robust), V, q, L, J_running.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const DesignedProblem& p);

nlohmann::json report_to_json(const VerificationReport& report);
std::string report_to_text(const VerificationReport& report);

/// Sweep parallelism cap: INVOPT_THREADS if set and positive, else hardware threads.
unsigned sweep_thread_count();

} // namespace invopt
