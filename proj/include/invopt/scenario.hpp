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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "invopt/design.hpp"
#include "invopt/sim.hpp"
#include "invopt/verify.hpp"

namespace invopt {

/// A validated scenario file with every default applied.
struct Scenario {
    std::string name;
    /// Scenario as interpreted, defaults included; echoed into every output.
    nlohmann::json resolved;
    std::vector<std::string> warnings;

    ModelParams modelParams;
    ControlAffineModel model;
    Clf clf;
    PenaltyConfig penalties;
    /// Set for linear models: the CLF matrix P.
    std::optional<Matrix> quadraticP;

    Vector x0;
    double horizon = 20.0;
    double step = 1e-3;
    DisturbanceSignal disturbance;

    VerifyConfig verify;

    std::vector<Matrix> sweepR;
    double settlingThreshold = 1e-3;
    std::vector<Eigen::Index> settlingSelector;

    std::filesystem::path outputDirectory;
    std::vector<std::string> formats;

    DesignedProblem problem() const;
};

/// Reads and validates a scenario JSON file. Throws ConfigError.
Scenario parse_scenario(const std::filesystem::path& path);
Scenario parse_scenario_text(const std::string& text, const std::string& sourceName = "<string>");

/// Matrix literal: nested arrays, a number (scaled identity when the size is known),
/// or the shorthand "a*I(k)" / "I(k)". rows/cols < 0 mean "not constrained".
Matrix parse_matrix(const nlohmann::json& value, const std::string& where, Eigen::Index rows = -1,
                    Eigen::Index cols = -1);
Vector parse_vector(const nlohmann::json& value, const std::string& where, Eigen::Index size = -1);

nlohmann::json matrix_to_json(const Matrix& M);
nlohmann::json vector_to_json(const Vector& v);

} // namespace invopt
