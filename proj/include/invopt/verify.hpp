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
#include <optional>
#include <string>
#include <vector>

#include "invopt/design.hpp"
#include "invopt/sim.hpp"

namespace invopt {

/// One named check; witness is the worst state seen (empty when not state-based).
struct CheckEntry {
    std::string name;
    bool pass = false;
    Vector witness;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct VerificationReport {
    std::vector<CheckEntry> checks;

    bool overallPass() const;
    const CheckEntry* find(const std::string& name) const;
};

struct GridSpec {
    int pointsPerAxis = 21;
    int sampleCount = 4096;
    std::uint64_t seed = 42;
    /// Tensor grids are used up to this state dimension, seeded samples above it.
    int maxGridDimension = 3;
};

/// Max of |hjb_residual| / (1 + |q|) over a grid or seeded samples.
CheckEntry verify_residual_grid(const DesignedProblem& p, const GridSpec& grid = {},
                                double tol = 1e-9);

/// |int L ds + V(x(T)) - V(x0)| along the undisturbed closed loop. Nominal mode only.
CheckEntry verify_value_identity(const DesignedProblem& p, const Vector& x0, double T, double h,
                                 double tol);

/// q_{R',S'} >= q_{R,S} on samples and the retuned problem stays admissible.
/// Throws PreconditionError unless R' <= R (and S' >= S).
CheckEntry verify_R_monotonicity(const DesignedProblem& p, const Matrix& Rprime,
                                 const std::optional<Matrix>& Sprime = std::nullopt,
                                 int sampleCount = 4096, std::uint64_t seed = 42);

/// Solves the ARE with the designed linear Q and compares with P/2.
CheckEntry verify_are_oracle(const Matrix& A, const Matrix& B, const Matrix& P, const Matrix& R);

/// Max disagreement between the generic and closed-form oscillator q and u*.
CheckEntry verify_closed_forms(const DesignedProblem& p, int sampleCount = 4096,
                               std::uint64_t seed = 42);

struct RetuneCandidate {
    Matrix R;
    std::optional<Matrix> S;
};

struct VerifyConfig {
    double residualTolerance = 1e-9;
    GridSpec grid;
    int sampleCount = 4096;
    std::uint64_t seed = 42;
    std::vector<RetuneCandidate> retune;
    /// Initial state for the trajectory-based checks; none skips them.
    std::optional<Vector> x0;
    double horizon = 20.0;
    double step = 1e-3;
    double valueTolerance = 1e-4;
    std::vector<DisturbanceSignal> dissipationSignals;
};

/// Runs every applicable check for p and collects them in order.
VerificationReport verify_problem(const DesignedProblem& p, const VerifyConfig& config);

} // namespace invopt
