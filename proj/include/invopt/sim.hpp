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

namespace invopt {

/// Disturbance applied along a closed-loop simulation.
struct DisturbanceSignal {
    enum class Kind { Zero, Constant, SeededRandom, WorstCase };

    Kind kind = Kind::Zero;
    Vector value;               // Constant
    double amplitude = 0.0;     // SeededRandom: uniform on [-amplitude, amplitude]^nw
    std::uint64_t seed = 0;     // SeededRandom
    double holdInterval = 0.1;  // SeededRandom: sample-and-hold period [s]

    static DisturbanceSignal zero();
    static DisturbanceSignal constant(Vector value);
    static DisturbanceSignal seeded_random(double amplitude, std::uint64_t seed,
                                           double holdInterval = 0.1);
    static DisturbanceSignal worst_case();

    std::string describe() const;
};

/// Closed-loop record sampled at uniform steps, t_k = k h.
struct Trajectory {
    double step = 0.0;
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<Vector> inputs;
    std::vector<Vector> disturbances;
    std::vector<double> vValues;
    std::vector<double> qValues;
    std::vector<double> lValues;
    std::vector<double> runningCost;       // int_0^t L ds
    std::vector<double> penaltyIntegral;   // int_0^t (q + u^T R u) ds
    std::vector<double> disturbanceEnergy; // int_0^t w^T S w ds (robust only)

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }
};

enum class SimulationStatus { Completed, DomainExit };

struct SimulationResult {
    Trajectory trajectory;
    SimulationStatus status = SimulationStatus::Completed;
    std::string message;

    bool completed() const { return status == SimulationStatus::Completed; }
};

/// Fixed-step RK4 on (x, cost integrals) with u = u*(x). Stops early, keeping the
/// partial record, if the state leaves the model domain.
SimulationResult simulate(const DesignedProblem& p, const Vector& x0, double T, double h,
                          const DisturbanceSignal& w = DisturbanceSignal::zero());

double accumulated_cost(const Trajectory& traj);

/// Earliest recorded time after which every selected |x_i| stays <= threshold.
std::optional<double> settling_time(const Trajectory& traj,
                                    const std::vector<Eigen::Index>& selector, double threshold);

struct DissipationReport {
    double lhs = 0.0; // int (q + u^T R u)
    double rhs = 0.0; // V(x0) + xi int w^T S w
    double margin = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Integral dissipation inequality along a robust-mode trajectory.
DissipationReport dissipation_check(const Trajectory& traj, const DesignedProblem& p);

} // namespace invopt
