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
#include <functional>
#include <string>
#include <variant>

#include "invopt/model.hpp"

namespace invopt {

enum class ClfKind { Quadratic, Cosine, Oscillator };

std::string to_string(ClfKind kind);

/// Candidate value function with its analytic gradient.
struct Clf {
    std::string name;
    ClfKind kind = ClfKind::Quadratic;
    ScalarField value;
    std::function<Vector(const Vector&)> gradient;
    Vector equilibrium;

    Eigen::Index dimension() const { return equilibrium.size(); }
};

struct QuadraticClfParams {
    Matrix P;
};

struct CosineClfParams {
    int n = 1;
};

using ClfParams = std::variant<QuadraticClfParams, CosineClfParams, OscillatorNetwork>;

/// V = x^T P x / 2.
Clf make_quadratic_clf(const Matrix& P);
/// V = n - sum(cos x).
Clf make_cosine_clf(int n);
/// Kinetic plus potential energy of the oscillator network around (deltaS, 0).
Clf make_oscillator_clf(const OscillatorNetwork& net);
Clf make_clf(const ClfParams& params);

struct ClfReport {
    int samples = 0;
    double maxGradientDeviation = 0.0;
    Vector gradientWitness;
    double minValue = 0.0;
    Vector valueWitness;
    bool gradientPass = false;
    bool positivityPass = false;

    bool pass() const { return gradientPass && positivityPass; }
};

inline constexpr double kGradientTolerance = 1e-6;
inline constexpr double kFiniteDifferenceStep = 1e-5;
inline constexpr double kEquilibriumBall = 1e-3;

/// Sampled gradient and positivity check of clf on the domain of model.
ClfReport check_clf(const Clf& clf, const ControlAffineModel& model, int sampleCount = 4096,
                    std::uint64_t seed = 42);

} // namespace invopt
