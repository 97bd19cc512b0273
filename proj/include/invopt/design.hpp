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

#include "invopt/clf.hpp"
#include "invopt/model.hpp"

namespace invopt {

enum class PenaltyMode { Nominal, Robust };

std::string to_string(PenaltyMode mode);

/// Input penalty R and, in robust mode, disturbance penalty S with weight xi.
struct PenaltyConfig {
    Matrix R;
    std::optional<Matrix> S;
    std::optional<double> xi;

    static PenaltyConfig nominal(Matrix R);
    static PenaltyConfig robust(Matrix R, Matrix S, double xi);

    PenaltyMode mode() const { return S ? PenaltyMode::Robust : PenaltyMode::Nominal; }
    /// Throws PositivityError / ModeError when the invariants do not hold.
    void validate() const;
};

/// Pointwise quantities of a designed problem at one state.
struct DesignEvaluation {
    Vector gradient; // grad V
    Vector drift;    // f(x)
    Vector u;        // optimal control
    Vector w;        // worst-case disturbance (empty in nominal mode)
    double q = 0.0;  // designed state cost
};

/// Model, control Lyapunov function and penalties bound into one optimal control problem
/// whose state cost is constructed so that V solves the HJB (HJI) equation.
class DesignedProblem {
public:
    DesignedProblem(ControlAffineModel model, Clf clf, PenaltyConfig penalties);

    const ControlAffineModel& model() const { return model_; }
    const Clf& clf() const { return clf_; }
    const PenaltyConfig& penalties() const { return penalties_; }
    PenaltyMode mode() const { return penalties_.mode(); }
    bool robust() const { return mode() == PenaltyMode::Robust; }
    double xi() const { return penalties_.xi.value_or(0.0); }

    /// u* = -1/2 R^{-1} G(x) grad V.
    Vector optimal_control(const Vector& x) const;
    /// w* = 1/(2 xi) S^{-1} Gbar(x) grad V. Robust mode only.
    Vector worst_disturbance(const Vector& x) const;
    /// Designed state cost q(x), in its defining form.
    double designed_cost(const Vector& x) const;
    /// Same q written as -grad V^T f + 1/4 |G grad V|^2_{R^-1} [- 1/(4 xi) |Gbar grad V|^2_{S^-1}].
    double designed_cost_quadratic_form(const Vector& x) const;
    /// L = q + u^T R u [- xi w^T S w].
    double running_cost(const Vector& x, const Vector& u, const Vector& w) const;
    /// L(x, u, w) + grad V^T (f + G^T u [+ Gbar^T w]).
    double hamiltonian(const Vector& x, const Vector& u, const Vector& w) const;
    /// Hamiltonian at the saddle pair (u*, w*); zero by construction.
    double hjb_residual(const Vector& x) const;

    /// Full pointwise evaluation; checkDomain=false skips the domain test (RK4 stages).
    DesignEvaluation evaluate(const Vector& x, bool checkDomain = true) const;

    /// Copy whose state cost is replaced by x^T Q x (used to test alternative cost matrices).
    DesignedProblem with_state_cost(const Matrix& Q) const;
    bool has_state_cost_override() const { return stateCost_.has_value(); }

private:
    struct Unchecked {};
    DesignedProblem(Unchecked, ControlAffineModel model, Clf clf, PenaltyConfig penalties);

    double state_cost(const Vector& x, const DesignEvaluation& e) const;
    void spot_check() const;

    ControlAffineModel model_;
    Clf clf_;
    PenaltyConfig penalties_;
    Matrix Rinv_;
    Matrix Sinv_;
    std::optional<Matrix> stateCost_;
};

struct AdmissibilityReport {
    int samples = 0;
    double minCost = 0.0;
    Vector argmin;
    bool pass = false;
};

/// Sampled strict positivity of q away from the equilibrium (uniform samples plus
/// per-block probes).
AdmissibilityReport admissibility_check(const DesignedProblem& p, int sampleCount = 4096,
                                        std::uint64_t seed = 42);

struct LinearRobustTerms {
    Matrix Bbar;
    Matrix S;
    double xi = 1.0;
};

struct LinearStateCost {
    /// Q with q(x) = x^T Q x for V = x^T P x / 2:
    /// Q = 1/4 P B R^{-1} B^T P - (A^T P + P A)/2 [- 1/(4 xi) P Bbar S^{-1} Bbar^T P].
    Matrix Q;
    /// The variant with the drift term -(A^T P + P A) not halved.
    Matrix unhalvedDrift;
};

LinearStateCost linear_Q(const Matrix& A, const Matrix& B, const Matrix& P, const Matrix& R,
                         const std::optional<LinearRobustTerms>& robust = std::nullopt);

struct RetuneResult {
    DesignedProblem problem;
    bool loewnerHolds = false;
    std::vector<std::string> warnings;
    AdmissibilityReport admissibility;
};

/// Replace R (and S) keeping the CLF; q is rebuilt and admissibility re-sampled.
RetuneResult retune(const DesignedProblem& p, const Matrix& Rprime,
                    const std::optional<Matrix>& Sprime = std::nullopt, int sampleCount = 4096,
                    std::uint64_t seed = 42);

/// Closed-form state cost and controller for the oscillator network with its energy CLF.
struct OscillatorClosedForms {
    std::function<double(const Vector&)> q;
    std::function<Vector(const Vector&)> u;
    /// D - S^{-1}/(4 xi) in robust mode, D otherwise.
    Matrix frequencyWeight;
};

OscillatorClosedForms oscillator_closed_forms(const OscillatorNetwork& net, const Matrix& R,
                                              const std::optional<Matrix>& S = std::nullopt,
                                              std::optional<double> xi = std::nullopt);

} // namespace invopt
