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
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "invopt/numerics.hpp"

namespace invopt {

/// Axis-aligned box; infinite bounds mark unbounded coordinates.
struct Box {
    Vector lower;
    Vector upper;

    bool contains(const Vector& x) const;
    bool bounded() const;
    /// Finite box for sampling: unbounded coordinates are clipped to [-fallback, fallback].
    Box sampling_box(double fallback = 5.0) const;

    static Box unbounded(Eigen::Index n);
    static Box symmetric(Eigen::Index n, double halfWidth);
};

enum class ModelKind { Sine, Linear, Integrator, Oscillator };

std::string to_string(ModelKind kind);

/// Contiguous slice of the state vector with a shared physical meaning.
struct StateBlock {
    Eigen::Index start = 0;
    Eigen::Index size = 0;
    std::string label;
};

/// Network of coupled second-order oscillators in edge coordinates.
struct OscillatorNetwork {
    Matrix incidence; // nodes x edges
    Matrix coupling;  // edges x edges, diagonal
    Matrix inertia;   // nodes x nodes, diagonal
    Matrix damping;   // nodes x nodes, diagonal
    Vector deltaStar; // nominal angle differences
    Vector deltaS;    // induced steady state
    /// Reference point of the invariant affine set deltaS - cycleAnchor in Im(B^T).
    /// Zero unless the network was initialized from edge coordinates outside Im(B^T).
    Vector cycleAnchor;

    Eigen::Index nodes() const { return incidence.rows(); }
    Eigen::Index edges() const { return incidence.cols(); }
};

/// dx/dt = f(x) + G(x)^T u + Gbar(x)^T w, with G(x) of size m x n and Gbar(x) of size nw x n.
struct ControlAffineModel {
    std::string name;
    ModelKind kind = ModelKind::Linear;
    Eigen::Index n = 0;
    Eigen::Index m = 0;
    Eigen::Index nw = 0;
    std::function<Vector(const Vector&)> f;
    std::function<Matrix(const Vector&)> G;
    std::function<Matrix(const Vector&)> Gbar;
    Vector equilibrium;
    Box domain;
    /// Additional domain constraint beyond the box; empty means none.
    std::function<bool(const Vector&)> constraint;
    std::vector<StateBlock> blocks;
    std::vector<std::string> stateLabels;
    std::optional<OscillatorNetwork> network;

    bool in_domain(const Vector& x) const;
    void require_in_domain(const Vector& x) const;

    Vector drift(const Vector& x) const;
    Matrix input_matrix(const Vector& x) const;
    Matrix disturbance_matrix(const Vector& x) const;
    /// Full right-hand side; w may be empty when nw == 0.
    Vector rhs(const Vector& x, const Vector& u, const Vector& w) const;
};

/// Incidence matrix for 1-based (source, sink) pairs; +1 at the sink row.
Matrix incidence_matrix(const std::vector<std::pair<int, int>>& edges, int n);

/// Residual of the least-squares projection of v onto Im(B^T), infinity norm.
double cut_space_residual(const Matrix& incidence, const Vector& v);
Vector project_onto_cut_space(const Matrix& incidence, const Vector& v);

struct SineParams {
    int n = 1;
    /// Lower bound of sum(cos x); defaults to n cos(0.99 pi / 2).
    std::optional<double> c;
};

struct LinearParams {
    Matrix A;
    Matrix B;
    std::optional<Matrix> Bbar;
};

struct IntegratorParams {
    int n = 1;
};

using ModelParams = std::variant<SineParams, LinearParams, IntegratorParams, OscillatorNetwork>;

ControlAffineModel make_sine_model(const SineParams& params);
ControlAffineModel make_linear_model(const LinearParams& params);
ControlAffineModel make_integrator_model(const IntegratorParams& params);
ControlAffineModel make_oscillator_model(const OscillatorNetwork& net);
ControlAffineModel make_model(const ModelParams& params);

/// Half-width of the edge-angle box used by the oscillator model.
inline constexpr double kOscillatorAngleLimit = 1.5707963267948966 - 0.01;

/// Structural checks on incidence, diagonals and sizes. Throws on violation.
void validate_network(const OscillatorNetwork& net);

/// Unforced oscillator dynamics in (delta, omega) coordinates.
Vector oscillator_drift(const OscillatorNetwork& net, const Vector& x);

struct SteadyStateOptions {
    double step = 1e-3;
    double maxTime = 2000.0;
    double driftTolerance = 1e-10;
    int maxNewtonIterations = 100;
    double agreementTolerance = 1e-8;
};

struct SteadyStateResult {
    Vector angles;    // Newton-polished steady state
    Vector simulated; // end point of the unforced simulation
    double simulatedTime = 0.0;
    int newtonIterations = 0;
    double balanceResidual = 0.0; // ||B Xi (sin angles - sin deltaStar)||_inf
};

/// Induced steady state reached by the unforced network from (delta0, 0).
SteadyStateResult steady_state_angles(const OscillatorNetwork& net, const Vector& delta0,
                                      const SteadyStateOptions& options = {});

/// Power balance, angle range and cut-space membership of net.deltaS.
bool check_assumption1(const OscillatorNetwork& net);

/// Seeded uniform samples of the model domain (sampling box for unbounded
/// coordinates), excluding a ball of radius exclusionRadius around the equilibrium.
std::vector<Vector> sample_states(const ControlAffineModel& model, int count, std::uint64_t seed,
                                  double exclusionRadius = 1e-3, double fallback = 5.0);

/// Tensor grid with pointsPerAxis nodes per coordinate on the sampling box,
/// restricted to the domain.
std::vector<Vector> grid_states(const ControlAffineModel& model, int pointsPerAxis,
                                double fallback = 5.0);

/// Samples that move one state block at a time, all other coordinates held at
/// the equilibrium; includes the block's box corners when the block is small.
std::vector<Vector> block_probe_states(const ControlAffineModel& model, int countPerBlock,
                                       std::uint64_t seed, double exclusionRadius = 1e-3,
                                       double fallback = 5.0);

} // namespace invopt
