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

#include "invopt/model.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <sstream>

namespace invopt {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::string> indexed_labels(const std::string& prefix, Eigen::Index count) {
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(count));
    for (Eigen::Index i = 0; i < count; ++i) out.push_back(prefix + "_" + std::to_string(i + 1));
    return out;
}

void require_positive_diagonal(const Matrix& D, Eigen::Index size, const std::string& what) {
    if (D.rows() != size || D.cols() != size) {
        throw DimensionError(what + " must be " + std::to_string(size) + "x" +
                             std::to_string(size));
    }
    const Matrix offDiag = D - Matrix(D.diagonal().asDiagonal());
    if (offDiag.cwiseAbs().maxCoeff() > 0.0) throw DimensionError(what + " must be diagonal");
    if (D.diagonal().minCoeff() <= 0.0) {
        throw PositivityError(what + " must have a strictly positive diagonal");
    }
}

Vector sin_of(const Vector& v) { return v.array().sin().matrix(); }

} // namespace

// ---------------------------------------------------------------------------
// Box

bool Box::contains(const Vector& x) const {
    if (x.size() != lower.size()) return false;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!(x(i) >= lower(i) && x(i) <= upper(i))) return false;
    }
    return true;
}

bool Box::bounded() const { return lower.allFinite() && upper.allFinite(); }

Box Box::sampling_box(double fallback) const {
    Box out = *this;
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
        if (!std::isfinite(out.lower(i))) out.lower(i) = -fallback;
        if (!std::isfinite(out.upper(i))) out.upper(i) = fallback;
    }
    return out;
}

Box Box::unbounded(Eigen::Index n) {
    return Box{Vector::Constant(n, -kInf), Vector::Constant(n, kInf)};
}

Box Box::symmetric(Eigen::Index n, double halfWidth) {
    return Box{Vector::Constant(n, -halfWidth), Vector::Constant(n, halfWidth)};
}

std::string to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::Sine: return "sine";
    case ModelKind::Linear: return "linear";
    case ModelKind::Integrator: return "integrator";
    case ModelKind::Oscillator: return "oscillator";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// ControlAffineModel

bool ControlAffineModel::in_domain(const Vector& x) const {
    if (x.size() != n || !x.allFinite()) return false;
    if (!domain.contains(x)) return false;
    return !constraint || constraint(x);
}

void ControlAffineModel::require_in_domain(const Vector& x) const {
    if (x.size() != n) {
        throw DimensionError(name + ": state has length " + std::to_string(x.size()) +
                             ", expected " + std::to_string(n));
    }
    if (!in_domain(x)) {
        std::ostringstream os;
        os << name << ": state outside the model domain: [" << x.transpose() << "]";
        throw DomainError(os.str());
    }
}

Vector ControlAffineModel::drift(const Vector& x) const { return f(x); }

Matrix ControlAffineModel::input_matrix(const Vector& x) const { return G(x); }

Matrix ControlAffineModel::disturbance_matrix(const Vector& x) const {
    if (nw == 0 || !Gbar) return Matrix::Zero(0, n);
    return Gbar(x);
}

Vector ControlAffineModel::rhs(const Vector& x, const Vector& u, const Vector& w) const {
    if (u.size() != m) throw DimensionError(name + ": input has wrong length");
    Vector dx = f(x) + G(x).transpose() * u;
    if (w.size() > 0) {
        if (w.size() != nw) throw DimensionError(name + ": disturbance has wrong length");
        dx += disturbance_matrix(x).transpose() * w;
    }
    return dx;
}

// ---------------------------------------------------------------------------
// Graph utilities

Matrix incidence_matrix(const std::vector<std::pair<int, int>>& edges, int n) {
    if (n <= 0) throw IndexError("graph must have at least one node");
    Matrix B = Matrix::Zero(n, static_cast<Eigen::Index>(edges.size()));
    std::vector<std::vector<int>> adjacency(static_cast<std::size_t>(n));
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [source, sink] = edges[e];
        if (source < 1 || source > n || sink < 1 || sink > n) {
            throw IndexError("edge " + std::to_string(e + 1) + " references a node outside 1.." +
                             std::to_string(n));
        }
        if (source == sink) throw IndexError("edge " + std::to_string(e + 1) + " is a self loop");
        const auto col = static_cast<Eigen::Index>(e);
        B(source - 1, col) = -1.0;
        B(sink - 1, col) = 1.0;
        adjacency[static_cast<std::size_t>(source - 1)].push_back(sink - 1);
        adjacency[static_cast<std::size_t>(sink - 1)].push_back(source - 1);
    }

    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = true;
    int reached = 1;
    while (!frontier.empty()) {
        const int node = frontier.front();
        frontier.pop();
        for (int next : adjacency[static_cast<std::size_t>(node)]) {
            if (!seen[static_cast<std::size_t>(next)]) {
                seen[static_cast<std::size_t>(next)] = true;
                ++reached;
                frontier.push(next);
            }
        }
    }
    if (reached != n) {
        throw ConnectivityError("graph is disconnected: " + std::to_string(n - reached) +
                                " node(s) unreachable from node 1");
    }
    return B;
}

Vector project_onto_cut_space(const Matrix& incidence, const Vector& v) {
    const Matrix Bt = incidence.transpose();
    const Vector theta = Bt.completeOrthogonalDecomposition().solve(v);
    return Bt * theta;
}

double cut_space_residual(const Matrix& incidence, const Vector& v) {
    if (v.size() == 0) return 0.0;
    return (v - project_onto_cut_space(incidence, v)).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Built-in models

ControlAffineModel make_sine_model(const SineParams& params) {
    if (params.n < 1) throw DimensionError("sine model needs n >= 1");
    const Eigen::Index n = params.n;
    const double c = params.c.value_or(static_cast<double>(n) * std::cos(kPi / 2.0 * 0.99));
    if (!(c > 0.0 && c < static_cast<double>(n))) {
        throw PreconditionError("sine model constant c must satisfy 0 < c < n");
    }

    ControlAffineModel model;
    model.name = "sine";
    model.kind = ModelKind::Sine;
    model.n = n;
    model.m = n;
    model.nw = 0;
    model.f = [](const Vector& x) -> Vector { return -sin_of(x); };
    model.G = [n](const Vector&) -> Matrix { return Matrix::Identity(n, n); };
    model.equilibrium = Vector::Zero(n);
    model.domain = Box::symmetric(n, kPi / 2.0 * 0.99);
    model.constraint = [c](const Vector& x) { return x.array().cos().sum() >= c; };
    model.blocks = {StateBlock{0, n, "x"}};
    model.stateLabels = indexed_labels("x", n);
    return model;
}

ControlAffineModel make_linear_model(const LinearParams& params) {
    numerics::require_square(params.A, "linear model A");
    const Eigen::Index n = params.A.rows();
    if (params.B.rows() != n) throw DimensionError("linear model B must have n rows");
    const Matrix A = params.A;
    const Matrix Bt = params.B.transpose();

    ControlAffineModel model;
    model.name = "linear";
    model.kind = ModelKind::Linear;
    model.n = n;
    model.m = params.B.cols();
    model.f = [A](const Vector& x) -> Vector { return A * x; };
    model.G = [Bt](const Vector&) -> Matrix { return Bt; };
    if (params.Bbar) {
        if (params.Bbar->rows() != n) throw DimensionError("linear model Bbar must have n rows");
        const Matrix Bbart = params.Bbar->transpose();
        model.nw = params.Bbar->cols();
        model.Gbar = [Bbart](const Vector&) -> Matrix { return Bbart; };
    }
    model.equilibrium = Vector::Zero(n);
    model.domain = Box::unbounded(n);
    model.blocks = {StateBlock{0, n, "x"}};
    model.stateLabels = indexed_labels("x", n);
    return model;
}

ControlAffineModel make_integrator_model(const IntegratorParams& params) {
    if (params.n < 1) throw DimensionError("integrator model needs n >= 1");
    const Eigen::Index n = params.n;
    ControlAffineModel model;
    model.name = "integrator";
    model.kind = ModelKind::Integrator;
    model.n = n;
    model.m = n;
    model.f = [n](const Vector&) -> Vector { return Vector::Zero(n); };
    model.G = [n](const Vector&) -> Matrix { return Matrix::Identity(n, n); };
    model.equilibrium = Vector::Zero(n);
    model.domain = Box::unbounded(n);
    model.blocks = {StateBlock{0, n, "x"}};
    model.stateLabels = indexed_labels("x", n);
    return model;
}

void validate_network(const OscillatorNetwork& net) {
    const Eigen::Index nodes = net.nodes();
    const Eigen::Index edges = net.edges();
    if (nodes < 2 || edges < 1) throw DimensionError("oscillator network needs >= 2 nodes and an edge");
    for (Eigen::Index e = 0; e < edges; ++e) {
        int plus = 0;
        int minus = 0;
        for (Eigen::Index i = 0; i < nodes; ++i) {
            const double v = net.incidence(i, e);
            if (v == 1.0) {
                ++plus;
            } else if (v == -1.0) {
                ++minus;
            } else if (v != 0.0) {
                throw DimensionError("incidence entries must be -1, 0 or +1");
            }
        }
        if (plus != 1 || minus != 1) {
            throw DimensionError("incidence column " + std::to_string(e + 1) +
                                 " must have exactly one +1 and one -1");
        }
    }
    require_positive_diagonal(net.coupling, edges, "coupling Xi");
    require_positive_diagonal(net.inertia, nodes, "inertia M");
    require_positive_diagonal(net.damping, nodes, "damping D");
    if (net.deltaStar.size() != edges) throw DimensionError("deltaStar must have one entry per edge");
    if (net.deltaS.size() != edges) throw DimensionError("deltaS must have one entry per edge");
    if (net.cycleAnchor.size() != 0 && net.cycleAnchor.size() != edges) {
        throw DimensionError("cycleAnchor must be empty or have one entry per edge");
    }
}

Vector oscillator_drift(const OscillatorNetwork& net, const Vector& x) {
    const Eigen::Index me = net.edges();
    const Eigen::Index nn = net.nodes();
    const auto delta = x.head(me);
    const auto omega = x.tail(nn);
    const Vector minv = net.inertia.diagonal().cwiseInverse();
    Vector dx(me + nn);
    dx.head(me) = net.incidence.transpose() * omega;
    const Vector power =
        net.incidence * (net.coupling.diagonal().cwiseProduct(sin_of(delta) - sin_of(net.deltaStar)));
    dx.tail(nn) = -minv.cwiseProduct(net.damping.diagonal().cwiseProduct(omega)) -
                  minv.cwiseProduct(power);
    return dx;
}

ControlAffineModel make_oscillator_model(const OscillatorNetwork& net) {
    validate_network(net);
    const Eigen::Index me = net.edges();
    const Eigen::Index nn = net.nodes();
    const Eigen::Index n = me + nn;

    ControlAffineModel model;
    model.name = "oscillator";
    model.kind = ModelKind::Oscillator;
    model.n = n;
    model.m = me;
    model.nw = nn;
    model.f = [net](const Vector& x) -> Vector { return oscillator_drift(net, x); };

    Matrix G = Matrix::Zero(me, n);
    G.leftCols(me) = Matrix::Identity(me, me);
    model.G = [G](const Vector&) -> Matrix { return G; };

    Matrix Gbar = Matrix::Zero(nn, n);
    // Gbar^T w = (0, M^{-1} w)
    Gbar.rightCols(nn) = net.inertia.diagonal().cwiseInverse().asDiagonal();
    model.Gbar = [Gbar](const Vector&) -> Matrix { return Gbar; };

    model.equilibrium = Vector::Zero(n);
    model.equilibrium.head(me) = net.deltaS;

    model.domain = Box::unbounded(n);
    model.domain.lower.head(me).setConstant(-kOscillatorAngleLimit);
    model.domain.upper.head(me).setConstant(kOscillatorAngleLimit);

    model.blocks = {StateBlock{0, me, "delta"}, StateBlock{me, nn, "omega"}};
    model.stateLabels = indexed_labels("delta", me);
    for (auto& label : indexed_labels("omega", nn)) model.stateLabels.push_back(label);
    model.network = net;
    return model;
}

ControlAffineModel make_model(const ModelParams& params) {
    return std::visit(
        [](const auto& p) -> ControlAffineModel {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, SineParams>) {
                return make_sine_model(p);
            } else if constexpr (std::is_same_v<T, LinearParams>) {
                return make_linear_model(p);
            } else if constexpr (std::is_same_v<T, IntegratorParams>) {
                return make_integrator_model(p);
            } else {
                return make_oscillator_model(p);
            }
        },
        params);
}

// ---------------------------------------------------------------------------
// Steady state

namespace {

Vector power_imbalance(const OscillatorNetwork& net, const Vector& delta) {
    return net.incidence *
           (net.coupling.diagonal().cwiseProduct(sin_of(delta) - sin_of(net.deltaStar)));
}

// Damped Newton on delta = delta0 + B^T [theta_r; 0] with the last node grounded.
Vector newton_steady_state(const OscillatorNetwork& net, const Vector& delta0, int maxIterations,
                           int& iterations) {
    const Eigen::Index nn = net.nodes();
    const Eigen::Index nr = nn - 1;
    const Matrix Br = net.incidence.topRows(nr);
    const Vector xi = net.coupling.diagonal();

    Vector theta = Vector::Zero(nr);
    auto delta_of = [&](const Vector& th) -> Vector { return delta0 + Br.transpose() * th; };
    auto residual_of = [&](const Vector& th) -> Vector {
        return power_imbalance(net, delta_of(th)).head(nr);
    };

    Vector F = residual_of(theta);
    iterations = 0;
    while (iterations < maxIterations) {
        if (F.cwiseAbs().maxCoeff() < 1e-15) break;
        ++iterations;
        const Vector delta = delta_of(theta);
        const Matrix J =
            Br * xi.cwiseProduct(delta.array().cos().matrix()).asDiagonal() * Br.transpose();
        const Vector step = J.fullPivLu().solve(-F);
        if (!step.allFinite()) throw ConvergenceError("steady state Newton step is not finite");
        double damping = 1.0;
        const double current = F.norm();
        Vector candidate = theta + step;
        Vector Fc = residual_of(candidate);
        while (Fc.norm() >= current && damping > 1e-10) {
            damping *= 0.5;
            candidate = theta + damping * step;
            Fc = residual_of(candidate);
        }
        if (Fc.norm() >= current) break; // no further progress at machine precision
        theta = candidate;
        F = Fc;
        if (damping == 1.0 && step.cwiseAbs().maxCoeff() < 1e-15) break;
    }
    if (F.cwiseAbs().maxCoeff() > 1e-12) {
        throw ConvergenceError("steady state Newton solve did not converge");
    }
    return delta_of(theta);
}

} // namespace

SteadyStateResult steady_state_angles(const OscillatorNetwork& net, const Vector& delta0,
                                      const SteadyStateOptions& options) {
    OscillatorNetwork probe = net;
    if (probe.deltaS.size() != net.edges()) probe.deltaS = Vector::Zero(net.edges());
    validate_network(probe);
    if (delta0.size() != net.edges()) throw DimensionError("delta0 must have one entry per edge");
    if (delta0.cwiseAbs().maxCoeff() > kOscillatorAngleLimit) {
        throw DomainError("delta0 lies outside the oscillator angle box");
    }

    const Eigen::Index me = net.edges();
    const Eigen::Index nn = net.nodes();
    Vector x = Vector::Zero(me + nn);
    x.head(me) = delta0;

    auto rhs = [&](double, const Vector& s) -> Vector { return oscillator_drift(probe, s); };
    SteadyStateResult result;
    double t = 0.0;
    const auto maxSteps = static_cast<long long>(std::ceil(options.maxTime / options.step));
    bool settled = false;
    for (long long k = 0; k <= maxSteps; ++k) {
        if (rhs(t, x).cwiseAbs().maxCoeff() < options.driftTolerance) {
            settled = true;
            break;
        }
        x = numerics::rk4_step(rhs, t, x, options.step);
        t = static_cast<double>(k + 1) * options.step;
        if (!x.allFinite()) throw NumericalBlowupError("unforced oscillator simulation blew up");
        if (x.head(me).cwiseAbs().maxCoeff() >= 1.5707963267948966) {
            throw DomainError("unforced oscillator left the angle box (|delta| >= pi/2)");
        }
    }
    if (!settled) throw ConvergenceError("unforced oscillator did not settle within the time budget");
    result.simulated = x.head(me);
    result.simulatedTime = t;

    result.angles = newton_steady_state(probe, delta0, options.maxNewtonIterations,
                                        result.newtonIterations);
    const double gap = (result.angles - result.simulated).cwiseAbs().maxCoeff();
    if (gap > options.agreementTolerance) {
        throw ConvergenceError("simulated and Newton steady states disagree by " +
                               std::to_string(gap));
    }
    if (result.angles.cwiseAbs().maxCoeff() >= 1.5707963267948966) {
        throw DomainError("steady state lies outside (-pi/2, pi/2)");
    }
    result.balanceResidual = power_imbalance(probe, result.angles).cwiseAbs().maxCoeff();
    return result;
}

bool check_assumption1(const OscillatorNetwork& net) {
    try {
        validate_network(net);
    } catch (const Error&) {
        return false;
    }
    if (power_imbalance(net, net.deltaS).cwiseAbs().maxCoeff() > 1e-8) return false;
    if (net.deltaS.cwiseAbs().maxCoeff() >= 1.5707963267948966) return false;
    const Vector anchored =
        net.cycleAnchor.size() == 0 ? net.deltaS : Vector(net.deltaS - net.cycleAnchor);
    return cut_space_residual(net.incidence, anchored) <= 1e-8;
}

// ---------------------------------------------------------------------------
// Sampling

std::vector<Vector> sample_states(const ControlAffineModel& model, int count, std::uint64_t seed,
                                  double exclusionRadius, double fallback) {
    const Box box = model.domain.sampling_box(fallback);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    const long long budget = 1000LL * std::max(count, 1);
    for (long long attempt = 0; attempt < budget && static_cast<int>(out.size()) < count; ++attempt) {
        Vector x(model.n);
        for (Eigen::Index i = 0; i < model.n; ++i) {
            x(i) = box.lower(i) + (box.upper(i) - box.lower(i)) * unit(rng);
        }
        if (!model.in_domain(x)) continue;
        if ((x - model.equilibrium).norm() <= exclusionRadius) continue;
        out.push_back(std::move(x));
    }
    return out;
}

std::vector<Vector> grid_states(const ControlAffineModel& model, int pointsPerAxis,
                                double fallback) {
    if (pointsPerAxis < 2) throw PreconditionError("grid needs at least 2 points per axis");
    const Box box = model.domain.sampling_box(fallback);
    const Eigen::Index n = model.n;
    std::vector<Vector> out;
    std::vector<int> index(static_cast<std::size_t>(n), 0);
    while (true) {
        Vector x(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double frac = static_cast<double>(index[static_cast<std::size_t>(i)]) /
                                static_cast<double>(pointsPerAxis - 1);
            x(i) = box.lower(i) + (box.upper(i) - box.lower(i)) * frac;
        }
        if (model.in_domain(x)) out.push_back(std::move(x));
        Eigen::Index k = 0;
        while (k < n && ++index[static_cast<std::size_t>(k)] == pointsPerAxis) {
            index[static_cast<std::size_t>(k)] = 0;
            ++k;
        }
        if (k == n) break;
    }
    return out;
}

std::vector<Vector> block_probe_states(const ControlAffineModel& model, int countPerBlock,
                                       std::uint64_t seed, double exclusionRadius,
                                       double fallback) {
    const Box box = model.domain.sampling_box(fallback);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vector> out;
    auto accept = [&](Vector x) {
        if (model.in_domain(x) && (x - model.equilibrium).norm() > exclusionRadius) {
            out.push_back(std::move(x));
        }
    };
    for (const StateBlock& block : model.blocks) {
        for (int s = 0; s < countPerBlock; ++s) {
            Vector x = model.equilibrium;
            for (Eigen::Index i = block.start; i < block.start + block.size; ++i) {
                x(i) = box.lower(i) + (box.upper(i) - box.lower(i)) * unit(rng);
            }
            accept(std::move(x));
        }
        if (block.size <= 10) {
            const long long corners = 1LL << block.size;
            for (long long mask = 0; mask < corners; ++mask) {
                Vector x = model.equilibrium;
                for (Eigen::Index i = 0; i < block.size; ++i) {
                    const Eigen::Index j = block.start + i;
                    x(j) = ((mask >> i) & 1LL) ? box.upper(j) : box.lower(j);
                }
                accept(std::move(x));
            }
        }
    }
    return out;
}

} // namespace invopt
