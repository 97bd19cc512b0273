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

#include <random>

#include "invopt/errors.hpp"
#include "invopt/model.hpp"
#include "oracles.hpp"

using namespace invopt;

namespace {

OscillatorNetwork single_edge(double deltaStar = 0.0) {
    OscillatorNetwork net;
    net.incidence = incidence_matrix({{1, 2}}, 2);
    net.coupling = Matrix::Identity(1, 1);
    net.inertia = Matrix::Identity(2, 2);
    net.damping = Matrix::Identity(2, 2);
    net.deltaStar = Vector::Constant(1, deltaStar);
    net.deltaS = net.deltaStar;
    return net;
}

OscillatorNetwork triangle() {
    OscillatorNetwork net;
    net.incidence = incidence_matrix({{1, 2}, {2, 3}, {1, 3}}, 3);
    net.coupling = Matrix::Identity(3, 3);
    net.inertia = 0.01 * Matrix::Identity(3, 3);
    net.damping = 0.1 * Matrix::Identity(3, 3);
    net.deltaStar = Vector::Zero(3);
    net.deltaS = Vector::Zero(3);
    return net;
}

} // namespace

TEST(Incidence, SingleEdgeOrientation) {
    const Matrix B = incidence_matrix({{1, 2}}, 2);
    ASSERT_EQ(B.rows(), 2);
    ASSERT_EQ(B.cols(), 1);
    EXPECT_EQ(B(0, 0), -1.0);
    EXPECT_EQ(B(1, 0), 1.0);
}

TEST(Incidence, TriangleStructure) {
    const Matrix B = incidence_matrix({{1, 2}, {2, 3}, {1, 3}}, 3);
    EXPECT_EQ(B.colwise().sum(), Eigen::RowVectorXd::Zero(3));
    Eigen::FullPivLU<Matrix> lu(B);
    EXPECT_EQ(lu.rank(), 2);
    const Vector theta = (Vector(3) << 0.3, -0.1, 0.7).finished();
    EXPECT_TRUE((B.transpose() * theta).isApprox(oracle::triangle_edges(theta)));
}

TEST(Incidence, RandomConnectedGraphs) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 6;
        std::vector<std::pair<int, int>> edges;
        for (int i = 2; i <= n; ++i) {
            std::uniform_int_distribution<int> pick(1, i - 1);
            edges.emplace_back(pick(rng), i); // spanning tree
        }
        edges.emplace_back(1, n);
        const Matrix B = incidence_matrix(edges, n);
        EXPECT_LE(B.colwise().sum().cwiseAbs().maxCoeff(), 0.0);
        EXPECT_EQ(Eigen::FullPivLU<Matrix>(B).rank(), n - 1);
    }
}

TEST(Incidence, Errors) {
    EXPECT_THROW(incidence_matrix({{1, 2}}, 3), ConnectivityError);
    EXPECT_THROW(incidence_matrix({{1, 4}}, 3), IndexError);
    EXPECT_THROW(incidence_matrix({{0, 1}}, 2), IndexError);
}

TEST(Models, ExampleValues) {
    const ControlAffineModel sine = make_sine_model({1, std::nullopt});
    EXPECT_NEAR(sine.drift(Vector::Constant(1, oracle::kPi / 4))(0), -0.7071068, 1e-7);

    const ControlAffineModel integ = make_integrator_model({3});
    EXPECT_EQ(integ.drift((Vector(3) << 1, -2, 3).finished()), Vector::Zero(3));
    EXPECT_EQ(integ.m, 3);

    const ControlAffineModel osc = make_oscillator_model(single_edge());
    const Vector f = osc.drift((Vector(3) << 0.1, 0.0, 0.0).finished());
    EXPECT_NEAR(f(0), 0.0, 1e-15);
    // delta = theta_2 - theta_1 > 0: the leading node 2 is pulled back, node 1 forward.
    EXPECT_NEAR(f(1), 0.0998334, 1e-7);
    EXPECT_NEAR(f(2), -0.0998334, 1e-7);
}

TEST(Models, EquilibriumIsSteady) {
    LinearParams lin{(Matrix(2, 2) << -1, 2, 0, -3).finished(), (Matrix(2, 1) << 1, 0.5).finished(), std::nullopt};
    OscillatorNetwork net = triangle();
    net.deltaStar = (Vector(3) << 0.1, 0.05, 0.15).finished();
    net.deltaS = net.deltaStar;
    for (const ModelParams& params : std::vector<ModelParams>{SineParams{3, std::nullopt}, lin,
                                                              IntegratorParams{2}, net}) {
        const ControlAffineModel model = make_model(params);
        EXPECT_LE(model.drift(model.equilibrium).cwiseAbs().maxCoeff(), 1e-12) << model.name;
        EXPECT_EQ(model.input_matrix(model.equilibrium).rows(), model.m);
        EXPECT_EQ(model.input_matrix(model.equilibrium).cols(), model.n);
        EXPECT_EQ(static_cast<Eigen::Index>(model.stateLabels.size()), model.n);
    }
}

TEST(Models, DimensionAndPositivityErrors) {
    EXPECT_THROW(make_linear_model({Matrix::Identity(2, 2), Matrix::Ones(3, 1), std::nullopt}), DimensionError);
    EXPECT_THROW(make_linear_model({Matrix::Ones(2, 3), Matrix::Ones(2, 1), std::nullopt}), DimensionError);
    OscillatorNetwork net = triangle();
    net.inertia(1, 1) = 0.0;
    EXPECT_THROW(make_oscillator_model(net), PositivityError);
    net = triangle();
    net.damping(0, 1) = 0.1;
    EXPECT_ANY_THROW(make_oscillator_model(net));
    net = triangle();
    net.coupling = Matrix::Identity(2, 2);
    EXPECT_THROW(make_oscillator_model(net), DimensionError);
}

TEST(Models, SineDomain) {
    const ControlAffineModel sine = make_sine_model({2, 1.5});
    EXPECT_TRUE(sine.in_domain(Vector::Zero(2)));
    EXPECT_FALSE(sine.in_domain(Vector::Constant(2, 1.0))); // 2 cos 1 < 1.5
    EXPECT_FALSE(sine.in_domain(Vector::Constant(2, 1.6)));
    EXPECT_THROW(sine.require_in_domain(Vector::Constant(2, 1.6)), DomainError);
}

TEST(Oscillator, RotationalInvariance) {
    const OscillatorNetwork net = triangle();
    const ControlAffineModel model = make_oscillator_model(net);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    for (int trial = 0; trial < 20; ++trial) {
        Vector theta(3), omega(3);
        for (int i = 0; i < 3; ++i) {
            theta(i) = u(rng);
            omega(i) = u(rng);
        }
        const double alpha = u(rng);
        Vector x1(6), x2(6);
        x1 << net.incidence.transpose() * theta, omega;
        x2 << net.incidence.transpose() * (theta + alpha * Vector::Ones(3)), omega;
        EXPECT_LE((model.drift(x1) - model.drift(x2)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(SteadyState, Examples) {
    const SteadyStateResult a = steady_state_angles(single_edge(), Vector::Constant(1, 0.3));
    EXPECT_NEAR(a.angles(0), 0.0, 1e-10);

    OscillatorNetwork net = triangle();
    net.deltaStar = net.incidence.transpose() * (Vector(3) << 0.05, -0.02, 0.0).finished();
    const SteadyStateResult b = steady_state_angles(net, net.deltaStar);
    EXPECT_LE((b.angles - net.deltaStar).cwiseAbs().maxCoeff(), 1e-12);

    const Vector delta0 = oracle::triangle_edges((Vector(3) << 0.02, 0.015, 0.0).finished());
    const SteadyStateResult c = steady_state_angles(triangle(), delta0);
    EXPECT_LE((c.angles - oracle::triangle_steady_state(delta0)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE((c.simulated - c.angles).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(SteadyState, CycleComponentIsConserved) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (int trial = 0; trial < 5; ++trial) {
        const Vector delta0 = (Vector(3) << u(rng), u(rng), u(rng)).finished();
        OscillatorNetwork net = triangle();
        const SteadyStateResult r = steady_state_angles(net, delta0);
        EXPECT_LE((r.angles - oracle::triangle_steady_state(delta0)).cwiseAbs().maxCoeff(), 1e-8);
        net.deltaS = r.angles;
        net.cycleAnchor = delta0;
        EXPECT_TRUE(check_assumption1(net));
    }
}

TEST(SteadyState, DomainEscape) {
    // Released from rest at 0 around a set-point of 0.8, the lightly damped swing overshoots past 1.56.
    OscillatorNetwork net = single_edge(0.8);
    net.damping = 1e-3 * Matrix::Identity(2, 2);
    SteadyStateOptions opts;
    opts.maxTime = 50.0;
    EXPECT_THROW(steady_state_angles(net, Vector::Zero(1), opts), DomainError);
    SteadyStateOptions shortRun;
    shortRun.maxTime = 0.5;
    EXPECT_THROW(steady_state_angles(single_edge(), Vector::Constant(1, 0.3), shortRun), ConvergenceError);
}

TEST(Assumption1, Examples) {
    EXPECT_TRUE(check_assumption1(single_edge()));
    OscillatorNetwork off = single_edge();
    off.deltaS = Vector::Constant(1, 0.2);
    EXPECT_FALSE(check_assumption1(off));
    OscillatorNetwork net = triangle();
    net.deltaS = steady_state_angles(net, oracle::triangle_edges((Vector(3) << 0.1, -0.05, 0.0).finished())).angles;
    EXPECT_TRUE(check_assumption1(net));
    // A cycle component without an anchor is outside Im(B^T).
    net.deltaS = (Vector(3) << 0.01, 0.01, -0.01).finished();
    EXPECT_FALSE(check_assumption1(net));
}

TEST(CutSpace, ResidualAndProjection) {
    const Matrix B = incidence_matrix({{1, 2}, {2, 3}, {1, 3}}, 3);
    const Vector inside = B.transpose() * (Vector(3) << 1, 2, 3).finished();
    EXPECT_LE(cut_space_residual(B, inside), 1e-14);
    const Vector cycle = (Vector(3) << 1, 1, -1).finished();
    EXPECT_NEAR(cut_space_residual(B, cycle), 1.0, 1e-14);
    EXPECT_LE(project_onto_cut_space(B, cycle).norm(), 1e-14);
}

TEST(Sampling, DeterministicAndInDomain) {
    const ControlAffineModel osc = make_oscillator_model(triangle());
    const auto a = sample_states(osc, 200, 42);
    const auto b = sample_states(osc, 200, 42);
    const auto c = sample_states(osc, 200, 43);
    ASSERT_EQ(a.size(), 200u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i], b[i]);
        EXPECT_TRUE(osc.in_domain(a[i]));
        EXPECT_GT((a[i] - osc.equilibrium).norm(), 1e-3);
    }
    EXPECT_NE(a[0], c[0]);
    const ControlAffineModel sine = make_sine_model({2, std::nullopt});
    const auto grid = grid_states(sine, 5);
    EXPECT_GE(grid.size(), 20u);
    for (const auto& x : grid) EXPECT_TRUE(sine.in_domain(x));
    for (const auto& x : block_probe_states(osc, 10, 1)) {
        const bool deltaOnly = x.tail(3).isZero(0.0);
        const bool omegaOnly = (x.head(3) - osc.equilibrium.head(3)).isZero(0.0);
        EXPECT_TRUE(deltaOnly || omegaOnly);
    }
}
