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
#include "invopt/numerics.hpp"
#include "oracles.hpp"

using namespace invopt;
using namespace invopt::numerics;

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        Eigen::Index j = 0;
        for (double v : r) M(i, j++) = v;
        ++i;
    }
    return M;
}

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

} // namespace

TEST(SymEig, SmallCases) {
    EXPECT_TRUE(sym_eigvals(Matrix::Identity(2, 2)).isApprox(Vector::Ones(2)));
    const Vector swap = sym_eigvals(mat({{0, 1}, {1, 0}}));
    EXPECT_NEAR(swap(0), -1.0, 1e-14);
    EXPECT_NEAR(swap(1), 1.0, 1e-14);
    const Vector diag = sym_eigvals(mat({{3, 0}, {0, 2}}));
    EXPECT_DOUBLE_EQ(diag(0), 2.0);
    EXPECT_DOUBLE_EQ(diag(1), 3.0);
}

TEST(SymEig, RejectsBadInput) {
    EXPECT_THROW(sym_eigvals(Matrix::Zero(2, 3)), DimensionError);
    EXPECT_THROW(sym_eigvals(mat({{1, 2}, {0, 1}})), SymmetryError);
}

TEST(SymEig, MatchesEigenAndTrace) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = trial % 6 + 1;
        const Matrix G = oracle::random_matrix(rng, n, n);
        const Matrix A = G + G.transpose();
        const SymmetricEigen<double> e = sym_eig(A);
        const Vector ref = Eigen::SelfAdjointEigenSolver<Matrix>(A).eigenvalues();
        EXPECT_LE((e.values - ref).cwiseAbs().maxCoeff(), 1e-10 * (1.0 + A.norm()));
        EXPECT_NEAR(e.values.sum(), A.trace(), 1e-10 * (1.0 + std::abs(A.trace())));
        for (Eigen::Index i = 1; i < n; ++i) EXPECT_LE(e.values(i - 1), e.values(i));
        const Matrix rebuilt = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
        EXPECT_LE((rebuilt - A).norm(), 1e-10 * (1.0 + A.norm()));
    }
}

TEST(IsPd, Examples) {
    EXPECT_TRUE(is_pd(Matrix::Identity(2, 2), 0.0));
    EXPECT_FALSE(is_pd(Matrix::Zero(2, 2), 0.0));
    EXPECT_FALSE(is_pd(mat({{1, 2}, {2, 1}}), 0.0));
}

TEST(Loewner, Examples) {
    const Matrix I = Matrix::Identity(2, 2);
    EXPECT_TRUE(loewner_leq(0.5 * I, I, 0.0));
    EXPECT_FALSE(loewner_leq(I, 0.5 * I, 0.0));
    EXPECT_FALSE(loewner_leq(mat({{1, 0}, {0, 3}}), 2.0 * I, 0.0));
    EXPECT_THROW(loewner_leq(I, Matrix::Identity(3, 3), 0.0), DimensionError);
}

TEST(Loewner, ReflexiveOnRandomSymmetric) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const Matrix G = oracle::random_matrix(rng, 4, 4);
        const Matrix A = G + G.transpose();
        EXPECT_TRUE(loewner_leq(A, A, 0.0));
    }
}

TEST(Lyapunov, MatchesIndependentSolve) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n = trial % 4 + 1;
        const Matrix A = oracle::random_stable(rng, n);
        const Matrix Q = oracle::random_spd(rng, n);
        const Matrix X = solve_lyapunov(A, Q);
        EXPECT_LE((A.transpose() * X + X * A + Q).norm(), 1e-10 * (1.0 + Q.norm()));
        EXPECT_LE((X - oracle::lyapunov(A, Q)).norm(), 1e-9 * (1.0 + X.norm()));
    }
}

TEST(Lyapunov, SingularOperator) {
    EXPECT_THROW(solve_lyapunov(Matrix::Zero(2, 2), Matrix::Identity(2, 2)), PreconditionError);
}

TEST(Hurwitz, Basic) {
    EXPECT_TRUE(is_hurwitz(mat({{-1, 5}, {0, -2}})));
    EXPECT_FALSE(is_hurwitz(mat({{0, 1}, {-1, 0}})));
    EXPECT_FALSE(is_hurwitz(scalar(0.1)));
}

TEST(Are, ScalarExamples) {
    EXPECT_NEAR(solve_are(scalar(-1), scalar(1), scalar(1.25), scalar(1))(0, 0), 0.5, 1e-12);
    EXPECT_NEAR(solve_are(scalar(-1), scalar(0), scalar(0.7), scalar(1))(0, 0), 0.35, 1e-12);
    EXPECT_NEAR(solve_are(scalar(0), scalar(1), scalar(1), scalar(1))(0, 0), 1.0, 1e-10);
}

TEST(Are, UnstableNeedsBassGain) {
    // X = (a + sqrt(a^2 + b^2 q / r)) r / b^2 for the scalar problem.
    const double a = 2.0, b = 1.5, q = 1.0, r = 0.5;
    const double expected = (a + std::sqrt(a * a + b * b * q / r)) * r / (b * b);
    EXPECT_NEAR(solve_are(scalar(a), scalar(b), scalar(q), scalar(r))(0, 0), expected, 1e-10);
}

TEST(Are, RandomPairsAgreeWithHamiltonianSubspace) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 25; ++trial) {
        const Eigen::Index n = trial % 4 + 1;
        const Eigen::Index m = trial % n + 1;
        Matrix A = oracle::random_matrix(rng, n, n); // not necessarily stable
        const Matrix B = oracle::random_matrix(rng, n, m);
        const Matrix Q = oracle::random_spd(rng, n);
        const Matrix R = oracle::random_spd(rng, m);
        const Matrix X = solve_are(A, B, Q, R);
        EXPECT_LE(are_residual(A, B, Q, R, X), 1e-9 * (1.0 + Q.norm()));
        EXPECT_TRUE(is_pd((X + 1e-10 * Matrix::Identity(n, n)).eval(), 0.0));
        EXPECT_LE((X - oracle::hamiltonian_are(A, B, Q, R)).norm(), 1e-7 * (1.0 + X.norm()));
    }
}

TEST(Are, Errors) {
    EXPECT_THROW(solve_are(scalar(1), scalar(0), scalar(1), scalar(1)), StabilizabilityError);
    EXPECT_THROW(solve_are(scalar(-1), scalar(1), scalar(1), scalar(-1)), PositivityError);
    EXPECT_THROW(solve_are(scalar(-1), scalar(1), scalar(-1), scalar(1)), PositivityError);
    EXPECT_THROW(solve_are(Matrix::Identity(2, 2), scalar(1), scalar(1), scalar(1)), DimensionError);
    AreOptions bad;
    bad.initialGain = scalar(0.0);
    EXPECT_THROW(solve_are(scalar(1), scalar(1), scalar(1), scalar(1), bad), StabilizabilityError);
}

TEST(FiniteDiff, Examples) {
    const ScalarField sq = [](const Vector& x) { return x.squaredNorm(); };
    const Vector g = finite_diff_gradient(sq, (Vector(2) << 1, 2).finished(), 1e-5);
    EXPECT_NEAR(g(0), 2.0, 1e-8);
    EXPECT_NEAR(g(1), 4.0, 1e-8);
    const ScalarField c = [](const Vector&) { return 3.0; };
    EXPECT_EQ(finite_diff_gradient(c, Vector::Ones(3), 1e-5), Vector::Zero(3));
    const ScalarField cosine = [](const Vector& x) { return 1.0 - std::cos(x(0)); };
    EXPECT_NEAR(finite_diff_gradient(cosine, Vector::Constant(1, oracle::kPi / 4), 1e-5)(0),
                std::sqrt(0.5), 1e-8);
    EXPECT_THROW(finite_diff_gradient(sq, Vector::Ones(2), 0.0), PreconditionError);
}

TEST(FiniteDiff, QuadraticGradientAndHessian) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-10.0 / std::sqrt(4.0), 10.0 / std::sqrt(4.0));
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix P = oracle::random_spd(rng, 4);
        const ScalarField V = [&](const Vector& x) { return 0.5 * x.dot(P * x); };
        Vector x(4);
        for (Eigen::Index i = 0; i < 4; ++i) x(i) = u(rng);
        EXPECT_LE((finite_diff_gradient(V, x, 1e-5) - P * x).cwiseAbs().maxCoeff(), 1e-6);
        EXPECT_LE((finite_diff_hessian(V, x, 1e-4) - P).cwiseAbs().maxCoeff(), 1e-4);
    }
}

TEST(Rk4, OneStepOfDecay) {
    const auto rhs = [](double, const Vector& x) { return Vector(-x); };
    EXPECT_NEAR(rk4_step(rhs, 0.0, Vector::Ones(1), 0.1)(0), 0.9048375, 1e-7);
}

TEST(Rk4, FourthOrder) {
    const auto rhs = [](double t, const Vector& x) { return Vector(Vector::Constant(1, std::cos(t) * x(0))); };
    auto error = [&](double h) {
        Vector x = Vector::Ones(1);
        const int steps = static_cast<int>(std::lround(2.0 / h));
        for (int k = 0; k < steps; ++k) x = rk4_step(rhs, k * h, x, h);
        return std::abs(x(0) - std::exp(std::sin(2.0)));
    };
    EXPECT_GE(error(0.1) / error(0.05), 15.0);
    EXPECT_GE(error(0.05) / error(0.025), 15.0);
}
