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

// Reference computations used only by the tests. Each one is derived separately from
// the library code path it checks.

#pragma once

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

/// Stabilizing ARE solution from the stable invariant subspace of the Hamiltonian matrix.
inline Matrix hamiltonian_are(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R) {
    const Eigen::Index n = A.rows();
    Matrix H(2 * n, 2 * n);
    H << A, -B * R.inverse() * B.transpose(), -Q, -A.transpose();
    Eigen::ComplexEigenSolver<Matrix> es(H);
    Eigen::MatrixXcd V(2 * n, n);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < 2 * n; ++i) {
        if (es.eigenvalues()(i).real() < 0.0 && k < n) V.col(k++) = es.eigenvectors().col(i);
    }
    const Eigen::MatrixXcd X = V.bottomRows(n) * V.topRows(n).inverse();
    return X.real();
}

/// Example plant dx/dt = -sin x + u with V = n - sum cos x:
/// q = sin^T (I + R^{-1}/4) sin, u = -R^{-1} sin / 2.
inline double sine_q(const Vector& x, const Matrix& R) {
    const Vector s = x.array().sin();
    const Matrix W = Matrix::Identity(x.size(), x.size()) + 0.25 * R.inverse();
    return s.dot(W * s);
}

inline Vector sine_u(const Vector& x, const Matrix& R) {
    const Vector s = x.array().sin();
    return -0.5 * R.inverse() * s;
}

/// Triangle network with edges (1,2), (2,3), (1,3), equal couplings and zero set-points.
/// sin(deltaS) must lie in ker(B) = span{c}, c = (1, 1, -1), and c^T delta is conserved,
/// so deltaS = (a, a, -a) with a = c^T delta0 / 3.
inline Vector triangle_steady_state(const Vector& delta0) {
    const Vector c = (Vector(3) << 1.0, 1.0, -1.0).finished();
    return (c.dot(delta0) / 3.0) * c;
}

/// Edge differences theta_sink - theta_source for the triangle above.
inline Vector triangle_edges(const Vector& theta) {
    return (Vector(3) << theta(1) - theta(0), theta(2) - theta(1), theta(2) - theta(0)).finished();
}

/// Exact solution of dx/dt = A x through the complex eigendecomposition of A.
inline Vector linear_flow(const Matrix& A, const Vector& x0, double t) {
    Eigen::ComplexEigenSolver<Matrix> es(A);
    const Eigen::MatrixXcd V = es.eigenvectors();
    Eigen::VectorXcd expLambda = (es.eigenvalues() * t).array().exp();
    const Eigen::VectorXcd y = V * expLambda.asDiagonal() * V.partialPivLu().solve(x0.cast<std::complex<double>>());
    return y.real();
}

/// Random symmetric positive definite matrix with eigenvalues in [lo, hi].
inline Matrix random_spd(std::mt19937_64& rng, Eigen::Index n, double lo = 0.5, double hi = 2.0) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(lo, hi);
    Matrix G(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) G(i, j) = g(rng);
    Eigen::HouseholderQR<Matrix> qr(G);
    const Matrix Qm = qr.householderQ();
    Vector d(n);
    for (Eigen::Index i = 0; i < n; ++i) d(i) = u(rng);
    return Qm * d.asDiagonal() * Qm.transpose();
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix M(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) M(i, j) = g(rng);
    return M;
}

/// Random Hurwitz matrix: a Gaussian matrix shifted left past its spectral abscissa.
inline Matrix random_stable(std::mt19937_64& rng, Eigen::Index n, double margin = 0.5) {
    Matrix M = random_matrix(rng, n, n);
    const double abscissa = Eigen::EigenSolver<Matrix>(M).eigenvalues().real().maxCoeff();
    M -= (abscissa + margin) * Matrix::Identity(n, n);
    return M;
}

/// P with P A + A^T P = -Qs, by writing each entry of A^T P + P A as a linear form in
/// the column-major entries of P and solving the n^2 system with Householder QR.
inline Matrix lyapunov(const Matrix& A, const Matrix& Qs) {
    const Eigen::Index n = A.rows();
    Matrix K = Matrix::Zero(n * n, n * n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) {
            const Eigen::Index row = c * n + r;
            for (Eigen::Index k = 0; k < n; ++k) {
                K(row, c * n + k) += A(k, r); // A^T(r,k) P(k,c)
                K(row, k * n + r) += A(k, c); // P(r,k) A(k,c)
            }
        }
    const Vector rhs = -Eigen::Map<const Vector>(Qs.data(), n * n);
    const Vector p = K.colPivHouseholderQr().solve(rhs);
    Matrix P = Eigen::Map<const Matrix>(p.data(), n, n);
    return 0.5 * (P + P.transpose());
}

} // namespace oracle
