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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "invopt/errors.hpp"

namespace invopt {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

/// Scalar field R^n -> R.
using ScalarField = std::function<double(const Vector&)>;

namespace numerics {

/// Absolute symmetry tolerance used by every symmetric-matrix consumer.
template <typename Derived>
typename Derived::Scalar symmetry_tolerance(const Eigen::MatrixBase<Derived>& A) {
    using Scalar = typename Derived::Scalar;
    return Scalar(1e-10) * (Scalar(1) + A.norm());
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& A, const std::string& what) {
    if (A.rows() != A.cols()) {
        throw DimensionError(what + " must be square, got " + std::to_string(A.rows()) + "x" +
                             std::to_string(A.cols()));
    }
}

template <typename Derived>
void require_symmetric(const Eigen::MatrixBase<Derived>& A, const std::string& what) {
    require_square(A, what);
    const auto asym = (A - A.transpose()).cwiseAbs().maxCoeff();
    if (A.size() > 0 && asym > symmetry_tolerance(A)) {
        throw SymmetryError(what + " is not symmetric (max |A_ij - A_ji| = " +
                            std::to_string(static_cast<double>(asym)) + ")");
    }
}

template <typename Scalar>
struct SymmetricEigen {
    VectorX<Scalar> values;  // ascending
    MatrixX<Scalar> vectors; // columns match values
};

/// Cyclic Jacobi eigen-decomposition of the symmetric part of A.
template <typename Derived>
SymmetricEigen<typename Derived::Scalar> sym_eig(const Eigen::MatrixBase<Derived>& A_in) {
    using Scalar = typename Derived::Scalar;
    using std::abs;
    using std::sqrt;
    require_symmetric(A_in, "matrix");

    const Eigen::Index n = A_in.rows();
    MatrixX<Scalar> A = (A_in + A_in.transpose()) / Scalar(2);
    MatrixX<Scalar> V = MatrixX<Scalar>::Identity(n, n);

    const Scalar frob = A.norm();
    const Scalar threshold = Scalar(1e-12) * frob;
    auto off_norm = [&]() {
        Scalar s(0);
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = 0; q < n; ++q)
                if (p != q) s += A(p, q) * A(p, q);
        return sqrt(s);
    };

    constexpr int kMaxSweeps = 100;
    int sweep = 0;
    while (off_norm() > threshold) {
        if (++sweep > kMaxSweeps) throw ConvergenceError("Jacobi eigensolver did not converge");
        for (Eigen::Index p = 0; p + 1 < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const Scalar apq = A(p, q);
                if (apq == Scalar(0)) continue;
                const Scalar theta = (A(q, q) - A(p, p)) / (Scalar(2) * apq);
                const Scalar t = (theta >= Scalar(0) ? Scalar(1) : Scalar(-1)) /
                                 (abs(theta) + sqrt(theta * theta + Scalar(1)));
                const Scalar c = Scalar(1) / sqrt(t * t + Scalar(1));
                const Scalar s = t * c;
                // A <- J^T A J with J the (p, q) Givens rotation
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Scalar akp = A(k, p);
                    const Scalar akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Scalar apk = A(p, k);
                    const Scalar aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Scalar vkp = V(k, p);
                    const Scalar vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return A(a, a) < A(b, b); });

    SymmetricEigen<Scalar> out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values(i) = A(order[i], order[i]);
        out.vectors.col(i) = V.col(order[i]);
    }
    return out;
}

template <typename Derived>
VectorX<typename Derived::Scalar> sym_eigvals(const Eigen::MatrixBase<Derived>& A) {
    return sym_eig(A).values;
}

template <typename Derived>
bool is_pd(const Eigen::MatrixBase<Derived>& A, typename Derived::Scalar tol) {
    if (A.rows() == 0 && A.cols() == 0) return true;
    return sym_eigvals(A).minCoeff() > tol;
}

/// True iff A <= B in the Loewner order, with eigenvalue floor -tol.
template <typename DerivedA, typename DerivedB>
bool loewner_leq(const Eigen::MatrixBase<DerivedA>& A, const Eigen::MatrixBase<DerivedB>& B,
                 typename DerivedA::Scalar tol) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) {
        throw DimensionError("loewner_leq: operands differ in size");
    }
    require_symmetric(A, "loewner_leq lhs");
    require_symmetric(B, "loewner_leq rhs");
    if (A.size() == 0) return true;
    const MatrixX<typename DerivedA::Scalar> diff = B - A;
    return sym_eigvals(diff).minCoeff() >= -tol;
}

/// Solves A^T X + X A + Q = 0 through the Kronecker-vectorized linear system.
template <typename DerivedA, typename DerivedQ>
MatrixX<typename DerivedA::Scalar> solve_lyapunov(const Eigen::MatrixBase<DerivedA>& A,
                                                  const Eigen::MatrixBase<DerivedQ>& Q) {
    using Scalar = typename DerivedA::Scalar;
    require_square(A, "Lyapunov A");
    const Eigen::Index n = A.rows();
    if (Q.rows() != n || Q.cols() != n) throw DimensionError("Lyapunov Q size mismatch");

    const Eigen::Index nn = n * n;
    MatrixX<Scalar> op = MatrixX<Scalar>::Zero(nn, nn);
    // vec(A^T X) = (I kron A^T) vec X, vec(X A) = (A^T kron I) vec X (column-major vec)
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::Index row = j * n + i;
            for (Eigen::Index k = 0; k < n; ++k) {
                op(row, j * n + k) += A(k, i);
                op(row, k * n + i) += A(k, j);
            }
        }
    }
    Eigen::FullPivLU<MatrixX<Scalar>> lu(op);
    if (!lu.isInvertible()) {
        throw PreconditionError("Lyapunov operator is singular (A has eigenvalues summing to 0)");
    }
    const VectorX<Scalar> rhs = -Eigen::Map<const VectorX<Scalar>>(MatrixX<Scalar>(Q).data(), nn);
    const VectorX<Scalar> vecX = lu.solve(rhs);
    MatrixX<Scalar> X = Eigen::Map<const MatrixX<Scalar>>(vecX.data(), n, n);
    return (X + X.transpose()) / Scalar(2);
}

template <typename Derived>
bool is_hurwitz(const Eigen::MatrixBase<Derived>& A, double margin = 0.0) {
    require_square(A, "matrix");
    if (A.rows() == 0) return true;
    const Eigen::MatrixXd Ad = A.template cast<double>();
    Eigen::EigenSolver<Eigen::MatrixXd> es(Ad, false);
    if (es.info() != Eigen::Success) return false;
    return es.eigenvalues().real().maxCoeff() < -margin;
}

struct AreOptions {
    int maxIterations = 200;
    /// Stabilizing feedback gain K (u = -K x) to start from; computed if absent.
    std::optional<Matrix> initialGain;
};

/// Frobenius norm of A^T X + X A - X B R^{-1} B^T X + Q.
inline double are_residual(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R,
                           const Matrix& X) {
    const Matrix BRinvBt = B * R.llt().solve(B.transpose());
    return (A.transpose() * X + X * A - X * BRinvBt * X + Q).norm();
}

namespace detail {

// Bass's construction: for beta above the spectral abscissa, Z solving
// (A + beta I) Z + Z (A + beta I)^T = 2 B R^{-1} B^T gives K = R^{-1} B^T Z^{-1}
// with (A - B K) Z + Z (A - B K)^T = -2 beta Z.
inline std::optional<Matrix> bass_gain(const Matrix& A, const Matrix& B, const Matrix& R) {
    const Eigen::Index n = A.rows();
    const Matrix RinvBt = R.llt().solve(B.transpose());
    double beta = A.norm() + 1.0;
    for (int attempt = 0; attempt < 6; ++attempt, beta *= 4.0) {
        const Matrix shifted = A + beta * Matrix::Identity(n, n);
        Matrix Z;
        try {
            Z = solve_lyapunov(shifted.transpose().eval(), (-2.0 * B * RinvBt).eval());
        } catch (const PreconditionError&) {
            continue;
        }
        const Matrix K = RinvBt * Z.completeOrthogonalDecomposition().pseudoInverse();
        if (K.allFinite() && is_hurwitz(A - B * K)) return K;
    }
    return std::nullopt;
}

} // namespace detail

/// Stabilizing solution of A^T X + X A - X B R^{-1} B^T X + Q = 0 by Newton-Kleinman.
inline Matrix solve_are(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R,
                        const AreOptions& options = {}) {
    require_square(A, "ARE A");
    const Eigen::Index n = A.rows();
    const Eigen::Index m = B.cols();
    if (B.rows() != n) throw DimensionError("ARE B must have as many rows as A");
    if (Q.rows() != n || Q.cols() != n) throw DimensionError("ARE Q size mismatch");
    if (R.rows() != m || R.cols() != m) throw DimensionError("ARE R size mismatch");
    require_symmetric(Q, "ARE Q");
    require_symmetric(R, "ARE R");
    if (n > 0 && sym_eigvals(Q).minCoeff() < -symmetry_tolerance(Q)) {
        throw PositivityError("ARE Q must be positive semidefinite");
    }
    if (!is_pd(R, 0.0)) throw PositivityError("ARE R must be positive definite");

    const Matrix RinvBt = R.llt().solve(B.transpose());

    Matrix K;
    if (options.initialGain) {
        K = *options.initialGain;
        if (K.rows() != m || K.cols() != n) throw DimensionError("ARE initial gain size mismatch");
    } else if (is_hurwitz(A)) {
        K = Matrix::Zero(m, n);
    } else if (auto bass = detail::bass_gain(A, B, R)) {
        K = *bass;
    } else {
        throw StabilizabilityError("no stabilizing initial gain found for (A, B)");
    }
    if (!is_hurwitz(A - B * K)) {
        throw StabilizabilityError("initial gain does not stabilize A - B K");
    }

    Matrix X = Matrix::Zero(n, n);
    bool converged = false;
    for (int it = 0; it < options.maxIterations; ++it) {
        const Matrix closed = A - B * K;
        const Matrix Xnext = solve_lyapunov(closed, (Q + K.transpose() * R * K).eval());
        if (!Xnext.allFinite()) throw ConvergenceError("Newton-Kleinman iterate is not finite");
        const double increment = (Xnext - X).norm();
        X = Xnext;
        K = RinvBt * X;
        if (increment < 1e-12 * std::max(1.0, X.norm())) {
            converged = true;
            break;
        }
    }
    const double residual = are_residual(A, B, Q, R, X);
    if (residual > 1e-9 * (1.0 + Q.norm())) {
        throw ConvergenceError("Newton-Kleinman " +
                               std::string(converged ? "converged" : "stopped") +
                               " with ARE residual " + std::to_string(residual));
    }
    return X;
}

/// Central-difference gradient.
inline Vector finite_diff_gradient(const ScalarField& fun, const Vector& x, double h) {
    if (!(h > 0.0)) throw PreconditionError("finite difference step must be positive");
    Vector grad(x.size());
    Vector probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        probe(i) = x(i) + h;
        const double up = fun(probe);
        probe(i) = x(i) - h;
        const double down = fun(probe);
        probe(i) = x(i);
        grad(i) = (up - down) / (2.0 * h);
    }
    return grad;
}

/// Central-difference Hessian, symmetrized.
inline Matrix finite_diff_hessian(const ScalarField& fun, const Vector& x, double h) {
    if (!(h > 0.0)) throw PreconditionError("finite difference step must be positive");
    const Eigen::Index n = x.size();
    Matrix H(n, n);
    Vector probe = x;
    const double f0 = fun(x);
    for (Eigen::Index i = 0; i < n; ++i) {
        probe(i) = x(i) + h;
        const double fp = fun(probe);
        probe(i) = x(i) - h;
        const double fm = fun(probe);
        probe(i) = x(i);
        H(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            auto eval = [&](double si, double sj) {
                probe(i) = x(i) + si * h;
                probe(j) = x(j) + sj * h;
                const double v = fun(probe);
                probe(i) = x(i);
                probe(j) = x(j);
                return v;
            };
            H(i, j) = (eval(1, 1) - eval(1, -1) - eval(-1, 1) + eval(-1, -1)) / (4.0 * h * h);
            H(j, i) = H(i, j);
        }
    }
    return H;
}

/// One classical fourth-order Runge-Kutta step of dx/dt = rhs(t, x).
template <typename Rhs>
Vector rk4_step(const Rhs& rhs, double t, const Vector& x, double h) {
    const Vector k1 = rhs(t, x);
    const Vector k2 = rhs(t + 0.5 * h, (x + 0.5 * h * k1).eval());
    const Vector k3 = rhs(t + 0.5 * h, (x + 0.5 * h * k2).eval());
    const Vector k4 = rhs(t + h, (x + h * k3).eval());
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace numerics
} // namespace invopt
