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

#include "invopt/design.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace invopt {

std::string to_string(PenaltyMode mode) {
    return mode == PenaltyMode::Robust ? "robust" : "nominal";
}

PenaltyConfig PenaltyConfig::nominal(Matrix R) { return PenaltyConfig{std::move(R), std::nullopt, std::nullopt}; }

PenaltyConfig PenaltyConfig::robust(Matrix R, Matrix S, double xi) {
    return PenaltyConfig{std::move(R), std::move(S), xi};
}

void PenaltyConfig::validate() const {
    numerics::require_symmetric(R, "penalty R");
    if (!numerics::is_pd(R, 0.0)) throw PositivityError("penalty R must be positive definite");
    if (S.has_value() != xi.has_value()) {
        throw ModeError("robust mode needs both S and xi; nominal mode needs neither");
    }
    if (S) {
        numerics::require_symmetric(*S, "penalty S");
        if (!numerics::is_pd(*S, 0.0)) throw PositivityError("penalty S must be positive definite");
        if (!(*xi > 0.0)) throw PositivityError("penalty weight xi must be positive");
    }
}

// ---------------------------------------------------------------------------
// DesignedProblem

DesignedProblem::DesignedProblem(Unchecked, ControlAffineModel model, Clf clf,
                                 PenaltyConfig penalties)
    : model_(std::move(model)), clf_(std::move(clf)), penalties_(std::move(penalties)) {
    penalties_.validate();
    if (clf_.dimension() != model_.n) {
        throw DimensionError("CLF dimension " + std::to_string(clf_.dimension()) +
                             " does not match state dimension " + std::to_string(model_.n));
    }
    if (penalties_.R.rows() != model_.m) {
        throw DimensionError("R must be " + std::to_string(model_.m) + "x" +
                             std::to_string(model_.m));
    }
    if (penalties_.S) {
        if (model_.nw == 0) throw ModeError("robust mode needs a model with a disturbance channel");
        if (penalties_.S->rows() != model_.nw) {
            throw DimensionError("S must be " + std::to_string(model_.nw) + "x" +
                                 std::to_string(model_.nw));
        }
        Sinv_ = penalties_.S->llt().solve(Matrix::Identity(model_.nw, model_.nw));
    }
    Rinv_ = penalties_.R.llt().solve(Matrix::Identity(model_.m, model_.m));
}

DesignedProblem::DesignedProblem(ControlAffineModel model, Clf clf, PenaltyConfig penalties)
    : DesignedProblem(Unchecked{}, std::move(model), std::move(clf), std::move(penalties)) {
    spot_check();
}

void DesignedProblem::spot_check() const {
    for (const Vector& x : sample_states(model_, 16, 1234)) {
        const DesignEvaluation e = evaluate(x);
        const double residual = hjb_residual(x);
        if (!(std::abs(residual) <= 1e-9 * (1.0 + std::abs(e.q)))) {
            std::ostringstream os;
            os << "HJB residual " << residual << " at [" << x.transpose()
               << "] exceeds tolerance; model and CLF are inconsistent";
            throw Error(os.str());
        }
    }
}

DesignEvaluation DesignedProblem::evaluate(const Vector& x, bool checkDomain) const {
    if (checkDomain) model_.require_in_domain(x);
    DesignEvaluation e;
    e.gradient = clf_.gradient(x);
    e.drift = model_.drift(x);
    const Vector Ggrad = model_.input_matrix(x) * e.gradient;
    e.u = -0.5 * Rinv_ * Ggrad;
    Vector flow = e.drift + model_.input_matrix(x).transpose() * e.u;
    double q = -e.gradient.dot(flow) - e.u.dot(penalties_.R * e.u);
    if (robust()) {
        const Matrix Gbar = model_.disturbance_matrix(x);
        e.w = (0.5 / xi()) * Sinv_ * (Gbar * e.gradient);
        q = -e.gradient.dot(flow + Gbar.transpose() * e.w) - e.u.dot(penalties_.R * e.u) +
            xi() * e.w.dot(*penalties_.S * e.w);
    }
    e.q = stateCost_ ? x.dot(*stateCost_ * x) : q;
    return e;
}

Vector DesignedProblem::optimal_control(const Vector& x) const { return evaluate(x).u; }

Vector DesignedProblem::worst_disturbance(const Vector& x) const {
    if (!robust()) throw ModeError("worst-case disturbance requires robust mode");
    return evaluate(x).w;
}

double DesignedProblem::designed_cost(const Vector& x) const { return evaluate(x).q; }

double DesignedProblem::designed_cost_quadratic_form(const Vector& x) const {
    model_.require_in_domain(x);
    const Vector grad = clf_.gradient(x);
    const Vector Ggrad = model_.input_matrix(x) * grad;
    double q = -grad.dot(model_.drift(x)) + 0.25 * Ggrad.dot(Rinv_ * Ggrad);
    if (robust()) {
        const Vector Gbargrad = model_.disturbance_matrix(x) * grad;
        q -= (0.25 / xi()) * Gbargrad.dot(Sinv_ * Gbargrad);
    }
    return q;
}

double DesignedProblem::running_cost(const Vector& x, const Vector& u, const Vector& w) const {
    if (u.size() != model_.m) throw DimensionError("running_cost: input has wrong length");
    if (w.size() != 0 && w.size() != model_.nw) {
        throw DimensionError("running_cost: disturbance has wrong length");
    }
    double L = designed_cost(x) + u.dot(penalties_.R * u);
    if (robust() && w.size() > 0) L -= xi() * w.dot(*penalties_.S * w);
    return L;
}

double DesignedProblem::hamiltonian(const Vector& x, const Vector& u, const Vector& w) const {
    const Vector grad = clf_.gradient(x);
    const Vector w_used = robust() ? w : Vector();
    return running_cost(x, u, w_used) + grad.dot(model_.rhs(x, u, w_used));
}

double DesignedProblem::hjb_residual(const Vector& x) const {
    const DesignEvaluation e = evaluate(x);
    return hamiltonian(x, e.u, e.w);
}

DesignedProblem DesignedProblem::with_state_cost(const Matrix& Q) const {
    if (Q.rows() != model_.n || Q.cols() != model_.n) {
        throw DimensionError("state cost matrix must be n x n");
    }
    DesignedProblem copy(Unchecked{}, model_, clf_, penalties_);
    copy.stateCost_ = Q;
    return copy;
}

// ---------------------------------------------------------------------------
// Admissibility

AdmissibilityReport admissibility_check(const DesignedProblem& p, int sampleCount,
                                        std::uint64_t seed) {
    std::vector<Vector> states = sample_states(p.model(), sampleCount, seed, kEquilibriumBall);
    for (auto& probe : block_probe_states(p.model(), std::max(1, sampleCount / 4), seed,
                                          kEquilibriumBall)) {
        states.push_back(std::move(probe));
    }
    AdmissibilityReport report;
    report.samples = static_cast<int>(states.size());
    report.minCost = std::numeric_limits<double>::infinity();
    for (const Vector& x : states) {
        const double q = p.designed_cost(x);
        if (q < report.minCost) {
            report.minCost = q;
            report.argmin = x;
        }
    }
    report.pass = report.samples > 0 && report.minCost > 0.0;
    return report;
}

// ---------------------------------------------------------------------------
// Linear systems

LinearStateCost linear_Q(const Matrix& A, const Matrix& B, const Matrix& P, const Matrix& R,
                         const std::optional<LinearRobustTerms>& robust) {
    numerics::require_square(A, "A");
    const Eigen::Index n = A.rows();
    if (B.rows() != n) throw DimensionError("B must have n rows");
    if (P.rows() != n || P.cols() != n) throw DimensionError("P must be n x n");
    if (R.rows() != B.cols() || R.cols() != B.cols()) throw DimensionError("R must be m x m");
    numerics::require_symmetric(P, "P");
    numerics::require_symmetric(R, "R");
    if (!numerics::is_pd(P, 0.0)) throw PositivityError("P must be positive definite");
    if (!numerics::is_pd(R, 0.0)) throw PositivityError("R must be positive definite");

    const Matrix control = 0.25 * P * B * R.llt().solve(B.transpose()) * P;
    const Matrix driftSym = A.transpose() * P + P * A;
    Matrix disturbance = Matrix::Zero(n, n);
    if (robust) {
        if (robust->Bbar.rows() != n) throw DimensionError("Bbar must have n rows");
        const Eigen::Index nw = robust->Bbar.cols();
        if (robust->S.rows() != nw || robust->S.cols() != nw) throw DimensionError("S must be nw x nw");
        numerics::require_symmetric(robust->S, "S");
        if (!numerics::is_pd(robust->S, 0.0)) throw PositivityError("S must be positive definite");
        if (!(robust->xi > 0.0)) throw PositivityError("xi must be positive");
        disturbance = (0.25 / robust->xi) * P * robust->Bbar *
                      robust->S.llt().solve(robust->Bbar.transpose()) * P;
    }

    LinearStateCost out;
    out.Q = control - 0.5 * driftSym - disturbance;
    out.unhalvedDrift = control - driftSym - disturbance;
    out.Q = (out.Q + out.Q.transpose()) / 2.0;
    out.unhalvedDrift = (out.unhalvedDrift + out.unhalvedDrift.transpose()) / 2.0;
    return out;
}

// ---------------------------------------------------------------------------
// Retuning

RetuneResult retune(const DesignedProblem& p, const Matrix& Rprime,
                    const std::optional<Matrix>& Sprime, int sampleCount, std::uint64_t seed) {
    numerics::require_symmetric(Rprime, "retuned R");
    if (!numerics::is_pd(Rprime, 0.0)) throw PositivityError("retuned R must be positive definite");
    if (Rprime.rows() != p.penalties().R.rows()) throw DimensionError("retuned R has wrong size");

    PenaltyConfig next = p.penalties();
    next.R = Rprime;
    if (Sprime) {
        if (!p.robust()) throw ModeError("retuning S requires robust mode");
        numerics::require_symmetric(*Sprime, "retuned S");
        if (!numerics::is_pd(*Sprime, 0.0)) throw PositivityError("retuned S must be positive definite");
        if (Sprime->rows() != p.penalties().S->rows()) throw DimensionError("retuned S has wrong size");
        next.S = *Sprime;
    }

    std::vector<std::string> warnings;
    bool holds = numerics::loewner_leq(Rprime, p.penalties().R, 1e-12);
    if (!holds) warnings.emplace_back("R' <= R does not hold; admissibility is re-checked by sampling");
    if (Sprime) {
        const bool sHolds = numerics::loewner_leq(*p.penalties().S, *Sprime, 1e-12);
        if (!sHolds) warnings.emplace_back("S' >= S does not hold; admissibility is re-checked by sampling");
        holds = holds && sHolds;
    }

    DesignedProblem retuned(p.model(), p.clf(), next);
    AdmissibilityReport adm = admissibility_check(retuned, sampleCount, seed);
    return RetuneResult{std::move(retuned), holds, std::move(warnings), std::move(adm)};
}

// ---------------------------------------------------------------------------
// Oscillator closed forms

OscillatorClosedForms oscillator_closed_forms(const OscillatorNetwork& net, const Matrix& R,
                                              const std::optional<Matrix>& S,
                                              std::optional<double> xi) {
    if (!check_assumption1(net)) {
        throw AssumptionError("oscillator steady state violates the power-balance assumption");
    }
    const Eigen::Index me = net.edges();
    const Eigen::Index nn = net.nodes();
    if (R.rows() != me || R.cols() != me) throw DimensionError("R must be edges x edges");
    numerics::require_symmetric(R, "R");
    if (!numerics::is_pd(R, 0.0)) throw PositivityError("R must be positive definite");

    Matrix weight = net.damping;
    if (S.has_value() != xi.has_value()) throw ModeError("robust closed forms need both S and xi");
    if (S) {
        if (S->rows() != nn || S->cols() != nn) throw DimensionError("S must be nodes x nodes");
        if (!(*xi > 0.0)) throw PositivityError("xi must be positive");
        weight = net.damping - (0.25 / *xi) * S->llt().solve(Matrix::Identity(nn, nn));
        if (!numerics::is_pd(weight, 0.0)) {
            throw PositivityError("D - S^{-1}/(4 xi) is not positive definite");
        }
    }

    const Matrix Xi = net.coupling;
    const Matrix XiRinvXi = Xi * R.llt().solve(Xi);
    const Matrix RinvXi = R.llt().solve(Xi);
    const Vector sinS = net.deltaS.array().sin().matrix();

    OscillatorClosedForms out;
    out.frequencyWeight = weight;
    out.q = [=](const Vector& x) {
        const Vector ds = x.head(me).array().sin().matrix() - sinS;
        const auto omega = x.tail(nn);
        return 0.25 * ds.dot(XiRinvXi * ds) + omega.dot(weight * omega);
    };
    out.u = [=](const Vector& x) -> Vector {
        const Vector ds = x.head(me).array().sin().matrix() - sinS;
        return -0.5 * RinvXi * ds;
    };
    return out;
}

} // namespace invopt
