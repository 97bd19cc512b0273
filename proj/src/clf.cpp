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

#include "invopt/clf.hpp"

#include <limits>

namespace invopt {

std::string to_string(ClfKind kind) {
    switch (kind) {
    case ClfKind::Quadratic: return "quadratic";
    case ClfKind::Cosine: return "cosine";
    case ClfKind::Oscillator: return "oscillator";
    }
    return "unknown";
}

Clf make_quadratic_clf(const Matrix& P) {
    numerics::require_symmetric(P, "CLF matrix P");
    if (!numerics::is_pd(P, 0.0)) throw PositivityError("CLF matrix P must be positive definite");
    const Matrix Ps = (P + P.transpose()) / 2.0;
    Clf clf;
    clf.name = "quadratic";
    clf.kind = ClfKind::Quadratic;
    clf.value = [Ps](const Vector& x) { return 0.5 * x.dot(Ps * x); };
    clf.gradient = [Ps](const Vector& x) -> Vector { return Ps * x; };
    clf.equilibrium = Vector::Zero(P.rows());
    return clf;
}

Clf make_cosine_clf(int n) {
    if (n < 1) throw DimensionError("cosine CLF needs n >= 1");
    Clf clf;
    clf.name = "cosine";
    clf.kind = ClfKind::Cosine;
    clf.value = [n](const Vector& x) { return static_cast<double>(n) - x.array().cos().sum(); };
    clf.gradient = [](const Vector& x) -> Vector { return x.array().sin().matrix(); };
    clf.equilibrium = Vector::Zero(n);
    return clf;
}

Clf make_oscillator_clf(const OscillatorNetwork& net) {
    validate_network(net);
    const Eigen::Index me = net.edges();
    const Eigen::Index nn = net.nodes();
    const Vector xi = net.coupling.diagonal();
    const Vector mass = net.inertia.diagonal();
    const Vector ds = net.deltaS;
    const Vector sinS = ds.array().sin().matrix();
    const Vector cosS = ds.array().cos().matrix();

    Clf clf;
    clf.name = "oscillator";
    clf.kind = ClfKind::Oscillator;
    clf.value = [=](const Vector& x) {
        const auto delta = x.head(me);
        const auto omega = x.tail(nn);
        const double kinetic = 0.5 * omega.dot(mass.cwiseProduct(omega));
        const double potential =
            -xi.dot((delta.array().cos().matrix() - cosS)) - (delta - ds).dot(xi.cwiseProduct(sinS));
        return kinetic + potential;
    };
    clf.gradient = [=](const Vector& x) -> Vector {
        Vector g(me + nn);
        g.head(me) = xi.cwiseProduct(x.head(me).array().sin().matrix() - sinS);
        g.tail(nn) = mass.cwiseProduct(x.tail(nn));
        return g;
    };
    clf.equilibrium = Vector::Zero(me + nn);
    clf.equilibrium.head(me) = ds;
    return clf;
}

Clf make_clf(const ClfParams& params) {
    return std::visit(
        [](const auto& p) -> Clf {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, QuadraticClfParams>) {
                return make_quadratic_clf(p.P);
            } else if constexpr (std::is_same_v<T, CosineClfParams>) {
                return make_cosine_clf(p.n);
            } else {
                return make_oscillator_clf(p);
            }
        },
        params);
}

ClfReport check_clf(const Clf& clf, const ControlAffineModel& model, int sampleCount,
                    std::uint64_t seed) {
    if (clf.dimension() != model.n) throw DimensionError("CLF and model dimensions differ");
    ClfReport report;
    report.minValue = std::numeric_limits<double>::infinity();
    const auto samples = sample_states(model, sampleCount, seed, kEquilibriumBall);
    report.samples = static_cast<int>(samples.size());
    for (const Vector& x : samples) {
        const Vector analytic = clf.gradient(x);
        const Vector numeric = numerics::finite_diff_gradient(clf.value, x, kFiniteDifferenceStep);
        const double deviation = (analytic - numeric).cwiseAbs().maxCoeff();
        if (deviation > report.maxGradientDeviation || report.gradientWitness.size() == 0) {
            report.maxGradientDeviation = deviation;
            report.gradientWitness = x;
        }
        const double v = clf.value(x);
        if (v < report.minValue) {
            report.minValue = v;
            report.valueWitness = x;
        }
    }
    report.gradientPass = report.samples > 0 && report.maxGradientDeviation <= kGradientTolerance;
    report.positivityPass = report.samples > 0 && report.minValue > 0.0;
    return report;
}

} // namespace invopt
