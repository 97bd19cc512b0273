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

#include "invopt/sim.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace invopt {

DisturbanceSignal DisturbanceSignal::zero() { return DisturbanceSignal{}; }

DisturbanceSignal DisturbanceSignal::constant(Vector value) {
    DisturbanceSignal s;
    s.kind = Kind::Constant;
    s.value = std::move(value);
    return s;
}

DisturbanceSignal DisturbanceSignal::seeded_random(double amplitude, std::uint64_t seed,
                                                   double holdInterval) {
    if (!(amplitude >= 0.0)) throw PreconditionError("random disturbance amplitude must be >= 0");
    if (!(holdInterval > 0.0)) throw PreconditionError("random disturbance hold interval must be > 0");
    DisturbanceSignal s;
    s.kind = Kind::SeededRandom;
    s.amplitude = amplitude;
    s.seed = seed;
    s.holdInterval = holdInterval;
    return s;
}

DisturbanceSignal DisturbanceSignal::worst_case() {
    DisturbanceSignal s;
    s.kind = Kind::WorstCase;
    return s;
}

std::string DisturbanceSignal::describe() const {
    std::ostringstream os;
    switch (kind) {
    case Kind::Zero: os << "zero"; break;
    case Kind::Constant: os << "constant[" << value.transpose() << "]"; break;
    case Kind::SeededRandom:
        os << "random(amplitude=" << amplitude << ", seed=" << seed << ", hold=" << holdInterval << ")";
        break;
    case Kind::WorstCase: os << "worst_case"; break;
    }
    return os.str();
}

namespace {

// Piecewise-constant disturbance values, generated lazily in hold-interval order.
class HeldSignal {
public:
    HeldSignal(const DisturbanceSignal& signal, Eigen::Index nw)
        : signal_(signal), nw_(nw), rng_(signal.seed), dist_(-signal.amplitude, signal.amplitude) {}

    Vector at(double t) {
        switch (signal_.kind) {
        case DisturbanceSignal::Kind::Zero: return Vector::Zero(nw_);
        case DisturbanceSignal::Kind::Constant: return signal_.value;
        case DisturbanceSignal::Kind::SeededRandom: {
            const auto index =
                static_cast<std::size_t>(std::floor(t / signal_.holdInterval + 1e-9));
            while (values_.size() <= index) {
                Vector v(nw_);
                for (Eigen::Index i = 0; i < nw_; ++i) v(i) = dist_(rng_);
                values_.push_back(std::move(v));
            }
            return values_[index];
        }
        case DisturbanceSignal::Kind::WorstCase: break;
        }
        return Vector::Zero(nw_);
    }

private:
    DisturbanceSignal signal_;
    Eigen::Index nw_;
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> dist_;
    std::vector<Vector> values_;
};

} // namespace

SimulationResult simulate(const DesignedProblem& p, const Vector& x0, double T, double h,
                          const DisturbanceSignal& signal) {
    if (!(h > 0.0)) throw PreconditionError("simulation step must be positive");
    if (!(T >= h)) throw PreconditionError("simulation horizon must be at least one step");
    const ControlAffineModel& model = p.model();
    model.require_in_domain(x0);

    const bool worstCase = signal.kind == DisturbanceSignal::Kind::WorstCase;
    if (worstCase && !p.robust()) throw ModeError("worst-case disturbance requires robust mode");
    const bool disturbed = signal.kind != DisturbanceSignal::Kind::Zero;
    if (disturbed && model.nw == 0) throw DimensionError("model has no disturbance channel");
    if (signal.kind == DisturbanceSignal::Kind::Constant && signal.value.size() != model.nw) {
        throw DimensionError("constant disturbance must have length nw");
    }
    // Disturbance enters the dynamics whenever the model has a channel and the signal is active.
    const bool useW = model.nw > 0 && (disturbed || p.robust());

    const Eigen::Index n = model.n;
    const Matrix& R = p.penalties().R;
    const double xi = p.xi();
    HeldSignal held(signal, model.nw);

    struct Point {
        Vector u;
        Vector w;
        double q;
        double penalty;
        double energy;
        double L;
    };
    auto point_at = [&](const Vector& x, const Vector& heldW) {
        const DesignEvaluation e = p.evaluate(x, false);
        Point pt;
        pt.u = e.u;
        pt.w = worstCase ? e.w : (useW ? heldW : Vector());
        pt.q = e.q;
        pt.penalty = e.q + e.u.dot(R * e.u);
        pt.energy = (p.robust() && pt.w.size() > 0) ? pt.w.dot(*p.penalties().S * pt.w) : 0.0;
        pt.L = pt.penalty - xi * pt.energy;
        return pt;
    };

    const auto steps = static_cast<long long>(std::llround(T / h));
    SimulationResult result;
    Trajectory& traj = result.trajectory;
    traj.step = h;
    const auto reserve = static_cast<std::size_t>(steps + 1);
    traj.times.reserve(reserve);
    traj.states.reserve(reserve);

    auto record = [&](double t, const Vector& z, const Vector& heldW) {
        const Vector x = z.head(n);
        const Point pt = point_at(x, heldW);
        traj.times.push_back(t);
        traj.states.push_back(x);
        traj.inputs.push_back(pt.u);
        traj.disturbances.push_back(pt.w);
        traj.vValues.push_back(p.clf().value(x));
        traj.qValues.push_back(pt.q);
        traj.lValues.push_back(pt.L);
        traj.runningCost.push_back(z(n));
        traj.penaltyIntegral.push_back(z(n + 1));
        traj.disturbanceEnergy.push_back(z(n + 2));
    };

    Vector z = Vector::Zero(n + 3);
    z.head(n) = x0;
    double t = 0.0;
    Vector heldW = held.at(0.0);
    record(t, z, heldW);

    for (long long k = 0; k < steps; ++k) {
        heldW = held.at(t);
        auto rhs = [&](double, const Vector& s) -> Vector {
            const Vector x = s.head(n);
            const Point pt = point_at(x, heldW);
            Vector ds(n + 3);
            ds.head(n) = model.rhs(x, pt.u, pt.w);
            ds(n) = pt.L;
            ds(n + 1) = pt.penalty;
            ds(n + 2) = pt.energy;
            return ds;
        };
        const Vector next = numerics::rk4_step(rhs, t, z, h);
        const double tNext = static_cast<double>(k + 1) * h;
        if (!next.allFinite()) {
            std::ostringstream os;
            os << "closed-loop state became non-finite at t = " << tNext;
            throw NumericalBlowupError(os.str());
        }
        if (!model.in_domain(next.head(n))) {
            std::ostringstream os;
            os << "state left the model domain at t = " << tNext;
            result.status = SimulationStatus::DomainExit;
            result.message = os.str();
            return result;
        }
        z = next;
        t = tNext;
        record(t, z, held.at(t));
    }
    return result;
}

double accumulated_cost(const Trajectory& traj) {
    if (traj.empty()) throw PreconditionError("accumulated_cost of an empty trajectory");
    return traj.runningCost.back();
}

std::optional<double> settling_time(const Trajectory& traj,
                                    const std::vector<Eigen::Index>& selector, double threshold) {
    if (selector.empty()) throw PreconditionError("settling_time needs a non-empty selector");
    if (!(threshold > 0.0)) throw PreconditionError("settling_time threshold must be positive");
    if (traj.empty()) return std::nullopt;
    auto within = [&](const Vector& x) {
        for (Eigen::Index i : selector) {
            if (i < 0 || i >= x.size()) throw IndexError("settling_time selector out of range");
            if (std::abs(x(i)) > threshold) return false;
        }
        return true;
    };
    std::optional<double> settled;
    for (std::size_t k = traj.size(); k-- > 0;) {
        if (!within(traj.states[k])) break;
        settled = traj.times[k];
    }
    return settled;
}

DissipationReport dissipation_check(const Trajectory& traj, const DesignedProblem& p) {
    if (!p.robust()) throw ModeError("dissipation check requires robust mode");
    if (traj.empty()) throw PreconditionError("dissipation check of an empty trajectory");
    DissipationReport r;
    const double v0 = traj.vValues.front();
    r.lhs = traj.penaltyIntegral.back();
    r.rhs = v0 + p.xi() * traj.disturbanceEnergy.back();
    r.tolerance = 1e-6 * (1.0 + v0);
    r.margin = r.rhs - r.lhs;
    r.pass = r.lhs <= r.rhs + r.tolerance;
    return r;
}

} // namespace invopt
