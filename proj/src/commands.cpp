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

#include "invopt/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

namespace invopt {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("write failed for " + path.string());
}

json json_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json entry_to_json(const CheckEntry& e) {
    json j;
    j["name"] = e.name;
    j["pass"] = e.pass;
    j["measured"] = json_or_null(e.measured);
    j["tolerance"] = json_or_null(e.tolerance);
    j["witness"] = vector_to_json(e.witness);
    j["detail"] = e.detail;
    return j;
}

Matrix linear_P(const Scenario& s) {
    if (!s.quadraticP) throw Error("linear design needs a quadratic CLF");
    return *s.quadraticP;
}

std::optional<LinearRobustTerms> linear_robust_terms(const Scenario& s) {
    if (!s.penalties.S) return std::nullopt;
    const auto& lp = std::get<LinearParams>(s.modelParams);
    if (!lp.Bbar) throw Error("robust linear design needs Bbar");
    return LinearRobustTerms{*lp.Bbar, *s.penalties.S, *s.penalties.xi};
}

std::vector<Vector> design_samples(const DesignedProblem& p) {
    if (p.model().n <= 3) return grid_states(p.model(), 5, 5.0);
    return sample_states(p.model(), 32, 42);
}

PenaltyConfig with_R(const PenaltyConfig& base, const Matrix& R) {
    if (base.S) return PenaltyConfig::robust(R, *base.S, *base.xi);
    return PenaltyConfig::nominal(R);
}

// ---------------------------------------------------------------------------

int cmd_design(const Scenario& s, const std::filesystem::path& dir, std::ostream& log) {
    const DesignedProblem p = s.problem();
    json out;
    out["scenario"] = s.resolved;
    out["mode"] = to_string(p.mode());

    if (s.model.kind == ModelKind::Linear) {
        const auto& lp = std::get<LinearParams>(s.modelParams);
        const Matrix P = linear_P(s);
        const LinearStateCost cost = linear_Q(lp.A, lp.B, P, s.penalties.R, linear_robust_terms(s));
        json lin;
        lin["P"] = matrix_to_json(P);
        lin["Q"] = matrix_to_json(cost.Q);
        lin["Q_unhalved_drift"] = matrix_to_json(cost.unhalvedDrift);
        lin["Q_eigenvalues"] = vector_to_json(numerics::sym_eigvals(cost.Q));
        if (!p.robust()) {
            try {
                lin["are_check"] = entry_to_json(verify_are_oracle(lp.A, lp.B, P, s.penalties.R));
            } catch (const PreconditionError& e) {
                lin["are_check"] = {{"skipped", e.what()}};
            }
        }
        out["linear"] = lin;
    }
    if (s.model.kind == ModelKind::Oscillator) {
        const OscillatorNetwork& net = *s.model.network;
        const OscillatorClosedForms cf =
            oscillator_closed_forms(net, s.penalties.R, s.penalties.S, s.penalties.xi);
        const Matrix XRX = net.coupling * p.penalties().R.inverse() * net.coupling;
        json osc;
        osc["delta_s"] = vector_to_json(net.deltaS);
        osc["q"] = "1/4 (sin(delta) - sin(delta_s))^T K (sin(delta) - sin(delta_s)) + omega^T W omega";
        osc["K"] = matrix_to_json(XRX);
        osc["W"] = matrix_to_json(cf.frequencyWeight);
        osc["u"] = "-1/2 R^{-1} Xi (sin(delta) - sin(delta_s))";
        osc["controller_gain"] = matrix_to_json(-0.5 * p.penalties().R.inverse() * net.coupling);
        if (p.robust()) {
            osc["w"] = "1/(2 xi) S^{-1} omega";
        }
        out["oscillator"] = osc;
    }

    json samples = json::array();
    for (const Vector& x : design_samples(p)) {
        if (!s.model.in_domain(x)) continue;
        const DesignEvaluation e = p.evaluate(x);
        json j;
        j["x"] = vector_to_json(x);
        j["V"] = s.clf.value(x);
        j["q"] = e.q;
        j["u"] = vector_to_json(e.u);
        if (p.robust()) j["w"] = vector_to_json(e.w);
        samples.push_back(std::move(j));
    }
    out["samples"] = samples;

    const AdmissibilityReport adm = admissibility_check(p, s.verify.sampleCount, s.verify.seed);
    out["admissibility"] = {{"samples", adm.samples},
                            {"min_q", adm.minCost},
                            {"argmin", vector_to_json(adm.argmin)},
                            {"pass", adm.pass}};
    write_file(dir / "design.json", out.dump(2) + "\n");
    log << "design: wrote " << (dir / "design.json").string() << " (" << samples.size()
        << " samples, admissibility " << (adm.pass ? "pass" : "FAIL") << ")\n";
    return kExitOk;
}

int cmd_verify(const Scenario& s, const CommandOptions& options, const std::filesystem::path& dir,
               std::ostream& log) {
    DesignedProblem p = s.problem();
    VerificationReport report;
    if (options.paperLiteral) {
        if (s.model.kind != ModelKind::Linear) {
            throw ConfigError("--paper-literal only applies to linear models");
        }
        const auto& lp = std::get<LinearParams>(s.modelParams);
        const LinearStateCost cost =
            linear_Q(lp.A, lp.B, linear_P(s), s.penalties.R, linear_robust_terms(s));
        const DesignedProblem literal = p.with_state_cost(cost.unhalvedDrift);
        CheckEntry e = verify_residual_grid(literal, s.verify.grid, s.verify.residualTolerance);
        e.name = "hjb_residual_unhalved_drift";
        report.checks.push_back(std::move(e));
    } else {
        report = verify_problem(p, s.verify);
        if (s.model.kind == ModelKind::Linear && !p.robust()) {
            const auto& lp = std::get<LinearParams>(s.modelParams);
            try {
                report.checks.push_back(verify_are_oracle(lp.A, lp.B, linear_P(s), s.penalties.R));
            } catch (const PreconditionError& e) {
                CheckEntry skipped;
                skipped.name = "are_oracle";
                skipped.pass = false;
                skipped.detail = e.what();
                report.checks.push_back(std::move(skipped));
            }
        }
    }

    json out = report_to_json(report);
    out["scenario"] = s.resolved;
    out["paper_literal"] = options.paperLiteral;
    write_file(dir / "report.json", out.dump(2) + "\n");
    write_file(dir / "report.txt", report_to_text(report));
    log << report_to_text(report);
    return report.overallPass() ? kExitOk : kExitVerifyFailed;
}

int cmd_simulate(const Scenario& s, const std::filesystem::path& dir, std::ostream& log) {
    const DesignedProblem p = s.problem();
    const SimulationResult r = simulate(p, s.x0, s.horizon, s.step, s.disturbance);
    std::ostringstream csv;
    write_trajectory_csv(csv, r.trajectory, p);
    write_file(dir / "trajectory.csv", csv.str());
    log << "simulate: " << r.trajectory.size() << " rows -> " << (dir / "trajectory.csv").string()
        << "\n";
    if (!r.completed()) {
        log << "simulate: stopped early: " << r.message << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

struct SweepRow {
    std::optional<double> settling;
    double cost = 0.0;
    double finalSelected = 0.0;
    bool completed = false;
    std::string message;
    std::string csv;
};

int cmd_sweep(const Scenario& s, const std::filesystem::path& dir, std::ostream& log) {
    const std::size_t count = s.sweepR.size();
    std::vector<SweepRow> rows(count);
    std::vector<std::string> errors(count);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t k = next++; k < count; k = next++) {
            try {
                const DesignedProblem p(s.model, s.clf, with_R(s.penalties, s.sweepR[k]));
                const SimulationResult r = simulate(p, s.x0, s.horizon, s.step, s.disturbance);
                SweepRow& row = rows[k];
                row.completed = r.completed();
                row.message = r.message;
                row.cost = accumulated_cost(r.trajectory);
                row.settling = settling_time(r.trajectory, s.settlingSelector, s.settlingThreshold);
                const Vector& last = r.trajectory.states.back();
                for (Eigen::Index i : s.settlingSelector) {
                    row.finalSelected = std::max(row.finalSelected, std::abs(last(i)));
                }
                std::ostringstream csv;
                write_trajectory_csv(csv, r.trajectory, p);
                row.csv = csv.str();
            } catch (const std::exception& e) {
                errors[k] = e.what();
            }
        }
    };
    const unsigned threads = std::min<unsigned>(sweep_thread_count(), static_cast<unsigned>(count));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (std::size_t k = 0; k < count; ++k) {
        if (!errors[k].empty()) throw Error("sweep member " + std::to_string(k) + ": " + errors[k]);
    }

    std::ostringstream summary;
    summary << "index,R_trace,R_min_eig,settling_time,accumulated_cost,final_selected_max,status\n";
    bool allCompleted = true;
    for (std::size_t k = 0; k < count; ++k) {
        const SweepRow& row = rows[k];
        write_file(dir / ("trajectory_" + std::to_string(k) + ".csv"), row.csv);
        const Vector eig = numerics::sym_eigvals(s.sweepR[k]);
        summary << k << "," << fmt(s.sweepR[k].trace()) << "," << fmt(eig.minCoeff()) << ","
                << (row.settling ? fmt(*row.settling) : std::string("nan")) << "," << fmt(row.cost)
                << "," << fmt(row.finalSelected) << "," << (row.completed ? "completed" : "domain_exit")
                << "\n";
        allCompleted = allCompleted && row.completed;
        log << "sweep[" << k << "]: settling "
            << (row.settling ? fmt(*row.settling) : std::string("never")) << ", cost " << fmt(row.cost)
            << "\n";
    }
    write_file(dir / "sweep_summary.csv", summary.str());
    return allCompleted ? kExitOk : kExitRuntime;
}

} // namespace

// ---------------------------------------------------------------------------

unsigned sweep_thread_count() {
    if (const char* env = std::getenv("INVOPT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void apply_overrides(Scenario& s, const CommandOptions& options) {
    if (options.h) {
        if (!(*options.h > 0.0)) throw ConfigError("--h: must be > 0");
        s.step = *options.h;
        s.verify.step = s.step;
        s.resolved["simulation"]["h"] = s.step;
    }
    if (options.T) {
        if (!(*options.T > 0.0)) throw ConfigError("--T: must be > 0");
        s.horizon = *options.T;
        s.verify.horizon = s.horizon;
        s.resolved["simulation"]["T"] = s.horizon;
    }
    if (s.horizon < s.step) throw ConfigError("simulation.T: must be >= h");
    if (options.seed) {
        s.verify.seed = *options.seed;
        s.verify.grid.seed = *options.seed;
        s.resolved["verification"]["seed"] = *options.seed;
        auto reseed = [&](DisturbanceSignal& d) {
            if (d.kind == DisturbanceSignal::Kind::SeededRandom) d.seed = *options.seed;
        };
        reseed(s.disturbance);
        for (auto& d : s.verify.dissipationSignals) reseed(d);
        if (s.disturbance.kind == DisturbanceSignal::Kind::SeededRandom) {
            s.resolved["simulation"]["disturbance"]["seed"] = *options.seed;
        }
    }
    if (options.outDir) {
        s.outputDirectory = *options.outDir;
        s.resolved["output"]["directory"] = s.outputDirectory.string();
    }
}

int run_command(const std::string& command, Scenario scenario, const CommandOptions& options,
                std::ostream& log) {
    if (command != "design" && command != "verify" && command != "simulate" && command != "sweep") {
        throw ConfigError("unknown command '" + command + "'");
    }
    apply_overrides(scenario, options);
    for (const auto& w : scenario.warnings) log << "warning: " << w << "\n";
    const std::filesystem::path dir = scenario.outputDirectory;
    std::filesystem::create_directories(dir);
    if (command == "design") return cmd_design(scenario, dir, log);
    if (command == "verify") return cmd_verify(scenario, options, dir, log);
    if (command == "simulate") return cmd_simulate(scenario, dir, log);
    return cmd_sweep(scenario, dir, log);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const DesignedProblem& p) {
    const auto& model = p.model();
    out << "t";
    for (const auto& label : model.stateLabels) out << "," << label;
    for (Eigen::Index i = 0; i < model.m; ++i) out << ",u_" << (i + 1);
    if (p.robust()) {
        for (Eigen::Index i = 0; i < model.nw; ++i) out << ",w_" << (i + 1);
    }
    out << ",V,q,L,J_running\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        out << fmt(traj.times[k]);
        for (Eigen::Index i = 0; i < traj.states[k].size(); ++i) out << "," << fmt(traj.states[k](i));
        for (Eigen::Index i = 0; i < traj.inputs[k].size(); ++i) out << "," << fmt(traj.inputs[k](i));
        if (p.robust()) {
            for (Eigen::Index i = 0; i < traj.disturbances[k].size(); ++i) {
                out << "," << fmt(traj.disturbances[k](i));
            }
        }
        out << "," << fmt(traj.vValues[k]) << "," << fmt(traj.qValues[k]) << "," << fmt(traj.lValues[k])
            << "," << fmt(traj.runningCost[k]) << "\n";
    }
}

json report_to_json(const VerificationReport& report) {
    json j;
    j["overallPass"] = report.overallPass();
    j["checks"] = json::array();
    for (const auto& c : report.checks) j["checks"].push_back(entry_to_json(c));
    return j;
}

std::string report_to_text(const VerificationReport& report) {
    std::ostringstream os;
    for (const auto& c : report.checks) {
        os << (c.pass ? "PASS " : "FAIL ") << c.name << "  measured=" << std::setprecision(6)
           << c.measured << " tol=" << c.tolerance;
        if (c.witness.size() > 0) {
            os << " witness=[";
            for (Eigen::Index i = 0; i < c.witness.size(); ++i) os << (i ? ", " : "") << c.witness(i);
            os << "]";
        }
        if (!c.detail.empty()) os << "  (" << c.detail << ")";
        os << "\n";
    }
    os << "overall: " << (report.overallPass() ? "PASS" : "FAIL") << "\n";
    return os.str();
}

} // namespace invopt
