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

#include "invopt/scenario.hpp"

#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace invopt {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& where) {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    return v.get<int>();
}

// Reject keys outside the allowed set: typos should not silently fall back to defaults.
void require_keys(const json& obj, const std::string& where, std::set<std::string> allowed) {
    if (!obj.is_object()) fail(where, "expected an object");
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) fail(where + "." + item.key(), "unknown key");
    }
}

std::pair<int, int> line_and_column(const std::string& text, std::size_t offset) {
    int line = 1;
    int column = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < offset; ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

Matrix parse_diagonal(const json& v, const std::string& where, Eigen::Index size) {
    if (v.is_array() && !v.empty() && v.front().is_number()) {
        const Vector d = parse_vector(v, where, size);
        return d.asDiagonal();
    }
    return parse_matrix(v, where, size, size);
}

template <typename Fn>
auto with_context(const std::string& where, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        fail(where, e.what());
    }
}

DisturbanceSignal parse_disturbance(const json& v, const std::string& where, Eigen::Index nw,
                                    json& resolved) {
    if (v.is_string()) {
        json obj = {{"kind", v}};
        return parse_disturbance(obj, where, nw, resolved);
    }
    require_keys(v, where, {"kind", "value", "amplitude", "seed", "hold"});
    const std::string kind = v.value("kind", "zero");
    resolved = json::object();
    resolved["kind"] = kind;
    if (kind == "zero") return DisturbanceSignal::zero();
    if (kind == "worst_case") return DisturbanceSignal::worst_case();
    if (kind == "constant") {
        if (!v.contains("value")) fail(where + ".value", "constant disturbance needs a value");
        Vector value;
        if (v["value"].is_number()) {
            value = Vector::Constant(nw, v["value"].get<double>());
        } else {
            value = parse_vector(v["value"], where + ".value", nw);
        }
        resolved["value"] = vector_to_json(value);
        return DisturbanceSignal::constant(value);
    }
    if (kind == "random") {
        const double amplitude = v.contains("amplitude") ? as_number(v["amplitude"], where + ".amplitude") : 0.05;
        const auto seed = static_cast<std::uint64_t>(v.contains("seed") ? as_int(v["seed"], where + ".seed") : 7);
        const double hold = v.contains("hold") ? as_number(v["hold"], where + ".hold") : 0.1;
        if (amplitude < 0.0) fail(where + ".amplitude", "must be >= 0");
        if (!(hold > 0.0)) fail(where + ".hold", "must be > 0");
        resolved["amplitude"] = amplitude;
        resolved["seed"] = seed;
        resolved["hold"] = hold;
        return DisturbanceSignal::seeded_random(amplitude, seed, hold);
    }
    fail(where + ".kind", "unknown disturbance kind '" + kind + "'");
}

std::vector<std::pair<int, int>> parse_edges(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) fail(where, "expected a non-empty list of [source, sink] pairs");
    std::vector<std::pair<int, int>> edges;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& e = v[i];
        const std::string at = where + "[" + std::to_string(i) + "]";
        if (!e.is_array() || e.size() != 2) fail(at, "expected [source, sink]");
        edges.emplace_back(as_int(e[0], at), as_int(e[1], at));
    }
    return edges;
}

} // namespace

// ---------------------------------------------------------------------------
// Literals

Matrix parse_matrix(const json& v, const std::string& where, Eigen::Index rows, Eigen::Index cols) {
    Matrix M;
    if (v.is_number()) {
        const double s = v.get<double>();
        if (rows > 0 && rows == cols) {
            M = s * Matrix::Identity(rows, cols);
        } else {
            M = Matrix::Constant(1, 1, s);
        }
    } else if (v.is_string()) {
        static const std::regex shorthand(
            R"(^\s*(?:([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*\*\s*)?I(?:\s*\(\s*(\d+)\s*\))?\s*$)");
        std::smatch match;
        const std::string text = v.get<std::string>();
        if (!std::regex_match(text, match, shorthand)) {
            fail(where, "cannot parse matrix shorthand '" + text + "' (expected e.g. \"0.1*I(3)\")");
        }
        const double s = match[1].matched ? std::stod(match[1].str()) : 1.0;
        Eigen::Index size = match[2].matched ? std::stol(match[2].str()) : rows;
        if (size <= 0) fail(where, "identity shorthand needs an explicit size here");
        M = s * Matrix::Identity(size, size);
    } else if (v.is_array()) {
        if (v.empty()) fail(where, "empty matrix");
        if (v.front().is_number()) {
            // flat list: column vector
            M.resize(static_cast<Eigen::Index>(v.size()), 1);
            for (std::size_t i = 0; i < v.size(); ++i) {
                M(static_cast<Eigen::Index>(i), 0) = as_number(v[i], where);
            }
        } else {
            const std::size_t r = v.size();
            const std::size_t c = v.front().is_array() ? v.front().size() : 0;
            if (c == 0) fail(where, "expected nested arrays of numbers");
            M.resize(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            for (std::size_t i = 0; i < r; ++i) {
                if (!v[i].is_array() || v[i].size() != c) fail(where, "ragged matrix rows");
                for (std::size_t j = 0; j < c; ++j) {
                    M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                        as_number(v[i][j], where);
                }
            }
        }
    } else {
        fail(where, "expected a matrix (nested arrays, number or \"a*I(k)\")");
    }
    if ((rows > 0 && M.rows() != rows) || (cols > 0 && M.cols() != cols)) {
        std::ostringstream os;
        os << "expected a " << (rows > 0 ? std::to_string(rows) : "?") << "x"
           << (cols > 0 ? std::to_string(cols) : "?") << " matrix, got " << M.rows() << "x"
           << M.cols();
        fail(where, os.str());
    }
    return M;
}

Vector parse_vector(const json& v, const std::string& where, Eigen::Index size) {
    if (!v.is_array()) fail(where, "expected a list of numbers");
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = as_number(v[i], where);
    if (size >= 0 && out.size() != size) {
        fail(where, "expected " + std::to_string(size) + " entries, got " + std::to_string(out.size()));
    }
    return out;
}

json matrix_to_json(const Matrix& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

// ---------------------------------------------------------------------------
// Scenario

DesignedProblem Scenario::problem() const { return DesignedProblem(model, clf, penalties); }

Scenario parse_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open scenario file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    Scenario s = parse_scenario_text(buffer.str(), path.string());
    return s;
}

Scenario parse_scenario_text(const std::string& text, const std::string& sourceName) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, column] = line_and_column(text, e.byte);
        std::ostringstream os;
        os << sourceName << ": JSON parse error at line " << line << ", column " << column << ": "
           << e.what();
        throw ConfigError(os.str());
    }
    require_keys(doc, "scenario",
                 {"name", "description", "model", "clf", "penalties", "simulation", "verification",
                  "sweep", "output"});

    Scenario s;
    json& out = s.resolved;
    s.name = doc.value("name", std::filesystem::path(sourceName).stem().string());
    out["name"] = s.name;
    if (doc.contains("description")) out["description"] = doc["description"];

    // -- model -------------------------------------------------------------
    if (!doc.contains("model")) fail("model", "missing section");
    const json& jm = doc["model"];
    if (!jm.is_object() || !jm.contains("kind")) fail("model.kind", "missing");
    const std::string kind = jm["kind"].get<std::string>();
    json& rm = out["model"];
    rm["kind"] = kind;

    Vector initialState;
    if (kind == "sine") {
        require_keys(jm, "model", {"kind", "n", "c"});
        SineParams params;
        params.n = jm.contains("n") ? as_int(jm["n"], "model.n") : 1;
        if (jm.contains("c")) params.c = as_number(jm["c"], "model.c");
        rm["n"] = params.n;
        const double c = params.c.value_or(params.n * std::cos(3.14159265358979323846 / 2.0 * 0.99));
        rm["c"] = c;
        s.modelParams = params;
        initialState = Vector::Constant(params.n, 3.14159265358979323846 / 4.0);
    } else if (kind == "integrator") {
        require_keys(jm, "model", {"kind", "n"});
        IntegratorParams params;
        params.n = jm.contains("n") ? as_int(jm["n"], "model.n") : 1;
        rm["n"] = params.n;
        s.modelParams = params;
        initialState = Vector::Ones(params.n);
    } else if (kind == "linear") {
        require_keys(jm, "model", {"kind", "A", "B", "Bbar"});
        if (!jm.contains("A") || !jm.contains("B")) fail("model", "linear model needs A and B");
        LinearParams params;
        params.A = parse_matrix(jm["A"], "model.A");
        if (params.A.rows() != params.A.cols()) fail("model.A", "must be square");
        params.B = parse_matrix(jm["B"], "model.B", params.A.rows());
        if (jm.contains("Bbar")) params.Bbar = parse_matrix(jm["Bbar"], "model.Bbar", params.A.rows());
        rm["A"] = matrix_to_json(params.A);
        rm["B"] = matrix_to_json(params.B);
        if (params.Bbar) rm["Bbar"] = matrix_to_json(*params.Bbar);
        s.modelParams = params;
        initialState = Vector::Ones(params.A.rows());
    } else if (kind == "oscillator") {
        require_keys(jm, "model",
                     {"kind", "nodes", "edges", "coupling", "inertia", "damping", "theta_star",
                      "delta_star", "theta0", "delta0", "delta0_mode", "omega0"});
        if (!jm.contains("edges")) fail("model.edges", "missing");
        const auto edges = parse_edges(jm["edges"], "model.edges");
        int nodes = 0;
        for (const auto& [a, b] : edges) nodes = std::max({nodes, a, b});
        if (jm.contains("nodes")) nodes = as_int(jm["nodes"], "model.nodes");
        OscillatorNetwork net;
        net.incidence = with_context("model.edges", [&] { return incidence_matrix(edges, nodes); });
        const Eigen::Index me = net.edges();
        net.coupling = jm.contains("coupling") ? parse_diagonal(jm["coupling"], "model.coupling", me)
                                               : Matrix(Matrix::Identity(me, me));
        if (!jm.contains("inertia")) fail("model.inertia", "missing");
        if (!jm.contains("damping")) fail("model.damping", "missing");
        net.inertia = parse_diagonal(jm["inertia"], "model.inertia", nodes);
        net.damping = parse_diagonal(jm["damping"], "model.damping", nodes);

        if (jm.contains("delta_star")) {
            net.deltaStar = parse_vector(jm["delta_star"], "model.delta_star", me);
        } else {
            const Vector thetaStar = jm.contains("theta_star")
                                         ? parse_vector(jm["theta_star"], "model.theta_star", nodes)
                                         : Vector(Vector::Zero(nodes));
            net.deltaStar = net.incidence.transpose() * thetaStar;
            rm["theta_star"] = vector_to_json(thetaStar);
        }

        Vector delta0;
        if (jm.contains("theta0") && jm.contains("delta0")) {
            fail("model", "give either theta0 or delta0, not both");
        }
        if (jm.contains("delta0")) {
            delta0 = parse_vector(jm["delta0"], "model.delta0", me);
            const std::string mode = jm.value("delta0_mode", "raw");
            rm["delta0_mode"] = mode;
            const double residual = cut_space_residual(net.incidence, delta0);
            if (mode == "project") {
                if (residual > 1e-8) {
                    s.warnings.push_back("model.delta0 projected onto Im(B^T) (residual " +
                                         std::to_string(residual) + ")");
                }
                delta0 = project_onto_cut_space(net.incidence, delta0);
            } else if (mode == "raw") {
                if (residual > 1e-8) {
                    s.warnings.push_back(
                        "model.delta0 is not in Im(B^T) (residual " + std::to_string(residual) +
                        "); the flow keeps delta - delta0 in Im(B^T), so the steady state inherits "
                        "its cycle component");
                    net.cycleAnchor = delta0;
                }
            } else {
                fail("model.delta0_mode", "expected \"raw\" or \"project\"");
            }
        } else {
            const Vector theta0 = jm.contains("theta0") ? parse_vector(jm["theta0"], "model.theta0", nodes)
                                                        : Vector(Vector::Zero(nodes));
            rm["theta0"] = vector_to_json(theta0);
            delta0 = net.incidence.transpose() * theta0;
        }
        const Vector omega0 = jm.contains("omega0") ? parse_vector(jm["omega0"], "model.omega0", nodes)
                                                    : Vector(Vector::Zero(nodes));

        const SteadyStateResult ss =
            with_context("model", [&] { return steady_state_angles(net, delta0); });
        net.deltaS = ss.angles;
        if (!check_assumption1(net)) {
            fail("model", "induced steady state violates the power-balance assumption");
        }

        rm["nodes"] = nodes;
        rm["edges"] = jm["edges"];
        rm["coupling"] = matrix_to_json(net.coupling);
        rm["inertia"] = matrix_to_json(net.inertia);
        rm["damping"] = matrix_to_json(net.damping);
        rm["delta_star"] = vector_to_json(net.deltaStar);
        rm["delta0"] = vector_to_json(delta0);
        rm["omega0"] = vector_to_json(omega0);
        rm["delta_s"] = vector_to_json(net.deltaS);
        rm["delta_s_simulated"] = vector_to_json(ss.simulated);

        initialState.resize(me + nodes);
        initialState << delta0, omega0;
        s.modelParams = net;
    } else {
        fail("model.kind", "unknown model kind '" + kind + "'");
    }
    s.model = with_context("model", [&] { return make_model(s.modelParams); });

    // -- clf -----------------------------------------------------------------
    json jc = doc.value("clf", json::object());
    require_keys(jc, "clf", {"kind", "P"});
    std::string clfKind;
    if (jc.contains("kind")) {
        clfKind = jc["kind"].get<std::string>();
    } else if (kind == "sine") {
        clfKind = "cosine";
    } else if (kind == "oscillator") {
        clfKind = "oscillator";
    } else {
        clfKind = "quadratic";
    }
    json& rc = out["clf"];
    rc["kind"] = clfKind;
    if (clfKind == "cosine") {
        s.clf = with_context("clf", [&] { return make_cosine_clf(static_cast<int>(s.model.n)); });
    } else if (clfKind == "oscillator") {
        if (!s.model.network) fail("clf.kind", "oscillator CLF needs an oscillator model");
        s.clf = make_oscillator_clf(*s.model.network);
    } else if (clfKind == "quadratic") {
        Matrix P;
        json jp = jc.contains("P") ? jc["P"]
                                   : (kind == "linear" ? json{{"lyapunov", 1.0}} : json(1.0));
        if (jp.is_object()) {
            require_keys(jp, "clf.P", {"lyapunov"});
            if (kind != "linear") fail("clf.P.lyapunov", "only available for linear models");
            const auto& A = std::get<LinearParams>(s.modelParams).A;
            const Matrix Qstar = parse_matrix(jp["lyapunov"], "clf.P.lyapunov", A.rows(), A.cols());
            if (!numerics::is_hurwitz(A)) fail("clf.P.lyapunov", "needs a Hurwitz A");
            // P A + A^T P = -Q*
            P = with_context("clf.P", [&] { return numerics::solve_lyapunov(A, Qstar); });
            rc["P_source"] = {{"lyapunov", matrix_to_json(Qstar)}};
        } else {
            P = parse_matrix(jp, "clf.P", s.model.n, s.model.n);
        }
        rc["P"] = matrix_to_json(P);
        s.clf = with_context("clf.P", [&] { return make_quadratic_clf(P); });
        s.quadraticP = P;
    } else {
        fail("clf.kind", "unknown CLF kind '" + clfKind + "'");
    }
    if (s.clf.dimension() != s.model.n) fail("clf", "dimension does not match the model");

    // -- penalties -------------------------------------------------------------
    if (!doc.contains("penalties")) fail("penalties", "missing section");
    const json& jpen = doc["penalties"];
    require_keys(jpen, "penalties", {"R", "S", "xi", "mode"});
    if (!jpen.contains("R")) fail("penalties.R", "missing");
    const Matrix R = parse_matrix(jpen["R"], "penalties.R", s.model.m, s.model.m);
    const std::string mode = jpen.value("mode", jpen.contains("S") ? "robust" : "nominal");
    json& rp = out["penalties"];
    rp["mode"] = mode;
    rp["R"] = matrix_to_json(R);
    if (mode == "nominal") {
        if (jpen.contains("S") || jpen.contains("xi")) fail("penalties", "nominal mode takes no S or xi");
        s.penalties = PenaltyConfig::nominal(R);
    } else if (mode == "robust") {
        if (s.model.nw == 0) fail("penalties.mode", "robust mode needs a model with a disturbance channel");
        const Matrix S = jpen.contains("S") ? parse_matrix(jpen["S"], "penalties.S", s.model.nw, s.model.nw)
                                            : Matrix(Matrix::Identity(s.model.nw, s.model.nw));
        if (!jpen.contains("xi")) fail("penalties.xi", "robust mode needs xi");
        const double xi = as_number(jpen["xi"], "penalties.xi");
        rp["S"] = matrix_to_json(S);
        rp["xi"] = xi;
        s.penalties = PenaltyConfig::robust(R, S, xi);
    } else {
        fail("penalties.mode", "expected \"nominal\" or \"robust\"");
    }
    try {
        s.penalties.validate();
    } catch (const PositivityError& e) {
        const std::string what = e.what();
        const std::string key = what.find(" S ") != std::string::npos   ? "penalties.S"
                                : what.find(" xi ") != std::string::npos ? "penalties.xi"
                                                                         : "penalties.R";
        fail(key, what);
    } catch (const Error& e) {
        fail("penalties", e.what());
    }

    // -- simulation -----------------------------------------------------------
    const json js = doc.value("simulation", json::object());
    require_keys(js, "simulation", {"T", "h", "x0", "disturbance"});
    s.horizon = js.contains("T") ? as_number(js["T"], "simulation.T") : (kind == "oscillator" ? 10.0 : 20.0);
    s.step = js.contains("h") ? as_number(js["h"], "simulation.h") : 1e-3;
    if (!(s.step > 0.0)) fail("simulation.h", "must be > 0");
    if (!(s.horizon >= s.step)) fail("simulation.T", "must be >= h");
    s.x0 = js.contains("x0") ? parse_vector(js["x0"], "simulation.x0", s.model.n) : initialState;
    if (!s.model.in_domain(s.x0)) fail("simulation.x0", "initial state outside the model domain");
    json& rs = out["simulation"];
    rs["T"] = s.horizon;
    rs["h"] = s.step;
    rs["x0"] = vector_to_json(s.x0);
    json rdist;
    s.disturbance = parse_disturbance(js.value("disturbance", json("zero")), "simulation.disturbance",
                                      s.model.nw, rdist);
    if (s.disturbance.kind != DisturbanceSignal::Kind::Zero && s.model.nw == 0) {
        fail("simulation.disturbance", "model has no disturbance channel");
    }
    if (s.disturbance.kind == DisturbanceSignal::Kind::WorstCase && mode != "robust") {
        fail("simulation.disturbance", "worst_case needs robust penalties");
    }
    rs["disturbance"] = rdist;

    // -- verification ---------------------------------------------------------
    const json jv = doc.value("verification", json::object());
    require_keys(jv, "verification",
                 {"tolerance", "samples", "grid_points", "seed", "value_tolerance", "retune",
                  "dissipation"});
    VerifyConfig& vc = s.verify;
    vc.residualTolerance = jv.contains("tolerance") ? as_number(jv["tolerance"], "verification.tolerance") : 1e-9;
    vc.sampleCount = jv.contains("samples") ? as_int(jv["samples"], "verification.samples") : 4096;
    vc.grid.pointsPerAxis = jv.contains("grid_points") ? as_int(jv["grid_points"], "verification.grid_points") : 21;
    if (vc.grid.pointsPerAxis < 2) fail("verification.grid_points", "must be >= 2");
    if (vc.sampleCount < 1) fail("verification.samples", "must be >= 1");
    vc.seed = static_cast<std::uint64_t>(jv.contains("seed") ? as_int(jv["seed"], "verification.seed") : 42);
    vc.grid.sampleCount = vc.sampleCount;
    vc.grid.seed = vc.seed;
    vc.valueTolerance = jv.contains("value_tolerance")
                            ? as_number(jv["value_tolerance"], "verification.value_tolerance")
                            : 1e-4;
    vc.x0 = s.x0;
    vc.horizon = s.horizon;
    vc.step = s.step;
    json& rv = out["verification"];
    rv["tolerance"] = vc.residualTolerance;
    rv["samples"] = vc.sampleCount;
    rv["grid_points"] = vc.grid.pointsPerAxis;
    rv["seed"] = vc.seed;
    rv["value_tolerance"] = vc.valueTolerance;
    rv["retune"] = json::array();
    if (jv.contains("retune")) {
        if (!jv["retune"].is_array()) fail("verification.retune", "expected a list");
        for (std::size_t i = 0; i < jv["retune"].size(); ++i) {
            const json& item = jv["retune"][i];
            const std::string at = "verification.retune[" + std::to_string(i) + "]";
            RetuneCandidate cand;
            json ritem;
            if (item.is_object() && (item.contains("R") || item.contains("S"))) {
                require_keys(item, at, {"R", "S"});
                cand.R = item.contains("R") ? parse_matrix(item["R"], at + ".R", s.model.m, s.model.m) : R;
                if (item.contains("S")) {
                    if (mode != "robust") fail(at + ".S", "S retuning needs robust penalties");
                    cand.S = parse_matrix(item["S"], at + ".S", s.model.nw, s.model.nw);
                }
            } else {
                cand.R = parse_matrix(item, at, s.model.m, s.model.m);
            }
            if (!numerics::is_pd(cand.R, 0.0)) fail(at + ".R", "matrix is not positive definite");
            if (cand.S && !numerics::is_pd(*cand.S, 0.0)) fail(at + ".S", "matrix is not positive definite");
            ritem["R"] = matrix_to_json(cand.R);
            if (cand.S) ritem["S"] = matrix_to_json(*cand.S);
            rv["retune"].push_back(ritem);
            vc.retune.push_back(std::move(cand));
        }
    }
    rv["dissipation"] = json::array();
    if (mode == "robust") {
        if (jv.contains("dissipation")) {
            if (!jv["dissipation"].is_array()) fail("verification.dissipation", "expected a list");
            for (std::size_t i = 0; i < jv["dissipation"].size(); ++i) {
                json rd;
                vc.dissipationSignals.push_back(parse_disturbance(
                    jv["dissipation"][i], "verification.dissipation[" + std::to_string(i) + "]",
                    s.model.nw, rd));
                rv["dissipation"].push_back(rd);
            }
        } else {
            vc.dissipationSignals = {DisturbanceSignal::zero(), DisturbanceSignal::worst_case()};
            rv["dissipation"] = {{{"kind", "zero"}}, {{"kind", "worst_case"}}};
            if (s.disturbance.kind == DisturbanceSignal::Kind::Constant ||
                s.disturbance.kind == DisturbanceSignal::Kind::SeededRandom) {
                vc.dissipationSignals.insert(vc.dissipationSignals.begin() + 1, s.disturbance);
                rv["dissipation"].insert(rv["dissipation"].begin() + 1, rdist);
            }
        }
    } else if (jv.contains("dissipation")) {
        fail("verification.dissipation", "dissipation checks need robust penalties");
    }

    // -- sweep ----------------------------------------------------------------
    const json jw = doc.value("sweep", json::object());
    require_keys(jw, "sweep", {"R", "threshold", "components"});
    json& rw = out["sweep"];
    rw["R"] = json::array();
    if (jw.contains("R")) {
        if (!jw["R"].is_array()) fail("sweep.R", "expected a list of matrices");
        for (std::size_t i = 0; i < jw["R"].size(); ++i) {
            const std::string at = "sweep.R[" + std::to_string(i) + "]";
            Matrix Ri = parse_matrix(jw["R"][i], at, s.model.m, s.model.m);
            if (!numerics::is_pd(Ri, 0.0)) fail(at, "matrix is not positive definite");
            s.sweepR.push_back(std::move(Ri));
        }
    } else {
        s.sweepR.push_back(R);
        for (const auto& cand : vc.retune) s.sweepR.push_back(cand.R);
    }
    for (const auto& Ri : s.sweepR) rw["R"].push_back(matrix_to_json(Ri));
    s.settlingThreshold = jw.contains("threshold") ? as_number(jw["threshold"], "sweep.threshold") : 1e-3;
    if (!(s.settlingThreshold > 0.0)) fail("sweep.threshold", "must be > 0");
    rw["threshold"] = s.settlingThreshold;
    const json comps = jw.value("components", json(kind == "oscillator" ? "omega" : "all"));
    rw["components"] = comps;
    if (comps.is_string()) {
        const std::string which = comps.get<std::string>();
        bool matched = false;
        for (const StateBlock& block : s.model.blocks) {
            if (which == "all" || which == block.label) {
                matched = true;
                for (Eigen::Index i = block.start; i < block.start + block.size; ++i) {
                    s.settlingSelector.push_back(i);
                }
            }
        }
        if (!matched) fail("sweep.components", "unknown component group '" + which + "'");
    } else if (comps.is_array()) {
        for (const auto& c : comps) {
            const int idx = as_int(c, "sweep.components");
            if (idx < 1 || idx > s.model.n) fail("sweep.components", "index out of range (1-based)");
            s.settlingSelector.push_back(idx - 1);
        }
        if (s.settlingSelector.empty()) fail("sweep.components", "empty selector");
    } else {
        fail("sweep.components", "expected a group name or a list of 1-based indices");
    }

    // -- output ----------------------------------------------------------------
    const json jo = doc.value("output", json::object());
    require_keys(jo, "output", {"directory", "formats"});
    s.outputDirectory = jo.value("directory", "out/" + s.name);
    if (jo.contains("formats")) {
        for (const auto& f : jo["formats"]) {
            const std::string fmt = f.get<std::string>();
            if (fmt != "csv" && fmt != "json" && fmt != "text") fail("output.formats", "unknown format '" + fmt + "'");
            s.formats.push_back(fmt);
        }
    } else {
        s.formats = {"csv", "json", "text"};
    }
    out["output"] = {{"directory", s.outputDirectory.string()}, {"formats", s.formats}};
    out["warnings"] = s.warnings;
    return s;
}

} // namespace invopt
