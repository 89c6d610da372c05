#include "swarmopt/scenario.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace swarmopt {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& field, const std::string& detail) {
    throw ScenarioError(ScenarioError::Kind::Validation, field, detail);
}

const json* find(const json& j, const char* key) {
    const auto it = j.find(key);
    return it == j.end() || it->is_null() ? nullptr : &*it;
}

double as_num(const json& v, const std::string& field) {
    if (!v.is_number()) fail(field, "expected a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& field) {
    if (!v.is_number_integer()) fail(field, "expected an integer");
    return v.get<int>();
}

bool as_bool(const json& v, const std::string& field) {
    if (!v.is_boolean()) fail(field, "expected true/false");
    return v.get<bool>();
}

/// Fixed-length numeric array. Entries may be null when `null_value` is
/// finite-or-infinite sentinel to substitute (used for unbounded box sides).
Eigen::VectorXd as_vec(const json& v, const std::string& field, Eigen::Index len,
                       double null_value = std::numeric_limits<double>::quiet_NaN()) {
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != len) {
        fail(field, "expected an array of " + std::to_string(len) + " numbers");
    }
    Eigen::VectorXd out(len);
    for (Eigen::Index c = 0; c < len; ++c) {
        const auto& e = v[static_cast<size_t>(c)];
        if (e.is_null() && !std::isnan(null_value)) {
            out(c) = null_value;
        } else if (e.is_number()) {
            out(c) = e.get<double>();
        } else {
            fail(field, "entry " + std::to_string(c) + " is not a number");
        }
    }
    return out;
}

void parse_drone(const json& j, DroneParams& p) {
    if (const auto* v = find(j, "mass")) p.mass = as_num(*v, "mass");
    if (const auto* v = find(j, "inertia_diag")) p.inertia_diag = as_vec(*v, "inertia_diag", 3);
    if (const auto* v = find(j, "gravity")) p.gravity = as_num(*v, "gravity");
}

void parse_mpc(const json& j, MPCConfig& m) {
    if (const auto* v = find(j, "horizon")) m.horizon = as_int(*v, "horizon");
    if (const auto* v = find(j, "timestep")) m.timestep = as_num(*v, "timestep");
    if (const auto* v = find(j, "q_diag")) m.q_diag = as_vec(*v, "q_diag", kStateDim);
    if (const auto* v = find(j, "r_diag")) m.r_diag = as_vec(*v, "r_diag", kInputDim);
    if (const auto* v = find(j, "d_min")) m.d_min = as_num(*v, "d_min");
    if (const auto* v = find(j, "collision_weight"))
        m.collision_weight = as_num(*v, "collision_weight");
    if (const auto* v = find(j, "terminal_weight"))
        m.terminal_weight = as_bool(*v, "terminal_weight");
    if (const auto* v = find(j, "input_lo")) m.input_lo = as_vec(*v, "input_lo", kInputDim);
    if (const auto* v = find(j, "input_hi")) m.input_hi = as_vec(*v, "input_hi", kInputDim);
    if (const auto* v = find(j, "state_lo"))
        m.state_lo = as_vec(*v, "state_lo", kStateDim, -kUnbounded);
    if (const auto* v = find(j, "state_hi"))
        m.state_hi = as_vec(*v, "state_hi", kStateDim, kUnbounded);
}

void parse_admm(const json& j, ADMMConfig& a) {
    if (const auto* v = find(j, "rho")) a.rho = as_num(*v, "rho");
    if (const auto* v = find(j, "max_rounds")) a.max_rounds = as_int(*v, "max_rounds");
    if (const auto* v = find(j, "tol_consensus")) a.tol_consensus = as_num(*v, "tol_consensus");
    if (const auto* v = find(j, "tol_dual")) a.tol_dual = as_num(*v, "tol_dual");
}

void parse_channel(const json& j, ChannelConfig& c) {
    if (const auto* v = find(j, "drop_probability"))
        c.drop_probability = as_num(*v, "drop_probability");
    if (const auto* v = find(j, "seed")) {
        if (!v->is_number_integer()) fail("seed", "expected an integer");
        c.seed = v->get<std::uint64_t>();
    }
}

void parse_solver(const json& j, SolverConfig& s) {
    if (const auto* v = find(j, "max_inner_iters")) s.max_inner_iters = as_int(*v, "max_inner_iters");
    if (const auto* v = find(j, "step_init")) s.step_init = as_num(*v, "step_init");
    if (const auto* v = find(j, "step_max")) s.step_max = as_num(*v, "step_max");
    if (const auto* v = find(j, "step_min")) s.step_min = as_num(*v, "step_min");
    if (const auto* v = find(j, "backtrack")) s.backtrack = as_num(*v, "backtrack");
    if (const auto* v = find(j, "armijo_c")) s.armijo_c = as_num(*v, "armijo_c");
    if (const auto* v = find(j, "grad_tol")) s.grad_tol = as_num(*v, "grad_tol");
    if (const auto* v = find(j, "fd_epsilon")) s.fd_epsilon = as_num(*v, "fd_epsilon");
}

ordered_json bounds_to_json(const Eigen::VectorXd& v) {
    ordered_json arr = ordered_json::array();
    for (Eigen::Index c = 0; c < v.size(); ++c) {
        if (std::isinf(v(c))) {
            arr.push_back(nullptr);
        } else {
            arr.push_back(v(c));
        }
    }
    return arr;
}

ordered_json vec_to_json(const Eigen::VectorXd& v) {
    ordered_json arr = ordered_json::array();
    for (Eigen::Index c = 0; c < v.size(); ++c) arr.push_back(v(c));
    return arr;
}

}  // namespace

void ScenarioConfig::validate_or_throw() const {
    if (n_agents < 1) fail("n_agents", "must be >= 1");
    if (static_cast<int>(agents.size()) != n_agents) {
        fail("agents", "expected " + std::to_string(n_agents) + " entries, got " +
                           std::to_string(agents.size()));
    }
    for (int i = 0; i < n_agents; ++i) {
        const std::string who = "agents[" + std::to_string(i) + "]";
        if (!agents[i].initial_state.allFinite()) fail(who + ".initial_state", "must be finite");
        if (!agents[i].goal.allFinite()) fail(who + ".goal", "must be finite");
        const double pitch = agents[i].initial_state(7);
        if (!(std::abs(pitch) < std::numbers::pi / 2.0 - kPitchGuard)) {
            fail(who + ".initial_state", "initial pitch sits in the attitude-singularity guard band");
        }
    }

    for (const auto& [a, b] : graph_edges) {
        if (a < 0 || a >= n_agents || b < 0 || b >= n_agents || a == b) {
            fail("graph", "edge (" + std::to_string(a) + ", " + std::to_string(b) + ") is invalid");
        }
    }
    if (const auto issue = make_graph().validate()) fail("graph", issue->message);

    if (!(drone.mass > 0.0)) fail("mass", "must be > 0");
    if (!(drone.inertia_diag.array() > 0.0).all()) fail("inertia_diag", "entries must be > 0");
    if (!std::isfinite(drone.gravity)) fail("gravity", "must be finite");

    if (mpc.horizon < 1) fail("horizon", "must be >= 1");
    if (!(mpc.timestep > 0.0)) fail("timestep", "must be > 0");
    if ((mpc.q_diag.array() < 0.0).any() || !mpc.q_diag.allFinite()) {
        fail("q_diag", "entries must be finite and >= 0");
    }
    if ((mpc.r_diag.array() <= 0.0).any() || !mpc.r_diag.allFinite()) {
        fail("r_diag", "entries must be finite and > 0");
    }
    if (!(mpc.d_min > 0.0)) fail("d_min", "must be > 0");
    if (!(mpc.collision_weight >= 0.0)) fail("collision_weight", "must be >= 0");
    if (mpc.input_lo.hasNaN() || mpc.input_hi.hasNaN() ||
        (mpc.input_lo.array() > mpc.input_hi.array()).any()) {
        fail("input_lo", "input bounds must satisfy lo <= hi");
    }
    if (!(mpc.input_lo(0) >= 0.0)) fail("input_lo", "thrust lower bound must be >= 0");
    if (mpc.state_lo.hasNaN() || mpc.state_hi.hasNaN() ||
        (mpc.state_lo.array() > mpc.state_hi.array()).any()) {
        fail("state_lo", "state bounds must satisfy lo <= hi");
    }

    if (!(admm.rho > 0.0)) fail("rho", "must be > 0");
    if (admm.max_rounds < 1) fail("max_rounds", "must be >= 1");
    if (!(admm.tol_consensus > 0.0)) fail("tol_consensus", "must be > 0");
    if (!(admm.tol_dual > 0.0)) fail("tol_dual", "must be > 0");

    if (!(channel.drop_probability >= 0.0 && channel.drop_probability < 1.0)) {
        fail("drop_probability", "must lie in [0, 1)");
    }

    try {
        solver.validate_or_throw();
    } catch (const Error& e) {
        fail("solver", e.what());
    }

    if (mpc_max_steps < 1) fail("mpc_max_steps", "must be >= 1");
    if (!(goal_tolerance > 0.0)) fail("goal_tolerance", "must be > 0");
}

ScenarioConfig parse_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(ScenarioError::Kind::Parse, "", e.what());
    }
    if (!j.is_object()) {
        throw ScenarioError(ScenarioError::Kind::Parse, "", "top level must be an object");
    }

    ScenarioConfig cfg;
    if (const auto* v = find(j, "name")) {
        if (!v->is_string()) fail("name", "expected a string");
        cfg.name = v->get<std::string>();
    }

    const auto* n = find(j, "n_agents");
    if (!n) fail("n_agents", "missing");
    cfg.n_agents = as_int(*n, "n_agents");

    if (const auto* v = find(j, "graph")) {
        if (!v->is_array()) fail("graph", "expected an array of [i, j] pairs");
        for (size_t e = 0; e < v->size(); ++e) {
            const auto& pair = (*v)[e];
            if (!pair.is_array() || pair.size() != 2) {
                fail("graph", "edge " + std::to_string(e) + " is not an [i, j] pair");
            }
            cfg.graph_edges.emplace_back(as_int(pair[0], "graph"), as_int(pair[1], "graph"));
        }
    }

    const auto* agents = find(j, "agents");
    if (!agents) fail("agents", "missing");
    if (!agents->is_array()) fail("agents", "expected an array");
    for (size_t i = 0; i < agents->size(); ++i) {
        const std::string who = "agents[" + std::to_string(i) + "]";
        const auto& a = (*agents)[i];
        if (!a.is_object()) fail(who, "expected an object");
        AgentSpec spec;
        const auto* st = find(a, "initial_state");
        if (!st) fail(who + ".initial_state", "missing");
        spec.initial_state = as_vec(*st, who + ".initial_state", kStateDim);
        const auto* goal = find(a, "goal");
        if (!goal) fail(who + ".goal", "missing");
        spec.goal = as_vec(*goal, who + ".goal", 3);
        cfg.agents.push_back(std::move(spec));
    }

    if (const auto* v = find(j, "drone")) parse_drone(*v, cfg.drone);
    if (const auto* v = find(j, "mpc")) parse_mpc(*v, cfg.mpc);
    if (const auto* v = find(j, "admm")) parse_admm(*v, cfg.admm);
    if (const auto* v = find(j, "channel")) parse_channel(*v, cfg.channel);
    if (const auto* v = find(j, "solver")) parse_solver(*v, cfg.solver);
    if (const auto* v = find(j, "mpc_max_steps")) cfg.mpc_max_steps = as_int(*v, "mpc_max_steps");
    if (const auto* v = find(j, "goal_tolerance")) cfg.goal_tolerance = as_num(*v, "goal_tolerance");

    cfg.validate_or_throw();
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ScenarioError(ScenarioError::Kind::Parse, "", "cannot open " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
    ordered_json j;
    j["name"] = cfg.name;
    j["n_agents"] = cfg.n_agents;
    j["graph"] = ordered_json::array();
    for (const auto& [a, b] : cfg.graph_edges) j["graph"].push_back(ordered_json::array({a, b}));
    j["agents"] = ordered_json::array();
    for (const auto& a : cfg.agents) {
        ordered_json spec;
        spec["initial_state"] = vec_to_json(a.initial_state);
        spec["goal"] = vec_to_json(a.goal);
        j["agents"].push_back(std::move(spec));
    }
    j["drone"] = {{"mass", cfg.drone.mass},
                  {"inertia_diag", vec_to_json(cfg.drone.inertia_diag)},
                  {"gravity", cfg.drone.gravity}};
    j["mpc"] = ordered_json{{"horizon", cfg.mpc.horizon},
                            {"timestep", cfg.mpc.timestep},
                            {"q_diag", vec_to_json(cfg.mpc.q_diag)},
                            {"r_diag", vec_to_json(cfg.mpc.r_diag)},
                            {"d_min", cfg.mpc.d_min},
                            {"collision_weight", cfg.mpc.collision_weight},
                            {"terminal_weight", cfg.mpc.terminal_weight},
                            {"input_lo", vec_to_json(cfg.mpc.input_lo)},
                            {"input_hi", vec_to_json(cfg.mpc.input_hi)},
                            {"state_lo", bounds_to_json(cfg.mpc.state_lo)},
                            {"state_hi", bounds_to_json(cfg.mpc.state_hi)}};
    j["admm"] = ordered_json{{"rho", cfg.admm.rho},
                             {"max_rounds", cfg.admm.max_rounds},
                             {"tol_consensus", cfg.admm.tol_consensus},
                             {"tol_dual", cfg.admm.tol_dual}};
    j["channel"] = ordered_json{{"drop_probability", cfg.channel.drop_probability},
                                {"seed", cfg.channel.seed}};
    j["solver"] = ordered_json{{"max_inner_iters", cfg.solver.max_inner_iters},
                               {"step_init", cfg.solver.step_init},
                               {"step_max", cfg.solver.step_max},
                               {"step_min", cfg.solver.step_min},
                               {"backtrack", cfg.solver.backtrack},
                               {"armijo_c", cfg.solver.armijo_c},
                               {"grad_tol", cfg.solver.grad_tol},
                               {"fd_epsilon", cfg.solver.fd_epsilon}};
    j["mpc_max_steps"] = cfg.mpc_max_steps;
    j["goal_tolerance"] = cfg.goal_tolerance;
    return j.dump(2) + "\n";
}

ScenarioConfig builtin_scenario(const std::string& name) {
    ScenarioConfig cfg;
    cfg.name = name;
    if (name == "single_hover") {
        // One drone climbing from the ground to a 1 m hover.
        cfg.n_agents = 1;
        AgentSpec a;
        a.initial_state = StateVec::Zero();
        a.goal = Eigen::Vector3d(0.0, 0.0, 1.0);
        cfg.agents = {a};
        cfg.mpc.horizon = 15;
        cfg.mpc.timestep = 0.05;
        cfg.admm.rho = 1.0;
        cfg.admm.max_rounds = 4;
        cfg.admm.tol_consensus = 1e-8;
        cfg.admm.tol_dual = 1e-2;
        cfg.solver.max_inner_iters = 80;
        cfg.solver.grad_tol = 1e-3;
        cfg.mpc_max_steps = 200;
        cfg.goal_tolerance = 0.1;
        cfg.channel.seed = 1;
    } else if (name == "two_drone_swap") {
        // Head-on exchange, starts exactly 4 m apart, goals swapped. A
        // perfectly collinear swap is a stalemate: at equal heights on one
        // line the separation gradient vanishes in every lateral direction,
        // so the symmetric iteration never picks a side. The 0.5 m lateral
        // offset between the endpoints makes "bow out and pass" decisive.
        // The deep round budget matters: while the crossing is inside the
        // horizon the agents must actually agree on who yields, otherwise
        // each one satisfies the separation penalty against a local guess of
        // the other and the executed paths still collide.
        cfg.n_agents = 2;
        cfg.graph_edges = {{0, 1}};
        const double dy = 0.25;
        const double dx = std::sqrt(16.0 - 4.0 * dy * dy);  // |start1 - start0| = 4
        AgentSpec a0, a1;
        a0.initial_state = StateVec::Zero();
        a0.initial_state(0) = 0.0;
        a0.initial_state(1) = -dy;
        a0.initial_state(2) = 1.0;
        a1.initial_state = StateVec::Zero();
        a1.initial_state(0) = dx;
        a1.initial_state(1) = dy;
        a1.initial_state(2) = 1.0;
        a0.goal = Eigen::Vector3d(dx, dy, 1.0);
        a1.goal = Eigen::Vector3d(0.0, -dy, 1.0);
        cfg.agents = {a0, a1};
        cfg.mpc.horizon = 15;
        cfg.mpc.timestep = 0.05;
        cfg.mpc.d_min = 0.5;
        cfg.mpc.collision_weight = 400.0;
        cfg.admm.rho = 1.0;
        cfg.admm.max_rounds = 300;
        cfg.admm.tol_consensus = 0.05;
        cfg.admm.tol_dual = 0.5;
        cfg.solver.max_inner_iters = 150;
        cfg.solver.grad_tol = 3e-4;
        cfg.mpc_max_steps = 240;
        cfg.goal_tolerance = 0.1;
        cfg.channel.seed = 2;
    } else if (name == "triangle") {
        // Three drones on an equilateral triangle rotating one vertex over.
        cfg.n_agents = 3;
        cfg.graph_edges = {{0, 1}, {0, 2}, {1, 2}};
        const Eigen::Vector3d p0(0.0, 0.0, 1.0), p1(3.0, 0.0, 1.0), p2(1.5, 2.598, 1.0);
        AgentSpec a0, a1, a2;
        a0.initial_state = StateVec::Zero();
        a0.initial_state.head<3>() = p0;
        a1.initial_state = StateVec::Zero();
        a1.initial_state.head<3>() = p1;
        a2.initial_state = StateVec::Zero();
        a2.initial_state.head<3>() = p2;
        a0.goal = p1;
        a1.goal = p2;
        a2.goal = p0;
        cfg.agents = {a0, a1, a2};
        cfg.mpc.horizon = 15;
        cfg.mpc.timestep = 0.05;
        cfg.mpc.d_min = 0.5;
        cfg.mpc.collision_weight = 150.0;
        cfg.admm.rho = 1.0;
        cfg.admm.max_rounds = 25;
        cfg.admm.tol_consensus = 0.08;
        cfg.admm.tol_dual = 0.8;
        cfg.solver.max_inner_iters = 60;
        cfg.solver.grad_tol = 1e-3;
        cfg.mpc_max_steps = 300;
        cfg.goal_tolerance = 0.1;
        cfg.channel.seed = 3;
    } else {
        throw Error("unknown builtin scenario '" + name +
                    "' (available: single_hover, two_drone_swap, triangle)");
    }
    cfg.validate_or_throw();
    return cfg;
}

std::vector<std::string> builtin_scenario_names() {
    return {"single_hover", "two_drone_swap", "triangle"};
}

}  // namespace swarmopt
