#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "swarmopt/admm.hpp"
#include "swarmopt/dynamics.hpp"
#include "swarmopt/errors.hpp"
#include "swarmopt/graph.hpp"
#include "swarmopt/netsim.hpp"
#include "swarmopt/pgd.hpp"
#include "swarmopt/trajopt.hpp"

namespace swarmopt {

struct AgentSpec {
    StateVec initial_state = StateVec::Zero();
    Eigen::Vector3d goal = Eigen::Vector3d::Zero();
};

/// Everything one run needs, loadable from a JSON file with these exact field
/// names (see README for the schema):
///   n_agents, graph, agents[{initial_state, goal}], drone{mass, inertia_diag,
///   gravity}, mpc{horizon, timestep, q_diag, r_diag, d_min, collision_weight,
///   terminal_weight, input_lo, input_hi, state_lo, state_hi},
///   admm{rho, max_rounds, tol_consensus, tol_dual},
///   channel{drop_probability, seed}, solver{...}, mpc_max_steps,
///   goal_tolerance.
struct ScenarioConfig {
    std::string name = "scenario";
    int n_agents = 1;
    std::vector<std::pair<int, int>> graph_edges;
    std::vector<AgentSpec> agents;
    DroneParams drone;
    MPCConfig mpc;
    ADMMConfig admm;
    ChannelConfig channel;
    SolverConfig solver;
    int mpc_max_steps = 100;
    double goal_tolerance = 0.1;

    CommGraph make_graph() const { return CommGraph(n_agents, graph_edges); }
    /// Full cross-field validation; throws ScenarioError naming the field.
    void validate_or_throw() const;
};

/// Parses and validates a scenario from JSON text. Malformed JSON raises
/// ScenarioError{Parse}; well-formed JSON with bad values raises
/// ScenarioError{Validation} naming the field.
ScenarioConfig parse_scenario(const std::string& json_text);

/// parse_scenario over the contents of `path`.
ScenarioConfig load_scenario(const std::string& path);

/// Serializes a config back to pretty-printed JSON (round-trips through
/// parse_scenario).
std::string scenario_to_json(const ScenarioConfig& cfg);

/// Built-in demo scenarios: "single_hover", "two_drone_swap", "triangle".
ScenarioConfig builtin_scenario(const std::string& name);
std::vector<std::string> builtin_scenario_names();

}  // namespace swarmopt
