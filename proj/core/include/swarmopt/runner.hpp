#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "swarmopt/admm.hpp"
#include "swarmopt/dynamics.hpp"
#include "swarmopt/netsim.hpp"
#include "swarmopt/scenario.hpp"

namespace swarmopt {

/// Which transport carries iterates between agents: the seeded lossy channel
/// from the scenario's channel config, or the in-memory reference exchange
/// (always lossless, no delivery log).
enum class ExchangeMode { Simulated, Direct };

struct RunResult {
    int n_agents = 0;
    double timestep = 0.0;
    int steps_executed = 0;  // number of applied inputs; states hold one more
    bool all_reached = false;

    std::vector<std::vector<StateVec>> states;  // [agent][step], steps_executed+1 entries
    std::vector<std::vector<InputVec>> inputs;  // [agent][step], steps_executed entries
    std::vector<std::vector<ResidualRecord>> residuals;  // [mpc_step][round]
    std::vector<bool> step_converged;  // per MPC step: consensus met both tolerances
    std::vector<double> min_distance;  // per state index; +inf for a single agent
    std::vector<int> goal_step;        // first state index at goal per agent, -1 if never
    std::vector<DeliveryEvent> delivery_log;  // empty in Direct mode
};

/// Full goal state the tracking reference is pinned to: the goal position
/// with zero velocity, level attitude and zero body rates.
StateVec goal_state(const Eigen::Vector3d& goal_position);

/// Position within tol of the goal and speed below 0.1 m/s. Completion needs
/// both so a fast fly-through does not count as arrival.
bool goal_reached(const StateVec& x, const Eigen::Vector3d& goal, double tol);

/// Receding-horizon loop: each MPC step runs the consensus iteration to
/// tolerance (or its round limit), every agent applies the first input of its
/// own converged block, the true states advance one integrator step, and the
/// next step warm-starts from the shifted iterates. Exits when every agent
/// satisfies goal_reached or after mpc_max_steps.
RunResult mpc_loop(const ScenarioConfig& cfg, ExchangeMode mode = ExchangeMode::Simulated);

/// Writes trajectories.csv, residuals.csv, summary.json and delivery.csv
/// into out_dir (created if absent). Floats are printed with 17 significant
/// digits so files round-trip bit-exactly.
void write_outputs(const RunResult& result, const std::string& out_dir);

}  // namespace swarmopt
