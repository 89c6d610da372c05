#pragma once

#include <Eigen/Dense>
#include <limits>
#include <span>
#include <vector>

#include "swarmopt/admm.hpp"
#include "swarmopt/dynamics.hpp"
#include "swarmopt/errors.hpp"
#include "swarmopt/graph.hpp"
#include "swarmopt/local_variable.hpp"
#include "swarmopt/pgd.hpp"

namespace swarmopt {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// Weights, bounds and shape of each agent's local MPC problem.
struct MPCConfig {
    int horizon = 10;
    double timestep = 0.05;
    // Diagonal tracking weights: states (pos, vel, att, rates) and inputs
    // (thrust, torques). Thrust is weighted lightly so hovering is cheap.
    StateVec q_diag =
        (StateVec() << 4, 4, 4, 1, 1, 1, 0.5, 0.5, 0.5, 0.1, 0.1, 0.1).finished();
    InputVec r_diag = (InputVec() << 1e-4, 1e-2, 1e-2, 1e-2).finished();
    double d_min = 0.5;
    double collision_weight = 100.0;
    bool terminal_weight = true;  // also apply Q to the horizon-end state
    InputVec input_lo = (InputVec() << 0.0, -0.2, -0.2, -0.2).finished();
    InputVec input_hi = (InputVec() << 25.0, 0.2, 0.2, 0.2).finished();
    StateVec state_lo = StateVec::Constant(-kUnbounded);
    StateVec state_hi = StateVec::Constant(kUnbounded);

    void validate_or_throw() const;
};

/// Quadratic tracking cost on agent i's own blocks:
/// sum_{k<H} ||x_i(k) - x_ref(k)||^2_Q + ||u_i(k)||^2_R, plus the terminal
/// state deviation under Q when cfg.terminal_weight is set. x_ref must hold
/// H+1 states.
double tracking_cost(const LocalVariable& theta, AgentId i,
                     const std::vector<StateVec>& x_ref, const MPCConfig& cfg);

/// Squared-hinge separation penalty against every neighbor:
/// collision_weight * sum_{j in N_i} sum_{k=0..H} max(0, d_min - dist_ij(k))^2
/// with positions read from agent i's local copies.
double collision_penalty(const LocalVariable& theta, AgentId i, const CommGraph& g,
                         const MPCConfig& cfg);

/// lambda'theta + rho * sum_j ||theta - midpoint_j||^2 over the flat vectors.
double consensus_dual_terms(const LocalVariable& theta, const DualVariable& lambda,
                            std::span<const Eigen::VectorXd> midpoints, double rho);

/// tracking_cost + collision_penalty + consensus_dual_terms.
double local_objective(const LocalVariable& theta, AgentId i,
                       const std::vector<StateVec>& x_ref, const DualVariable& lambda,
                       std::span<const Eigen::VectorXd> midpoints, double rho,
                       const CommGraph& g, const MPCConfig& cfg);

/// Overwrites agent i's own state block with the rollout of its own inputs
/// from x0, making the block dynamically consistent (single shooting: the
/// states are derived quantities, never free variables).
void assemble_own_states(LocalVariable& theta, AgentId i, const StateVec& x0,
                         const MPCConfig& cfg, const DroneParams& params);

/// Clamps every input block into the input box and every other agent's state
/// block into the state box. Agent i's own states are left alone (they are
/// derived via assemble_own_states, not decision variables). Idempotent.
void project_feasible(LocalVariable& theta, AgentId i, const MPCConfig& cfg);

/// Analytic gradient of local_objective with respect to the free decision
/// variables, returned in LocalVariable shape: all input blocks and other
/// agents' state blocks carry derivatives; agent i's own state block is zero
/// (its contributions are chained through the rollout into the own-input
/// entries with one adjoint sweep). theta's own block must be assembled.
LocalVariable objective_gradient(const LocalVariable& theta, AgentId i,
                                 const std::vector<StateVec>& x_ref,
                                 const DualVariable& lambda,
                                 std::span<const Eigen::VectorXd> midpoints, double rho,
                                 const CommGraph& g, const MPCConfig& cfg,
                                 const DroneParams& params);

/// One local primal update: projected gradient descent on local_objective
/// from the given guess. The returned variable has projected inputs and a
/// dynamically consistent own-state block; its objective is never above the
/// (projected, assembled) initial guess's.
LocalVariable solve_primal(const LocalVariable& initial_guess, AgentId i, const StateVec& x0,
                           const std::vector<StateVec>& x_ref, const DualVariable& lambda,
                           std::span<const Eigen::VectorXd> midpoints, double rho,
                           const CommGraph& g, const MPCConfig& cfg,
                           const DroneParams& params, const SolverConfig& scfg);

/// Adapter that plugs the per-drone MPC subproblem into the consensus
/// engine: iterates travel as flat vectors, this class re-attaches the
/// (n_agents, horizon) block layout and runs solve_primal.
class MpcLocalProblem final : public ConsensusProblem {
public:
    MpcLocalProblem(CommGraph graph, MPCConfig mpc, SolverConfig solver, DroneParams params);

    /// Current true state of agent i, the rollout anchor for its updates.
    void set_initial_state(AgentId i, const StateVec& x0);
    /// Reference trajectory (horizon+1 states) agent i tracks.
    void set_reference(AgentId i, std::vector<StateVec> x_ref);

    int n_agents() const override { return graph_.n_agents(); }
    Eigen::VectorXd solve_local(AgentId i, const Eigen::VectorXd& warm,
                                const Eigen::VectorXd& lambda,
                                std::span<const Eigen::VectorXd> midpoints,
                                double rho) override;
    /// Bare local cost g_i = tracking + collision (no dual/consensus terms).
    double local_cost(AgentId i, const Eigen::VectorXd& theta) const override;

    const MPCConfig& mpc_config() const { return mpc_; }
    const CommGraph& graph() const { return graph_; }

private:
    void check_agent(AgentId i, const char* what) const;

    CommGraph graph_;
    MPCConfig mpc_;
    SolverConfig solver_;
    DroneParams params_;
    std::vector<StateVec> initial_states_;
    std::vector<std::vector<StateVec>> references_;
    std::vector<bool> has_state_, has_reference_;
};

}  // namespace swarmopt
