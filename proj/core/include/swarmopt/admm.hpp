#pragma once

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

#include "swarmopt/errors.hpp"
#include "swarmopt/graph.hpp"
#include "swarmopt/netsim.hpp"

namespace swarmopt {

struct ADMMConfig {
    double rho = 1.0;
    int max_rounds = 100;
    double tol_consensus = 1e-4;
    double tol_dual = 1e-4;

    void validate_or_throw() const;
};

/// Per-agent local iterates and multipliers, all sharing one flat shape.
struct SwarmIterate {
    std::vector<Eigen::VectorXd> theta;
    std::vector<Eigen::VectorXd> lambda;
    int round = 0;
};

struct ResidualRecord {
    int round = 0;
    double consensus_residual = 0.0;
    double dual_residual = 0.0;
    std::vector<double> objectives;  // g_i at each agent's new iterate
};

enum class StopReason { Converged, MaxRounds };

struct AdmmResult {
    SwarmIterate iterate;
    std::vector<ResidualRecord> history;
    bool converged = false;
    StopReason reason = StopReason::MaxRounds;
};

/// What the consensus engine needs from an application: a per-agent primal
/// minimizer for g_i(theta) + lambda'theta + rho * sum_j ||theta - mid_j||^2
/// and the bare local cost g_i for reporting.
class ConsensusProblem {
public:
    virtual ~ConsensusProblem() = default;

    virtual int n_agents() const = 0;

    /// Minimizes agent i's augmented local objective. `midpoints` holds
    /// (theta_i + theta_j)/2 for each neighbor j in ascending-id order.
    virtual Eigen::VectorXd solve_local(AgentId i, const Eigen::VectorXd& warm,
                                        const Eigen::VectorXd& lambda,
                                        std::span<const Eigen::VectorXd> midpoints,
                                        double rho) = 0;

    /// Bare local cost g_i(theta), without dual or consensus terms.
    virtual double local_cost(AgentId i, const Eigen::VectorXd& theta) const = 0;
};

/// lambda + rho * sum_j (theta_new - theta_j_new) over the given neighbors.
Eigen::VectorXd dual_update(const Eigen::VectorXd& lambda, double rho,
                            const Eigen::VectorXd& theta_new,
                            std::span<const Eigen::VectorXd> neighbor_thetas_new);

/// sqrt of the summed squared edge disagreements ||theta_i - theta_j||^2.
double consensus_residual(const SwarmIterate& iterate, const CommGraph& g);

/// rho * sqrt of the summed squared per-agent iterate changes.
double dual_residual(const SwarmIterate& now, const SwarmIterate& prev, double rho);

/// One synchronous round: every primal update sees only round-k data, then
/// one message exchange, then every dual update uses the delivered round-k+1
/// iterates. Returns the new iterate (round counter +1) and its residuals.
std::pair<SwarmIterate, ResidualRecord> admm_round(const SwarmIterate& iterate,
                                                   ConsensusProblem& problem,
                                                   const CommGraph& g, double rho,
                                                   Exchange& exchange);

/// Seeds the exchange with the initial iterates, then repeats admm_round
/// until both residuals meet their tolerances or max_rounds is hit.
AdmmResult run_admm(const SwarmIterate& initial, ConsensusProblem& problem,
                    const CommGraph& g, const ADMMConfig& cfg, Exchange& exchange);

}  // namespace swarmopt
