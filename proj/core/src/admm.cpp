#include "swarmopt/admm.hpp"

#include <cmath>
#include <string>

namespace swarmopt {

namespace {

void check_iterate(const SwarmIterate& it, const CommGraph& g, const char* what) {
    const auto n = static_cast<size_t>(g.n_agents());
    if (it.theta.size() != n || it.lambda.size() != n) {
        throw ShapeError(std::string(what) + ": iterate holds " +
                         std::to_string(it.theta.size()) + " thetas / " +
                         std::to_string(it.lambda.size()) + " lambdas for " +
                         std::to_string(n) + " agents");
    }
    for (size_t i = 1; i < n; ++i) {
        if (it.theta[i].size() != it.theta[0].size()) {
            throw ShapeError(std::string(what) + ": theta sizes differ between agents");
        }
    }
    for (size_t i = 0; i < n; ++i) {
        if (it.lambda[i].size() != it.theta[i].size()) {
            throw ShapeError(std::string(what) + ": lambda/theta size mismatch at agent " +
                             std::to_string(i));
        }
    }
}

}  // namespace

void ADMMConfig::validate_or_throw() const {
    if (!(rho > 0.0)) throw Error("ADMMConfig: rho must be > 0");
    if (max_rounds < 1) throw Error("ADMMConfig: max_rounds must be >= 1");
    if (!(tol_consensus > 0.0)) throw Error("ADMMConfig: tol_consensus must be > 0");
    if (!(tol_dual > 0.0)) throw Error("ADMMConfig: tol_dual must be > 0");
}

Eigen::VectorXd dual_update(const Eigen::VectorXd& lambda, double rho,
                            const Eigen::VectorXd& theta_new,
                            std::span<const Eigen::VectorXd> neighbor_thetas_new) {
    if (theta_new.size() != lambda.size()) {
        throw ShapeError("dual_update: lambda/theta size mismatch");
    }
    Eigen::VectorXd out = lambda;
    for (const auto& theta_j : neighbor_thetas_new) {
        if (theta_j.size() != theta_new.size()) {
            throw ShapeError("dual_update: neighbor iterate size mismatch");
        }
        out.noalias() += rho * (theta_new - theta_j);
    }
    return out;
}

double consensus_residual(const SwarmIterate& iterate, const CommGraph& g) {
    check_iterate(iterate, g, "consensus_residual");
    double sq = 0.0;
    for (const auto& [i, j] : g.edges()) {
        sq += (iterate.theta[i] - iterate.theta[j]).squaredNorm();
    }
    return std::sqrt(sq);
}

double dual_residual(const SwarmIterate& now, const SwarmIterate& prev, double rho) {
    if (now.theta.size() != prev.theta.size()) {
        throw ShapeError("dual_residual: agent counts differ");
    }
    double sq = 0.0;
    for (size_t i = 0; i < now.theta.size(); ++i) {
        if (now.theta[i].size() != prev.theta[i].size()) {
            throw ShapeError("dual_residual: iterate sizes differ at agent " +
                             std::to_string(i));
        }
        sq += (now.theta[i] - prev.theta[i]).squaredNorm();
    }
    return rho * std::sqrt(sq);
}

std::pair<SwarmIterate, ResidualRecord> admm_round(const SwarmIterate& iterate,
                                                   ConsensusProblem& problem,
                                                   const CommGraph& g, double rho,
                                                   Exchange& exchange) {
    check_iterate(iterate, g, "admm_round");
    const int n = g.n_agents();

    SwarmIterate next;
    next.round = iterate.round + 1;
    next.theta.resize(n);
    next.lambda.resize(n);

    // Primal sweep: all agents update from round-k data. Neighbor iterates
    // come from the exchange mailbox (exact under lossless delivery, stale
    // after drops); the agent's own iterate is local knowledge.
    for (AgentId i = 0; i < n; ++i) {
        std::vector<Eigen::VectorXd> midpoints;
        midpoints.reserve(g.neighbors(i).size());
        for (AgentId j : g.neighbors(i)) {
            midpoints.push_back(0.5 * (iterate.theta[i] + exchange.delivered(i, j)));
        }
        try {
            next.theta[i] =
                problem.solve_local(i, iterate.theta[i], iterate.lambda[i], midpoints, rho);
        } catch (const Error& e) {
            throw Error("agent " + std::to_string(i) + " primal update failed: " + e.what());
        }
        if (next.theta[i].size() != iterate.theta[i].size()) {
            throw ShapeError("admm_round: solve_local changed the iterate size for agent " +
                             std::to_string(i));
        }
    }

    // Synchronization barrier: everyone posts the round-k+1 iterate.
    exchange.exchange(next.round, next.theta, g);

    // Dual sweep on delivered round-k+1 data.
    for (AgentId i = 0; i < n; ++i) {
        std::vector<Eigen::VectorXd> neighbor_thetas;
        neighbor_thetas.reserve(g.neighbors(i).size());
        for (AgentId j : g.neighbors(i)) {
            neighbor_thetas.push_back(exchange.delivered(i, j));
        }
        next.lambda[i] = dual_update(iterate.lambda[i], rho, next.theta[i], neighbor_thetas);
    }

    ResidualRecord rec;
    rec.round = next.round;
    rec.consensus_residual = consensus_residual(next, g);
    rec.dual_residual = dual_residual(next, iterate, rho);
    rec.objectives.reserve(n);
    for (AgentId i = 0; i < n; ++i) {
        rec.objectives.push_back(problem.local_cost(i, next.theta[i]));
    }
    return {std::move(next), std::move(rec)};
}

AdmmResult run_admm(const SwarmIterate& initial, ConsensusProblem& problem,
                    const CommGraph& g, const ADMMConfig& cfg, Exchange& exchange) {
    cfg.validate_or_throw();
    check_iterate(initial, g, "run_admm");
    if (problem.n_agents() != g.n_agents()) {
        throw ShapeError("run_admm: problem and graph disagree on the agent count");
    }

    exchange.seed(initial.theta, g);

    AdmmResult result;
    result.iterate = initial;
    result.history.reserve(cfg.max_rounds);
    for (int r = 0; r < cfg.max_rounds; ++r) {
        auto [next, rec] = admm_round(result.iterate, problem, g, cfg.rho, exchange);
        result.iterate = std::move(next);
        result.history.push_back(std::move(rec));
        const auto& last = result.history.back();
        if (last.consensus_residual <= cfg.tol_consensus && last.dual_residual <= cfg.tol_dual) {
            result.converged = true;
            result.reason = StopReason::Converged;
            return result;
        }
    }
    result.converged = false;
    result.reason = StopReason::MaxRounds;
    return result;
}

}  // namespace swarmopt
