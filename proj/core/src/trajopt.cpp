#include "swarmopt/trajopt.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace swarmopt {

namespace {

constexpr double kCoincidentEps = 1e-9;  // below this separation the push
                                         // direction falls back to e1

void check_reference(const std::vector<StateVec>& x_ref, const MPCConfig& cfg) {
    if (static_cast<int>(x_ref.size()) != cfg.horizon + 1) {
        throw ShapeError("reference trajectory has " + std::to_string(x_ref.size()) +
                         " states, expected horizon+1 = " + std::to_string(cfg.horizon + 1));
    }
}

void check_variable(const LocalVariable& theta, const MPCConfig& cfg, const char* what) {
    if (theta.horizon() != cfg.horizon) {
        throw ShapeError(std::string(what) + ": variable horizon " +
                         std::to_string(theta.horizon()) + " != config horizon " +
                         std::to_string(cfg.horizon));
    }
}

void check_midpoints(const LocalVariable& theta,
                     std::span<const Eigen::VectorXd> midpoints, const char* what) {
    for (const auto& mid : midpoints) {
        if (mid.size() != theta.size()) {
            throw ShapeError(std::string(what) + ": midpoint size " +
                             std::to_string(mid.size()) + " != variable size " +
                             std::to_string(theta.size()));
        }
    }
}

}  // namespace

void MPCConfig::validate_or_throw() const {
    if (horizon < 1) throw Error("MPCConfig: horizon must be >= 1");
    if (!(timestep > 0.0)) throw Error("MPCConfig: timestep must be > 0");
    if ((q_diag.array() < 0.0).any() || !q_diag.allFinite()) {
        throw Error("MPCConfig: q_diag entries must be finite and >= 0");
    }
    if ((r_diag.array() <= 0.0).any() || !r_diag.allFinite()) {
        throw Error("MPCConfig: r_diag entries must be finite and > 0");
    }
    if (!(d_min > 0.0)) throw Error("MPCConfig: d_min must be > 0");
    if (!(collision_weight >= 0.0)) throw Error("MPCConfig: collision_weight must be >= 0");
    if ((input_lo.array() > input_hi.array()).any()) {
        throw Error("MPCConfig: input_lo exceeds input_hi");
    }
    if (!(input_lo(0) >= 0.0)) throw Error("MPCConfig: thrust lower bound must be >= 0");
    if ((state_lo.array() > state_hi.array()).any()) {
        throw Error("MPCConfig: state_lo exceeds state_hi");
    }
    if (input_lo.hasNaN() || input_hi.hasNaN() || state_lo.hasNaN() || state_hi.hasNaN()) {
        throw Error("MPCConfig: bounds must not be NaN");
    }
}

double tracking_cost(const LocalVariable& theta, AgentId i,
                     const std::vector<StateVec>& x_ref, const MPCConfig& cfg) {
    check_variable(theta, cfg, "tracking_cost");
    check_reference(x_ref, cfg);
    double cost = 0.0;
    for (int k = 0; k < cfg.horizon; ++k) {
        const StateVec dx = theta.state(i, k) - x_ref[k];
        cost += dx.cwiseProduct(cfg.q_diag).dot(dx);
        const InputVec u = theta.input(i, k);
        cost += u.cwiseProduct(cfg.r_diag).dot(u);
    }
    if (cfg.terminal_weight) {
        const StateVec dx = theta.state(i, cfg.horizon) - x_ref[cfg.horizon];
        cost += dx.cwiseProduct(cfg.q_diag).dot(dx);
    }
    return cost;
}

double collision_penalty(const LocalVariable& theta, AgentId i, const CommGraph& g,
                         const MPCConfig& cfg) {
    check_variable(theta, cfg, "collision_penalty");
    double penalty = 0.0;
    for (AgentId j : g.neighbors(i)) {
        for (int k = 0; k <= cfg.horizon; ++k) {
            const double dist = (theta.position(i, k) - theta.position(j, k)).norm();
            const double hinge = cfg.d_min - dist;
            if (hinge > 0.0) penalty += hinge * hinge;
        }
    }
    return cfg.collision_weight * penalty;
}

double consensus_dual_terms(const LocalVariable& theta, const DualVariable& lambda,
                            std::span<const Eigen::VectorXd> midpoints, double rho) {
    theta.require_same_shape(lambda);
    check_midpoints(theta, midpoints, "consensus_dual_terms");
    double value = lambda.flat().dot(theta.flat());
    for (const auto& mid : midpoints) {
        value += rho * (theta.flat() - mid).squaredNorm();
    }
    return value;
}

double local_objective(const LocalVariable& theta, AgentId i,
                       const std::vector<StateVec>& x_ref, const DualVariable& lambda,
                       std::span<const Eigen::VectorXd> midpoints, double rho,
                       const CommGraph& g, const MPCConfig& cfg) {
    return tracking_cost(theta, i, x_ref, cfg) + collision_penalty(theta, i, g, cfg) +
           consensus_dual_terms(theta, lambda, midpoints, rho);
}

void assemble_own_states(LocalVariable& theta, AgentId i, const StateVec& x0,
                         const MPCConfig& cfg, const DroneParams& params) {
    check_variable(theta, cfg, "assemble_own_states");
    theta.state(i, 0) = x0;
    for (int k = 0; k < cfg.horizon; ++k) {
        try {
            theta.state(i, k + 1) = rk4_step(StateVec(theta.state(i, k)),
                                             InputVec(theta.input(i, k)), cfg.timestep,
                                             params);
        } catch (const AttitudeSingularityError& e) {
            throw AttitudeSingularityError(e.pitch(), k);
        } catch (const NonFiniteError&) {
            throw NonFiniteError("assemble_own_states: non-finite state at step " +
                                 std::to_string(k));
        }
    }
}

void project_feasible(LocalVariable& theta, AgentId i, const MPCConfig& cfg) {
    check_variable(theta, cfg, "project_feasible");
    if (i < 0 || i >= theta.n_agents()) {
        throw std::out_of_range("project_feasible: agent " + std::to_string(i) +
                                " out of range");
    }
    for (int a = 0; a < theta.n_agents(); ++a) {
        for (int k = 0; k < theta.horizon(); ++k) {
            auto u = theta.input(a, k);
            u = u.cwiseMax(cfg.input_lo).cwiseMin(cfg.input_hi);
        }
        if (a == i) continue;  // own states are derived, never projected
        for (int k = 0; k <= theta.horizon(); ++k) {
            auto x = theta.state(a, k);
            x = x.cwiseMax(cfg.state_lo).cwiseMin(cfg.state_hi);
        }
    }
}

LocalVariable objective_gradient(const LocalVariable& theta, AgentId i,
                                 const std::vector<StateVec>& x_ref,
                                 const DualVariable& lambda,
                                 std::span<const Eigen::VectorXd> midpoints, double rho,
                                 const CommGraph& g, const MPCConfig& cfg,
                                 const DroneParams& params) {
    check_variable(theta, cfg, "objective_gradient");
    check_reference(x_ref, cfg);
    theta.require_same_shape(lambda);
    check_midpoints(theta, midpoints, "objective_gradient");

    const int n = theta.n_agents();
    const int H = theta.horizon();
    LocalVariable grad(n, H);

    // Consensus + dual terms act on the whole flat vector:
    // lambda + 2 rho sum_j (theta - mid_j).
    grad.flat() = lambda.flat();
    if (!midpoints.empty()) {
        grad.flat() += 2.0 * rho * static_cast<double>(midpoints.size()) * theta.flat();
        for (const auto& mid : midpoints) grad.flat() -= 2.0 * rho * mid;
    }

    // Agent i's own states are not free variables; their entries become the
    // adjoint seeds for the rollout chain instead.
    std::vector<StateVec> seed(H + 1);
    for (int k = 0; k <= H; ++k) {
        seed[k] = grad.state(i, k);
        grad.state(i, k).setZero();
    }

    // Tracking terms: state deviations seed the adjoint, input terms are
    // direct derivatives.
    for (int k = 0; k < H; ++k) {
        seed[k] += 2.0 * cfg.q_diag.cwiseProduct(StateVec(theta.state(i, k)) - x_ref[k]);
        grad.input(i, k) += 2.0 * cfg.r_diag.cwiseProduct(InputVec(theta.input(i, k)));
    }
    if (cfg.terminal_weight) {
        seed[H] += 2.0 * cfg.q_diag.cwiseProduct(StateVec(theta.state(i, H)) - x_ref[H]);
    }

    // Squared-hinge separation penalty: pushes own positions (via the seeds)
    // and the local copies of the neighbours' positions apart.
    for (AgentId j : g.neighbors(i)) {
        for (int k = 0; k <= H; ++k) {
            const Eigen::Vector3d d = theta.position(i, k) - theta.position(j, k);
            const double dist = d.norm();
            const double hinge = cfg.d_min - dist;
            if (hinge <= 0.0) continue;
            const Eigen::Vector3d dir =
                dist < kCoincidentEps ? Eigen::Vector3d::UnitX() : Eigen::Vector3d(d / dist);
            const Eigen::Vector3d push = (2.0 * cfg.collision_weight * hinge) * dir;
            seed[k].head<3>() -= push;
            grad.state(j, k).head(3) += push;
        }
    }

    // Reverse sweep through the rollout: fold every state seed into the own
    // input entries. x(0) is pinned to the measured state, so its seed dies.
    StateVec adjoint = seed[H];
    StateMat dstep_dx;
    StateInputMat dstep_du;
    for (int k = H - 1; k >= 0; --k) {
        rk4_step_jacobians(StateVec(theta.state(i, k)), InputVec(theta.input(i, k)),
                           cfg.timestep, params, dstep_dx, dstep_du);
        grad.input(i, k) += dstep_du.transpose() * adjoint;
        adjoint = seed[k] + dstep_dx.transpose() * adjoint;
    }

    if (!grad.flat().allFinite()) {
        throw NonFiniteError("objective_gradient: non-finite gradient");
    }
    return grad;
}

LocalVariable solve_primal(const LocalVariable& initial_guess, AgentId i, const StateVec& x0,
                           const std::vector<StateVec>& x_ref, const DualVariable& lambda,
                           std::span<const Eigen::VectorXd> midpoints, double rho,
                           const CommGraph& g, const MPCConfig& cfg,
                           const DroneParams& params, const SolverConfig& scfg) {
    cfg.validate_or_throw();
    scfg.validate_or_throw();
    params.validate_or_throw();
    check_variable(initial_guess, cfg, "solve_primal");
    if (initial_guess.n_agents() != g.n_agents()) {
        throw ShapeError("solve_primal: variable covers " +
                         std::to_string(initial_guess.n_agents()) + " agents, graph has " +
                         std::to_string(g.n_agents()));
    }
    if (midpoints.size() != g.neighbors(i).size()) {
        throw ShapeError("solve_primal: " + std::to_string(midpoints.size()) +
                         " midpoints for " + std::to_string(g.neighbors(i).size()) +
                         " neighbors");
    }

    const int n = initial_guess.n_agents();
    const int H = initial_guess.horizon();

    // The decision vector is the flat variable; the own-state block inside it
    // is dead weight that objective/gradient evaluation re-derives from the
    // inputs, so the solver only ever "sees" the free variables.
    const auto objective = [&](const Eigen::VectorXd& v) -> double {
        LocalVariable t(n, H, v);
        try {
            assemble_own_states(t, i, x0, cfg, params);
        } catch (const AttitudeSingularityError&) {
            return std::numeric_limits<double>::infinity();
        } catch (const NonFiniteError&) {
            return std::numeric_limits<double>::infinity();
        }
        return local_objective(t, i, x_ref, lambda, midpoints, rho, g, cfg);
    };
    const auto gradient = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
        LocalVariable t(n, H, v);
        assemble_own_states(t, i, x0, cfg, params);
        out = objective_gradient(t, i, x_ref, lambda, midpoints, rho, g, cfg, params).flat();
    };
    const auto project = [&](Eigen::VectorXd& v) {
        LocalVariable t(n, H, std::move(v));
        project_feasible(t, i, cfg);
        v = std::move(t.flat());
    };

    PgdResult res = minimize_projected(objective, gradient, project,
                                       initial_guess.flat(), scfg);

    LocalVariable out(n, H, std::move(res.x));
    assemble_own_states(out, i, x0, cfg, params);
    return out;
}

MpcLocalProblem::MpcLocalProblem(CommGraph graph, MPCConfig mpc, SolverConfig solver,
                                 DroneParams params)
    : graph_(std::move(graph)),
      mpc_(std::move(mpc)),
      solver_(solver),
      params_(params) {
    mpc_.validate_or_throw();
    solver_.validate_or_throw();
    params_.validate_or_throw();
    graph_.validate_or_throw();
    const int n = graph_.n_agents();
    initial_states_.assign(n, StateVec::Zero());
    references_.resize(n);
    has_state_.assign(n, false);
    has_reference_.assign(n, false);
}

void MpcLocalProblem::check_agent(AgentId i, const char* what) const {
    if (i < 0 || i >= graph_.n_agents()) {
        throw std::out_of_range(std::string(what) + ": agent " + std::to_string(i) +
                                " out of range");
    }
}

void MpcLocalProblem::set_initial_state(AgentId i, const StateVec& x0) {
    check_agent(i, "MpcLocalProblem::set_initial_state");
    if (!x0.allFinite()) {
        throw NonFiniteError("MpcLocalProblem: non-finite initial state for agent " +
                             std::to_string(i));
    }
    initial_states_[i] = x0;
    has_state_[i] = true;
}

void MpcLocalProblem::set_reference(AgentId i, std::vector<StateVec> x_ref) {
    check_agent(i, "MpcLocalProblem::set_reference");
    check_reference(x_ref, mpc_);
    references_[i] = std::move(x_ref);
    has_reference_[i] = true;
}

Eigen::VectorXd MpcLocalProblem::solve_local(AgentId i, const Eigen::VectorXd& warm,
                                             const Eigen::VectorXd& lambda,
                                             std::span<const Eigen::VectorXd> midpoints,
                                             double rho) {
    check_agent(i, "MpcLocalProblem::solve_local");
    if (!has_state_[i] || !has_reference_[i]) {
        throw Error("MpcLocalProblem: agent " + std::to_string(i) +
                    " is missing its initial state or reference");
    }
    const int n = graph_.n_agents();
    LocalVariable guess(n, mpc_.horizon, warm);
    DualVariable lam(n, mpc_.horizon, lambda);
    return solve_primal(guess, i, initial_states_[i], references_[i], lam, midpoints, rho,
                        graph_, mpc_, params_, solver_)
        .flat();
}

double MpcLocalProblem::local_cost(AgentId i, const Eigen::VectorXd& theta) const {
    check_agent(i, "MpcLocalProblem::local_cost");
    if (!has_reference_[i]) {
        throw Error("MpcLocalProblem: agent " + std::to_string(i) + " is missing its reference");
    }
    LocalVariable t(graph_.n_agents(), mpc_.horizon, theta);
    return tracking_cost(t, i, references_[i], mpc_) +
           collision_penalty(t, i, graph_, mpc_);
}

}  // namespace swarmopt
