// Microbenchmarks for the hot paths: integrator steps, rollout, objective
// gradients, consensus rounds, and one full local solve. Run the binary
// directly; it is intentionally not registered with ctest.

#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <benchmark/benchmark.h>

#include "swarmopt/admm.hpp"
#include "swarmopt/dynamics.hpp"
#include "swarmopt/graph.hpp"
#include "swarmopt/local_variable.hpp"
#include "swarmopt/netsim.hpp"
#include "swarmopt/oracle.hpp"
#include "swarmopt/trajopt.hpp"

using namespace swarmopt;

namespace {

StateVec perturbed_hover() {
    StateVec x = StateVec::Zero();
    x(2) = 1.0;
    x(3) = 0.2;   // forward speed
    x(7) = 0.05;  // slight pitch
    x(10) = 0.1;  // pitch rate
    return x;
}

InputVec working_input(const DroneParams& params) {
    InputVec u = params.hover_input().stacked();
    u(0) += 0.4;
    u(2) += 0.01;
    return u;
}

void BM_rk4_step(benchmark::State& state) {
    const DroneParams params;
    const StateVec x = perturbed_hover();
    const InputVec u = working_input(params);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rk4_step(x, u, 0.05, params));
    }
}
BENCHMARK(BM_rk4_step);

void BM_rk4_step_jacobians(benchmark::State& state) {
    const DroneParams params;
    const StateVec x = perturbed_hover();
    const InputVec u = working_input(params);
    StateMat dstep_dx;
    StateInputMat dstep_du;
    for (auto _ : state) {
        rk4_step_jacobians(x, u, 0.05, params, dstep_dx, dstep_du);
        benchmark::DoNotOptimize(dstep_dx);
        benchmark::DoNotOptimize(dstep_du);
    }
}
BENCHMARK(BM_rk4_step_jacobians);

void BM_rollout_h15(benchmark::State& state) {
    const DroneParams params;
    const DroneState x0 = DroneState::from_stacked(perturbed_hover());
    const std::vector<ControlInput> inputs(
        15, ControlInput::from_stacked(working_input(params)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(rollout(x0, inputs, 0.05, params));
    }
}
BENCHMARK(BM_rollout_h15);

// Two agents, horizon 15, separation penalty engaged: one full analytic
// gradient including the adjoint sweep through the rollout.
void BM_objective_gradient_n2_h15(benchmark::State& state) {
    const DroneParams params;
    const CommGraph g = CommGraph::path(2);
    MPCConfig cfg;
    cfg.horizon = 15;
    cfg.d_min = 0.8;

    const StateVec x0 = perturbed_hover();
    std::vector<StateVec> ref(16, x0);
    for (int k = 0; k <= 15; ++k) ref[k](0) = 0.05 * k;

    LocalVariable theta(2, 15);
    for (int k = 0; k < 15; ++k) theta.input(0, k) = working_input(params);
    for (int k = 0; k <= 15; ++k) {
        theta.position(1, k) = Eigen::Vector3d(0.05 * k, 0.5, 1.0);
    }
    assemble_own_states(theta, 0, x0, cfg, params);

    DualVariable lambda(2, 15);
    lambda.flat().setConstant(0.01);
    std::vector<Eigen::VectorXd> mids = {theta.flat()};
    mids[0].array() += 0.02;

    for (auto _ : state) {
        benchmark::DoNotOptimize(
            objective_gradient(theta, 0, ref, lambda, mids, 1.0, g, cfg, params));
    }
}
BENCHMARK(BM_objective_gradient_n2_h15);

class QuadraticLsqProblem final : public ConsensusProblem {
 public:
    explicit QuadraticLsqProblem(ConsensusLsqInstance inst) : inst_(std::move(inst)) {}

    int n_agents() const override { return static_cast<int>(inst_.targets.size()); }

    Eigen::VectorXd solve_local(AgentId i, const Eigen::VectorXd&,
                                const Eigen::VectorXd& lambda,
                                std::span<const Eigen::VectorXd> midpoints,
                                double rho) override {
        const Eigen::VectorXd& a = inst_.targets[static_cast<size_t>(i)];
        const Eigen::VectorXd& w = inst_.weights[static_cast<size_t>(i)];
        Eigen::VectorXd mid_sum = Eigen::VectorXd::Zero(a.size());
        for (const auto& mid : midpoints) mid_sum += mid;
        const double n_i = static_cast<double>(midpoints.size());
        return (2.0 * w.cwiseProduct(a) - lambda + 2.0 * rho * mid_sum)
            .cwiseQuotient(2.0 * w +
                           Eigen::VectorXd::Constant(a.size(), 2.0 * rho * n_i));
    }

    double local_cost(AgentId i, const Eigen::VectorXd& theta) const override {
        const Eigen::VectorXd d = theta - inst_.targets[static_cast<size_t>(i)];
        return d.cwiseProduct(d).dot(inst_.weights[static_cast<size_t>(i)]);
    }

 private:
    ConsensusLsqInstance inst_;
};

// One synchronous consensus round on a five-agent quadratic family.
void BM_admm_round_n5(benchmark::State& state) {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    ConsensusLsqInstance inst;
    inst.graph = CommGraph::complete(5);
    for (int i = 0; i < 5; ++i) {
        Eigen::VectorXd a(8), w(8);
        for (int c = 0; c < 8; ++c) a(c) = dist(gen);
        for (int c = 0; c < 8; ++c) w(c) = 0.5 + 0.1 * i;
        inst.targets.push_back(a);
        inst.weights.push_back(w);
    }
    QuadraticLsqProblem problem(inst);

    SwarmIterate iterate;
    iterate.theta.assign(5, Eigen::VectorXd::Zero(8));
    iterate.lambda.assign(5, Eigen::VectorXd::Zero(8));
    DirectExchange exchange;
    exchange.seed(iterate.theta, inst.graph);

    for (auto _ : state) {
        auto [next, record] = admm_round(iterate, problem, inst.graph, 1.0, exchange);
        benchmark::DoNotOptimize(record);
        iterate = std::move(next);
    }
}
BENCHMARK(BM_admm_round_n5);

// One full local primal solve: a single drone tracking a shifted reference.
void BM_solve_primal_n1_h15(benchmark::State& state) {
    const DroneParams params;
    const CommGraph g(1, {});
    MPCConfig cfg;
    cfg.horizon = 15;
    SolverConfig scfg;
    scfg.max_inner_iters = 40;
    scfg.grad_tol = 1e-4;

    StateVec x0 = StateVec::Zero();
    x0(2) = 1.0;
    std::vector<StateVec> ref(16, x0);
    for (int k = 0; k <= 15; ++k) ref[k](0) = 0.02 * k;

    LocalVariable guess(1, 15);
    for (int k = 0; k < 15; ++k) guess.input(0, k) = params.hover_input().stacked();
    DualVariable lambda(1, 15);
    const std::vector<Eigen::VectorXd> no_mids;

    for (auto _ : state) {
        benchmark::DoNotOptimize(
            solve_primal(guess, 0, x0, ref, lambda, no_mids, 1.0, g, cfg, params, scfg));
    }
}
BENCHMARK(BM_solve_primal_n1_h15);

}  // namespace

BENCHMARK_MAIN();
