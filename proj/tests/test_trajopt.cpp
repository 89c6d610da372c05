#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "swarmopt/dynamics.hpp"
#include "swarmopt/errors.hpp"
#include "swarmopt/graph.hpp"
#include "swarmopt/local_variable.hpp"
#include "swarmopt/oracle.hpp"
#include "swarmopt/pgd.hpp"
#include "swarmopt/trajopt.hpp"

#include "support/test_support.hpp"

using namespace swarmopt;

namespace {

std::vector<StateVec> zero_reference(int horizon) {
    return std::vector<StateVec>(horizon + 1, StateVec::Zero());
}

// Hover at a position: the equilibrium state the references are built from.
StateVec hover_state(double x, double y, double z) {
    StateVec s = StateVec::Zero();
    s.segment<3>(0) = Eigen::Vector3d(x, y, z);
    return s;
}

bool bitwise_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

MPCConfig unit_config(int horizon) {
    MPCConfig cfg;
    cfg.horizon = horizon;
    cfg.q_diag = StateVec::Ones();
    cfg.r_diag = InputVec::Ones();
    cfg.d_min = 1.0;
    cfg.collision_weight = 10.0;
    cfg.terminal_weight = true;
    return cfg;
}

}  // namespace

TEST_CASE("tracking cost sums weighted squared deviations") {
    const MPCConfig cfg = unit_config(2);
    const auto ref = zero_reference(2);
    LocalVariable theta(1, 2);

    SUBCASE("perfect tracking costs nothing") {
        CHECK(tracking_cost(theta, 0, ref, cfg) == 0.0);
    }
    SUBCASE("one unit deviation in one state channel") {
        theta.state(0, 0)(3) = 2.0;  // velocity-x off by 2 -> 4 under unit Q
        CHECK(tracking_cost(theta, 0, ref, cfg) == doctest::Approx(4.0).epsilon(1e-15));
    }
    SUBCASE("state norms 1 and 3 plus input norm 2 total 14") {
        theta.state(0, 0)(3) = 1.0;   // ||dx0||^2 = 1
        theta.state(0, 1)(4) = 3.0;   // ||dx1||^2 = 9
        theta.input(0, 0)(0) = 2.0;   // ||u0||^2 = 4
        CHECK(tracking_cost(theta, 0, ref, cfg) == doctest::Approx(14.0).epsilon(1e-15));
    }
    SUBCASE("terminal weight switches the horizon-end deviation on and off") {
        theta.state(0, 2)(5) = 2.0;
        CHECK(tracking_cost(theta, 0, ref, cfg) == doctest::Approx(4.0).epsilon(1e-15));
        MPCConfig off = cfg;
        off.terminal_weight = false;
        CHECK(tracking_cost(theta, 0, ref, off) == 0.0);
    }
    SUBCASE("reference of the wrong length is rejected") {
        CHECK_THROWS_AS(tracking_cost(theta, 0, zero_reference(3), cfg), ShapeError);
        LocalVariable wrong(1, 4);
        CHECK_THROWS_AS(tracking_cost(wrong, 0, ref, cfg), ShapeError);
    }
}

TEST_CASE("collision penalty is a weighted squared hinge on separation") {
    const CommGraph g = CommGraph::path(2);
    MPCConfig cfg = unit_config(3);
    LocalVariable theta(2, 3);
    // park agent 1 far away at every step
    for (int k = 0; k <= 3; ++k) theta.position(1, k) = Eigen::Vector3d(10, 10, 10);

    SUBCASE("separated trajectories cost nothing") {
        CHECK(collision_penalty(theta, 0, g, cfg) == 0.0);
    }
    SUBCASE("distance 0.5 against d_min 1 at one step costs w * 0.25") {
        theta.position(1, 2) = Eigen::Vector3d(0.5, 0.0, 0.0);
        CHECK(collision_penalty(theta, 0, g, cfg) == doctest::Approx(2.5).epsilon(1e-15));
        // symmetric from the other agent's viewpoint
        CHECK(collision_penalty(theta, 1, g, cfg) == doctest::Approx(2.5).epsilon(1e-15));
    }
    SUBCASE("coincident positions at one step cost w * d_min^2") {
        cfg.collision_weight = 1.0;
        theta.position(1, 0) = Eigen::Vector3d::Zero();
        CHECK(collision_penalty(theta, 0, g, cfg) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("exactly at d_min costs nothing") {
        theta.position(1, 1) = Eigen::Vector3d(1.0, 0.0, 0.0);
        CHECK(collision_penalty(theta, 0, g, cfg) == 0.0);
    }
    SUBCASE("zero weight disables the term") {
        cfg.collision_weight = 0.0;
        theta.position(1, 0) = Eigen::Vector3d::Zero();
        CHECK(collision_penalty(theta, 0, g, cfg) == 0.0);
    }
    SUBCASE("non-neighbors are ignored") {
        const CommGraph g3 = CommGraph::path(3);  // 0-1-2: 0 and 2 not adjacent
        LocalVariable t3(3, 3);
        for (int k = 0; k <= 3; ++k) {
            t3.position(1, k) = Eigen::Vector3d(10, 10, 10);
            t3.position(2, k) = Eigen::Vector3d::Zero();  // on top of agent 0
        }
        CHECK(collision_penalty(t3, 0, g3, cfg) == 0.0);
    }
}

TEST_CASE("consensus and dual terms") {
    LocalVariable theta(2, 2);
    DualVariable lambda(2, 2);

    SUBCASE("at the midpoints with zero duals the terms vanish") {
        const std::vector<Eigen::VectorXd> mids = {theta.flat(), theta.flat()};
        CHECK(consensus_dual_terms(theta, lambda, mids, 1.7) == 0.0);
    }
    SUBCASE("one neighbor at flat distance 2 with rho 0.5 costs 2") {
        Eigen::VectorXd mid = theta.flat();
        mid(5) += 2.0;
        const std::vector<Eigen::VectorXd> mids = {mid};
        CHECK(consensus_dual_terms(theta, lambda, mids, 0.5) ==
              doctest::Approx(2.0).epsilon(1e-15));
    }
    SUBCASE("the dual term is a plain inner product") {
        lambda.flat()(0) = 1.0;          // e_1
        theta.flat()(0) = 3.0;
        const std::vector<Eigen::VectorXd> mids = {theta.flat()};  // consensus part 0
        CHECK(consensus_dual_terms(theta, lambda, mids, 2.0) ==
              doctest::Approx(3.0).epsilon(1e-15));
    }
    SUBCASE("midpoint size mismatches throw") {
        const std::vector<Eigen::VectorXd> mids = {Eigen::VectorXd::Zero(3)};
        CHECK_THROWS_AS(consensus_dual_terms(theta, lambda, mids, 1.0), ShapeError);
        DualVariable wrong(2, 3);
        const std::vector<Eigen::VectorXd> ok = {theta.flat()};
        CHECK_THROWS_AS(consensus_dual_terms(theta, wrong, ok, 1.0), ShapeError);
    }
}

TEST_CASE("the local objective is the sum of its three parts: 14 + 2.5 + 2 = 18.5") {
    const CommGraph g = CommGraph::path(2);
    const MPCConfig cfg = unit_config(2);
    const auto ref = zero_reference(2);

    LocalVariable theta(2, 2);
    // tracking: velocity deviations of norm 1 and 3, input norm 2 -> 14
    theta.state(0, 0)(3) = 1.0;
    theta.state(0, 1)(4) = 3.0;
    theta.input(0, 0)(0) = 2.0;
    // collision: neighbor parked far except one step at distance 0.5 -> 2.5
    for (int k = 0; k <= 2; ++k) theta.position(1, k) = Eigen::Vector3d(10, 10, 10);
    theta.position(1, 2) = Eigen::Vector3d(0.5, 0.0, 0.0);
    // consensus: one midpoint at flat distance 2, rho = 0.5 -> 2.0
    DualVariable lambda(2, 2);
    Eigen::VectorXd mid = theta.flat();
    mid(theta.size() - 1) += 2.0;
    const std::vector<Eigen::VectorXd> mids = {mid};

    CHECK(local_objective(theta, 0, ref, lambda, mids, 0.5, g, cfg) ==
          doctest::Approx(18.5).epsilon(1e-14));

    // with rho = 0 and zero duals only the local MPC cost remains
    const std::vector<Eigen::VectorXd> at_theta = {theta.flat()};
    CHECK(local_objective(theta, 0, ref, lambda, at_theta, 0.0, g, cfg) ==
          doctest::Approx(16.5).epsilon(1e-14));
}

TEST_CASE("assembling own states reproduces the rollout exactly") {
    const DroneParams params;
    MPCConfig cfg;
    cfg.horizon = 4;
    cfg.timestep = 0.05;
    test::TestRng rng(1234);

    LocalVariable theta(2, 4);
    theta.flat() = rng.uniform_vector(static_cast<int>(theta.size()), -1.0, 1.0);
    const Eigen::VectorXd other_before = theta.state(1, 2);

    const StateVec x0 = hover_state(0.2, -0.1, 1.0);
    std::vector<ControlInput> inputs;
    for (int k = 0; k < 4; ++k) {
        InputVec u = params.hover_input().stacked();
        u(0) += rng.uniform(-0.3, 0.3);
        u(2) = rng.uniform(-0.02, 0.02);
        theta.input(0, k) = u;
        inputs.push_back(ControlInput::from_stacked(u));
    }

    assemble_own_states(theta, 0, x0, cfg, params);

    const auto traj = rollout(DroneState::from_stacked(x0), inputs, cfg.timestep, params);
    for (int k = 0; k <= 4; ++k) {
        CHECK(Eigen::VectorXd(theta.state(0, k)) == traj[k].stacked());
    }
    // the other agent's blocks are untouched
    CHECK(Eigen::VectorXd(theta.state(1, 2)) == other_before);

    // a pitch-flip input sequence reports the failing step
    LocalVariable bad(1, 15);
    MPCConfig cfg15;
    cfg15.horizon = 15;
    for (int k = 0; k < 15; ++k) {
        InputVec u = params.hover_input().stacked();
        u(2) = 0.2;  // max pitch torque, sustained
        bad.input(0, k) = u;
    }
    try {
        assemble_own_states(bad, 0, StateVec::Zero(), cfg15, params);
        FAIL("expected AttitudeSingularityError");
    } catch (const AttitudeSingularityError& e) {
        CHECK(e.step() >= 0);
        CHECK(e.step() < 15);
    }
}

TEST_CASE("feasibility projection clamps inputs and copied states only") {
    MPCConfig cfg = unit_config(2);
    cfg.state_lo = StateVec::Constant(-2.0);
    cfg.state_hi = StateVec::Constant(2.0);

    LocalVariable theta(2, 2);
    theta.input(0, 0) << -5.0, 0.5, -0.5, 0.0;   // own inputs out of the box
    theta.input(1, 1) << 30.0, 0.0, 0.0, -0.3;   // neighbor inputs too
    theta.state(0, 1).setConstant(9.0);          // own state, derived: left alone
    theta.state(1, 0).setConstant(-9.0);         // neighbor copy: clamped

    project_feasible(theta, 0, cfg);

    CHECK(theta.input(0, 0)(0) == 0.0);    // thrust floor
    CHECK(theta.input(0, 0)(1) == 0.2);    // torque ceiling
    CHECK(theta.input(0, 0)(2) == -0.2);
    CHECK(theta.input(1, 1)(0) == 25.0);
    CHECK(theta.input(1, 1)(3) == -0.2);
    CHECK(theta.state(0, 1)(0) == 9.0);    // own state untouched
    CHECK(theta.state(1, 0)(0) == -2.0);   // neighbor copy clamped

    // idempotent, bit for bit
    LocalVariable again = theta;
    project_feasible(again, 0, cfg);
    CHECK(bitwise_equal(again.flat(), theta.flat()));

    CHECK_THROWS_AS(project_feasible(theta, 5, cfg), std::out_of_range);
}

TEST_CASE("analytic gradient matches central finite differences") {
    const DroneParams params;
    const CommGraph g = CommGraph::path(2);
    MPCConfig cfg;
    cfg.horizon = 3;
    cfg.timestep = 0.05;
    cfg.d_min = 0.5;
    cfg.collision_weight = 50.0;

    test::TestRng rng(9001);
    const StateVec x0 = hover_state(0.0, 0.0, 1.0);
    std::vector<StateVec> ref(4, hover_state(0.4, 0.0, 1.0));

    for (int trial = 0; trial < 3; ++trial) {
        LocalVariable theta(2, 3);
        theta.flat() = rng.uniform_vector(static_cast<int>(theta.size()), -0.5, 0.5);
        for (int k = 0; k < 3; ++k) {
            InputVec u = params.hover_input().stacked();
            u(0) += rng.uniform(-1.0, 1.0);
            u(1) = rng.uniform(-0.1, 0.1);
            u(2) = rng.uniform(-0.1, 0.1);
            u(3) = rng.uniform(-0.1, 0.1);
            theta.input(0, k) = u;
        }
        // park the neighbor copy close to the own path so the hinge is active
        for (int k = 0; k <= 3; ++k) {
            theta.position(1, k) =
                Eigen::Vector3d(0.1 + 0.05 * k, 0.1, 1.0 + rng.uniform(-0.05, 0.05));
        }
        assemble_own_states(theta, 0, x0, cfg, params);
        REQUIRE(collision_penalty(theta, 0, g, cfg) > 0.0);

        DualVariable lambda(2, 3);
        lambda.flat() = rng.uniform_vector(static_cast<int>(lambda.size()), -0.1, 0.1);
        std::vector<Eigen::VectorXd> mids = {
            theta.flat() + rng.uniform_vector(static_cast<int>(theta.size()), -0.2, 0.2)};
        const double rho = 0.7;

        const LocalVariable grad =
            objective_gradient(theta, 0, ref, lambda, mids, rho, g, cfg, params);

        // FD must see the same reduced problem: own states re-derived from
        // the inputs before each evaluation.
        const auto reduced = [&](const Eigen::VectorXd& v) {
            LocalVariable t(2, 3, v);
            assemble_own_states(t, 0, x0, cfg, params);
            return local_objective(t, 0, ref, lambda, mids, rho, g, cfg);
        };
        const Eigen::VectorXd fd =
            test::finite_difference_gradient(reduced, theta.flat(), 1e-6);
        CHECK(test::gradient_relative_error(grad.flat(), fd) < 1e-4);

        // own-state entries are never free variables
        for (int k = 0; k <= 3; ++k) {
            CHECK(Eigen::VectorXd(grad.state(0, k)).isZero(0.0));
        }
    }
}

TEST_CASE("consensus gradient contribution is lambda + 2 rho (theta - mid)") {
    // Constructed so the own-state entries of both lambda and theta - mid are
    // zero: then no consensus signal leaks into the adjoint and the formula
    // must hold exactly on every free entry.
    const DroneParams params;
    const CommGraph g = CommGraph::path(2);
    MPCConfig cfg;                      // raw config: tracking and collision off
    cfg.horizon = 2;
    cfg.timestep = 0.05;
    cfg.q_diag = StateVec::Zero();
    cfg.r_diag = InputVec::Constant(1e-30);  // negligible but valid
    cfg.collision_weight = 0.0;
    cfg.terminal_weight = false;

    test::TestRng rng(512);
    LocalVariable theta(2, 2);
    theta.flat() = rng.uniform_vector(static_cast<int>(theta.size()), -1.0, 1.0);
    assemble_own_states(theta, 0, hover_state(0, 0, 1), cfg, params);

    DualVariable lambda(2, 2);
    lambda.flat() = rng.uniform_vector(static_cast<int>(lambda.size()), -1.0, 1.0);
    for (int k = 0; k <= 2; ++k) lambda.state(0, k).setZero();

    Eigen::VectorXd mid = theta.flat();
    // shift only the free entries of the midpoint
    LocalVariable mid_var(2, 2, mid);
    mid_var.state(1, 0).array() += 0.3;
    mid_var.input(0, 1).array() -= 0.4;
    mid_var.input(1, 0).array() += 0.1;
    const std::vector<Eigen::VectorXd> mids = {mid_var.flat()};
    const double rho = 1.3;

    const std::vector<StateVec> ref = zero_reference(2);
    const LocalVariable grad =
        objective_gradient(theta, 0, ref, lambda, mids, rho, g, cfg, params);

    LocalVariable expected(2, 2);
    expected.flat() = lambda.flat() + 2.0 * rho * (theta.flat() - mid_var.flat());
    for (int k = 0; k <= 2; ++k) expected.state(0, k).setZero();
    // r_diag adds 2 r u, at 1e-30 indistinguishable from zero here
    CHECK((grad.flat() - expected.flat()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("projected gradient reproduces the scalar prox closed form") {
    // min (t - a)^2 + lambda t + rho (t - c)^2 has the unique minimizer
    // (2a - lambda + 2 rho c) / (2 + 2 rho).
    const double a = 1.8, lambda = -0.6, rho = 2.5, c = -0.9;
    const auto f = [&](const Eigen::VectorXd& x) {
        const double t = x(0);
        return (t - a) * (t - a) + lambda * t + rho * (t - c) * (t - c);
    };
    const auto df = [&](const Eigen::VectorXd& x, Eigen::VectorXd& out) {
        out.resize(1);
        out(0) = 2.0 * (x(0) - a) + lambda + 2.0 * rho * (x(0) - c);
    };
    SolverConfig scfg;
    scfg.grad_tol = 1e-12;
    Eigen::VectorXd x0(1);
    x0 << 0.0;
    const PgdResult res =
        minimize_projected(f, df, [](Eigen::VectorXd&) {}, x0, scfg);
    const double closed_form = (2.0 * a - lambda + 2.0 * rho * c) / (2.0 + 2.0 * rho);
    CHECK(res.x(0) == doctest::Approx(closed_form).epsilon(1e-10));
}

TEST_CASE("solve_primal output is feasible, consistent, and no worse than the guess") {
    const DroneParams params;
    const CommGraph g = CommGraph::path(2);
    MPCConfig cfg;
    cfg.horizon = 5;
    cfg.timestep = 0.05;
    SolverConfig scfg;
    scfg.max_inner_iters = 60;
    scfg.grad_tol = 1e-8;

    const StateVec x0 = hover_state(0, 0, 1);
    std::vector<StateVec> ref(6, hover_state(0.5, 0, 1));

    test::TestRng rng(31337);
    LocalVariable guess(2, 5);
    guess.flat() = rng.uniform_vector(static_cast<int>(guess.size()), -0.4, 0.4);
    for (int k = 0; k < 5; ++k) {
        guess.input(0, k) = params.hover_input().stacked();
        guess.input(0, k)(0) += 40.0;  // deliberately out of the box
    }
    DualVariable lambda(2, 5);
    std::vector<Eigen::VectorXd> mids = {guess.flat()};
    const double rho = 0.5;

    const LocalVariable out =
        solve_primal(guess, 0, x0, ref, lambda, mids, rho, g, cfg, params, scfg);

    // feasible inputs
    for (int a = 0; a < 2; ++a) {
        for (int k = 0; k < 5; ++k) {
            const InputVec u = out.input(a, k);
            CHECK((u.array() >= cfg.input_lo.array()).all());
            CHECK((u.array() <= cfg.input_hi.array()).all());
        }
    }
    // own block dynamically consistent: re-assembly is a no-op
    LocalVariable verify = out;
    assemble_own_states(verify, 0, x0, cfg, params);
    CHECK(bitwise_equal(verify.flat(), out.flat()));

    // objective no worse than the projected, assembled initial guess
    LocalVariable base = guess;
    project_feasible(base, 0, cfg);
    assemble_own_states(base, 0, x0, cfg, params);
    const double f_base = local_objective(base, 0, ref, lambda, mids, rho, g, cfg);
    const double f_out = local_objective(out, 0, ref, lambda, mids, rho, g, cfg);
    CHECK(f_out <= f_base + 1e-12);

    // midpoint count must match the neighbor count
    std::vector<Eigen::VectorXd> too_many = {guess.flat(), guess.flat()};
    CHECK_THROWS_AS(
        solve_primal(guess, 0, x0, ref, lambda, too_many, rho, g, cfg, params, scfg),
        ShapeError);
}

TEST_CASE("re-solving from the solution is a fixed point") {
    const DroneParams params;
    const CommGraph g(1, {});
    MPCConfig cfg;
    cfg.horizon = 3;
    cfg.timestep = 0.05;
    SolverConfig scfg;
    scfg.max_inner_iters = 5000;  // generous: the input/position scales differ by ~1e5
    scfg.grad_tol = 1e-9;

    const StateVec x0 = hover_state(0, 0, 1);
    std::vector<StateVec> ref(4, hover_state(0.1, 0, 1));
    LocalVariable guess(1, 3);
    for (int k = 0; k < 3; ++k) guess.input(0, k) = params.hover_input().stacked();
    DualVariable lambda(1, 3);

    const LocalVariable first =
        solve_primal(guess, 0, x0, ref, lambda, {}, 1.0, g, cfg, params, scfg);
    const LocalVariable second =
        solve_primal(first, 0, x0, ref, lambda, {}, 1.0, g, cfg, params, scfg);
    CHECK((second.flat() - first.flat()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("with no coupling the other agents' blocks cannot influence the result") {
    const DroneParams params;
    const CommGraph g = CommGraph::path(2);
    MPCConfig cfg;
    cfg.horizon = 4;
    cfg.timestep = 0.05;
    cfg.collision_weight = 0.0;  // decoupled
    SolverConfig scfg;
    scfg.max_inner_iters = 40;

    const StateVec x0 = hover_state(0, 0, 1);
    std::vector<StateVec> ref(5, hover_state(0.3, 0.2, 1.2));
    DualVariable lambda(2, 4);
    const std::vector<Eigen::VectorXd> mids = {Eigen::VectorXd::Zero(lambda.size())};

    test::TestRng rng(64);
    LocalVariable guess_a(2, 4);
    for (int k = 0; k < 4; ++k) guess_a.input(0, k) = params.hover_input().stacked();
    LocalVariable guess_b = guess_a;
    // differ only in the other agent's blocks
    for (int k = 0; k <= 4; ++k)
        guess_b.state(1, k) = rng.uniform_vector(12, -3.0, 3.0);
    for (int k = 0; k < 4; ++k)
        guess_b.input(1, k) = Eigen::Vector4d(5.0, 0.1, -0.1, 0.0);

    const LocalVariable out_a =
        solve_primal(guess_a, 0, x0, ref, lambda, mids, 0.0, g, cfg, params, scfg);
    const LocalVariable out_b =
        solve_primal(guess_b, 0, x0, ref, lambda, mids, 0.0, g, cfg, params, scfg);

    for (int k = 0; k < 4; ++k) {
        CHECK(bitwise_equal(out_a.input(0, k), out_b.input(0, k)));
    }
    for (int k = 0; k <= 4; ++k) {
        CHECK(bitwise_equal(out_a.state(0, k), out_b.state(0, k)));
    }
}

TEST_CASE("a singular initial guess propagates the attitude error") {
    const DroneParams params;
    const CommGraph g(1, {});
    MPCConfig cfg;
    cfg.horizon = 15;
    cfg.timestep = 0.05;
    SolverConfig scfg;

    LocalVariable guess(1, 15);
    for (int k = 0; k < 15; ++k) {
        InputVec u = params.hover_input().stacked();
        u(2) = 0.2;  // sustained in-bounds pitch torque flips the drone
        guess.input(0, k) = u;
    }
    DualVariable lambda(1, 15);
    std::vector<StateVec> ref(16, StateVec::Zero());
    CHECK_THROWS_AS(solve_primal(guess, 0, hover_state(0, 0, 1), ref, lambda, {}, 1.0, g,
                                 cfg, params, scfg),
                    AttitudeSingularityError);
}

TEST_CASE("one-dimensional thrust problem agrees with brute-force search") {
    // Torques pinned to zero through equal bounds leaves thrust as the only
    // free variable; an exhaustive scan then bounds the solver's answer.
    const DroneParams params;
    const CommGraph g(1, {});
    MPCConfig cfg;
    cfg.horizon = 1;
    cfg.timestep = 0.05;
    cfg.input_lo = Eigen::Vector4d(0.0, 0.0, 0.0, 0.0);
    cfg.input_hi = Eigen::Vector4d(25.0, 0.0, 0.0, 0.0);
    cfg.terminal_weight = true;

    const StateVec x0 = hover_state(0, 0, 1);
    std::vector<StateVec> ref(2, hover_state(0, 0, 1.2));

    DualVariable lambda(1, 1);
    const auto thrust_objective = [&](const Eigen::VectorXd& t) {
        LocalVariable v(1, 1);
        v.input(0, 0) << t(0), 0.0, 0.0, 0.0;
        assemble_own_states(v, 0, x0, cfg, params);
        return local_objective(v, 0, ref, lambda, {}, 1.0, g, cfg);
    };
    Eigen::VectorXd lo(1), hi(1);
    lo << 0.0;
    hi << 25.0;
    const GridResult grid = grid_minimize(thrust_objective, lo, hi, 1e-3);

    SolverConfig scfg;
    scfg.max_inner_iters = 300;
    scfg.grad_tol = 1e-10;
    LocalVariable guess(1, 1);
    guess.input(0, 0) = params.hover_input().stacked();
    const LocalVariable out =
        solve_primal(guess, 0, x0, ref, lambda, {}, 1.0, g, cfg, params, scfg);

    CHECK(std::abs(out.input(0, 0)(0) - grid.point(0)) < 2e-3);
    CHECK(out.input(0, 0).tail<3>().isZero(0.0));
    CHECK(thrust_objective(Eigen::VectorXd::Constant(1, out.input(0, 0)(0))) <=
          grid.value + 1e-9);
}

TEST_CASE("the MPC adapter wires solve_primal into the consensus interface") {
    const DroneParams params;
    const CommGraph g = CommGraph::path(2);
    MPCConfig cfg;
    cfg.horizon = 3;
    cfg.timestep = 0.05;
    SolverConfig scfg;
    scfg.max_inner_iters = 25;

    MpcLocalProblem problem(g, cfg, scfg, params);
    CHECK(problem.n_agents() == 2);

    const StateVec x0 = hover_state(0, 0, 1);
    const std::vector<StateVec> ref(4, hover_state(0.2, 0, 1));

    // missing state/reference is an error
    LocalVariable warm(2, 3);
    for (int k = 0; k < 3; ++k) warm.input(0, k) = params.hover_input().stacked();
    DualVariable lambda(2, 3);
    const std::vector<Eigen::VectorXd> mids = {warm.flat()};
    CHECK_THROWS_AS(problem.solve_local(0, warm.flat(), lambda.flat(), mids, 1.0), Error);

    problem.set_initial_state(0, x0);
    problem.set_reference(0, ref);

    const Eigen::VectorXd via_adapter =
        problem.solve_local(0, warm.flat(), lambda.flat(), mids, 1.0);
    const Eigen::VectorXd direct =
        solve_primal(warm, 0, x0, ref, lambda, mids, 1.0, g, cfg, params, scfg).flat();
    CHECK(bitwise_equal(via_adapter, direct));

    // bare cost = tracking + collision at any iterate
    LocalVariable probe(2, 3, via_adapter);
    CHECK(problem.local_cost(0, via_adapter) ==
          doctest::Approx(tracking_cost(probe, 0, ref, cfg) +
                          collision_penalty(probe, 0, g, cfg))
              .epsilon(1e-15));

    CHECK_THROWS_AS(problem.set_reference(0, zero_reference(7)), ShapeError);
    CHECK_THROWS_AS(problem.set_initial_state(7, x0), std::out_of_range);
    StateVec bad = x0;
    bad(0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(problem.set_initial_state(0, bad), NonFiniteError);

    // config validation runs at construction
    MPCConfig invalid = cfg;
    invalid.d_min = 0.0;
    CHECK_THROWS_AS(MpcLocalProblem(g, invalid, scfg, params), Error);
}

TEST_CASE("config validation catches each bad field") {
    MPCConfig cfg;
    CHECK_NOTHROW(cfg.validate_or_throw());
    cfg.horizon = 0;
    CHECK_THROWS_AS(cfg.validate_or_throw(), Error);
    cfg = MPCConfig{};
    cfg.timestep = -0.1;
    CHECK_THROWS_AS(cfg.validate_or_throw(), Error);
    cfg = MPCConfig{};
    cfg.q_diag(0) = -1.0;
    CHECK_THROWS_AS(cfg.validate_or_throw(), Error);
    cfg = MPCConfig{};
    cfg.r_diag(2) = 0.0;
    CHECK_THROWS_AS(cfg.validate_or_throw(), Error);
    cfg = MPCConfig{};
    cfg.input_lo(0) = -1.0;  // negative thrust floor
    CHECK_THROWS_AS(cfg.validate_or_throw(), Error);
    cfg = MPCConfig{};
    cfg.input_lo(1) = 0.5;  // above the ceiling
    CHECK_THROWS_AS(cfg.validate_or_throw(), Error);
    cfg = MPCConfig{};
    cfg.collision_weight = -2.0;
    CHECK_THROWS_AS(cfg.validate_or_throw(), Error);
    cfg = MPCConfig{};
    cfg.collision_weight = 0.0;  // explicitly allowed: disables the term
    CHECK_NOTHROW(cfg.validate_or_throw());
}
