#pragma once

#include <Eigen/Dense>
#include <functional>

#include "swarmopt/errors.hpp"

namespace swarmopt {

/// Knobs for the projected-gradient inner solver used by the local primal
/// updates. fd_epsilon is only consumed by finite-difference checks in the
/// test suite, never by the solver itself.
struct SolverConfig {
    int max_inner_iters = 200;
    double step_init = 1.0;   // trial step before any curvature estimate exists
    double step_max = 1e3;    // upper clamp on the Barzilai-Borwein step
    double step_min = 1e-14;  // line search gives up below this
    double backtrack = 0.5;   // step shrink factor per rejected trial
    double armijo_c = 1e-4;   // sufficient-decrease constant
    double grad_tol = 1e-6;   // stop when the projected step is this small
    double fd_epsilon = 1e-6;

    void validate_or_throw() const;
};

struct PgdResult {
    Eigen::VectorXd x;
    double objective = 0.0;
    double step_norm = 0.0;  // norm of the unit-step projected-gradient move at x
    int iterations = 0;
    bool converged = false;
};

/// Minimizes `objective` over the set enforced by `project` (which must be
/// idempotent; pass a no-op for unconstrained problems). Monotone projected
/// gradient descent with Armijo backtracking; accepted steps seed the next
/// trial step with a safeguarded Barzilai-Borwein estimate.
///
/// `objective` may return +inf to veto a trial point (the line search then
/// backtracks); NaN objectives at an accepted point raise NonFiniteError, as
/// do non-finite gradients.
PgdResult minimize_projected(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& gradient,
    const std::function<void(Eigen::VectorXd&)>& project, Eigen::VectorXd x0,
    const SolverConfig& cfg);

}  // namespace swarmopt
