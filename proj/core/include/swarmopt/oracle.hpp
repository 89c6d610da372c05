#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "swarmopt/errors.hpp"
#include "swarmopt/graph.hpp"

namespace swarmopt {

/// Per-agent quadratic targets for the consensus least-squares family:
/// minimize sum_i ||theta - a_i||^2_{W_i} subject to all copies agreeing.
/// Weights are diagonal and nonnegative; every channel must carry positive
/// total weight so the problem is strictly convex in the agreed variable.
struct ConsensusLsqInstance {
    std::vector<Eigen::VectorXd> targets;  // a_i
    std::vector<Eigen::VectorXd> weights;  // diagonal of W_i, entries >= 0
    CommGraph graph{1, {}};

    void validate_or_throw() const;
};

/// Centralized solution with the consensus constraints enforced exactly:
/// the per-channel weighted mean (sum_i W_i)^-1 sum_i W_i a_i. Kept free of
/// any code shared with the distributed path so agreement is evidence.
Eigen::VectorXd centralized_consensus_lsq(const ConsensusLsqInstance& instance);

struct GridResult {
    Eigen::VectorXd point;
    double value = 0.0;
};

/// Brute-force minimizer over an axis-aligned box, dimension <= 3: evaluates
/// every grid point at the given spacing and returns the best. For Lipschitz
/// objectives the winner is within one cell of a global minimizer; use it as
/// a sanity bound, not a solver.
GridResult grid_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                         const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                         double resolution);

}  // namespace swarmopt
