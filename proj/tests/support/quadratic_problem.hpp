#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "swarmopt/admm.hpp"
#include "swarmopt/oracle.hpp"

namespace swarmopt::test {

// Diagonal weighted least-squares local costs g_i(theta) = sum_c w_c (theta_c
// - a_c)^2. The augmented local objective is separable per channel, so the
// primal update has the closed form
//   theta_c = (2 w_c a_c - lambda_c + 2 rho * sum_j mid_{j,c})
//             / (2 w_c + 2 rho n_i).
// This makes it an exact, solver-free backend for exercising the consensus
// engine.
class QuadraticConsensusProblem final : public ConsensusProblem {
 public:
  explicit QuadraticConsensusProblem(ConsensusLsqInstance instance)
      : instance_(std::move(instance)) {
    instance_.validate_or_throw();
  }

  int n_agents() const override {
    return static_cast<int>(instance_.targets.size());
  }

  Eigen::VectorXd solve_local(AgentId i, const Eigen::VectorXd& warm,
                              const Eigen::VectorXd& lambda,
                              std::span<const Eigen::VectorXd> midpoints,
                              double rho) override {
    (void)warm;  // closed form, no warm start needed
    const Eigen::VectorXd& a = instance_.targets[static_cast<std::size_t>(i)];
    const Eigen::VectorXd& w = instance_.weights[static_cast<std::size_t>(i)];
    const double n_i = static_cast<double>(midpoints.size());
    Eigen::VectorXd mid_sum = Eigen::VectorXd::Zero(a.size());
    for (const Eigen::VectorXd& mid : midpoints) mid_sum += mid;
    const Eigen::VectorXd numer =
        2.0 * w.cwiseProduct(a) - lambda + 2.0 * rho * mid_sum;
    const Eigen::VectorXd denom =
        2.0 * w + Eigen::VectorXd::Constant(a.size(), 2.0 * rho * n_i);
    return numer.cwiseQuotient(denom);
  }

  double local_cost(AgentId i, const Eigen::VectorXd& theta) const override {
    const Eigen::VectorXd& a = instance_.targets[static_cast<std::size_t>(i)];
    const Eigen::VectorXd& w = instance_.weights[static_cast<std::size_t>(i)];
    const Eigen::VectorXd d = theta - a;
    return d.cwiseProduct(d).dot(w);
  }

  const ConsensusLsqInstance& instance() const { return instance_; }

 private:
  ConsensusLsqInstance instance_;
};

}  // namespace swarmopt::test
