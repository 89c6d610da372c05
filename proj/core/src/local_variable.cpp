#include "swarmopt/local_variable.hpp"

#include <string>

namespace swarmopt {

namespace {

void check_shape_args(int n_agents, int horizon) {
    if (n_agents < 1) throw ShapeError("LocalVariable: n_agents must be >= 1");
    if (horizon < 1) throw ShapeError("LocalVariable: horizon must be >= 1");
}

}  // namespace

LocalVariable::LocalVariable(int n_agents, int horizon)
    : n_agents_(n_agents), horizon_(horizon) {
    check_shape_args(n_agents, horizon);
    flat_ = Eigen::VectorXd::Zero(flat_size(n_agents, horizon));
}

LocalVariable::LocalVariable(int n_agents, int horizon, Eigen::VectorXd flat)
    : n_agents_(n_agents), horizon_(horizon), flat_(std::move(flat)) {
    check_shape_args(n_agents, horizon);
    if (flat_.size() != flat_size(n_agents, horizon)) {
        throw ShapeError("LocalVariable: flat vector has length " +
                         std::to_string(flat_.size()) + ", expected " +
                         std::to_string(flat_size(n_agents, horizon)));
    }
}

Eigen::Index LocalVariable::flat_size(int n_agents, int horizon) {
    const Eigen::Index n = static_cast<Eigen::Index>(kStateDim) * n_agents;
    const Eigen::Index m = static_cast<Eigen::Index>(kInputDim) * n_agents;
    return (horizon + 1) * n + horizon * m;
}

Eigen::Index LocalVariable::state_offset(int a, int k) const {
    if (a < 0 || a >= n_agents_ || k < 0 || k > horizon_) {
        throw std::out_of_range("LocalVariable::state(" + std::to_string(a) + ", " +
                                std::to_string(k) + ") out of range");
    }
    return static_cast<Eigen::Index>(k) * kStateDim * n_agents_ +
           static_cast<Eigen::Index>(a) * kStateDim;
}

Eigen::Index LocalVariable::input_offset(int a, int k) const {
    if (a < 0 || a >= n_agents_ || k < 0 || k >= horizon_) {
        throw std::out_of_range("LocalVariable::input(" + std::to_string(a) + ", " +
                                std::to_string(k) + ") out of range");
    }
    return static_cast<Eigen::Index>(horizon_ + 1) * kStateDim * n_agents_ +
           static_cast<Eigen::Index>(k) * kInputDim * n_agents_ +
           static_cast<Eigen::Index>(a) * kInputDim;
}

Eigen::Ref<Eigen::VectorXd> LocalVariable::state(int a, int k) {
    return flat_.segment(state_offset(a, k), kStateDim);
}

Eigen::Ref<const Eigen::VectorXd> LocalVariable::state(int a, int k) const {
    return flat_.segment(state_offset(a, k), kStateDim);
}

Eigen::Ref<Eigen::VectorXd> LocalVariable::input(int a, int k) {
    return flat_.segment(input_offset(a, k), kInputDim);
}

Eigen::Ref<const Eigen::VectorXd> LocalVariable::input(int a, int k) const {
    return flat_.segment(input_offset(a, k), kInputDim);
}

Eigen::Ref<Eigen::VectorXd> LocalVariable::position(int a, int k) {
    return flat_.segment(state_offset(a, k), 3);
}

Eigen::Ref<const Eigen::VectorXd> LocalVariable::position(int a, int k) const {
    return flat_.segment(state_offset(a, k), 3);
}

void LocalVariable::require_same_shape(const LocalVariable& other) const {
    if (!same_shape(other)) {
        throw ShapeError("LocalVariable shape mismatch: (" + std::to_string(n_agents_) +
                         " agents, H=" + std::to_string(horizon_) + ") vs (" +
                         std::to_string(other.n_agents_) +
                         " agents, H=" + std::to_string(other.horizon_) + ")");
    }
}

}  // namespace swarmopt
