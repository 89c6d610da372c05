#pragma once

#include <Eigen/Dense>

#include "swarmopt/dynamics.hpp"
#include "swarmopt/errors.hpp"
#include "swarmopt/graph.hpp"

namespace swarmopt {

/// One agent's local copy of the whole swarm's stacked trajectory over the
/// horizon: for every agent a, H+1 states (12 each) and H inputs (4 each).
/// Storage is a flat vector so it can travel through the message layer and
/// the consensus engine unchanged; this class only supplies the block layout.
///
/// Layout (N agents, horizon H, time-major within each section):
///   state of agent a at step k:  offset k*12N + a*12,          k in 0..H
///   input of agent a at step k:  offset (H+1)*12N + k*4N + a*4, k in 0..H-1
/// Total length (H+1)*12N + H*4N.
///
/// Dual variables share the shape, so DualVariable is an alias.
class LocalVariable {
public:
    LocalVariable() = default;
    /// Zero-initialized variable for the given swarm shape.
    LocalVariable(int n_agents, int horizon);
    /// Wraps an existing flat vector; throws ShapeError when the length does
    /// not match the shape.
    LocalVariable(int n_agents, int horizon, Eigen::VectorXd flat);

    int n_agents() const { return n_agents_; }
    int horizon() const { return horizon_; }
    Eigen::Index size() const { return flat_.size(); }
    static Eigen::Index flat_size(int n_agents, int horizon);

    /// Agent a's 12-state at step k (k in 0..H).
    Eigen::Ref<Eigen::VectorXd> state(int a, int k);
    Eigen::Ref<const Eigen::VectorXd> state(int a, int k) const;
    /// Agent a's 4-input at step k (k in 0..H-1).
    Eigen::Ref<Eigen::VectorXd> input(int a, int k);
    Eigen::Ref<const Eigen::VectorXd> input(int a, int k) const;
    /// First three state channels: agent a's position at step k.
    Eigen::Ref<Eigen::VectorXd> position(int a, int k);
    Eigen::Ref<const Eigen::VectorXd> position(int a, int k) const;

    Eigen::VectorXd& flat() { return flat_; }
    const Eigen::VectorXd& flat() const { return flat_; }

    void set_zero() { flat_.setZero(); }
    bool same_shape(const LocalVariable& other) const {
        return n_agents_ == other.n_agents_ && horizon_ == other.horizon_;
    }
    void require_same_shape(const LocalVariable& other) const;

private:
    Eigen::Index state_offset(int a, int k) const;
    Eigen::Index input_offset(int a, int k) const;

    int n_agents_ = 0;
    int horizon_ = 0;
    Eigen::VectorXd flat_;
};

using DualVariable = LocalVariable;

}  // namespace swarmopt
