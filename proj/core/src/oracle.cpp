#include "swarmopt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace swarmopt {

void ConsensusLsqInstance::validate_or_throw() const {
    const size_t n = targets.size();
    if (n == 0) throw Error("ConsensusLsqInstance: no agents");
    if (weights.size() != n) {
        throw ShapeError("ConsensusLsqInstance: " + std::to_string(n) + " targets vs " +
                         std::to_string(weights.size()) + " weights");
    }
    if (graph.n_agents() != static_cast<int>(n)) {
        throw ShapeError("ConsensusLsqInstance: graph is over " +
                         std::to_string(graph.n_agents()) + " agents, instance has " +
                         std::to_string(n));
    }
    for (size_t i = 0; i < n; ++i) {
        if (targets[i].size() != targets[0].size() || weights[i].size() != targets[0].size()) {
            throw ShapeError("ConsensusLsqInstance: inconsistent dimensions at agent " +
                             std::to_string(i));
        }
        if ((weights[i].array() < 0.0).any()) {
            throw Error("ConsensusLsqInstance: negative weight at agent " + std::to_string(i));
        }
    }
    graph.validate_or_throw();
}

Eigen::VectorXd centralized_consensus_lsq(const ConsensusLsqInstance& instance) {
    instance.validate_or_throw();
    const Eigen::Index dim = instance.targets[0].size();
    Eigen::VectorXd weight_sum = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd weighted_targets = Eigen::VectorXd::Zero(dim);
    for (size_t i = 0; i < instance.targets.size(); ++i) {
        weight_sum += instance.weights[i];
        weighted_targets += instance.weights[i].cwiseProduct(instance.targets[i]);
    }
    for (Eigen::Index c = 0; c < dim; ++c) {
        if (!(weight_sum(c) > 0.0)) {
            throw Error("centralized_consensus_lsq: channel " + std::to_string(c) +
                        " carries zero total weight");
        }
    }
    return weighted_targets.cwiseQuotient(weight_sum);
}

GridResult grid_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                         const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                         double resolution) {
    const Eigen::Index dim = lo.size();
    if (dim < 1 || dim > 3) {
        throw Error("grid_minimize: dimension must be 1..3, got " + std::to_string(dim));
    }
    if (hi.size() != dim) throw ShapeError("grid_minimize: lo/hi size mismatch");
    if (!(resolution > 0.0) || !lo.allFinite() || !hi.allFinite()) {
        throw Error("grid_minimize: box and resolution must be finite and positive");
    }
    for (Eigen::Index c = 0; c < dim; ++c) {
        if (lo(c) > hi(c)) throw Error("grid_minimize: empty box in dimension " + std::to_string(c));
    }

    // Number of samples per axis, endpoints included: when the span is not
    // an exact multiple of the resolution, one extra sample lands on (and is
    // clamped to) the upper bound.
    Eigen::Array<Eigen::Index, Eigen::Dynamic, 1> steps(dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
        steps(c) = static_cast<Eigen::Index>(std::floor((hi(c) - lo(c)) / resolution)) + 1;
        if (lo(c) + static_cast<double>(steps(c) - 1) * resolution < hi(c)) ++steps(c);
    }

    GridResult best;
    best.value = std::numeric_limits<double>::infinity();
    Eigen::VectorXd x(dim);
    Eigen::Array<Eigen::Index, Eigen::Dynamic, 1> idx =
        Eigen::Array<Eigen::Index, Eigen::Dynamic, 1>::Zero(dim);
    while (true) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            x(c) = std::min(lo(c) + static_cast<double>(idx(c)) * resolution, hi(c));
        }
        const double v = f(x);
        if (v < best.value) {
            best.value = v;
            best.point = x;
        }
        // odometer increment over the grid indices
        Eigen::Index c = 0;
        while (c < dim) {
            if (++idx(c) < steps(c)) break;
            idx(c) = 0;
            ++c;
        }
        if (c == dim) break;
    }
    if (!best.point.size()) throw Error("grid_minimize: objective never returned a finite value");
    return best;
}

}  // namespace swarmopt
