#include "swarmopt/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "swarmopt/errors.hpp"

namespace swarmopt {

CommGraph::CommGraph(int n_agents, std::vector<std::pair<int, int>> edges)
    : n_(n_agents), edges_(std::move(edges)) {
    if (n_ < 1) {
        throw std::invalid_argument("CommGraph: n_agents must be >= 1");
    }
    for (auto& [a, b] : edges_) {
        if (a > b) std::swap(a, b);
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

    // Adjacency is built only from well-formed edges; validate() reports the
    // rest. Sorted edge order makes each neighbor list ascending.
    adjacency_.assign(static_cast<size_t>(n_), {});
    for (const auto& [a, b] : edges_) {
        if (a == b || a < 0 || b >= n_) continue;
        adjacency_[static_cast<size_t>(a)].push_back(b);
        adjacency_[static_cast<size_t>(b)].push_back(a);
    }
    for (auto& list : adjacency_) {
        std::sort(list.begin(), list.end());
    }
}

CommGraph CommGraph::complete(int n_agents) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n_agents; ++i) {
        for (int j = i + 1; j < n_agents; ++j) {
            edges.emplace_back(i, j);
        }
    }
    return CommGraph(n_agents, std::move(edges));
}

CommGraph CommGraph::path(int n_agents) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < n_agents; ++i) {
        edges.emplace_back(i, i + 1);
    }
    return CommGraph(n_agents, std::move(edges));
}

const std::vector<AgentId>& CommGraph::neighbors(AgentId i) const {
    if (i < 0 || i >= n_) {
        throw std::out_of_range("CommGraph::neighbors: agent id " + std::to_string(i) +
                                " outside [0, " + std::to_string(n_) + ")");
    }
    return adjacency_[static_cast<size_t>(i)];
}

bool CommGraph::adjacent(AgentId i, AgentId j) const {
    const auto& nb = neighbors(i);
    return std::binary_search(nb.begin(), nb.end(), j);
}

std::optional<GraphIssue> CommGraph::validate() const {
    for (const auto& [a, b] : edges_) {
        if (a < 0 || a >= n_ || b < 0 || b >= n_) {
            return GraphIssue{GraphDefect::BadIndex, a, b,
                              "edge (" + std::to_string(a) + ", " + std::to_string(b) +
                                  ") references an agent outside [0, " + std::to_string(n_) + ")"};
        }
        if (a == b) {
            return GraphIssue{GraphDefect::SelfLoop, a, b,
                              "self-loop on agent " + std::to_string(a)};
        }
    }

    // BFS from node 0; every agent must be reachable.
    std::vector<char> seen(static_cast<size_t>(n_), 0);
    std::vector<int> queue{0};
    seen[0] = 1;
    while (!queue.empty()) {
        const int v = queue.back();
        queue.pop_back();
        for (const AgentId w : adjacency_[static_cast<size_t>(v)]) {
            if (!seen[static_cast<size_t>(w)]) {
                seen[static_cast<size_t>(w)] = 1;
                queue.push_back(w);
            }
        }
    }
    for (int v = 0; v < n_; ++v) {
        if (!seen[static_cast<size_t>(v)]) {
            return GraphIssue{GraphDefect::Disconnected, v, -1,
                              "agent " + std::to_string(v) + " is not reachable from agent 0"};
        }
    }
    return std::nullopt;
}

void CommGraph::validate_or_throw() const {
    if (auto issue = validate()) {
        throw Error("invalid communication graph: " + issue->message);
    }
}

}  // namespace swarmopt
