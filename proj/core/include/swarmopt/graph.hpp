#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace swarmopt {

/// Dense agent index in [0, n_agents).
using AgentId = int;

enum class GraphDefect { SelfLoop, BadIndex, Disconnected };

/// One reason a graph was rejected. `a` and `b` identify the offending node
/// or edge (b is -1 when only a node is involved).
struct GraphIssue {
    GraphDefect defect;
    int a = -1;
    int b = -1;
    std::string message;
};

/// Undirected communication topology over agents 0..n_agents-1.
///
/// Edges are stored normalized (lo, hi) and deduplicated. Neighbor lists are
/// sorted ascending so that every consensus sum iterates in one fixed order,
/// which keeps runs bit-reproducible. Immutable after construction; safe for
/// concurrent reads.
class CommGraph {
public:
    CommGraph(int n_agents, std::vector<std::pair<int, int>> edges);

    static CommGraph complete(int n_agents);
    static CommGraph path(int n_agents);

    int n_agents() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    /// Neighbor ids of agent i, ascending. Throws std::out_of_range for bad i.
    const std::vector<AgentId>& neighbors(AgentId i) const;
    int degree(AgentId i) const { return static_cast<int>(neighbors(i).size()); }
    bool adjacent(AgentId i, AgentId j) const;

    /// Checks edge indices, self-loops and connectivity (one component over
    /// all n_agents nodes). Returns nullopt when the graph is usable.
    std::optional<GraphIssue> validate() const;
    void validate_or_throw() const;

private:
    int n_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<AgentId>> adjacency_;
};

}  // namespace swarmopt
