#pragma once

// Activity-diagram form of a requirements model, and recovery of the
// structured term it encodes.

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chordc/model.hpp"

namespace chordc {

enum class NodeKind { Initial, Final, Collab, Decision, Merge, Fork, Join };
enum class SeqMode { Strong, Weak };

std::string_view to_string(NodeKind kind);
std::optional<NodeKind> node_kind_from_string(std::string_view text);
std::string_view to_string(SeqMode mode);
std::optional<SeqMode> seq_mode_from_string(std::string_view text);

struct ActivityGraph;

struct ActivityNode {
    std::string id;
    NodeKind kind = NodeKind::Collab;
    // Collab payload: either a sub-collaboration leaf (name + roles) or a
    // nested graph.
    std::string name;
    RoleSet sr;
    RoleSet tr;
    RoleSet pr;
    std::shared_ptr<const ActivityGraph> subgraph;

    friend bool operator==(const ActivityNode& a, const ActivityNode& b);
};

struct ActivityEdge {
    std::string id;
    std::string source;
    std::string target;
    /// Only meaningful on edges that enter a collaboration.
    SeqMode mode = SeqMode::Strong;

    bool operator==(const ActivityEdge&) const = default;
};

struct ActivityGraph {
    std::string name;
    std::vector<ActivityNode> nodes;
    std::vector<ActivityEdge> edges;

    bool operator==(const ActivityGraph&) const = default;
};

ValidationReport validate_graph(const ActivityGraph& g);

/// Reduces a structured graph to a term. Sequences associate to the right,
/// n-way decisions and forks become right-nested binary terms, and a nested
/// graph's name is given to the composite term it recovers to.
///
/// Throws InvalidModel if validate_graph reports anything, UnstructuredGraph
/// when no structured reading exists.
Term recover_term(const ActivityGraph& g);

/// Canonical graph for a term; recover_term(render_graph(t)) == t.
ActivityGraph render_graph(const Term& term);

}  // namespace chordc
