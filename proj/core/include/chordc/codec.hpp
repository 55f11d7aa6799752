#pragma once

// JSON documents for models and machines, and DOT rendering of machines.
//
// Model document:
//   {"format_version":"1", "roles":[...], "term":{...}}    or  "graph":{...}
// Term nodes:
//   {"kind":"subcollab","name":..,"sr":[..],"tr":[..],"pr":[..]}
//   {"kind":"strong_seq"|"weak_seq"|"choice"|"parallel","left":..,"right":..,"name"?:..}
//   {"kind":"strong_loop"|"weak_loop","body":..,"exit":..,"name"?:..}
//   {"kind":"epsilon"}
// Graph:
//   {"name"?:..,"nodes":[{"id","kind", collab: "name","sr","tr","pr" | "graph"}],
//    "edges":[{"id","source","target","seq"?:"strong"|"weak"}]}
// Machine document:
//   {"format_version":"1","role":..,"initial":..,"states":[..],"transitions":[..]}
//   state: {"id","name","kind","actions":[..],"children"?:{"initial","states","transitions"}}
//   action: {"op":"domain","collab","role"} | {"op":"send"|"receive","msg":{"kind","src","dst","label"}}
//   transition: {"id","source","target","label"?}
//
// Unknown keys are rejected. Emission is deterministic: keys are sorted and
// arrays keep model order, so equal values serialize byte-identically.

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chordc/graph.hpp"
#include "chordc/model.hpp"

namespace chordc {

struct ModelDocument {
    std::string format_version = "1";
    std::vector<Role> roles;
    std::variant<Term, ActivityGraph> body;

    bool is_graph() const { return std::holds_alternative<ActivityGraph>(body); }
};

/// Throws SyntaxError, SchemaError or UnknownRole.
ModelDocument parse_model(std::string_view text);
std::string emit_model(const ModelDocument& doc);

/// The document's term, recovering it from the graph form if needed.
Term model_term(const ModelDocument& doc);

std::string emit_fsm_json(const StateMachine& sm);
/// Throws SyntaxError or SchemaError (including dangling transition ends).
StateMachine parse_fsm_json(std::string_view text);

/// Graphviz digraph. Composites are clusters; each simple state is labeled
/// with its actions, one per line.
std::string emit_dot(const StateMachine& sm);

}  // namespace chordc
