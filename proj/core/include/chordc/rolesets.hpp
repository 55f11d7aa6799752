#pragma once

// Starting (SR), terminating (TR) and participating (PR) roles of every node
// of a choreography term.

#include <string>
#include <string_view>
#include <vector>

#include "chordc/model.hpp"

namespace chordc {

struct RoleSets {
    RoleSet sr;
    RoleSet tr;
    RoleSet pr;

    bool operator==(const RoleSets&) const = default;
};

struct NodeRoleSets {
    NodePath path;
    std::string label;
    TermKind kind = TermKind::Epsilon;
    RoleSets sets;
};

/// Role sets for every node, in preorder.
class RoleSetTable {
public:
    std::vector<NodeRoleSets> nodes;
    /// Degenerate but computable cases, e.g. a strong loop with an empty body.
    std::vector<std::string> warnings;

    /// Throws std::out_of_range for an unknown path.
    const RoleSets& at(std::string_view path) const;
    /// Looks up by path first, then by node name.
    const NodeRoleSets* find(std::string_view path_or_name) const;
    const RoleSets& root() const { return at(kRootPath); }
};

/// Bottom-up evaluation of the role-set rules for each composition kind.
///
/// Choice and loop nodes get the plain union of their children's starting
/// roles; whether that union is a singleton is check_local_choice's business.
RoleSetTable role_sets(const Term& term);

/// Same rules, root node only.
RoleSets root_role_sets(const Term& term);

struct LocalChoiceViolation {
    NodePath path;
    RoleSet starting;
};

/// Every Choice and loop node must have exactly one starting role across its
/// two sides (empty sides of a loop are ignored).
std::vector<LocalChoiceViolation> check_local_choice(const Term& term);

std::string to_string(const LocalChoiceViolation& v);
std::string format_roles(const RoleSet& roles);

}  // namespace chordc
