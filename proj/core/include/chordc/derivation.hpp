#pragma once

// Projection of a choreography onto one role: the role's state machine,
// including the Flowm/Choicem coordination actions that realize strong
// sequencing and local choice.

#include <map>
#include <span>

#include "chordc/model.hpp"
#include "chordc/rolesets.hpp"

namespace chordc {

/// Throws UnsupportedConstruct for Parallel or loop nodes and InvalidModel
/// when validate_term reports anything.
void require_derivable(const Term& term);

/// Machine for `role`. Leaf collaborations the role takes part in become
/// composite states named after the collaboration; Choice nodes become a
/// choice pseudostate and a junction. A role outside PR(term) gets the
/// trivial Initial -> Final machine.
///
/// `sets` must be role_sets(term).
StateMachine derive_role(const Term& term, const RoleSetTable& sets, const Role& role);

/// One machine per role of PR(term), plus one per `extra_roles` entry
/// (typically roles declared by a model but used nowhere).
std::map<Role, StateMachine> derive_all(const Term& term, const RoleSetTable& sets,
                                        std::span<const Role> extra_roles = {});

/// Inlines every composite state. The composite's inner Initial/Final states
/// are spliced out; a pass-through that can't be spliced stays as a Junction.
StateMachine flatten(const StateMachine& sm);

}  // namespace chordc
