#pragma once

#include "chordc/model.hpp"

namespace chordc {

/// Structural well-formedness of a term, including the local-choice rule.
/// Total: never throws; an empty report means valid.
ValidationReport validate_term(const Term& term);

/// State machine invariants, checked recursively into composite states.
ValidationReport validate_machine(const StateMachine& sm);

}  // namespace chordc
