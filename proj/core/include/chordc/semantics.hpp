#pragma once

// Trace semantics of choreographies and of composed role machines, and the
// realizability check that compares the two.
//
// A trace is the sequence of domain events (collaboration, role) of one
// complete run; coordination messages are hidden.
//
// The intended ("enforced") behaviour of a term is a set of partial orders:
//   * inside a sub-collaboration, starting roles act first, then the roles
//     that neither start nor terminate, then the terminating-only roles;
//   * each role's own events follow term order;
//   * StrongSeq(C1, C2) also orders every TR(C1) role's C1 events before
//     every SR(C2) role's C2 events;
//   * in Choice(C1, C2) with deciding role d, when C1 is selected every role
//     of PR(C2) - PR(C1) reaches a hidden "notified" point that follows all
//     of d's C1 events and precedes the role's later events (and vice versa).
// Without choices this is exactly per-role order plus TR -> SR barriers.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "chordc/model.hpp"

namespace chordc {

struct Event {
    std::string collab;
    Role role;

    auto operator<=>(const Event&) const = default;
};

using Trace = std::vector<Event>;
using TraceSet = std::set<Trace>;

/// "Ca.a Cb.b"
std::string to_string(const Trace& trace);

inline constexpr std::size_t kDefaultCap = 1'000'000;

struct ExploreLimits {
    /// Maximum number of explored configurations / enumerated traces.
    std::size_t cap = kDefaultCap;
    /// Loop iterations unrolled by the oracle (0..loop_bound).
    unsigned loop_bound = 0;
};

/// Intended traces of a term. Requires validate_term(term) to be empty
/// (InvalidModel otherwise); throws TooLarge past the cap.
TraceSet oracle_traces(const Term& term, const ExploreLimits& limits = {});

struct BlockedRole {
    Role role;
    std::string state;
    /// The action the role is stuck on, empty when it waits on a choice or
    /// has no way forward.
    std::string action;
};

struct Deadlock {
    std::vector<BlockedRole> roles;  // every non-final role
    std::size_t events_done = 0;

    std::string summary() const;
};

struct SystemExploration {
    TraceSet traces;
    /// At most kDeadlockSamples entries; deadlock_count has the total.
    std::vector<Deadlock> deadlocks;
    std::size_t deadlock_count = 0;
    std::size_t configurations = 0;

    static constexpr std::size_t kDeadlockSamples = 20;
};

/// Exhaustive exploration of the machines running together over a reliable,
/// unordered message pool. Machines are flattened first. Domain actions wait
/// for their collaboration's predecessors (from `term`); a run of Receive
/// actions completes once all its messages are in the pool; a choice
/// pseudostate is resolved by the Choice node's deciding role and every other
/// role follows that resolution.
SystemExploration explore_system(const std::map<Role, StateMachine>& machines, const Term& term,
                                 const ExploreLimits& limits = {});

TraceSet system_traces(const std::map<Role, StateMachine>& machines, const Term& term,
                       const ExploreLimits& limits = {});

struct CoordinationCounts {
    std::size_t flowm_sends = 0;
    std::size_t choicem_sends = 0;

    bool operator==(const CoordinationCounts&) const = default;
};

/// Static count of Send actions by message kind.
CoordinationCounts count_coordination(const std::map<Role, StateMachine>& machines);

struct Complementarity {
    bool ok = true;
    std::vector<std::string> problems;
};

/// Sends and receives must match one-to-one on (kind, src, dst, label), with
/// each send in the source's machine and each receive in the destination's.
Complementarity check_complementarity(const std::map<Role, StateMachine>& machines);

/// A StrongSeq node where some C1 event of a non-terminating role can come
/// after a C2 event of a starting role.
struct BarrierDiagnostic {
    NodePath path;
    Trace witness;
};

std::vector<BarrierDiagnostic> strict_barrier_diagnostics(const Term& term, const TraceSet& traces);

enum class Injection { None, DropChoicem, DropFlowm };

/// Removes every Send action of the given kind.
void inject_fault(std::map<Role, StateMachine>& machines, Injection injection);

struct CheckReport {
    bool equivalent = false;
    std::vector<Trace> missing_traces;  // intended but not produced; <= 10 samples
    std::vector<Trace> extra_traces;    // produced but not intended; <= 10 samples
    std::size_t missing_count = 0;
    std::size_t extra_count = 0;
    std::vector<Deadlock> deadlocks;
    std::size_t deadlock_count = 0;
    bool complementarity_ok = false;
    std::vector<std::string> complementarity_problems;
    std::vector<BarrierDiagnostic> strict_barrier_diagnostics;
    CoordinationCounts counts;
    std::size_t oracle_trace_count = 0;
    std::size_t system_trace_count = 0;
    std::size_t configurations = 0;

    static constexpr std::size_t kSamples = 10;

    bool ok() const { return equivalent && deadlock_count == 0 && complementarity_ok; }
};

struct CheckOptions {
    ExploreLimits limits;
    Injection inject = Injection::None;
};

/// Derives every role machine and compares the composed behaviour with the
/// intended traces. Throws UnsupportedConstruct / InvalidModel / TooLarge.
CheckReport check_realizability(const Term& term, const CheckOptions& options = {});

/// Same comparison for externally supplied machines.
CheckReport check_machines(const Term& term, const std::map<Role, StateMachine>& machines,
                           const ExploreLimits& limits = {});

/// Action sequences (rendered with to_string(Action)) along every complete
/// path of one machine, descending into composite states.
std::set<std::vector<std::string>> local_traces(const StateMachine& sm);

}  // namespace chordc
