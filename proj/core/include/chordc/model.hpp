#pragma once

// Core value types: choreography terms over roles, and the per-role state
// machines derived from them. Everything here is immutable once built and
// may be shared freely across threads.

#include <compare>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace chordc {

using Role = std::string;
/// Ordered, so iteration is lexicographic.
using RoleSet = std::set<Role>;

/// Dotted location of a node inside a term, e.g. "root.right.left".
using NodePath = std::string;

inline constexpr std::string_view kRootPath = "root";

enum class TermKind { SubCollab, StrongSeq, WeakSeq, Choice, Parallel, StrongLoop, WeakLoop, Epsilon };

std::string_view to_string(TermKind kind);
std::optional<TermKind> term_kind_from_string(std::string_view text);

/// A choreography: a binary composition tree of sub-collaborations.
///
/// Loop nodes reuse the two child slots as (body, exit). Composite nodes may
/// carry an optional name; sub-collaborations always have one.
class Term {
public:
    /// The empty collaboration.
    Term();

    static Term epsilon();
    static Term sub_collab(std::string name, RoleSet sr, RoleSet tr, RoleSet pr);
    static Term strong_seq(Term left, Term right, std::string name = {});
    static Term weak_seq(Term left, Term right, std::string name = {});
    static Term choice(Term left, Term right, std::string name = {});
    static Term parallel(Term left, Term right, std::string name = {});
    static Term strong_loop(Term body, Term exit, std::string name = {});
    static Term weak_loop(Term body, Term exit, std::string name = {});
    static Term binary(TermKind kind, Term left, Term right, std::string name = {});

    TermKind kind() const noexcept;
    const std::string& name() const noexcept;

    // Declared role sets; empty for every kind but SubCollab.
    const RoleSet& sr() const noexcept;
    const RoleSet& tr() const noexcept;
    const RoleSet& pr() const noexcept;

    bool is_leaf() const noexcept { return kind() == TermKind::SubCollab; }
    bool is_binary() const noexcept;
    bool is_loop() const noexcept;

    const Term& left() const;
    const Term& right() const;
    const Term& body() const { return left(); }
    const Term& exit() const { return right(); }

    /// Name if set, otherwise the node path.
    std::string label(std::string_view path) const;

    friend bool operator==(const Term& a, const Term& b);

private:
    struct Node;
    explicit Term(std::shared_ptr<const Node> node);
    std::shared_ptr<const Node> node_;
};

std::string child_path(std::string_view parent, TermKind kind, int side);

/// Preorder walk, left child first.
void for_each_node(const Term& term, const std::function<void(const Term&, const NodePath&)>& visit);

/// Locates a node by path or by name.
struct LocatedTerm {
    Term term;
    NodePath path;
};
std::optional<LocatedTerm> find_node(const Term& term, std::string_view path_or_name);

bool contains_kind(const Term& term, TermKind kind);

/// Compact one-line rendering, e.g. "StrongSeq(C1, C2)".
std::string to_string(const Term& term);

// --- derived machines -------------------------------------------------------

enum class MessageKind { Flowm, Choicem };

std::string_view to_string(MessageKind kind);

struct CoordMessage {
    MessageKind kind = MessageKind::Flowm;
    Role src;
    Role dst;
    /// Name of the state the message belongs to.
    std::string label;

    auto operator<=>(const CoordMessage&) const = default;
};

std::string to_string(const CoordMessage& msg);

struct DomainAction {
    std::string collab;
    Role role;
    auto operator<=>(const DomainAction&) const = default;
};

struct SendAction {
    CoordMessage msg;
    auto operator<=>(const SendAction&) const = default;
};

struct ReceiveAction {
    CoordMessage msg;
    auto operator<=>(const ReceiveAction&) const = default;
};

using Action = std::variant<DomainAction, SendAction, ReceiveAction>;

/// "Clinical.HA", "!Flowm(HA→SAMU,Decision)", "?Choicem(CHU→SMUR,SendingVLS)".
std::string to_string(const Action& action);

enum class StateKind { Initial, Final, Simple, Composite, ChoicePseudo, Junction };

std::string_view to_string(StateKind kind);
std::optional<StateKind> state_kind_from_string(std::string_view text);

struct Region;

struct State {
    std::string id;
    std::string name;
    StateKind kind = StateKind::Simple;
    std::vector<Action> actions;
    /// Present iff kind == Composite.
    std::shared_ptr<const Region> children;

    friend bool operator==(const State& a, const State& b);
};

struct Transition {
    std::string id;
    std::string source;
    std::string target;
    std::optional<std::string> label;

    bool operator==(const Transition&) const = default;
};

/// A state graph with one entry point; the body of a machine or a composite.
struct Region {
    std::string initial;
    std::vector<State> states;
    std::vector<Transition> transitions;

    const State* find_state(std::string_view id) const;
    bool operator==(const Region&) const = default;
};

struct StateMachine : Region {
    Role role;

    bool operator==(const StateMachine&) const = default;
};

/// One broken invariant, located by a path into the offending value.
struct Violation {
    std::string path;
    std::string message;

    bool operator==(const Violation&) const = default;
};

using ValidationReport = std::vector<Violation>;

std::string to_string(const Violation& v);

}  // namespace chordc
