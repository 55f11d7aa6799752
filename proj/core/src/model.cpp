#include "chordc/model.hpp"

#include <array>
#include <stdexcept>
#include <utility>

namespace chordc {

struct Term::Node {
    TermKind kind = TermKind::Epsilon;
    std::string name;
    RoleSet sr;
    RoleSet tr;
    RoleSet pr;
    std::optional<Term> left;
    std::optional<Term> right;
};

namespace {

constexpr std::array<std::pair<TermKind, std::string_view>, 8> kTermKindNames{{
    {TermKind::SubCollab, "subcollab"},
    {TermKind::StrongSeq, "strong_seq"},
    {TermKind::WeakSeq, "weak_seq"},
    {TermKind::Choice, "choice"},
    {TermKind::Parallel, "parallel"},
    {TermKind::StrongLoop, "strong_loop"},
    {TermKind::WeakLoop, "weak_loop"},
    {TermKind::Epsilon, "epsilon"},
}};

constexpr std::array<std::pair<StateKind, std::string_view>, 6> kStateKindNames{{
    {StateKind::Initial, "initial"},
    {StateKind::Final, "final"},
    {StateKind::Simple, "simple"},
    {StateKind::Composite, "composite"},
    {StateKind::ChoicePseudo, "choice"},
    {StateKind::Junction, "junction"},
}};

const RoleSet kNoRoles;

void walk(const Term& term, const NodePath& path,
          const std::function<void(const Term&, const NodePath&)>& visit)
{
    visit(term, path);
    if (term.is_binary()) {
        walk(term.left(), child_path(path, term.kind(), 0), visit);
        walk(term.right(), child_path(path, term.kind(), 1), visit);
    }
}

std::string display_kind(TermKind kind)
{
    switch (kind) {
    case TermKind::SubCollab: return "SubCollab";
    case TermKind::StrongSeq: return "StrongSeq";
    case TermKind::WeakSeq: return "WeakSeq";
    case TermKind::Choice: return "Choice";
    case TermKind::Parallel: return "Parallel";
    case TermKind::StrongLoop: return "StrongLoop";
    case TermKind::WeakLoop: return "WeakLoop";
    case TermKind::Epsilon: return "ε";
    }
    return "?";
}

}  // namespace

std::string_view to_string(TermKind kind)
{
    for (const auto& [k, name] : kTermKindNames)
        if (k == kind) return name;
    return "?";
}

std::optional<TermKind> term_kind_from_string(std::string_view text)
{
    for (const auto& [k, name] : kTermKindNames)
        if (name == text) return k;
    return std::nullopt;
}

Term::Term() : Term(epsilon()) {}

Term::Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Term Term::epsilon()
{
    static const auto node = std::make_shared<const Node>();
    return Term(node);
}

Term Term::sub_collab(std::string name, RoleSet sr, RoleSet tr, RoleSet pr)
{
    auto node = std::make_shared<Node>();
    node->kind = TermKind::SubCollab;
    node->name = std::move(name);
    node->sr = std::move(sr);
    node->tr = std::move(tr);
    node->pr = std::move(pr);
    return Term(std::move(node));
}

Term Term::binary(TermKind kind, Term left, Term right, std::string name)
{
    if (kind == TermKind::SubCollab || kind == TermKind::Epsilon)
        throw std::invalid_argument("Term::binary: not a composite kind");
    auto node = std::make_shared<Node>();
    node->kind = kind;
    node->name = std::move(name);
    node->left = std::move(left);
    node->right = std::move(right);
    return Term(std::move(node));
}

Term Term::strong_seq(Term left, Term right, std::string name)
{
    return binary(TermKind::StrongSeq, std::move(left), std::move(right), std::move(name));
}

Term Term::weak_seq(Term left, Term right, std::string name)
{
    return binary(TermKind::WeakSeq, std::move(left), std::move(right), std::move(name));
}

Term Term::choice(Term left, Term right, std::string name)
{
    return binary(TermKind::Choice, std::move(left), std::move(right), std::move(name));
}

Term Term::parallel(Term left, Term right, std::string name)
{
    return binary(TermKind::Parallel, std::move(left), std::move(right), std::move(name));
}

Term Term::strong_loop(Term body, Term exit, std::string name)
{
    return binary(TermKind::StrongLoop, std::move(body), std::move(exit), std::move(name));
}

Term Term::weak_loop(Term body, Term exit, std::string name)
{
    return binary(TermKind::WeakLoop, std::move(body), std::move(exit), std::move(name));
}

TermKind Term::kind() const noexcept { return node_->kind; }
const std::string& Term::name() const noexcept { return node_->name; }
const RoleSet& Term::sr() const noexcept { return is_leaf() ? node_->sr : kNoRoles; }
const RoleSet& Term::tr() const noexcept { return is_leaf() ? node_->tr : kNoRoles; }
const RoleSet& Term::pr() const noexcept { return is_leaf() ? node_->pr : kNoRoles; }

bool Term::is_binary() const noexcept
{
    return kind() != TermKind::SubCollab && kind() != TermKind::Epsilon;
}

bool Term::is_loop() const noexcept
{
    return kind() == TermKind::StrongLoop || kind() == TermKind::WeakLoop;
}

const Term& Term::left() const
{
    if (!node_->left) throw std::logic_error("Term::left on a leaf");
    return *node_->left;
}

const Term& Term::right() const
{
    if (!node_->right) throw std::logic_error("Term::right on a leaf");
    return *node_->right;
}

std::string Term::label(std::string_view path) const
{
    return name().empty() ? std::string(path) : name();
}

bool operator==(const Term& a, const Term& b)
{
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind() || a.name() != b.name()) return false;
    if (a.is_leaf()) return a.sr() == b.sr() && a.tr() == b.tr() && a.pr() == b.pr();
    if (!a.is_binary()) return true;
    return a.left() == b.left() && a.right() == b.right();
}

std::string child_path(std::string_view parent, TermKind kind, int side)
{
    const bool loop = kind == TermKind::StrongLoop || kind == TermKind::WeakLoop;
    std::string out(parent);
    out += '.';
    if (loop)
        out += side == 0 ? "body" : "exit";
    else
        out += side == 0 ? "left" : "right";
    return out;
}

void for_each_node(const Term& term, const std::function<void(const Term&, const NodePath&)>& visit)
{
    walk(term, NodePath(kRootPath), visit);
}

std::optional<LocatedTerm> find_node(const Term& term, std::string_view path_or_name)
{
    std::optional<LocatedTerm> by_path;
    std::optional<LocatedTerm> by_name;
    for_each_node(term, [&](const Term& node, const NodePath& path) {
        if (!by_path && path == path_or_name) by_path = LocatedTerm{node, path};
        if (!by_name && !node.name().empty() && node.name() == path_or_name)
            by_name = LocatedTerm{node, path};
    });
    return by_path ? by_path : by_name;
}

bool contains_kind(const Term& term, TermKind kind)
{
    bool found = false;
    for_each_node(term, [&](const Term& node, const NodePath&) { found = found || node.kind() == kind; });
    return found;
}

std::string to_string(const Term& term)
{
    switch (term.kind()) {
    case TermKind::Epsilon: return "ε";
    case TermKind::SubCollab: return term.name();
    default: break;
    }
    std::string out = display_kind(term.kind());
    if (!term.name().empty()) out += "<" + term.name() + ">";
    out += "(" + to_string(term.left()) + ", " + to_string(term.right()) + ")";
    return out;
}

std::string_view to_string(MessageKind kind)
{
    return kind == MessageKind::Flowm ? "Flowm" : "Choicem";
}

std::string to_string(const CoordMessage& msg)
{
    std::string out(to_string(msg.kind));
    out += "(" + msg.src + "→" + msg.dst + "," + msg.label + ")";
    return out;
}

std::string to_string(const Action& action)
{
    return std::visit(
        [](const auto& a) -> std::string {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, DomainAction>)
                return a.collab + "." + a.role;
            else if constexpr (std::is_same_v<T, SendAction>)
                return "!" + to_string(a.msg);
            else
                return "?" + to_string(a.msg);
        },
        action);
}

std::string_view to_string(StateKind kind)
{
    for (const auto& [k, name] : kStateKindNames)
        if (k == kind) return name;
    return "?";
}

std::optional<StateKind> state_kind_from_string(std::string_view text)
{
    for (const auto& [k, name] : kStateKindNames)
        if (name == text) return k;
    return std::nullopt;
}

bool operator==(const State& a, const State& b)
{
    if (a.id != b.id || a.name != b.name || a.kind != b.kind || a.actions != b.actions) return false;
    if (!a.children || !b.children) return !a.children && !b.children;
    return *a.children == *b.children;
}

const State* Region::find_state(std::string_view id) const
{
    for (const auto& s : states)
        if (s.id == id) return &s;
    return nullptr;
}

std::string to_string(const Violation& v)
{
    return v.path + ": " + v.message;
}

}  // namespace chordc
