#include "chordc/validate.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "chordc/rolesets.hpp"

namespace chordc {

namespace {

bool subset(const RoleSet& a, const RoleSet& b)
{
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

void check_leaf(const Term& leaf, const NodePath& path, ValidationReport& out)
{
    if (leaf.name().empty()) out.push_back({path, "empty name"});
    if (leaf.pr().empty()) out.push_back({path, "empty pr"});
    if (leaf.sr().empty()) out.push_back({path, "empty sr"});
    if (leaf.tr().empty()) out.push_back({path, "empty tr"});
    if (!subset(leaf.sr(), leaf.pr())) out.push_back({path, "sr ⊄ pr"});
    if (!subset(leaf.tr(), leaf.pr())) out.push_back({path, "tr ⊄ pr"});
    for (const RoleSet* set : {&leaf.sr(), &leaf.tr(), &leaf.pr()})
        if (set->count(Role{})) {
            out.push_back({path, "empty role id"});
            break;
        }
}

void check_epsilons(const Term& term, const NodePath& path, ValidationReport& out)
{
    if (!term.is_binary()) return;
    for (int side = 0; side < 2; ++side) {
        const Term& child = side == 0 ? term.left() : term.right();
        const NodePath cp = child_path(path, term.kind(), side);
        if (child.kind() == TermKind::Epsilon && !term.is_loop())
            out.push_back({cp, "misplaced epsilon: only allowed as a loop side or as the whole model"});
        check_epsilons(child, cp, out);
    }
}

class MachineChecker {
public:
    explicit MachineChecker(ValidationReport& out) : out_(out) {}

    void check(const Region& region, const std::string& path)
    {
        std::map<std::string, const State*> by_id;
        int initials = 0;
        int finals = 0;
        for (const auto& s : region.states) {
            const std::string spath = path + "/" + s.id;
            if (!seen_ids_.insert(s.id).second) out_.push_back({spath, "duplicate state id: " + s.id});
            by_id.emplace(s.id, &s);
            if (s.kind == StateKind::Initial) ++initials;
            if (s.kind == StateKind::Final) ++finals;
            if (!s.actions.empty() && s.kind != StateKind::Simple)
                out_.push_back({spath, "actions on non-simple state"});
            for (const auto& a : s.actions) check_action(a, spath);
            if (s.kind == StateKind::Composite) {
                if (!s.children)
                    out_.push_back({spath, "composite without children"});
                else
                    check(*s.children, spath);
            } else if (s.children) {
                out_.push_back({spath, "children on non-composite state"});
            }
        }
        if (initials == 0) out_.push_back({path, "no initial"});
        if (initials > 1) out_.push_back({path, "multiple initial"});
        if (finals == 0) out_.push_back({path, "no final"});

        const auto init = by_id.find(region.initial);
        if (init == by_id.end() || init->second->kind != StateKind::Initial)
            out_.push_back({path, "initial does not name an Initial state: " + region.initial});

        std::map<std::string, int> in_degree;
        std::map<std::string, int> out_degree;
        std::map<std::string, std::vector<std::string>> succ;
        for (const auto& t : region.transitions) {
            const std::string tpath = path + "/" + t.id;
            if (!seen_transitions_.insert(t.id).second)
                out_.push_back({tpath, "duplicate transition id: " + t.id});
            const auto src = by_id.find(t.source);
            const auto dst = by_id.find(t.target);
            if (src == by_id.end()) out_.push_back({tpath, "dangling source: " + t.source});
            if (dst == by_id.end()) out_.push_back({tpath, "dangling target: " + t.target});
            if (src == by_id.end() || dst == by_id.end()) continue;
            if (src->second->kind == StateKind::Final)
                out_.push_back({tpath, "transition leaves final state " + t.source});
            if (dst->second->kind == StateKind::Initial)
                out_.push_back({tpath, "transition enters initial state " + t.target});
            ++out_degree[t.source];
            ++in_degree[t.target];
            succ[t.source].push_back(t.target);
        }

        for (const auto& s : region.states) {
            const std::string spath = path + "/" + s.id;
            if (s.kind == StateKind::ChoicePseudo && out_degree[s.id] < 2)
                out_.push_back({spath, "choice state needs at least 2 outgoing transitions"});
            if (s.kind == StateKind::Junction && in_degree[s.id] < 2)
                out_.push_back({spath, "junction state needs at least 2 incoming transitions"});
        }

        if (init == by_id.end()) return;
        std::set<std::string> reached{region.initial};
        std::queue<std::string> work;
        work.push(region.initial);
        while (!work.empty()) {
            const std::string id = work.front();
            work.pop();
            for (const auto& next : succ[id])
                if (reached.insert(next).second) work.push(next);
        }
        for (const auto& s : region.states)
            if (!reached.count(s.id)) out_.push_back({path, "unreachable: " + s.id});
    }

private:
    void check_action(const Action& action, const std::string& path)
    {
        const CoordMessage* msg = nullptr;
        if (const auto* send = std::get_if<SendAction>(&action)) msg = &send->msg;
        if (const auto* recv = std::get_if<ReceiveAction>(&action)) msg = &recv->msg;
        if (msg && msg->src == msg->dst) out_.push_back({path, "self-message: " + to_string(*msg)});
    }

    ValidationReport& out_;
    std::set<std::string> seen_ids_;
    std::set<std::string> seen_transitions_;
};

}  // namespace

ValidationReport validate_term(const Term& term)
{
    ValidationReport out;
    std::map<std::string, NodePath> names;
    for_each_node(term, [&](const Term& node, const NodePath& path) {
        if (node.is_leaf()) check_leaf(node, path, out);
        if (!node.name().empty()) {
            auto [it, fresh] = names.emplace(node.name(), path);
            if (!fresh) out.push_back({path, "duplicate name \"" + node.name() + "\" (first at " + it->second + ")"});
        }
    });
    check_epsilons(term, NodePath(kRootPath), out);
    for (const auto& v : check_local_choice(term))
        out.push_back({v.path, "LocalChoiceViolation: starting roles " + format_roles(v.starting) +
                                   " must be a single role"});
    return out;
}

ValidationReport validate_machine(const StateMachine& sm)
{
    ValidationReport out;
    MachineChecker(out).check(sm, "machine(" + sm.role + ")");
    return out;
}

}  // namespace chordc
