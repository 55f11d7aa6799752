#include "chordc/derivation.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "chordc/errors.hpp"
#include "chordc/validate.hpp"

namespace chordc {

namespace {

RoleSet minus(const RoleSet& a, const Role& r)
{
    RoleSet out = a;
    out.erase(r);
    return out;
}

RoleSet minus(const RoleSet& a, const RoleSet& b)
{
    RoleSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

/// A piece of a role machine with a single entry and a single exit state.
/// Empty when the role does not take part in the corresponding subterm.
struct Fragment {
    std::vector<State> states;
    std::vector<Transition> transitions;
    std::string entry;
    std::string exit;

    bool empty() const { return states.empty(); }

    State& state(const std::string& id)
    {
        for (auto& s : states)
            if (s.id == id) return s;
        throw std::logic_error("fragment has no state " + id);
    }
};

class Deriver {
public:
    Deriver(const RoleSetTable& sets, Role role) : sets_(sets), role_(std::move(role)) {}

    StateMachine run(const Term& term)
    {
        Fragment body = build(term, NodePath(kRootPath));

        StateMachine sm;
        sm.role = role_;
        sm.initial = "initial";
        sm.states.push_back({"initial", "Initial", StateKind::Initial, {}, nullptr});
        if (body.empty()) {
            sm.transitions.push_back({next_transition(), "initial", "final", std::nullopt});
        } else {
            sm.transitions.push_back({next_transition(), "initial", body.entry, std::nullopt});
            std::move(body.states.begin(), body.states.end(), std::back_inserter(sm.states));
            std::move(body.transitions.begin(), body.transitions.end(), std::back_inserter(sm.transitions));
            sm.transitions.push_back({next_transition(), body.exit, "final", std::nullopt});
        }
        sm.states.push_back({"final", "Final", StateKind::Final, {}, nullptr});
        return sm;
    }

private:
    Fragment build(const Term& term, const NodePath& path)
    {
        switch (term.kind()) {
        case TermKind::Epsilon: return {};
        case TermKind::SubCollab:
            if (!term.pr().count(role_)) return {};
            return composite(term.name(), {DomainAction{term.name(), role_}});
        case TermKind::StrongSeq: return strong_seq(term, path);
        case TermKind::WeakSeq:
            return join(build(term.left(), child_path(path, term.kind(), 0)),
                        build(term.right(), child_path(path, term.kind(), 1)));
        case TermKind::Choice: return choice(term, path);
        default: throw UnsupportedConstruct(std::string(to_string(term.kind())), path);
        }
    }

    Fragment strong_seq(const Term& term, const NodePath& path)
    {
        const NodePath p1 = child_path(path, term.kind(), 0);
        const NodePath p2 = child_path(path, term.kind(), 1);
        const RoleSets& c1 = sets_.at(p1);
        const RoleSets& c2 = sets_.at(p2);
        const std::string target = term.right().label(p2);

        Fragment f1 = build(term.left(), p1);
        Fragment f2 = build(term.right(), p2);

        if (c1.tr.count(role_)) {
            std::vector<Action> sends;
            for (const auto& dst : minus(c2.sr, role_))
                sends.push_back(SendAction{{MessageKind::Flowm, role_, dst, target}});
            append_at_exit(f1, std::move(sends));
        }
        if (c2.sr.count(role_)) {
            std::vector<Action> receives;
            for (const auto& src : minus(c1.tr, role_))
                receives.push_back(ReceiveAction{{MessageKind::Flowm, src, role_, target}});
            prepend_at_entry(f2, std::move(receives));
        }
        return join(std::move(f1), std::move(f2));
    }

    Fragment choice(const Term& term, const NodePath& path)
    {
        const NodePath paths[2] = {child_path(path, term.kind(), 0), child_path(path, term.kind(), 1)};
        const Term* sides[2] = {&term.left(), &term.right()};
        const RoleSets* sets[2] = {&sets_.at(paths[0]), &sets_.at(paths[1])};
        const bool member[2] = {sets[0]->pr.count(role_) > 0, sets[1]->pr.count(role_) > 0};
        if (!member[0] && !member[1]) return {};

        const Role& decider = *sets_.at(path).sr.begin();
        const std::string label = term.label(path);

        Fragment branches[2];
        for (int i = 0; i < 2; ++i) {
            const std::string branch_label = sides[i]->label(paths[i]);
            if (member[i]) {
                branches[i] = build(*sides[i], paths[i]);
                if (role_ == decider) {
                    std::vector<Action> sends;
                    for (const auto& dst : minus(sets[1 - i]->pr, sets[i]->pr))
                        sends.push_back(SendAction{{MessageKind::Choicem, decider, dst, branch_label}});
                    append_at_exit(branches[i], std::move(sends));
                }
            } else {
                branches[i] = composite(branch_label,
                                        {ReceiveAction{{MessageKind::Choicem, decider, role_, branch_label}}});
            }
        }

        Fragment out;
        out.entry = "choice." + label;
        out.exit = "junction." + label;
        out.states.push_back({out.entry, label, StateKind::ChoicePseudo, {}, nullptr});
        for (int i = 0; i < 2; ++i) {
            std::move(branches[i].states.begin(), branches[i].states.end(), std::back_inserter(out.states));
            std::move(branches[i].transitions.begin(), branches[i].transitions.end(),
                      std::back_inserter(out.transitions));
        }
        out.states.push_back({out.exit, label, StateKind::Junction, {}, nullptr});
        for (int i = 0; i < 2; ++i)
            out.transitions.push_back(
                {next_transition(), out.entry, branches[i].entry, sides[i]->label(paths[i])});
        for (int i = 0; i < 2; ++i)
            out.transitions.push_back({next_transition(), branches[i].exit, out.exit, std::nullopt});
        return out;
    }

    Fragment composite(const std::string& name, std::vector<Action> actions)
    {
        const std::string id = "c." + name;
        Region inner;
        inner.initial = id + ".i";
        const std::string simple = next_state();
        inner.states.push_back({inner.initial, "Initial", StateKind::Initial, {}, nullptr});
        inner.states.push_back({simple, simple, StateKind::Simple, std::move(actions), nullptr});
        inner.states.push_back({id + ".f", "Final", StateKind::Final, {}, nullptr});
        inner.transitions.push_back({next_transition(), inner.initial, simple, std::nullopt});
        inner.transitions.push_back({next_transition(), simple, id + ".f", std::nullopt});

        Fragment out;
        out.entry = out.exit = id;
        out.states.push_back({id, name, StateKind::Composite, {}, std::make_shared<const Region>(std::move(inner))});
        return out;
    }

    // The action-holding simple state inside a composite.
    static void edit_actions(State& comp, const std::function<void(std::vector<Action>&)>& edit)
    {
        Region inner = *comp.children;
        for (auto& s : inner.states)
            if (s.kind == StateKind::Simple) {
                edit(s.actions);
                break;
            }
        comp.children = std::make_shared<const Region>(std::move(inner));
    }

    void append_at_exit(Fragment& f, std::vector<Action> actions)
    {
        if (actions.empty() || f.empty()) return;
        State& last = f.state(f.exit);
        if (last.kind == StateKind::Composite) {
            edit_actions(last, [&](std::vector<Action>& acts) {
                acts.insert(acts.end(), actions.begin(), actions.end());
            });
            return;
        }
        const std::string id = next_state();
        f.states.push_back({id, id, StateKind::Simple, std::move(actions), nullptr});
        f.transitions.push_back({next_transition(), f.exit, id, std::nullopt});
        f.exit = id;
    }

    void prepend_at_entry(Fragment& f, std::vector<Action> actions)
    {
        if (actions.empty() || f.empty()) return;
        State& first = f.state(f.entry);
        if (first.kind == StateKind::Composite) {
            edit_actions(first, [&](std::vector<Action>& acts) {
                acts.insert(acts.begin(), actions.begin(), actions.end());
            });
            return;
        }
        const std::string id = next_state();
        f.states.insert(f.states.begin(), {id, id, StateKind::Simple, std::move(actions), nullptr});
        f.transitions.push_back({next_transition(), id, f.entry, std::nullopt});
        f.entry = id;
    }

    Fragment join(Fragment a, Fragment b)
    {
        if (a.empty()) return b;
        if (b.empty()) return a;
        const std::string link = next_transition();
        std::move(b.states.begin(), b.states.end(), std::back_inserter(a.states));
        std::move(b.transitions.begin(), b.transitions.end(), std::back_inserter(a.transitions));
        a.transitions.push_back({link, a.exit, b.entry, std::nullopt});
        a.exit = b.exit;
        return a;
    }

    std::string next_state() { return "S" + std::to_string(++state_counter_); }
    std::string next_transition() { return "T" + std::to_string(++transition_counter_); }

    const RoleSetTable& sets_;
    Role role_;
    unsigned state_counter_ = 0;
    unsigned transition_counter_ = 0;
};

// --- flatten ----------------------------------------------------------------

struct FlatBuilder {
    std::vector<State> states;
    std::vector<Transition> transitions;
    std::set<std::string> pass_through;

    // Returns (entry id, exit id) of the inlined region.
    std::pair<std::string, std::string> inline_region(const Region& region, bool nested)
    {
        std::map<std::string, std::pair<std::string, std::string>> composite_ends;
        std::vector<std::string> finals;
        for (const auto& s : region.states) {
            if (s.kind == StateKind::Composite && s.children) {
                composite_ends[s.id] = inline_region(*s.children, true);
                continue;
            }
            State copy = s;
            if (nested && (s.kind == StateKind::Initial || s.kind == StateKind::Final)) {
                if (s.kind == StateKind::Final) finals.push_back(s.id);
                copy.kind = StateKind::Junction;
                pass_through.insert(s.id);
            }
            states.push_back(std::move(copy));
        }
        for (auto t : region.transitions) {
            if (auto it = composite_ends.find(t.target); it != composite_ends.end()) t.target = it->second.first;
            if (auto it = composite_ends.find(t.source); it != composite_ends.end()) t.source = it->second.second;
            transitions.push_back(std::move(t));
        }
        std::string exit = finals.empty() ? std::string{} : finals.front();
        if (finals.size() > 1) {
            // Several inner finals: funnel them through one pass-through.
            exit = region.initial + ".exit";
            states.push_back({exit, "Junction", StateKind::Junction, {}, nullptr});
            pass_through.insert(exit);
            for (const auto& f : finals) transitions.push_back({f + ".exit", f, exit, std::nullopt});
        }
        return {region.initial, exit};
    }

    void contract()
    {
        for (const auto& id : std::vector<std::string>(states_order())) {
            if (!pass_through.count(id)) continue;
            std::vector<std::size_t> ins;
            std::vector<std::size_t> outs;
            for (std::size_t k = 0; k < transitions.size(); ++k) {
                if (transitions[k].target == id) ins.push_back(k);
                if (transitions[k].source == id) outs.push_back(k);
            }
            std::size_t dropped;
            if (outs.size() == 1) {
                const Transition out = transitions[outs[0]];
                for (auto k : ins) {
                    transitions[k].target = out.target;
                    if (!transitions[k].label) transitions[k].label = out.label;
                }
                dropped = outs[0];
            } else if (ins.size() == 1) {
                const Transition in = transitions[ins[0]];
                for (auto k : outs) {
                    transitions[k].source = in.source;
                    if (!transitions[k].label) transitions[k].label = in.label;
                }
                dropped = ins[0];
            } else {
                continue;
            }
            transitions.erase(transitions.begin() + static_cast<std::ptrdiff_t>(dropped));
            std::erase_if(states, [&](const State& s) { return s.id == id; });
        }
    }

    std::vector<std::string> states_order() const
    {
        std::vector<std::string> ids;
        for (const auto& s : states) ids.push_back(s.id);
        return ids;
    }
};

}  // namespace

void require_derivable(const Term& term)
{
    for_each_node(term, [](const Term& node, const NodePath& path) {
        if (node.kind() == TermKind::Parallel) throw UnsupportedConstruct("Parallel", path);
        if (node.is_loop()) throw UnsupportedConstruct("Loop", path);
    });
    const ValidationReport report = validate_term(term);
    if (!report.empty()) {
        std::vector<std::string> problems;
        for (const auto& v : report) problems.push_back(to_string(v));
        throw InvalidModel(std::move(problems));
    }
}

StateMachine derive_role(const Term& term, const RoleSetTable& sets, const Role& role)
{
    require_derivable(term);
    return Deriver(sets, role).run(term);
}

std::map<Role, StateMachine> derive_all(const Term& term, const RoleSetTable& sets,
                                        std::span<const Role> extra_roles)
{
    require_derivable(term);
    RoleSet roles = sets.root().pr;
    roles.insert(extra_roles.begin(), extra_roles.end());
    std::map<Role, StateMachine> out;
    for (const auto& role : roles) out.emplace(role, Deriver(sets, role).run(term));
    return out;
}

StateMachine flatten(const StateMachine& sm)
{
    FlatBuilder builder;
    builder.inline_region(sm, false);
    builder.contract();
    StateMachine out;
    out.role = sm.role;
    out.initial = sm.initial;
    out.states = std::move(builder.states);
    out.transitions = std::move(builder.transitions);
    return out;
}

}  // namespace chordc
