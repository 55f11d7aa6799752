#include "chordc/semantics.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <unordered_map>
#include <utility>

#include "chordc/derivation.hpp"
#include "chordc/errors.hpp"
#include "chordc/rolesets.hpp"
#include "chordc/validate.hpp"

namespace chordc {

namespace {

using IdTrace = std::vector<int>;
using IdTraceSet = std::set<IdTrace>;

class EventTable {
public:
    int intern(const Event& e)
    {
        auto [it, added] = ids_.emplace(e, static_cast<int>(events_.size()));
        if (added) events_.push_back(e);
        return it->second;
    }

    TraceSet decode(const IdTraceSet& traces) const
    {
        TraceSet out;
        for (const auto& t : traces) {
            Trace trace;
            trace.reserve(t.size());
            for (int id : t) trace.push_back(events_[static_cast<std::size_t>(id)]);
            out.insert(std::move(trace));
        }
        return out;
    }

    std::size_t size() const { return events_.size(); }

private:
    std::map<Event, int> ids_;
    std::vector<Event> events_;
};

/// Starting block, then the middle block, then terminating-only roles.
std::vector<RoleSet> collab_blocks(const Term& leaf)
{
    std::vector<RoleSet> blocks(3);
    for (const auto& r : leaf.pr()) {
        if (leaf.sr().count(r))
            blocks[0].insert(r);
        else if (leaf.tr().count(r))
            blocks[2].insert(r);
        else
            blocks[1].insert(r);
    }
    std::erase_if(blocks, [](const RoleSet& b) { return b.empty(); });
    return blocks;
}

void throw_invalid(const ValidationReport& report)
{
    std::vector<std::string> problems;
    for (const auto& v : report) problems.push_back(to_string(v));
    throw InvalidModel(std::move(problems));
}

// --- intended traces ----------------------------------------------------------

// One partially ordered run of a term. Elements are events or hidden choice
// notifications; each role also remembers its first and last elements.
struct Run {
    struct Ends {
        std::vector<int> first;
        std::vector<int> last;
    };

    std::vector<int> events;  // -1 for hidden elements
    std::vector<std::pair<int, int>> edges;
    std::map<Role, Ends> ends;
};

struct Barrier {
    const RoleSet* from;  // TR of the first part
    const RoleSet* to;    // SR of the second part
};

Run concat(const Run& a, const Run& b, std::optional<Barrier> barrier)
{
    Run out = a;
    const int off = static_cast<int>(a.events.size());
    out.events.insert(out.events.end(), b.events.begin(), b.events.end());
    for (auto [x, y] : b.edges) out.edges.emplace_back(x + off, y + off);
    auto link = [&](const std::vector<int>& lasts, const std::vector<int>& firsts) {
        for (int l : lasts)
            for (int f : firsts) out.edges.emplace_back(l, f + off);
    };
    for (const auto& [role, eb] : b.ends)
        if (auto it = a.ends.find(role); it != a.ends.end()) link(it->second.last, eb.first);
    if (barrier) {
        for (const auto& r : *barrier->from) {
            auto ia = a.ends.find(r);
            if (ia == a.ends.end()) continue;
            for (const auto& r2 : *barrier->to) {
                if (r2 == r) continue;
                if (auto ib = b.ends.find(r2); ib != b.ends.end()) link(ia->second.last, ib->second.first);
            }
        }
    }
    auto shifted = [off](std::vector<int> v) {
        for (int& x : v) x += off;
        return v;
    };
    for (const auto& [role, eb] : b.ends) {
        auto [it, added] = out.ends.try_emplace(role);
        if (added) it->second.first = shifted(eb.first);
        it->second.last = shifted(eb.last);
    }
    return out;
}

Run disjoint(const Run& a, const Run& b)
{
    Run out = a;
    const int off = static_cast<int>(a.events.size());
    out.events.insert(out.events.end(), b.events.begin(), b.events.end());
    for (auto [x, y] : b.edges) out.edges.emplace_back(x + off, y + off);
    for (const auto& [role, eb] : b.ends) {
        auto& ends = out.ends[role];
        for (int x : eb.first) ends.first.push_back(x + off);
        for (int x : eb.last) ends.last.push_back(x + off);
    }
    return out;
}

class Oracle {
public:
    Oracle(const Term& term, const ExploreLimits& limits) : limits_(limits)
    {
        for (auto& n : role_sets(term).nodes) sets_.emplace(n.path, std::move(n.sets));
    }

    TraceSet traces(const Term& term)
    {
        std::vector<Poset> posets;
        double total = 0;
        for (const auto& run : runs(term, NodePath(kRootPath))) {
            posets.push_back(visible_order(run));
            total += count_extensions(posets.back());
            if (total > static_cast<double>(limits_.cap)) throw TooLarge("intended traces", limits_.cap);
        }
        IdTraceSet all;
        for (const auto& p : posets) linearize(p, all);
        return events_.decode(all);
    }

private:
    void check_runs(std::size_t n) const
    {
        if (n > limits_.cap) throw TooLarge("intended runs", limits_.cap);
    }

    std::vector<Run> runs(const Term& term, const NodePath& path)
    {
        switch (term.kind()) {
        case TermKind::Epsilon:
            return {Run{}};
        case TermKind::SubCollab:
            return {leaf(term)};
        case TermKind::StrongSeq:
        case TermKind::WeakSeq: {
            const NodePath lp = child_path(path, term.kind(), 0);
            const NodePath rp = child_path(path, term.kind(), 1);
            std::optional<Barrier> barrier;
            if (term.kind() == TermKind::StrongSeq) barrier = Barrier{&sets_.at(lp).tr, &sets_.at(rp).sr};
            return cross(runs(term.left(), lp), runs(term.right(), rp), barrier);
        }
        case TermKind::Choice: {
            const RoleSet& sr = sets_.at(path).sr;
            std::vector<Run> out;
            const NodePath paths[2] = {child_path(path, term.kind(), 0), child_path(path, term.kind(), 1)};
            for (int i = 0; i < 2; ++i) {
                const RoleSet& mine = sets_.at(paths[i]).pr;
                RoleSet notified;
                std::set_difference(sets_.at(paths[1 - i]).pr.begin(), sets_.at(paths[1 - i]).pr.end(), mine.begin(),
                                    mine.end(), std::inserter(notified, notified.end()));
                for (auto& run : runs(i == 0 ? term.left() : term.right(), paths[i])) {
                    if (sr.size() == 1) notify(run, *sr.begin(), notified);
                    out.push_back(std::move(run));
                }
            }
            check_runs(out.size());
            return out;
        }
        case TermKind::Parallel: {
            std::vector<Run> out;
            for (const auto& a : runs(term.left(), child_path(path, term.kind(), 0)))
                for (const auto& b : runs(term.right(), child_path(path, term.kind(), 1))) {
                    out.push_back(disjoint(a, b));
                    check_runs(out.size());
                }
            return out;
        }
        case TermKind::StrongLoop:
        case TermKind::WeakLoop:
            return loop(term, path);
        }
        return {};
    }

    Run leaf(const Term& term)
    {
        Run run;
        std::vector<int> prev;
        for (const auto& block : collab_blocks(term)) {
            std::vector<int> cur;
            for (const auto& r : block) {
                const int idx = static_cast<int>(run.events.size());
                run.events.push_back(events_.intern({term.name(), r}));
                run.ends[r] = {{idx}, {idx}};
                cur.push_back(idx);
            }
            for (int p : prev)
                for (int c : cur) run.edges.emplace_back(p, c);
            prev = std::move(cur);
        }
        return run;
    }

    // Roles absent from the selected branch learn of it after the decider has
    // finished there, before doing anything else.
    static void notify(Run& run, const Role& decider, const RoleSet& roles)
    {
        const auto d = run.ends.find(decider);
        for (const auto& r : roles) {
            const int idx = static_cast<int>(run.events.size());
            run.events.push_back(-1);
            if (d != run.ends.end())
                for (int l : d->second.last) run.edges.emplace_back(l, idx);
            auto [it, added] = run.ends.try_emplace(r);
            if (!added)
                for (int l : it->second.last) run.edges.emplace_back(l, idx);
            else
                it->second.first = {idx};
            it->second.last = {idx};
        }
    }

    std::vector<Run> cross(const std::vector<Run>& as, const std::vector<Run>& bs, std::optional<Barrier> barrier)
    {
        std::vector<Run> out;
        for (const auto& a : as)
            for (const auto& b : bs) {
                out.push_back(concat(a, b, barrier));
                check_runs(out.size());
            }
        return out;
    }

    std::vector<Run> loop(const Term& term, const NodePath& path)
    {
        const NodePath bp = child_path(path, term.kind(), 0);
        const NodePath ep = child_path(path, term.kind(), 1);
        const bool strong = term.kind() == TermKind::StrongLoop;
        const std::vector<Run> bodies = runs(term.body(), bp);
        const std::vector<Run> exits = runs(term.exit(), ep);
        const Barrier to_body{&sets_.at(bp).tr, &sets_.at(bp).sr};
        const Barrier to_exit{&sets_.at(bp).tr, &sets_.at(ep).sr};

        std::vector<Run> out;
        std::vector<Run> prefix{Run{}};
        for (unsigned n = 0;; ++n) {
            const auto barrier = [&](Barrier b) { return strong && n > 0 ? std::optional(b) : std::nullopt; };
            for (const auto& e : exits)
                for (const auto& p : prefix) {
                    out.push_back(concat(p, e, barrier(to_exit)));
                    check_runs(out.size());
                }
            if (n == limits_.loop_bound) break;
            prefix = cross(prefix, bodies, barrier(to_body));
        }
        return out;
    }

    // Linear extensions of the visible elements under the induced order are
    // exactly the projections of the run's linearizations.
    struct Poset {
        std::vector<int> events;
        std::vector<std::vector<int>> preds;
    };

    static Poset visible_order(const Run& run)
    {
        const std::size_t n = run.events.size();
        std::vector<std::vector<int>> succ(n);
        for (auto [x, y] : run.edges) succ[static_cast<std::size_t>(x)].push_back(y);
        std::vector<int> index(n, -1);
        Poset p;
        for (std::size_t k = 0; k < n; ++k)
            if (run.events[k] >= 0) {
                index[k] = static_cast<int>(p.events.size());
                p.events.push_back(run.events[k]);
            }
        p.preds.resize(p.events.size());
        for (std::size_t k = 0; k < n; ++k) {
            if (index[k] < 0) continue;
            std::vector<bool> seen(n, false);
            std::vector<int> stack = succ[k];
            while (!stack.empty()) {
                const auto v = static_cast<std::size_t>(stack.back());
                stack.pop_back();
                if (seen[v]) continue;
                seen[v] = true;
                if (index[v] >= 0) p.preds[static_cast<std::size_t>(index[v])].push_back(index[k]);
                stack.insert(stack.end(), succ[v].begin(), succ[v].end());
            }
        }
        return p;
    }

    static bool enabled(const Poset& p, const std::vector<bool>& done, std::size_t e)
    {
        return !done[e] && std::all_of(p.preds[e].begin(), p.preds[e].end(),
                                       [&](int q) { return done[static_cast<std::size_t>(q)]; });
    }

    double count_extensions(const Poset& p) const
    {
        std::unordered_map<std::vector<bool>, double> memo;
        std::vector<bool> done(p.events.size(), false);
        std::function<double()> visit = [&]() -> double {
            if (auto it = memo.find(done); it != memo.end()) return it->second;
            double total = 0;
            bool any = false;
            for (std::size_t e = 0; e < p.events.size(); ++e) {
                if (!enabled(p, done, e)) continue;
                any = true;
                done[e] = true;
                total += visit();
                done[e] = false;
            }
            if (!any) total = 1;
            memo.emplace(done, total);
            if (memo.size() > limits_.cap) throw TooLarge("intended traces", limits_.cap);
            return total;
        };
        return visit();
    }

    void linearize(const Poset& p, IdTraceSet& out) const
    {
        using Suffixes = std::shared_ptr<const IdTraceSet>;
        std::unordered_map<std::vector<bool>, Suffixes> memo;
        std::vector<bool> done(p.events.size(), false);

        std::function<Suffixes()> visit = [&]() -> Suffixes {
            if (auto it = memo.find(done); it != memo.end()) return it->second;
            auto result = std::make_shared<IdTraceSet>();
            bool any = false;
            for (std::size_t e = 0; e < p.events.size(); ++e) {
                if (!enabled(p, done, e)) continue;
                any = true;
                done[e] = true;
                const Suffixes rest = visit();
                done[e] = false;
                for (const auto& t : *rest) {
                    IdTrace full;
                    full.reserve(t.size() + 1);
                    full.push_back(p.events[e]);
                    full.insert(full.end(), t.begin(), t.end());
                    result->insert(std::move(full));
                }
            }
            if (!any) result->insert(IdTrace{});
            memo.emplace(done, result);
            return result;
        };
        const Suffixes all = visit();
        out.insert(all->begin(), all->end());
    }

    ExploreLimits limits_;
    std::map<NodePath, RoleSets> sets_;
    EventTable events_;
};

// --- composed machines --------------------------------------------------------

struct Op {
    enum class Type { Domain, Send, Receive } type;
    int id;          // event or message id
    int run_end;     // receives: one past the last receive of the run
};

struct FlatState {
    std::string id;
    StateKind kind;
    std::string name;
    std::vector<Action> actions;
    std::vector<Op> ops;
    std::vector<std::pair<int, std::optional<std::string>>> out;  // target, label
    int choice = -1;
};

struct FlatMachine {
    Role role;
    int initial = 0;
    std::vector<FlatState> states;
};

struct ChoiceInfo {
    int decider = -1;  // role index
    std::string branch[2];
};

struct Config {
    std::vector<int> pos;
    std::vector<int> act;
    std::vector<int> pool;
    std::vector<int> resolved;
    std::vector<char> done;

    std::string key() const
    {
        std::string k;
        auto put = [&k](int v) {
            k.push_back(static_cast<char>(v & 0xff));
            k.push_back(static_cast<char>((v >> 8) & 0xff));
        };
        for (int v : pos) put(v);
        for (int v : act) put(v);
        for (int v : pool) put(v);
        for (int v : resolved) put(v + 1);
        k.append(done.begin(), done.end());
        return k;
    }
};

class Explorer {
public:
    Explorer(const std::map<Role, StateMachine>& machines, const Term& term, const ExploreLimits& limits)
        : limits_(limits)
    {
        const RoleSetTable sets = role_sets(term);
        std::map<Role, int> role_index;
        for (const auto& [role, sm] : machines) {
            role_index[role] = static_cast<int>(machines_.size());
            machines_.push_back({role, 0, {}});
        }

        std::map<std::string, int> choice_index;
        for_each_node(term, [&](const Term& node, const NodePath& path) {
            if (node.is_leaf()) {
                std::vector<int> prev;
                for (const auto& block : collab_blocks(node)) {
                    std::vector<int> cur;
                    for (const auto& r : block) cur.push_back(event_id({node.name(), r}));
                    for (int c : cur) preds_[static_cast<std::size_t>(c)] = prev;
                    prev = std::move(cur);
                }
            } else if (node.kind() == TermKind::Choice) {
                ChoiceInfo info;
                const RoleSet& sr = sets.at(path).sr;
                if (sr.size() == 1)
                    if (auto it = role_index.find(*sr.begin()); it != role_index.end()) info.decider = it->second;
                for (int i = 0; i < 2; ++i)
                    info.branch[i] = (i == 0 ? node.left() : node.right()).label(child_path(path, node.kind(), i));
                choice_index[node.label(path)] = static_cast<int>(choices_.size());
                choices_.push_back(std::move(info));
            }
        });

        int r = 0;
        for (const auto& [role, sm] : machines) compile(flatten(sm), machines_[static_cast<std::size_t>(r++)], choice_index);
    }

    SystemExploration run()
    {
        Config start;
        for (const auto& m : machines_) {
            start.pos.push_back(m.initial);
            start.act.push_back(0);
        }
        start.pool.assign(messages_.size(), 0);
        start.resolved.assign(choices_.size(), -1);
        start.done.assign(events_.size(), 0);
        normalize(start);

        const auto traces = visit(start);
        SystemExploration out;
        out.traces = events_.decode(*traces);
        out.deadlocks = std::move(deadlocks_);
        out.deadlock_count = deadlock_count_;
        out.configurations = memo_.size();
        return out;
    }

private:
    using Suffixes = std::shared_ptr<const IdTraceSet>;

    int event_id(const Event& e)
    {
        const int id = events_.intern(e);
        if (static_cast<std::size_t>(id) >= preds_.size()) preds_.resize(static_cast<std::size_t>(id) + 1);
        return id;
    }

    int message_id(const CoordMessage& m)
    {
        auto [it, added] = messages_.emplace(m, static_cast<int>(messages_.size()));
        return it->second;
    }

    void compile(const StateMachine& sm, FlatMachine& out, const std::map<std::string, int>& choice_index)
    {
        std::map<std::string, int> index;
        for (const auto& s : sm.states) {
            index[s.id] = static_cast<int>(out.states.size());
            FlatState fs{s.id, s.kind, s.name, s.actions, {}, {}, -1};
            if (s.kind == StateKind::ChoicePseudo)
                if (auto it = choice_index.find(s.name); it != choice_index.end()) fs.choice = it->second;
            for (const auto& a : s.actions) {
                if (const auto* d = std::get_if<DomainAction>(&a))
                    fs.ops.push_back({Op::Type::Domain, event_id({d->collab, d->role}), 0});
                else if (const auto* snd = std::get_if<SendAction>(&a))
                    fs.ops.push_back({Op::Type::Send, message_id(snd->msg), 0});
                else
                    fs.ops.push_back({Op::Type::Receive, message_id(std::get<ReceiveAction>(a).msg), 0});
            }
            for (std::size_t k = fs.ops.size(); k-- > 0;) {
                if (fs.ops[k].type != Op::Type::Receive) continue;
                const bool extends = k + 1 < fs.ops.size() && fs.ops[k + 1].type == Op::Type::Receive;
                fs.ops[k].run_end = extends ? fs.ops[k + 1].run_end : static_cast<int>(k + 1);
            }
            out.states.push_back(std::move(fs));
        }
        for (const auto& t : sm.transitions) {
            auto src = index.find(t.source);
            auto dst = index.find(t.target);
            if (src == index.end() || dst == index.end()) continue;
            out.states[static_cast<std::size_t>(src->second)].out.emplace_back(dst->second, t.label);
        }
        if (auto it = index.find(sm.initial); it != index.end()) out.initial = it->second;
    }

    const FlatState& state(const Config& c, std::size_t r) const
    {
        return machines_[r].states[static_cast<std::size_t>(c.pos[r])];
    }

    bool is_decider(const FlatState& s, std::size_t r) const
    {
        return s.choice < 0 || choices_[static_cast<std::size_t>(s.choice)].decider == static_cast<int>(r);
    }

    // Takes every silent move that cannot change the set of traces.
    void normalize(Config& c) const
    {
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t r = 0; r < machines_.size(); ++r) {
                for (;;) {
                    const FlatState& s = state(c, r);
                    int target = -1;
                    if (s.kind == StateKind::ChoicePseudo) {
                        if (is_decider(s, r)) break;
                        const int side = c.resolved[static_cast<std::size_t>(s.choice)];
                        if (side < 0) break;
                        const auto& want = choices_[static_cast<std::size_t>(s.choice)].branch[side];
                        for (const auto& [t, label] : s.out)
                            if (label == want) target = t;
                    } else if (s.kind != StateKind::Final &&
                               c.act[r] >= static_cast<int>(s.ops.size()) && s.out.size() == 1) {
                        target = s.out.front().first;
                    }
                    if (target < 0) break;
                    c.pos[r] = target;
                    c.act[r] = 0;
                    changed = true;
                }
            }
        }
    }

    bool all_final(const Config& c) const
    {
        for (std::size_t r = 0; r < machines_.size(); ++r)
            if (state(c, r).kind != StateKind::Final) return false;
        return true;
    }

    std::vector<std::pair<Config, int>> steps(const Config& c) const
    {
        std::vector<std::pair<Config, int>> out;
        auto emit = [&](Config next, int event) {
            normalize(next);
            out.emplace_back(std::move(next), event);
        };
        for (std::size_t r = 0; r < machines_.size(); ++r) {
            const FlatState& s = state(c, r);
            const int k = c.act[r];
            if (k < static_cast<int>(s.ops.size())) {
                const Op& op = s.ops[static_cast<std::size_t>(k)];
                Config next = c;
                switch (op.type) {
                case Op::Type::Domain: {
                    const auto& preds = preds_[static_cast<std::size_t>(op.id)];
                    if (!std::all_of(preds.begin(), preds.end(),
                                     [&](int p) { return c.done[static_cast<std::size_t>(p)] != 0; }))
                        continue;
                    next.done[static_cast<std::size_t>(op.id)] = 1;
                    next.act[r] = k + 1;
                    emit(std::move(next), op.id);
                    continue;
                }
                case Op::Type::Send:
                    ++next.pool[static_cast<std::size_t>(op.id)];
                    next.act[r] = k + 1;
                    emit(std::move(next), -1);
                    continue;
                case Op::Type::Receive: {
                    bool ready = true;
                    for (int j = k; j < op.run_end; ++j) {
                        int& count = next.pool[static_cast<std::size_t>(s.ops[static_cast<std::size_t>(j)].id)];
                        if (count == 0) ready = false;
                        else --count;
                    }
                    if (!ready) continue;
                    next.act[r] = op.run_end;
                    emit(std::move(next), -1);
                    continue;
                }
                }
            }
            if (s.kind == StateKind::Final) continue;
            if (s.kind == StateKind::ChoicePseudo && !is_decider(s, r)) continue;
            if (s.out.size() < 2 && s.kind != StateKind::ChoicePseudo) continue;
            for (const auto& [target, label] : s.out) {
                Config next = c;
                next.pos[r] = target;
                next.act[r] = 0;
                if (s.choice >= 0) {
                    const auto& info = choices_[static_cast<std::size_t>(s.choice)];
                    for (int side = 0; side < 2; ++side)
                        if (label == info.branch[side]) next.resolved[static_cast<std::size_t>(s.choice)] = side;
                }
                emit(std::move(next), -1);
            }
        }
        return out;
    }

    void record_deadlock(const Config& c)
    {
        ++deadlock_count_;
        if (deadlocks_.size() >= SystemExploration::kDeadlockSamples) return;
        Deadlock d;
        d.events_done = static_cast<std::size_t>(std::count(c.done.begin(), c.done.end(), 1));
        for (std::size_t r = 0; r < machines_.size(); ++r) {
            const FlatState& s = state(c, r);
            if (s.kind == StateKind::Final) continue;
            BlockedRole b{machines_[r].role, s.id, {}};
            if (c.act[r] < static_cast<int>(s.actions.size()))
                b.action = to_string(s.actions[static_cast<std::size_t>(c.act[r])]);
            d.roles.push_back(std::move(b));
        }
        deadlocks_.push_back(std::move(d));
    }

    Suffixes visit(const Config& c)
    {
        std::string key = c.key();
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        auto result = std::make_shared<IdTraceSet>();
        if (all_final(c)) {
            result->insert(IdTrace{});
        } else {
            const auto next = steps(c);
            if (next.empty()) record_deadlock(c);
            for (const auto& [config, event] : next) {
                const Suffixes rest = visit(config);
                for (const auto& t : *rest) {
                    if (event < 0) {
                        result->insert(t);
                        continue;
                    }
                    IdTrace full;
                    full.reserve(t.size() + 1);
                    full.push_back(event);
                    full.insert(full.end(), t.begin(), t.end());
                    result->insert(std::move(full));
                }
                if (result->size() > limits_.cap) throw TooLarge("system traces", limits_.cap);
            }
        }
        memo_.emplace(std::move(key), result);
        if (memo_.size() > limits_.cap) throw TooLarge("system configurations", limits_.cap);
        return result;
    }

    ExploreLimits limits_;
    std::vector<FlatMachine> machines_;
    std::vector<ChoiceInfo> choices_;
    EventTable events_;
    std::vector<std::vector<int>> preds_;
    std::map<CoordMessage, int> messages_;
    std::unordered_map<std::string, Suffixes> memo_;
    std::vector<Deadlock> deadlocks_;
    std::size_t deadlock_count_ = 0;
};

// --- static checks ------------------------------------------------------------

void for_each_action(const Region& region, const std::function<void(const Action&)>& visit)
{
    for (const auto& s : region.states) {
        for (const auto& a : s.actions) visit(a);
        if (s.children) for_each_action(*s.children, visit);
    }
}

Region without_sends(const Region& region, MessageKind kind)
{
    Region out = region;
    for (auto& s : out.states) {
        std::erase_if(s.actions, [kind](const Action& a) {
            const auto* send = std::get_if<SendAction>(&a);
            return send && send->msg.kind == kind;
        });
        if (s.children) s.children = std::make_shared<const Region>(without_sends(*s.children, kind));
    }
    return out;
}

std::set<std::string> leaf_names(const Term& term)
{
    std::set<std::string> names;
    for_each_node(term, [&](const Term& node, const NodePath&) {
        if (node.is_leaf()) names.insert(node.name());
    });
    return names;
}

void sample_difference(const TraceSet& a, const TraceSet& b, std::vector<Trace>& samples, std::size_t& count)
{
    for (const auto& t : a) {
        if (b.count(t)) continue;
        ++count;
        if (samples.size() < CheckReport::kSamples) samples.push_back(t);
    }
}

}  // namespace

std::string to_string(const Trace& trace)
{
    std::string out;
    for (const auto& e : trace) {
        if (!out.empty()) out += ' ';
        out += e.collab + "." + e.role;
    }
    return out;
}

std::string Deadlock::summary() const
{
    std::string out;
    for (const auto& b : roles) {
        if (!out.empty()) out += "; ";
        out += b.role + " at " + b.state;
        out += b.action.empty() ? " (no enabled move)" : " blocked on " + b.action;
    }
    return out;
}

TraceSet oracle_traces(const Term& term, const ExploreLimits& limits)
{
    if (const auto report = validate_term(term); !report.empty()) throw_invalid(report);
    return Oracle(term, limits).traces(term);
}

SystemExploration explore_system(const std::map<Role, StateMachine>& machines, const Term& term,
                                 const ExploreLimits& limits)
{
    return Explorer(machines, term, limits).run();
}

TraceSet system_traces(const std::map<Role, StateMachine>& machines, const Term& term, const ExploreLimits& limits)
{
    return explore_system(machines, term, limits).traces;
}

CoordinationCounts count_coordination(const std::map<Role, StateMachine>& machines)
{
    CoordinationCounts counts;
    for (const auto& [role, sm] : machines)
        for_each_action(sm, [&](const Action& a) {
            if (const auto* send = std::get_if<SendAction>(&a))
                ++(send->msg.kind == MessageKind::Flowm ? counts.flowm_sends : counts.choicem_sends);
        });
    return counts;
}

Complementarity check_complementarity(const std::map<Role, StateMachine>& machines)
{
    Complementarity out;
    std::map<CoordMessage, long> balance;
    for (const auto& [role, sm] : machines)
        for_each_action(sm, [&](const Action& a) {
            if (const auto* send = std::get_if<SendAction>(&a)) {
                ++balance[send->msg];
                if (send->msg.src != role)
                    out.problems.push_back("send " + to_string(send->msg) + " in machine(" + role + ")");
            } else if (const auto* recv = std::get_if<ReceiveAction>(&a)) {
                --balance[recv->msg];
                if (recv->msg.dst != role)
                    out.problems.push_back("receive " + to_string(recv->msg) + " in machine(" + role + ")");
            }
        });
    for (const auto& [msg, n] : balance) {
        if (n > 0) out.problems.push_back("unmatched send " + to_string(msg));
        if (n < 0) out.problems.push_back("unmatched receive " + to_string(msg));
    }
    out.ok = out.problems.empty();
    return out;
}

std::vector<BarrierDiagnostic> strict_barrier_diagnostics(const Term& term, const TraceSet& traces)
{
    const RoleSetTable sets = role_sets(term);
    std::vector<BarrierDiagnostic> out;
    for_each_node(term, [&](const Term& node, const NodePath& path) {
        if (node.kind() != TermKind::StrongSeq) return;
        const auto first = leaf_names(node.left());
        const auto second = leaf_names(node.right());
        const RoleSet& tr1 = sets.at(child_path(path, node.kind(), 0)).tr;
        const RoleSet& sr2 = sets.at(child_path(path, node.kind(), 1)).sr;
        for (const auto& t : traces) {
            bool started = false;
            for (const auto& e : t) {
                if (second.count(e.collab) && sr2.count(e.role)) started = true;
                if (started && first.count(e.collab) && !tr1.count(e.role)) {
                    out.push_back({path, t});
                    return;
                }
            }
        }
    });
    return out;
}

void inject_fault(std::map<Role, StateMachine>& machines, Injection injection)
{
    if (injection == Injection::None) return;
    const MessageKind kind = injection == Injection::DropChoicem ? MessageKind::Choicem : MessageKind::Flowm;
    for (auto& [role, sm] : machines) static_cast<Region&>(sm) = without_sends(sm, kind);
}

CheckReport check_machines(const Term& term, const std::map<Role, StateMachine>& machines,
                           const ExploreLimits& limits)
{
    CheckReport report;
    const TraceSet intended = oracle_traces(term, limits);
    SystemExploration run = explore_system(machines, term, limits);

    sample_difference(intended, run.traces, report.missing_traces, report.missing_count);
    sample_difference(run.traces, intended, report.extra_traces, report.extra_count);
    report.equivalent = report.missing_count == 0 && report.extra_count == 0;
    report.deadlocks = std::move(run.deadlocks);
    report.deadlock_count = run.deadlock_count;

    Complementarity comp = check_complementarity(machines);
    report.complementarity_ok = comp.ok;
    report.complementarity_problems = std::move(comp.problems);
    report.strict_barrier_diagnostics = strict_barrier_diagnostics(term, intended);
    report.counts = count_coordination(machines);
    report.oracle_trace_count = intended.size();
    report.system_trace_count = run.traces.size();
    report.configurations = run.configurations;
    return report;
}

CheckReport check_realizability(const Term& term, const CheckOptions& options)
{
    require_derivable(term);
    auto machines = derive_all(term, role_sets(term));
    inject_fault(machines, options.inject);
    return check_machines(term, machines, options.limits);
}

std::set<std::vector<std::string>> local_traces(const StateMachine& sm)
{
    std::set<std::vector<std::string>> out;
    // Stack of (region, current state id); the bottom entry is the machine.
    using Frame = std::pair<const Region*, std::string>;
    std::function<void(std::vector<Frame>, std::vector<std::string>)> walk =
        [&](std::vector<Frame> stack, std::vector<std::string> acc) {
            const auto& [region, id] = stack.back();
            const State* s = region->find_state(id);
            if (!s) return;
            if (s->kind == StateKind::Composite && s->children) {
                stack.emplace_back(s->children.get(), s->children->initial);
                walk(std::move(stack), std::move(acc));
                return;
            }
            if (s->kind == StateKind::Final) {
                if (stack.size() == 1) {
                    out.insert(std::move(acc));
                    return;
                }
                stack.pop_back();
            } else {
                for (const auto& a : s->actions) acc.push_back(to_string(a));
            }
            const auto& [cur_region, cur_id] = stack.back();
            for (const auto& t : cur_region->transitions) {
                if (t.source != cur_id) continue;
                auto next = stack;
                next.back().second = t.target;
                walk(std::move(next), acc);
            }
        };
    walk({{&sm, sm.initial}}, {});
    return out;
}

}  // namespace chordc
