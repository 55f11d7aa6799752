#pragma once

// Shared fixtures for the test programs. The reference evaluators here are
// written independently of the library (plain loops over plain containers) so
// they can act as oracles.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "chordc/codec.hpp"
#include "chordc/model.hpp"
#include "chordc/rolesets.hpp"
#include "chordc/semantics.hpp"

namespace chordc::testing {

inline std::string models_dir() { return CHORDC_MODELS_DIR; }
inline std::string golden_dir() { return CHORDC_GOLDEN_DIR; }
inline std::string model_path(const std::string& name) { return models_dir() + "/" + name; }

inline std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline ModelDocument load_model(const std::string& name) { return parse_model(read_text(model_path(name))); }
inline Term load_term(const std::string& name) { return model_term(load_model(name)); }

inline Term leaf(const std::string& name, RoleSet sr, RoleSet tr, RoleSet pr)
{
    return Term::sub_collab(name, std::move(sr), std::move(tr), std::move(pr));
}

/// Leaf with a single role that starts and terminates.
inline Term solo(const std::string& name, const Role& r) { return leaf(name, {r}, {r}, {r}); }

// --- random terms -----------------------------------------------------------------

class TermGenerator {
public:
    TermGenerator(unsigned seed, std::vector<Role> roles) : rng_(seed), roles_(std::move(roles)) {}

    RoleSet nonempty_subset(const RoleSet& from)
    {
        std::vector<Role> pool(from.begin(), from.end());
        for (;;) {
            RoleSet out;
            for (const auto& r : pool)
                if (coin()) out.insert(r);
            if (!out.empty()) return out;
        }
    }

    Term random_leaf()
    {
        const RoleSet all(roles_.begin(), roles_.end());
        RoleSet pr = nonempty_subset(all);
        RoleSet sr = nonempty_subset(pr);
        RoleSet tr = nonempty_subset(pr);
        return leaf("L" + std::to_string(next_name_++), sr, tr, pr);
    }

    /// Any of the eight kinds, epsilon included anywhere.
    Term any(int depth)
    {
        static constexpr TermKind kinds[] = {TermKind::StrongSeq,  TermKind::WeakSeq,  TermKind::Choice,
                                             TermKind::Parallel,   TermKind::StrongLoop, TermKind::WeakLoop};
        const int pick = uniform(0, depth <= 1 ? 1 : 7);
        if (pick == 0) return random_leaf();
        if (pick == 1) return depth <= 1 ? random_leaf() : Term::epsilon();
        const TermKind kind = kinds[pick - 2];
        Term l = any(depth - 1);
        Term r = any(depth - 1);
        return Term::binary(kind, l, r, coin() && coin() ? "N" + std::to_string(next_name_++) : std::string{});
    }

    /// Sequences and choices only; no epsilon.
    Term derivable(int depth)
    {
        if (depth <= 1 || uniform(0, 3) == 0) return random_leaf();
        static constexpr TermKind kinds[] = {TermKind::StrongSeq, TermKind::WeakSeq, TermKind::Choice};
        const TermKind kind = kinds[uniform(0, 2)];
        Term l = derivable(depth - 1);
        Term r = derivable(depth - 1);
        return Term::binary(kind, l, r);
    }

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin() { return uniform(0, 1) == 1; }

private:
    std::mt19937 rng_;
    std::vector<Role> roles_;
    int next_name_ = 0;
};

// --- naive role-set evaluator -----------------------------------------------------

inline RoleSet set_union(const RoleSet& a, const RoleSet& b)
{
    RoleSet out = a;
    for (const auto& x : b) out.insert(x);
    return out;
}

inline RoleSet set_minus(const RoleSet& a, const RoleSet& b)
{
    RoleSet out;
    for (const auto& x : a)
        if (!b.count(x)) out.insert(x);
    return out;
}

/// One row per node in preorder (left child first), straight from the table.
inline RoleSets naive_sets(const Term& t, std::vector<RoleSets>& rows)
{
    const std::size_t slot = rows.size();
    rows.emplace_back();
    RoleSets out;
    if (t.kind() == TermKind::SubCollab) {
        out = {t.sr(), t.tr(), t.pr()};
    } else if (t.kind() != TermKind::Epsilon) {
        const RoleSets a = naive_sets(t.left(), rows);
        const RoleSets b = naive_sets(t.right(), rows);
        out.pr = set_union(a.pr, b.pr);
        switch (t.kind()) {
        case TermKind::WeakSeq:
            out.sr = set_union(a.sr, set_minus(b.sr, a.pr));
            out.tr = set_union(b.tr, set_minus(a.tr, b.pr));
            break;
        case TermKind::StrongSeq:
            out.sr = a.sr;
            out.tr = b.tr;
            break;
        case TermKind::Choice:
        case TermKind::Parallel:
            out.sr = set_union(a.sr, b.sr);
            out.tr = set_union(a.tr, b.tr);
            break;
        case TermKind::StrongLoop:
            out.sr = set_union(a.sr, b.sr);
            out.tr = t.left().kind() == TermKind::Epsilon ? a.sr : b.tr;
            break;
        case TermKind::WeakLoop:
            out.sr = set_union(a.sr, b.sr);
            out.tr = set_union(b.tr, set_minus(a.tr, b.pr));
            break;
        default:
            break;
        }
    }
    rows[slot] = out;
    return out;
}

// --- brute-force trace oracle -----------------------------------------------------
//
// Sequences and choices only. For every way of resolving the choices, every
// permutation of the selected leaves' events is kept if it satisfies the
// ordering constraints written out directly:
//   * leaf blocks: starting roles < other roles < terminating-only roles;
//   * a role's events follow leaf order;
//   * after a choice, a role absent from the taken branch but present in the
//     other one acts only after the decider is done with the taken branch
//     (and after whatever the decider itself was waiting for there);
//   * StrongSeq(L, R): activity of TR(L) roles in L precedes the events of
//     other SR(R) roles in R.

class BruteForceOracle {
public:
    explicit BruteForceOracle(const Term& term) : term_(term) { index(term, 0); }

    TraceSet traces()
    {
        TraceSet out;
        const std::size_t n = choices_.size();
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            side_.clear();
            for (std::size_t k = 0; k < n; ++k) side_[choices_[k]] = static_cast<int>((mask >> k) & 1u);
            if (!canonical(0)) continue;
            scenario(out);
        }
        return out;
    }

private:
    struct Ev {
        int leaf;
        std::string collab;
        Role role;
    };

    // Node ids are preorder positions; leaves are numbered in term order.
    struct Info {
        Term term;
        RoleSets sets;
        int first_leaf = 0;
        int end_leaf = 0;
        int left = -1;
        int right = -1;
    };

    int index(const Term& t, int first_leaf)
    {
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back({t, {}, first_leaf, first_leaf, -1, -1});
        std::vector<RoleSets> rows;
        nodes_[static_cast<std::size_t>(id)].sets = naive_sets(t, rows);
        if (t.is_leaf()) {
            nodes_[static_cast<std::size_t>(id)].end_leaf = first_leaf + 1;
            return id;
        }
        if (t.kind() == TermKind::Choice) choices_.push_back(id);
        const int l = index(t.left(), first_leaf);
        const int r = index(t.right(), node(l).end_leaf);
        auto& me = nodes_[static_cast<std::size_t>(id)];
        me.left = l;
        me.right = r;
        me.end_leaf = node(r).end_leaf;
        return id;
    }

    const Info& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }

    // A choice buried in an unselected branch must keep side 0 so that each
    // scenario is enumerated once.
    bool canonical(int id, bool live = true) const
    {
        const Info& n = node(id);
        if (n.left < 0) return true;
        bool ok = true;
        if (n.term.kind() == TermKind::Choice) {
            const int s = side_.at(id);
            if (!live && s != 0) return false;
            ok = canonical(n.left, live && s == 0) && canonical(n.right, live && s == 1);
        } else {
            ok = canonical(n.left, live) && canonical(n.right, live);
        }
        return ok;
    }

    // Events of active leaves under `id`.
    void collect(int id, std::vector<int>& active_nodes) const
    {
        active_nodes.push_back(id);
        const Info& n = node(id);
        if (n.left < 0) return;
        if (n.term.kind() == TermKind::Choice) {
            collect(side_.at(id) == 0 ? n.left : n.right, active_nodes);
            return;
        }
        collect(n.left, active_nodes);
        collect(n.right, active_nodes);
    }

    std::vector<int> events_of(const std::vector<Ev>& evs, int id, const Role* role) const
    {
        std::vector<int> out;
        const Info& n = node(id);
        for (std::size_t k = 0; k < evs.size(); ++k)
            if (evs[k].leaf >= n.first_leaf && evs[k].leaf < n.end_leaf && (!role || evs[k].role == *role))
                out.push_back(static_cast<int>(k));
        return out;
    }

    RoleSet notified(int choice) const
    {
        const Info& n = node(choice);
        const int taken = side_.at(choice) == 0 ? n.left : n.right;
        const int other = side_.at(choice) == 0 ? n.right : n.left;
        return set_minus(node(other).sets.pr, node(taken).sets.pr);
    }

    // Events that must precede role r's notification at `choice`.
    std::vector<int> before_notice(const std::vector<Ev>& evs, const std::set<int>& active, int choice) const
    {
        const Info& n = node(choice);
        const Role decider = *n.sets.sr.begin();
        const int taken = side_.at(choice) == 0 ? n.left : n.right;
        std::vector<int> out = events_of(evs, taken, &decider);
        for (int c : active) {
            if (node(c).term.kind() != TermKind::Choice) continue;
            if (node(c).first_leaf < node(taken).first_leaf || node(c).end_leaf > node(taken).end_leaf) continue;
            if (!notified(c).count(decider)) continue;
            auto more = before_notice(evs, active, c);
            out.insert(out.end(), more.begin(), more.end());
        }
        return out;
    }

    void scenario(TraceSet& out) const
    {
        std::vector<int> active_list;
        collect(0, active_list);
        const std::set<int> active(active_list.begin(), active_list.end());

        std::vector<Ev> evs;
        for (int id : active_list) {
            const Info& n = node(id);
            if (!n.term.is_leaf()) continue;
            for (const auto& r : n.term.pr()) evs.push_back({n.first_leaf, n.term.name(), r});
        }

        std::vector<std::pair<int, int>> before;
        auto all_before = [&](const std::vector<int>& xs, const std::vector<int>& ys) {
            for (int x : xs)
                for (int y : ys)
                    if (x != y) before.emplace_back(x, y);
        };

        for (std::size_t a = 0; a < evs.size(); ++a)
            for (std::size_t b = 0; b < evs.size(); ++b) {
                const Ev& x = evs[a];
                const Ev& y = evs[b];
                if (x.role == y.role && x.leaf < y.leaf) before.emplace_back(a, b);
                if (x.leaf == y.leaf && block(x) < block(y)) before.emplace_back(a, b);
            }

        for (int id : active) {
            const Info& n = node(id);
            if (n.term.kind() == TermKind::Choice) {
                const auto pre = before_notice(evs, active, id);
                for (const auto& r : notified(id)) {
                    std::vector<int> later;
                    for (std::size_t k = 0; k < evs.size(); ++k)
                        if (evs[k].role == r && evs[k].leaf >= n.end_leaf) later.push_back(static_cast<int>(k));
                    all_before(pre, later);
                }
            }
            if (n.term.kind() == TermKind::StrongSeq) {
                const Info& l = node(n.left);
                const Info& r = node(n.right);
                for (const auto& from : l.sets.tr) {
                    std::vector<int> src = events_of(evs, n.left, &from);
                    for (int c : active)
                        if (node(c).term.kind() == TermKind::Choice && node(c).first_leaf >= l.first_leaf &&
                            node(c).end_leaf <= l.end_leaf && notified(c).count(from)) {
                            auto more = before_notice(evs, active, c);
                            src.insert(src.end(), more.begin(), more.end());
                        }
                    for (const auto& to : r.sets.sr)
                        if (to != from) all_before(src, events_of(evs, n.right, &to));
                }
            }
        }

        std::vector<int> perm(evs.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::vector<int> pos(evs.size());
        do {
            for (std::size_t k = 0; k < perm.size(); ++k) pos[static_cast<std::size_t>(perm[k])] = static_cast<int>(k);
            const bool ok = std::all_of(before.begin(), before.end(), [&](const auto& p) {
                return pos[static_cast<std::size_t>(p.first)] < pos[static_cast<std::size_t>(p.second)];
            });
            if (!ok) continue;
            Trace t;
            for (int k : perm) t.push_back({evs[static_cast<std::size_t>(k)].collab, evs[static_cast<std::size_t>(k)].role});
            out.insert(std::move(t));
        } while (std::next_permutation(perm.begin(), perm.end()));
    }

    int block(const Ev& e) const
    {
        for (const auto& n : nodes_) {
            if (!n.term.is_leaf() || n.first_leaf != e.leaf) continue;
            if (n.term.sr().count(e.role)) return 0;
            if (n.term.tr().count(e.role)) return 2;
            return 1;
        }
        return 0;
    }

    Term term_;
    std::vector<Info> nodes_;
    std::vector<int> choices_;
    std::map<int, int> side_;
};

inline TraceSet brute_force_traces(const Term& term) { return BruteForceOracle(term).traces(); }

// --- exhaustive two-leaf family -------------------------------------------------------------

/// Leaf shapes over roles {a, b, c} used to populate the exhaustive suite.
inline std::vector<RoleSets> leaf_templates()
{
    return {
        {{"a"}, {"a"}, {"a"}},
        {{"a"}, {"b"}, {"a", "b"}},
        {{"b"}, {"b"}, {"b", "c"}},
        {{"a"}, {"c"}, {"a", "b", "c"}},
        {{"a", "b"}, {"a"}, {"a", "b"}},
        {{"c"}, {"a", "c"}, {"a", "c"}},
        {{"b"}, {"a"}, {"a", "b", "c"}},
        {{"a", "c"}, {"b", "c"}, {"a", "b", "c"}},
    };
}

/// Every term of depth <= `depth` (a lone leaf has depth 1) whose leaves are
/// instances of `x` or `y`, combined with StrongSeq, WeakSeq and Choice. Leaf
/// instances get unique names in term order.
inline std::vector<Term> enumerate_terms(const RoleSets& x, const RoleSets& y, int depth)
{
    // Shapes are built over placeholder leaves and renamed afterwards.
    std::vector<std::vector<Term>> by_depth(static_cast<std::size_t>(depth) + 1);
    by_depth[1] = {leaf("X", x.sr, x.tr, x.pr), leaf("Y", y.sr, y.tr, y.pr)};
    std::vector<Term> upto = by_depth[1];
    for (int d = 2; d <= depth; ++d) {
        // One child sits exactly one level down, so each shape appears once.
        const auto& deepest = by_depth[static_cast<std::size_t>(d) - 1];
        auto& next = by_depth[static_cast<std::size_t>(d)];
        for (const auto& l : upto)
            for (const auto& r : upto) {
                const bool deep = std::find(deepest.begin(), deepest.end(), l) != deepest.end() ||
                                  std::find(deepest.begin(), deepest.end(), r) != deepest.end();
                if (!deep) continue;
                for (TermKind k : {TermKind::StrongSeq, TermKind::WeakSeq, TermKind::Choice})
                    next.push_back(Term::binary(k, l, r));
            }
        upto.insert(upto.end(), next.begin(), next.end());
    }

    std::vector<Term> out;
    for (const auto& shape : upto) {
        int counter = 0;
        std::function<Term(const Term&)> rename = [&](const Term& t) -> Term {
            if (t.is_leaf()) return leaf(t.name() + std::to_string(++counter), t.sr(), t.tr(), t.pr());
            Term l = rename(t.left());
            Term r = rename(t.right());
            return Term::binary(t.kind(), l, r);
        };
        out.push_back(rename(shape));
    }
    return out;
}

}  // namespace chordc::testing
