#include "chordc/graph.hpp"

#include <array>
#include <map>
#include <set>
#include <utility>

#include "chordc/errors.hpp"

namespace chordc {

namespace {

constexpr std::array<std::pair<NodeKind, std::string_view>, 7> kNodeKindNames{{
    {NodeKind::Initial, "initial"},
    {NodeKind::Final, "final"},
    {NodeKind::Collab, "collab"},
    {NodeKind::Decision, "decision"},
    {NodeKind::Merge, "merge"},
    {NodeKind::Fork, "fork"},
    {NodeKind::Join, "join"},
}};

std::string graph_path(const std::string& prefix, const ActivityGraph& g)
{
    return prefix + "graph(" + g.name + ")";
}

void validate_into(const ActivityGraph& g, const std::string& prefix, ValidationReport& out)
{
    const std::string path = graph_path(prefix, g);
    std::map<std::string, const ActivityNode*> nodes;
    std::map<std::string, int> in_degree;
    std::map<std::string, int> out_degree;
    int initials = 0;
    int finals = 0;

    for (const auto& n : g.nodes) {
        const std::string npath = path + "/" + n.id;
        if (n.id.empty()) out.push_back({path, "node with empty id"});
        if (!nodes.emplace(n.id, &n).second) out.push_back({npath, "duplicate node id"});
        if (n.kind == NodeKind::Initial) ++initials;
        if (n.kind == NodeKind::Final) ++finals;
        if (n.kind == NodeKind::Collab) {
            if (n.subgraph)
                validate_into(*n.subgraph, npath + "/", out);
            else if (n.name.empty())
                out.push_back({npath, "collaboration without name"});
        } else if (n.subgraph) {
            out.push_back({npath, "nested graph on a control node"});
        }
    }
    if (initials != 1) out.push_back({path, "expected exactly one InitialNode, found " + std::to_string(initials)});
    if (finals != 1) out.push_back({path, "expected exactly one FinalNode, found " + std::to_string(finals)});

    std::set<std::string> edge_ids;
    std::map<std::string, std::vector<std::string>> adjacent;
    for (const auto& e : g.edges) {
        const std::string epath = path + "/" + e.id;
        if (!edge_ids.insert(e.id).second) out.push_back({epath, "duplicate edge id"});
        const bool src_ok = nodes.count(e.source) > 0;
        const bool dst_ok = nodes.count(e.target) > 0;
        if (!src_ok) out.push_back({epath, "unknown source node " + e.source});
        if (!dst_ok) out.push_back({epath, "unknown target node " + e.target});
        if (!src_ok || !dst_ok) continue;
        ++out_degree[e.source];
        ++in_degree[e.target];
        adjacent[e.source].push_back(e.target);
        adjacent[e.target].push_back(e.source);
    }

    for (const auto& n : g.nodes) {
        const std::string npath = path + "/" + n.id;
        const int in = in_degree[n.id];
        const int outd = out_degree[n.id];
        auto expect = [&](bool ok, const std::string& what) {
            if (!ok)
                out.push_back({npath, std::string(to_string(n.kind)) + " node " + what + " (has " +
                                          std::to_string(in) + " in, " + std::to_string(outd) + " out)"});
        };
        switch (n.kind) {
        case NodeKind::Initial: expect(in == 0 && outd == 1, "needs 0 incoming and 1 outgoing edge"); break;
        case NodeKind::Final: expect(outd == 0 && in == 1, "needs 1 incoming and 0 outgoing edges"); break;
        case NodeKind::Collab: expect(in == 1 && outd == 1, "needs 1 incoming and 1 outgoing edge"); break;
        case NodeKind::Decision:
        case NodeKind::Fork: expect(in == 1 && outd >= 2, "needs 1 incoming and at least 2 outgoing edges"); break;
        case NodeKind::Merge:
        case NodeKind::Join: expect(in >= 2 && outd == 1, "needs at least 2 incoming and 1 outgoing edge"); break;
        }
    }

    if (!g.nodes.empty()) {
        std::set<std::string> seen{g.nodes.front().id};
        std::vector<std::string> work{g.nodes.front().id};
        while (!work.empty()) {
            const std::string id = work.back();
            work.pop_back();
            for (const auto& next : adjacent[id])
                if (seen.insert(next).second) work.push_back(next);
        }
        for (const auto& n : g.nodes)
            if (!seen.count(n.id)) out.push_back({path + "/" + n.id, "not connected to the rest of the graph"});
    }
}

Term with_name(const Term& term, const std::string& name)
{
    if (name.empty() || !term.is_binary() || !term.name().empty()) return term;
    return Term::binary(term.kind(), term.left(), term.right(), name);
}

struct Item {
    SeqMode mode;
    Term term;
};

Term fold_sequence(const std::vector<Item>& items)
{
    if (items.empty()) return Term::epsilon();
    Term out = items.back().term;
    for (std::size_t k = items.size() - 1; k-- > 0;) {
        const TermKind kind = items[k + 1].mode == SeqMode::Strong ? TermKind::StrongSeq : TermKind::WeakSeq;
        out = Term::binary(kind, items[k].term, out);
    }
    return out;
}

Term fold_branches(TermKind kind, const std::vector<Term>& branches)
{
    Term out = branches.back();
    for (std::size_t k = branches.size() - 1; k-- > 0;) out = Term::binary(kind, branches[k], out);
    return out;
}

class Recovery {
public:
    explicit Recovery(const ActivityGraph& g) : g_(g)
    {
        for (std::size_t k = 0; k < g.nodes.size(); ++k) {
            index_[g.nodes[k].id] = k;
            if (g.nodes[k].kind == NodeKind::Initial) initial_ = k;
        }
        outs_.resize(g.nodes.size());
        ins_.resize(g.nodes.size());
        for (std::size_t k = 0; k < g.edges.size(); ++k) {
            outs_[index_.at(g.edges[k].source)].push_back(k);
            ins_[index_.at(g.edges[k].target)].push_back(k);
        }
        find_back_edges();
    }

    Term run()
    {
        visited_.insert(initial_);
        Walk w = walk(outs_[initial_].front());
        if (w.via_back_edge || node(w.end).kind != NodeKind::Final)
            throw UnstructuredGraph({node(w.end).id}, "top-level flow does not end at the FinalNode");
        std::vector<std::string> unvisited;
        for (std::size_t k = 0; k < g_.nodes.size(); ++k)
            if (!visited_.count(k)) unvisited.push_back(g_.nodes[k].id);
        if (!unvisited.empty())
            throw UnstructuredGraph(unvisited, "nodes not covered by any structured region");
        return with_name(fold_sequence(w.items), g_.name);
    }

private:
    struct Walk {
        std::vector<Item> items;
        std::size_t end = 0;  // Merge/Join/Final (or loop header) that stopped the walk
        bool via_back_edge = false;
    };

    const ActivityNode& node(std::size_t k) const { return g_.nodes[k]; }
    const ActivityEdge& edge(std::size_t k) const { return g_.edges[k]; }
    std::size_t target(std::size_t e) const { return index_.at(edge(e).target); }

    void find_back_edges()
    {
        // Iterative DFS; an edge into a node still on the stack closes a loop.
        std::vector<int> color(g_.nodes.size(), 0);
        std::vector<std::pair<std::size_t, std::size_t>> stack{{initial_, 0}};
        color[initial_] = 1;
        while (!stack.empty()) {
            auto& [n, next] = stack.back();
            if (next == outs_[n].size()) {
                color[n] = 2;
                stack.pop_back();
                continue;
            }
            const std::size_t e = outs_[n][next++];
            const std::size_t t = target(e);
            if (color[t] == 1)
                back_edges_.insert(e);
            else if (color[t] == 0) {
                color[t] = 1;
                stack.push_back({t, 0});
            }
        }
    }

    bool is_loop_header(std::size_t n) const
    {
        for (auto e : ins_[n])
            if (back_edges_.count(e)) return true;
        return false;
    }

    Term collab_term(const ActivityNode& n)
    {
        if (!n.subgraph) return Term::sub_collab(n.name, n.sr, n.tr, n.pr);
        return Recovery(*n.subgraph).run();
    }

    Walk walk(std::size_t e)
    {
        Walk w;
        if (++depth_ > g_.nodes.size() + 1)
            throw UnstructuredGraph({edge(e).id}, "control flow does not reduce");
        for (;;) {
            const std::size_t n = target(e);
            if (back_edges_.count(e)) {
                w.end = n;
                w.via_back_edge = true;
                break;
            }
            visited_.insert(n);
            const ActivityNode& cur = node(n);
            if (cur.kind == NodeKind::Collab) {
                w.items.push_back({edge(e).mode, collab_term(cur)});
                e = outs_[n].front();
                continue;
            }
            if (cur.kind == NodeKind::Merge && is_loop_header(n)) {
                e = loop(n, edge(e).mode, w);
                if (w.via_back_edge || e == kStop) break;
                continue;
            }
            if (cur.kind == NodeKind::Decision || cur.kind == NodeKind::Fork) {
                const SeqMode mode = edge(e).mode;
                auto [term, closing] = region(n);
                w.items.push_back({mode, term});
                e = outs_[closing].front();
                continue;
            }
            // Final, Join, plain Merge: the end of this sequence.
            w.end = n;
            break;
        }
        --depth_;
        return w;
    }

    static constexpr std::size_t kStop = static_cast<std::size_t>(-1);

    // Decision..Merge or Fork..Join. Returns the term and the closing node.
    std::pair<Term, std::size_t> region(std::size_t open)
    {
        const bool fork = node(open).kind == NodeKind::Fork;
        const NodeKind closer = fork ? NodeKind::Join : NodeKind::Merge;
        std::vector<Term> branches;
        std::optional<std::size_t> closing;
        for (auto e : outs_[open]) {
            Walk b = walk(e);
            const bool ok = !b.via_back_edge && node(b.end).kind == closer && (!closing || *closing == b.end);
            if (!ok) {
                std::vector<std::string> ids{node(open).id, node(b.end).id};
                if (closing) ids.push_back(node(*closing).id);
                throw UnstructuredGraph(ids, std::string("branches of ") + std::string(to_string(node(open).kind)) +
                                                 " node do not close at one matching " +
                                                 std::string(to_string(closer)) + " node");
            }
            if (b.items.empty())
                throw UnstructuredGraph({node(open).id, node(b.end).id}, "empty branch");
            closing = b.end;
            branches.push_back(fold_sequence(b.items));
        }
        if (ins_[*closing].size() != branches.size())
            throw UnstructuredGraph({node(open).id, node(*closing).id},
                                    "closing node joins edges from outside the region");
        return {fold_branches(fork ? TermKind::Parallel : TermKind::Choice, branches), *closing};
    }

    // Loop header `header` entered with mode `mode`: header -> decision; one
    // decision branch returns to the header (body), the other leaves (exit).
    // Appends the loop and whatever follows its exit to `w`; returns the next
    // edge to follow, or kStop when `w` is complete.
    std::size_t loop(std::size_t header, SeqMode mode, Walk& w)
    {
        const std::size_t decision = target(outs_[header].front());
        if (ins_[header].size() != 2 || node(decision).kind != NodeKind::Decision || outs_[decision].size() != 2)
            throw UnstructuredGraph({node(header).id}, "loop header must be a 2-way merge followed by a 2-way decision");
        visited_.insert(decision);

        std::optional<Walk> body;
        std::optional<Walk> exit;
        std::size_t back_edge = 0;
        for (auto e : outs_[decision]) {
            Walk b = walk(e);
            if (b.via_back_edge && b.end == header && !body) {
                body = std::move(b);
                for (auto in : ins_[header])
                    if (back_edges_.count(in)) back_edge = in;
            } else {
                exit = std::move(b);
            }
        }
        // The exit may run on into an enclosing loop's back edge.
        if (!body || !exit || (exit->via_back_edge && exit->end == header))
            throw UnstructuredGraph({node(header).id, node(decision).id}, "loop needs one body branch and one exit branch");

        const Term exit_term = exit->items.empty() ? Term::epsilon() : exit->items.front().term;
        const TermKind kind = edge(back_edge).mode == SeqMode::Strong ? TermKind::StrongLoop : TermKind::WeakLoop;
        w.items.push_back({mode, Term::binary(kind, fold_sequence(body->items), exit_term)});
        for (std::size_t k = 1; k < exit->items.size(); ++k) w.items.push_back(exit->items[k]);
        w.end = exit->end;
        w.via_back_edge = exit->via_back_edge;
        return kStop;
    }

    const ActivityGraph& g_;
    std::map<std::string, std::size_t> index_;
    std::size_t initial_ = 0;
    std::vector<std::vector<std::size_t>> outs_;
    std::vector<std::vector<std::size_t>> ins_;
    std::set<std::size_t> back_edges_;
    std::set<std::size_t> visited_;
    std::size_t depth_ = 0;
};

class Renderer {
public:
    ActivityGraph render(const Term& term)
    {
        graph_.name = term.name();
        const std::string init = add_node(NodeKind::Initial);
        if (term.kind() == TermKind::Epsilon) {
            add_node(NodeKind::Final);
            add_edge(init, fin_id_, SeqMode::Strong);
            return std::move(graph_);
        }
        auto [first, last] = chain(term, true);
        add_node(NodeKind::Final);
        add_edge(init, first, SeqMode::Strong);
        add_edge(last, fin_id_, SeqMode::Strong);
        return std::move(graph_);
    }

private:
    using Span = std::pair<std::string, std::string>;

    static bool is_seq(const Term& t)
    {
        return t.kind() == TermKind::StrongSeq || t.kind() == TermKind::WeakSeq;
    }

    // The right spine of unnamed sequences, laid out as a chain.
    Span chain(const Term& term, bool top)
    {
        std::vector<std::pair<SeqMode, Term>> items;
        SeqMode mode_in = SeqMode::Strong;
        Term cur = term;
        bool first = true;
        while (is_seq(cur) && (cur.name().empty() || (first && top))) {
            items.push_back({mode_in, cur.left()});
            mode_in = cur.kind() == TermKind::StrongSeq ? SeqMode::Strong : SeqMode::Weak;
            cur = Term(cur.right());
            first = false;
        }
        if (items.empty()) return item(term, top);
        items.push_back({mode_in, cur});

        Span out;
        std::string prev;
        for (std::size_t k = 0; k < items.size(); ++k) {
            auto [entry, exit] = item(items[k].second, false);
            if (k == 0)
                out.first = entry;
            else
                add_edge(prev, entry, items[k].first);
            prev = exit;
        }
        out.second = prev;
        return out;
    }

    // One sequence element.
    Span item(const Term& term, bool top)
    {
        if (!term.name().empty() && term.is_binary() && !top) return nested(term);
        switch (term.kind()) {
        case TermKind::SubCollab: {
            const std::string id = next_node_id();
            ActivityNode n;
            n.id = id;
            n.kind = NodeKind::Collab;
            n.name = term.name();
            n.sr = term.sr();
            n.tr = term.tr();
            n.pr = term.pr();
            graph_.nodes.push_back(std::move(n));
            return {id, id};
        }
        case TermKind::StrongSeq:
        case TermKind::WeakSeq:
            // Left-nested or explicitly named: keep it as a nested graph.
            return nested(term);
        case TermKind::Choice:
        case TermKind::Parallel: {
            const bool fork = term.kind() == TermKind::Parallel;
            const std::string open = add_node(fork ? NodeKind::Fork : NodeKind::Decision);
            const auto left = chain(term.left(), false);
            const auto right = chain(term.right(), false);
            const std::string close = add_node(fork ? NodeKind::Join : NodeKind::Merge);
            add_edge(open, left.first, SeqMode::Strong);
            add_edge(left.second, close, SeqMode::Strong);
            add_edge(open, right.first, SeqMode::Strong);
            add_edge(right.second, close, SeqMode::Strong);
            return {open, close};
        }
        case TermKind::StrongLoop:
        case TermKind::WeakLoop: {
            // An empty exit is only unambiguous when nothing follows the loop.
            if (term.exit().kind() == TermKind::Epsilon && !top) return nested(term);
            const SeqMode mode = term.kind() == TermKind::StrongLoop ? SeqMode::Strong : SeqMode::Weak;
            const std::string header = add_node(NodeKind::Merge);
            const std::string decision = add_node(NodeKind::Decision);
            add_edge(header, decision, SeqMode::Strong);
            if (term.body().kind() == TermKind::Epsilon) {
                add_edge(decision, header, mode);
            } else {
                const auto body = chain(term.body(), false);
                add_edge(decision, body.first, SeqMode::Strong);
                add_edge(body.second, header, mode);
            }
            if (term.exit().kind() == TermKind::Epsilon) return {header, decision};
            const auto exit = is_seq(term.exit()) ? nested(term.exit()) : item(term.exit(), false);
            add_edge(decision, exit.first, SeqMode::Strong);
            return {header, exit.second};
        }
        case TermKind::Epsilon: break;
        }
        throw std::invalid_argument("render_graph: epsilon outside a loop");
    }

    Span nested(const Term& term)
    {
        const std::string id = next_node_id();
        ActivityNode n;
        n.id = id;
        n.kind = NodeKind::Collab;
        n.subgraph = std::make_shared<const ActivityGraph>(Renderer().render(term));
        graph_.nodes.push_back(std::move(n));
        return {id, id};
    }

    std::string add_node(NodeKind kind)
    {
        ActivityNode n;
        n.kind = kind;
        n.id = kind == NodeKind::Final ? fin_id_ : next_node_id();
        graph_.nodes.push_back(n);
        return n.id;
    }

    void add_edge(const std::string& from, const std::string& to, SeqMode mode)
    {
        graph_.edges.push_back({"e" + std::to_string(++edges_), from, to, mode});
    }

    std::string next_node_id() { return "n" + std::to_string(++nodes_); }

    ActivityGraph graph_;
    unsigned nodes_ = 0;
    unsigned edges_ = 0;
    const std::string fin_id_ = "n0";
};

}  // namespace

std::string_view to_string(NodeKind kind)
{
    for (const auto& [k, name] : kNodeKindNames)
        if (k == kind) return name;
    return "?";
}

std::optional<NodeKind> node_kind_from_string(std::string_view text)
{
    for (const auto& [k, name] : kNodeKindNames)
        if (name == text) return k;
    return std::nullopt;
}

std::string_view to_string(SeqMode mode) { return mode == SeqMode::Strong ? "strong" : "weak"; }

std::optional<SeqMode> seq_mode_from_string(std::string_view text)
{
    if (text == "strong") return SeqMode::Strong;
    if (text == "weak") return SeqMode::Weak;
    return std::nullopt;
}

bool operator==(const ActivityNode& a, const ActivityNode& b)
{
    if (a.id != b.id || a.kind != b.kind || a.name != b.name || a.sr != b.sr || a.tr != b.tr || a.pr != b.pr)
        return false;
    if (!a.subgraph || !b.subgraph) return !a.subgraph && !b.subgraph;
    return *a.subgraph == *b.subgraph;
}

ValidationReport validate_graph(const ActivityGraph& g)
{
    ValidationReport out;
    validate_into(g, "", out);
    return out;
}

Term recover_term(const ActivityGraph& g)
{
    const ValidationReport report = validate_graph(g);
    if (!report.empty()) {
        std::vector<std::string> problems;
        for (const auto& v : report) problems.push_back(to_string(v));
        throw InvalidModel(std::move(problems));
    }
    return Recovery(g).run();
}

ActivityGraph render_graph(const Term& term)
{
    return Renderer().render(term);
}

}  // namespace chordc
