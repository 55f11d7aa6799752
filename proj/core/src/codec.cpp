#include "chordc/codec.hpp"

#include <algorithm>
#include <initializer_list>
#include <set>

#include <nlohmann/json.hpp>

#include "chordc/errors.hpp"

namespace chordc {

using nlohmann::json;

namespace {

constexpr std::string_view kFormatVersion = "1";

json parse_json(std::string_view text)
{
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // e.byte is 1-based and points just past the offending character.
        const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        std::size_t line = 1;
        std::size_t column = 1;
        for (std::size_t k = 0; k < stop; ++k) {
            if (text[k] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        std::string what = e.what();
        if (auto pos = what.find("; "); pos != std::string::npos) what = what.substr(pos + 2);
        throw SyntaxError(line, column, what);
    }
}

/// Schema-checked view of one JSON value.
class Reader {
public:
    Reader(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

    const std::string& path() const { return path_; }
    const json& value() const { return value_; }

    [[noreturn]] void fail(const std::string& what) const { throw SchemaError(path_, what); }

    const Reader& object(std::initializer_list<std::string_view> allowed) const
    {
        if (!value_.is_object()) fail("expected an object");
        for (const auto& [key, _] : value_.items())
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) fail("unknown key \"" + key + "\"");
        return *this;
    }

    bool has(const std::string& key) const { return value_.contains(key); }

    Reader at(const std::string& key) const
    {
        if (!value_.contains(key)) fail("missing key \"" + key + "\"");
        return Reader(value_.at(key), path_ + "." + key);
    }

    std::string string() const
    {
        if (!value_.is_string()) fail("expected a string");
        return value_.get<std::string>();
    }

    std::string string(const std::string& key) const { return at(key).string(); }

    std::string optional_string(const std::string& key) const { return has(key) ? string(key) : std::string{}; }

    std::vector<Reader> array() const
    {
        if (!value_.is_array()) fail("expected an array");
        std::vector<Reader> out;
        for (std::size_t k = 0; k < value_.size(); ++k)
            out.emplace_back(value_.at(k), path_ + "[" + std::to_string(k) + "]");
        return out;
    }

    std::vector<Reader> array(const std::string& key) const { return at(key).array(); }

private:
    const json& value_;
    std::string path_;
};

class ModelReader {
public:
    explicit ModelReader(const std::set<Role>& roles) : roles_(roles) {}

    RoleSet role_set(const Reader& r) const
    {
        RoleSet out;
        for (const auto& item : r.array()) {
            Role role = item.string();
            if (!roles_.count(role)) throw UnknownRole(role);
            if (!out.insert(std::move(role)).second) item.fail("duplicate role");
        }
        return out;
    }

    Term term(const Reader& r) const
    {
        if (!r.value().is_object()) r.fail("expected an object");
        const auto kind = term_kind_from_string(r.string("kind"));
        if (!kind) r.at("kind").fail("unknown term kind \"" + r.string("kind") + "\"");
        switch (*kind) {
        case TermKind::SubCollab:
            r.object({"kind", "name", "sr", "tr", "pr"});
            return Term::sub_collab(r.string("name"), role_set(r.at("sr")), role_set(r.at("tr")),
                                    role_set(r.at("pr")));
        case TermKind::Epsilon: r.object({"kind"}); return Term::epsilon();
        case TermKind::StrongLoop:
        case TermKind::WeakLoop:
            r.object({"kind", "name", "body", "exit"});
            return Term::binary(*kind, term(r.at("body")), term(r.at("exit")), r.optional_string("name"));
        default:
            r.object({"kind", "name", "left", "right"});
            return Term::binary(*kind, term(r.at("left")), term(r.at("right")), r.optional_string("name"));
        }
    }

    ActivityGraph graph(const Reader& r) const
    {
        r.object({"name", "nodes", "edges"});
        ActivityGraph g;
        g.name = r.optional_string("name");
        for (const auto& n : r.array("nodes")) g.nodes.push_back(node(n));
        for (const auto& e : r.array("edges")) {
            e.object({"id", "source", "target", "seq"});
            ActivityEdge edge{e.string("id"), e.string("source"), e.string("target"), SeqMode::Strong};
            if (e.has("seq")) {
                const auto mode = seq_mode_from_string(e.string("seq"));
                if (!mode) e.at("seq").fail("expected \"strong\" or \"weak\"");
                edge.mode = *mode;
            }
            g.edges.push_back(std::move(edge));
        }
        return g;
    }

private:
    ActivityNode node(const Reader& r) const
    {
        if (!r.value().is_object()) r.fail("expected an object");
        ActivityNode n;
        n.id = r.string("id");
        const auto kind = node_kind_from_string(r.string("kind"));
        if (!kind) r.at("kind").fail("unknown node kind \"" + r.string("kind") + "\"");
        n.kind = *kind;
        if (n.kind != NodeKind::Collab) {
            r.object({"id", "kind"});
            return n;
        }
        if (r.has("graph")) {
            r.object({"id", "kind", "graph"});
            n.subgraph = std::make_shared<const ActivityGraph>(graph(r.at("graph")));
            return n;
        }
        r.object({"id", "kind", "name", "sr", "tr", "pr"});
        n.name = r.string("name");
        n.sr = role_set(r.at("sr"));
        n.tr = role_set(r.at("tr"));
        n.pr = role_set(r.at("pr"));
        return n;
    }

    const std::set<Role>& roles_;
};

json roles_json(const RoleSet& roles)
{
    json out = json::array();
    for (const auto& r : roles) out.push_back(r);
    return out;
}

json term_json(const Term& t)
{
    json out;
    out["kind"] = std::string(to_string(t.kind()));
    switch (t.kind()) {
    case TermKind::Epsilon: return out;
    case TermKind::SubCollab:
        out["name"] = t.name();
        out["sr"] = roles_json(t.sr());
        out["tr"] = roles_json(t.tr());
        out["pr"] = roles_json(t.pr());
        return out;
    default: break;
    }
    if (!t.name().empty()) out["name"] = t.name();
    out[t.is_loop() ? "body" : "left"] = term_json(t.left());
    out[t.is_loop() ? "exit" : "right"] = term_json(t.right());
    return out;
}

json graph_json(const ActivityGraph& g)
{
    json out;
    if (!g.name.empty()) out["name"] = g.name;
    out["nodes"] = json::array();
    for (const auto& n : g.nodes) {
        json node{{"id", n.id}, {"kind", std::string(to_string(n.kind))}};
        if (n.kind == NodeKind::Collab) {
            if (n.subgraph) {
                node["graph"] = graph_json(*n.subgraph);
            } else {
                node["name"] = n.name;
                node["sr"] = roles_json(n.sr);
                node["tr"] = roles_json(n.tr);
                node["pr"] = roles_json(n.pr);
            }
        }
        out["nodes"].push_back(std::move(node));
    }
    out["edges"] = json::array();
    for (const auto& e : g.edges)
        out["edges"].push_back(
            {{"id", e.id}, {"source", e.source}, {"target", e.target}, {"seq", std::string(to_string(e.mode))}});
    return out;
}

// --- machines ---------------------------------------------------------------

json message_json(const CoordMessage& m)
{
    return {{"kind", m.kind == MessageKind::Flowm ? "flowm" : "choicem"},
            {"src", m.src},
            {"dst", m.dst},
            {"label", m.label}};
}

json action_json(const Action& a)
{
    if (const auto* d = std::get_if<DomainAction>(&a)) return {{"op", "domain"}, {"collab", d->collab}, {"role", d->role}};
    if (const auto* s = std::get_if<SendAction>(&a)) return {{"op", "send"}, {"msg", message_json(s->msg)}};
    return {{"op", "receive"}, {"msg", message_json(std::get<ReceiveAction>(a).msg)}};
}

json region_json(const Region& region)
{
    json out;
    out["initial"] = region.initial;
    out["states"] = json::array();
    for (const auto& s : region.states) {
        json state{{"id", s.id}, {"name", s.name}, {"kind", std::string(to_string(s.kind))}, {"actions", json::array()}};
        for (const auto& a : s.actions) state["actions"].push_back(action_json(a));
        if (s.children) state["children"] = region_json(*s.children);
        out["states"].push_back(std::move(state));
    }
    out["transitions"] = json::array();
    for (const auto& t : region.transitions) {
        json tr{{"id", t.id}, {"source", t.source}, {"target", t.target}};
        if (t.label) tr["label"] = *t.label;
        out["transitions"].push_back(std::move(tr));
    }
    return out;
}

CoordMessage read_message(const Reader& r)
{
    r.object({"kind", "src", "dst", "label"});
    CoordMessage m;
    const std::string kind = r.string("kind");
    if (kind == "flowm")
        m.kind = MessageKind::Flowm;
    else if (kind == "choicem")
        m.kind = MessageKind::Choicem;
    else
        r.at("kind").fail("expected \"flowm\" or \"choicem\"");
    m.src = r.string("src");
    m.dst = r.string("dst");
    m.label = r.string("label");
    return m;
}

Action read_action(const Reader& r)
{
    if (!r.value().is_object()) r.fail("expected an object");
    const std::string op = r.string("op");
    if (op == "domain") {
        r.object({"op", "collab", "role"});
        return DomainAction{r.string("collab"), r.string("role")};
    }
    if (op == "send") {
        r.object({"op", "msg"});
        return SendAction{read_message(r.at("msg"))};
    }
    if (op == "receive") {
        r.object({"op", "msg"});
        return ReceiveAction{read_message(r.at("msg"))};
    }
    r.at("op").fail("unknown action op \"" + op + "\"");
}

void read_region(const Reader& r, Region& region)
{
    region.initial = r.string("initial");
    std::set<std::string> ids;
    for (const auto& sr : r.array("states")) {
        sr.object({"id", "name", "kind", "actions", "children"});
        State s;
        s.id = sr.string("id");
        s.name = sr.string("name");
        const auto kind = state_kind_from_string(sr.string("kind"));
        if (!kind) sr.at("kind").fail("unknown state kind \"" + sr.string("kind") + "\"");
        s.kind = *kind;
        if (sr.has("actions"))
            for (const auto& ar : sr.array("actions")) s.actions.push_back(read_action(ar));
        if (sr.has("children")) {
            const Reader cr = sr.at("children");
            cr.object({"initial", "states", "transitions"});
            Region inner;
            read_region(cr, inner);
            s.children = std::make_shared<const Region>(std::move(inner));
        }
        if (!ids.insert(s.id).second) sr.at("id").fail("duplicate state id \"" + s.id + "\"");
        region.states.push_back(std::move(s));
    }
    if (!ids.count(region.initial)) r.at("initial").fail("no state with id \"" + region.initial + "\"");
    for (const auto& tr : r.array("transitions")) {
        tr.object({"id", "source", "target", "label"});
        Transition t{tr.string("id"), tr.string("source"), tr.string("target"), std::nullopt};
        if (tr.has("label")) t.label = tr.string("label");
        if (!ids.count(t.source)) tr.at("source").fail("dangling transition source \"" + t.source + "\"");
        if (!ids.count(t.target)) tr.at("target").fail("dangling transition target \"" + t.target + "\"");
        region.transitions.push_back(std::move(t));
    }
}

void check_version(const Reader& r)
{
    if (r.string("format_version") != kFormatVersion)
        r.at("format_version").fail("unsupported format_version, expected \"1\"");
}

}  // namespace

ModelDocument parse_model(std::string_view text)
{
    const json root = parse_json(text);
    const Reader r(root, "$");
    r.object({"format_version", "roles", "term", "graph"});
    check_version(r);

    ModelDocument doc;
    std::set<Role> declared;
    for (const auto& item : r.array("roles")) {
        Role role = item.string();
        if (role.empty()) item.fail("empty role id");
        if (!declared.insert(role).second) item.fail("duplicate role \"" + role + "\"");
        doc.roles.push_back(std::move(role));
    }

    if (r.has("term") == r.has("graph")) r.fail("expected exactly one of \"term\" and \"graph\"");
    const ModelReader reader(declared);
    if (r.has("term"))
        doc.body = reader.term(r.at("term"));
    else
        doc.body = reader.graph(r.at("graph"));
    return doc;
}

std::string emit_model(const ModelDocument& doc)
{
    json out;
    out["format_version"] = doc.format_version;
    out["roles"] = doc.roles;
    if (const auto* g = std::get_if<ActivityGraph>(&doc.body))
        out["graph"] = graph_json(*g);
    else
        out["term"] = term_json(std::get<Term>(doc.body));
    return out.dump(2) + "\n";
}

Term model_term(const ModelDocument& doc)
{
    if (const auto* g = std::get_if<ActivityGraph>(&doc.body)) return recover_term(*g);
    return std::get<Term>(doc.body);
}

std::string emit_fsm_json(const StateMachine& sm)
{
    json out = region_json(sm);
    out["format_version"] = kFormatVersion;
    out["role"] = sm.role;
    return out.dump(2) + "\n";
}

StateMachine parse_fsm_json(std::string_view text)
{
    const json root = parse_json(text);
    const Reader r(root, "$");
    r.object({"format_version", "role", "initial", "states", "transitions"});
    check_version(r);
    StateMachine sm;
    sm.role = r.string("role");
    read_region(r, sm);
    return sm;
}

}  // namespace chordc
