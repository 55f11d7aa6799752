#include <sstream>

#include "chordc/codec.hpp"

namespace chordc {

namespace {

std::string quote(std::string_view s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string cluster_id(const State& s) { return quote("cluster_" + s.id); }

const State* final_of(const Region& region)
{
    for (const auto& s : region.states)
        if (s.kind == StateKind::Final) return &s;
    return nullptr;
}

class DotWriter {
public:
    explicit DotWriter(std::ostringstream& out) : out_(out) {}

    void region(const Region& r, const std::string& indent)
    {
        for (const auto& s : r.states) state(s, indent);
        for (const auto& t : r.transitions) transition(r, t, indent);
    }

private:
    void state(const State& s, const std::string& indent)
    {
        switch (s.kind) {
        case StateKind::Initial:
            out_ << indent << quote(s.id) << " [shape=point, width=0.2, label=\"\"];\n";
            return;
        case StateKind::Final:
            out_ << indent << quote(s.id) << " [shape=doublecircle, width=0.2, label=\"\"];\n";
            return;
        case StateKind::ChoicePseudo:
            out_ << indent << quote(s.id) << " [shape=diamond, label=" << quote(s.name) << "];\n";
            return;
        case StateKind::Junction:
            out_ << indent << quote(s.id) << " [shape=circle, width=0.15, label=\"\"];\n";
            return;
        case StateKind::Simple: {
            std::string label = s.name;
            for (const auto& a : s.actions) label += "\n" + to_string(a);
            std::string escaped;
            for (char c : quote(label)) {
                if (c == '\n')
                    escaped += "\\n";
                else
                    escaped += c;
            }
            out_ << indent << quote(s.id) << " [shape=box, style=rounded, label=" << escaped << "];\n";
            return;
        }
        case StateKind::Composite:
            out_ << indent << "subgraph " << cluster_id(s) << " {\n";
            out_ << indent << "  label=" << quote(s.name) << ";\n";
            if (s.children) region(*s.children, indent + "  ");
            out_ << indent << "}\n";
            return;
        }
    }

    void transition(const Region& r, const Transition& t, const std::string& indent)
    {
        std::string src = t.source;
        std::string dst = t.target;
        std::vector<std::string> attrs;
        if (t.label) attrs.push_back("label=" + quote(*t.label));
        if (const State* s = r.find_state(t.source); s && s->kind == StateKind::Composite && s->children) {
            if (const State* f = final_of(*s->children)) src = f->id;
            attrs.push_back("ltail=" + cluster_id(*s));
        }
        if (const State* s = r.find_state(t.target); s && s->kind == StateKind::Composite && s->children) {
            dst = s->children->initial;
            attrs.push_back("lhead=" + cluster_id(*s));
        }
        out_ << indent << quote(src) << " -> " << quote(dst);
        if (!attrs.empty()) {
            out_ << " [";
            for (std::size_t k = 0; k < attrs.size(); ++k) out_ << (k ? ", " : "") << attrs[k];
            out_ << "]";
        }
        out_ << ";\n";
    }

    std::ostringstream& out_;
};

}  // namespace

std::string emit_dot(const StateMachine& sm)
{
    std::ostringstream out;
    out << "digraph " << quote("fsm_" + sm.role) << " {\n";
    out << "  compound=true;\n";
    out << "  rankdir=LR;\n";
    out << "  label=" << quote(sm.role) << ";\n";
    DotWriter(out).region(sm, "  ");
    out << "}\n";
    return out.str();
}

}  // namespace chordc
