#include "chordc/rolesets.hpp"

#include <algorithm>
#include <iterator>
#include <stdexcept>

namespace chordc {

namespace {

RoleSet unite(const RoleSet& a, const RoleSet& b)
{
    RoleSet out = a;
    out.insert(b.begin(), b.end());
    return out;
}

RoleSet minus(const RoleSet& a, const RoleSet& b)
{
    RoleSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

class Evaluator {
public:
    explicit Evaluator(RoleSetTable* table) : table_(table) {}

    RoleSets eval(const Term& term, const NodePath& path)
    {
        std::size_t slot = 0;
        if (table_) {
            slot = table_->nodes.size();
            table_->nodes.push_back({path, term.label(path), term.kind(), {}});
        }
        RoleSets out = compute(term, path);
        if (table_) table_->nodes[slot].sets = out;
        return out;
    }

private:
    RoleSets compute(const Term& term, const NodePath& path)
    {
        switch (term.kind()) {
        case TermKind::Epsilon: return {};
        case TermKind::SubCollab: return {term.sr(), term.tr(), term.pr()};
        default: break;
        }

        const RoleSets c1 = eval(term.left(), child_path(path, term.kind(), 0));
        const RoleSets c2 = eval(term.right(), child_path(path, term.kind(), 1));
        RoleSets out;
        out.pr = unite(c1.pr, c2.pr);

        switch (term.kind()) {
        case TermKind::WeakSeq:
            out.sr = unite(c1.sr, minus(c2.sr, c1.pr));
            out.tr = unite(c2.tr, minus(c1.tr, c2.pr));
            break;
        case TermKind::StrongSeq:
            out.sr = c1.sr;
            out.tr = c2.tr;
            break;
        case TermKind::Choice:
        case TermKind::Parallel:
            out.sr = unite(c1.sr, c2.sr);
            out.tr = unite(c1.tr, c2.tr);
            break;
        case TermKind::StrongLoop:
            out.sr = unite(c1.sr, c2.sr);
            if (term.body().kind() == TermKind::Epsilon) {
                out.tr = c1.sr;
                if (table_)
                    table_->warnings.push_back(path +
                                               ": strong loop with empty body; TR taken as SR(body), which is empty");
            } else {
                out.tr = c2.tr;
            }
            break;
        case TermKind::WeakLoop:
            out.sr = unite(c1.sr, c2.sr);
            out.tr = unite(c2.tr, minus(c1.tr, c2.pr));
            break;
        default: break;
        }
        return out;
    }

    RoleSetTable* table_;
};

}  // namespace

const RoleSets& RoleSetTable::at(std::string_view path) const
{
    for (const auto& n : nodes)
        if (n.path == path) return n.sets;
    throw std::out_of_range("no term node at path " + std::string(path));
}

const NodeRoleSets* RoleSetTable::find(std::string_view path_or_name) const
{
    for (const auto& n : nodes)
        if (n.path == path_or_name) return &n;
    for (const auto& n : nodes)
        if (n.label == path_or_name) return &n;
    return nullptr;
}

RoleSetTable role_sets(const Term& term)
{
    RoleSetTable table;
    Evaluator(&table).eval(term, NodePath(kRootPath));
    return table;
}

RoleSets root_role_sets(const Term& term)
{
    return Evaluator(nullptr).eval(term, NodePath(kRootPath));
}

std::vector<LocalChoiceViolation> check_local_choice(const Term& term)
{
    std::vector<LocalChoiceViolation> out;
    for_each_node(term, [&](const Term& node, const NodePath& path) {
        const bool choice = node.kind() == TermKind::Choice;
        if (!choice && !node.is_loop()) return;
        RoleSet starting;
        for (const Term* side : {&node.left(), &node.right()}) {
            if (node.is_loop() && side->kind() == TermKind::Epsilon) continue;
            starting.merge(root_role_sets(*side).sr);
        }
        if (starting.size() != 1) out.push_back({path, std::move(starting)});
    });
    return out;
}

std::string format_roles(const RoleSet& roles)
{
    std::string out = "{";
    for (const auto& r : roles) {
        if (out.size() > 1) out += ",";
        out += r;
    }
    return out + "}";
}

std::string to_string(const LocalChoiceViolation& v)
{
    return v.path + ": LocalChoiceViolation: starting roles " + format_roles(v.starting) +
           " must be a single role";
}

}  // namespace chordc
