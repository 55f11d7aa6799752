// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chordc/derivation.hpp"
#include "chordc/errors.hpp"
#include "chordc/semantics.hpp"
#include "chordc/validate.hpp"
#include "cli.hpp"
#include "support.hpp"

using namespace chordc;
using namespace chordc::testing;
namespace fs = std::filesystem;

namespace {

const std::vector<Role> kRoles{"CHU", "HA", "Patient", "SAMU-regulator", "SMUR", "VLS"};

struct Outcome {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why)
    {
        if (ok) detail = why;
        ok = false;
    }
    void require(bool cond, const std::string& why)
    {
        if (!cond) fail(why);
    }
};

int run_cli(const std::vector<std::string>& args, std::string* out_text = nullptr, std::string* err_text = nullptr)
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("chordc-acceptance-" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    return p;
}

const State* find_composite(const Region& region, const std::string& name)
{
    for (const auto& s : region.states) {
        if (s.kind == StateKind::Composite && s.name == name) return &s;
        if (s.children)
            if (const State* inner = find_composite(*s.children, name)) return inner;
    }
    return nullptr;
}

void collect(const Region& region, std::vector<const State*>& out)
{
    for (const auto& s : region.states) {
        out.push_back(&s);
        if (s.children) collect(*s.children, out);
    }
}

std::vector<Action> actions(const Region& region)
{
    std::vector<const State*> states;
    collect(region, states);
    std::vector<Action> out;
    for (const State* s : states) out.insert(out.end(), s->actions.begin(), s->actions.end());
    return out;
}

template <class T>
std::size_t count_of(const std::vector<Action>& acts)
{
    return static_cast<std::size_t>(
        std::count_if(acts.begin(), acts.end(), [](const Action& a) { return std::holds_alternative<T>(a); }));
}

// --- criteria -------------------------------------------------------------------

Outcome case_study_golden()
{
    Outcome o;
    const fs::path dir = scratch("golden");
    std::string err;
    if (run_cli({"derive", model_path("telemedicine.json"), "--all", "-o", dir.string()}, nullptr, &err) != 0) {
        o.fail("derive --all failed: " + err);
        return o;
    }
    std::map<Role, StateMachine> machines;
    for (const auto& role : kRoles) {
        const std::string name = role + ".fsm.json";
        const std::string produced = read_text((dir / name).string());
        o.require(produced == read_text(golden_dir() + "/telemedicine/" + name), name + " differs from golden");
        machines[role] = parse_fsm_json(produced);
    }
    fs::remove_all(dir);

    std::vector<const State*> chu_states;
    collect(machines["CHU"], chu_states);
    std::size_t pseudo = 0;
    for (const State* s : chu_states)
        if (s->kind == StateKind::ChoicePseudo && s->name == "Transfer") ++pseudo;
    o.require(pseudo == 1, "CHU has " + std::to_string(pseudo) + " Transfer choice pseudostates");

    const Action choicem_send = SendAction{{MessageKind::Choicem, "CHU", "SMUR", "SendingVLS"}};
    const Action choicem_recv = ReceiveAction{{MessageKind::Choicem, "CHU", "SMUR", "SendingVLS"}};
    if (const State* vls = find_composite(machines["CHU"], "SendingVLS")) {
        const auto acts = actions(*vls->children);
        o.require(!acts.empty() && acts.back() == choicem_send, "CHU SendingVLS does not end with the Choicem send");
    } else {
        o.fail("CHU has no SendingVLS composite");
    }
    if (const State* smur = find_composite(machines["CHU"], "SendingSMUR"))
        o.require(count_of<SendAction>(actions(*smur->children)) == 0, "CHU SendingSMUR sends messages");
    else
        o.fail("CHU has no SendingSMUR composite");

    if (const State* vls = find_composite(machines["SMUR"], "SendingVLS"))
        o.require(actions(*vls->children) == std::vector<Action>{choicem_recv},
                  "SMUR SendingVLS is not exactly the Choicem receive");
    else
        o.fail("SMUR has no SendingVLS composite");

    for (const char* branch : {"SendingVLS", "SendingSMUR"}) {
        const State* c = find_composite(machines["HA"], branch);
        if (!c) {
            o.fail(std::string("HA has no ") + branch + " composite");
            continue;
        }
        const auto acts = actions(*c->children);
        o.require(count_of<DomainAction>(acts) == 1 && acts.size() == 1,
                  std::string("HA ") + branch + " is not a single domain action");
    }
    return o;
}

Outcome role_set_agreement()
{
    Outcome o;
    TermGenerator gen(20240611u, {"r1", "r2", "r3", "r4"});
    std::set<TermKind> seen;
    for (int k = 0; k < 1000; ++k) {
        const Term t = gen.any(4);
        for_each_node(t, [&](const Term& n, const NodePath&) { seen.insert(n.kind()); });
        std::vector<RoleSets> expected;
        naive_sets(t, expected);
        const RoleSetTable table = role_sets(t);
        if (table.nodes.size() != expected.size()) {
            o.fail("node count differs on " + to_string(t));
            continue;
        }
        for (std::size_t n = 0; n < expected.size(); ++n) {
            const RoleSets& got = table.nodes[n].sets;
            o.require(got == expected[n], "mismatch at " + table.nodes[n].path + " of " + to_string(t));
            o.require(std::includes(got.pr.begin(), got.pr.end(), got.sr.begin(), got.sr.end()) &&
                          std::includes(got.pr.begin(), got.pr.end(), got.tr.begin(), got.tr.end()),
                      "subset law broken at " + table.nodes[n].path + " of " + to_string(t));
        }
    }
    o.require(seen.size() == 8, "only " + std::to_string(seen.size()) + " of 8 variants generated");
    return o;
}

// The exhaustive family: two distinct leaf templates, depth <= 3, local
// choice valid.
std::vector<Term> realizability_suite()
{
    const auto templates = leaf_templates();
    std::vector<Term> out;
    for (std::size_t i = 0; i < templates.size(); ++i)
        for (std::size_t j = i + 1; j < templates.size(); ++j)
            for (const Term& t : enumerate_terms(templates[i], templates[j], 3))
                if (validate_term(t).empty()) out.push_back(t);
    return out;
}

Outcome realizability(const std::vector<Term>& suite)
{
    Outcome o;
    for (const Term& t : suite) {
        try {
            const CheckReport r = check_realizability(t);
            o.require(r.equivalent, "not equivalent: " + to_string(t));
            o.require(r.deadlock_count == 0, "deadlock: " + to_string(t));
            o.require(r.complementarity_ok, "complementarity broken: " + to_string(t));
        } catch (const Error& e) {
            o.fail(to_string(t) + ": " + e.what());
        }
    }
    o.detail = o.ok ? std::to_string(suite.size()) + " terms" : o.detail;
    return o;
}

Outcome coordination_counts(const std::vector<Term>& suite)
{
    Outcome o;
    for (const Term& t : suite) {
        std::size_t flowm = 0;
        std::size_t choicem = 0;
        std::function<void(const Term&)> walk = [&](const Term& n) {
            if (n.is_leaf()) return;
            std::vector<RoleSets> rows;
            const RoleSets l = naive_sets(n.left(), rows);
            const RoleSets r = naive_sets(n.right(), rows);
            if (n.kind() == TermKind::StrongSeq)
                for (const auto& from : l.tr) flowm += set_minus(r.sr, {from}).size();
            if (n.kind() == TermKind::Choice) choicem += set_minus(l.pr, r.pr).size() + set_minus(r.pr, l.pr).size();
            walk(n.left());
            walk(n.right());
        };
        walk(t);
        const CoordinationCounts got = count_coordination(derive_all(t, role_sets(t)));
        o.require(got.flowm_sends == flowm, "flowm " + std::to_string(got.flowm_sends) + " != " +
                                                std::to_string(flowm) + " on " + to_string(t));
        o.require(got.choicem_sends == choicem, "choicem " + std::to_string(got.choicem_sends) + " != " +
                                                    std::to_string(choicem) + " on " + to_string(t));
    }
    return o;
}

Outcome fault_sensitivity()
{
    Outcome o;
    std::string out;
    const int code = run_cli({"check", "--json", model_path("telemedicine.json"), "--inject", "drop-choicem"}, &out);
    o.require(code == cli::kCheckFailed, "drop-choicem exit " + std::to_string(code));
    bool smur = false;
    try {
        const auto doc = nlohmann::json::parse(out);
        o.require(doc["deadlock_count"].get<std::size_t>() >= 1, "no deadlock reported");
        for (const auto& d : doc["deadlocks"])
            for (const auto& b : d["roles"])
                if (b["role"] == "SMUR" && b["action"].get<std::string>().rfind("?Choicem(", 0) == 0) smur = true;
    } catch (const nlohmann::json::exception& e) {
        o.fail(std::string("bad report: ") + e.what());
    }
    o.require(smur, "no deadlock blocked on SMUR's Choicem receive");

    const int flowm = run_cli({"check", "--json", model_path("strong_seq.json"), "--inject", "drop-flowm"}, &out);
    o.require(flowm == cli::kCheckFailed, "drop-flowm exit " + std::to_string(flowm));
    try {
        const auto doc = nlohmann::json::parse(out);
        o.require(doc["deadlock_count"].get<std::size_t>() > 0 || !doc["equivalent"].get<bool>(),
                  "drop-flowm went unnoticed");
    } catch (const nlohmann::json::exception& e) {
        o.fail(std::string("bad report: ") + e.what());
    }
    return o;
}

Outcome determinism()
{
    Outcome o;
    const fs::path a = scratch("run-a");
    const fs::path b = scratch("run-b");
    o.require(run_cli({"derive", model_path("telemedicine.json"), "--all", "-o", a.string()}) == 0, "first run failed");
    o.require(run_cli({"derive", model_path("telemedicine.json"), "--all", "-o", b.string()}) == 0, "second run failed");
    for (const auto& role : kRoles) {
        const std::string name = role + ".fsm.json";
        o.require(read_text((a / name).string()) == read_text((b / name).string()), name + " differs between runs");
    }
    fs::remove_all(a.parent_path());

    for (const auto& entry : fs::directory_iterator(golden_dir() + "/telemedicine")) {
        const std::string path = entry.path().string();
        if (path.size() < 9 || path.substr(path.size() - 9) != ".fsm.json") continue;
        const std::string text = read_text(path);
        const StateMachine sm = parse_fsm_json(text);
        o.require(emit_fsm_json(sm) == text, entry.path().filename().string() + " does not round-trip");
        o.require(parse_fsm_json(emit_fsm_json(sm)) == sm, entry.path().filename().string() + " parse mismatch");
    }
    return o;
}

Outcome boundary()
{
    Outcome o;
    const std::pair<const char*, const char*> models[] = {{"fork_join.json", "parallel"}, {"loop.json", "strong_loop"}};
    for (const auto& [model, kind] : models) {
        const std::string path = model_path(model);
        o.require(run_cli({"validate", path}) == cli::kOk, std::string(model) + " fails validate");
        std::string rows;
        o.require(run_cli({"rolesets", path}, &rows) == cli::kOk, std::string(model) + " fails rolesets");
        o.require(rows.find(std::string("(") + kind + ")") != std::string::npos,
                  std::string(model) + " has no " + kind + " row");
        std::string err;
        const int code = run_cli({"derive", path, "--all", "-o", scratch("boundary").string()}, nullptr, &err);
        o.require(code == cli::kUnsupported, std::string(model) + " derive exit " + std::to_string(code));
        o.require(err.find("UnsupportedConstruct") != std::string::npos, std::string(model) + " error: " + err);
    }
    fs::remove_all(scratch("boundary").parent_path());
    return o;
}

}  // namespace

int main()
{
    using clock = std::chrono::steady_clock;
    int failures = 0;

    auto report = [&](int n, const std::string& title, double limit_s, const std::function<Outcome()>& body) {
        const auto start = clock::now();
        Outcome o;
        try {
            o = body();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(clock::now() - start).count();
        if (limit_s > 0 && secs >= limit_s) o.fail("took " + std::to_string(secs) + " s");
        if (!o.ok) ++failures;
        std::cout << (o.ok ? "PASS" : "FAIL") << " criterion " << n << ": " << title << " (" << secs << " s)";
        if (!o.detail.empty()) std::cout << " - " << o.detail;
        std::cout << std::endl;
    };

    report(1, "case-study machines match golden files", 1.0, case_study_golden);
    report(2, "role sets agree with the naive evaluator", 5.0, role_set_agreement);

    std::vector<Term> suite;
    report(3, "exhaustive two-leaf suite is realizable", 60.0, [&] {
        suite = realizability_suite();
        return realizability(suite);
    });
    report(4, "coordination counts follow the closed forms", 0, [&] { return coordination_counts(suite); });
    report(5, "injected faults are detected", 0, fault_sensitivity);
    report(6, "derivation and serialization are deterministic", 0, determinism);
    report(7, "fork/join and loops are refused by derive", 0, boundary);

    return failures == 0 ? 0 : 1;
}
