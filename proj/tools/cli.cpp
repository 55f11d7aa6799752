#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chordc/codec.hpp"
#include "chordc/derivation.hpp"
#include "chordc/errors.hpp"
#include "chordc/rolesets.hpp"
#include "chordc/semantics.hpp"
#include "chordc/validate.hpp"

namespace chordc::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Options {
    std::string model;
    bool json = false;
    // rolesets
    std::string node;
    // derive
    std::string role;
    bool all = false;
    std::string output;
    bool flatten = false;
    std::string format = "json";
    // check / trace
    unsigned loop_bound = 0;
    std::optional<std::size_t> cap;
    std::string inject;
    bool oracle = false;
    bool system = false;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

std::size_t effective_cap(const Options& opt)
{
    if (opt.cap) return *opt.cap;
    if (const char* env = std::getenv("CHORDC_CAP"); env && *env) {
        try {
            return static_cast<std::size_t>(std::stoull(env));
        } catch (const std::exception&) {
            throw Error(std::string("CHORDC_CAP is not a number: ") + env);
        }
    }
    return kDefaultCap;
}

ExploreLimits limits(const Options& opt) { return {effective_cap(opt), opt.loop_bound}; }

json roles_json(const RoleSet& roles) { return json(std::vector<Role>(roles.begin(), roles.end())); }

json trace_json(const Trace& t)
{
    json out = json::array();
    for (const auto& e : t) out.push_back({{"collab", e.collab}, {"role", e.role}});
    return out;
}

// --- validate -----------------------------------------------------------------

int cmd_validate(const Options& opt, std::ostream& out)
{
    const ModelDocument doc = parse_model(read_file(opt.model));
    ValidationReport problems;
    if (const auto* g = std::get_if<ActivityGraph>(&doc.body)) problems = validate_graph(*g);
    if (problems.empty()) problems = validate_term(model_term(doc));

    if (opt.json) {
        json violations = json::array();
        for (const auto& v : problems) violations.push_back({{"path", v.path}, {"message", v.message}});
        out << json{{"valid", problems.empty()}, {"violations", violations}}.dump(2) << "\n";
    } else if (problems.empty()) {
        out << opt.model << ": valid\n";
    } else {
        for (const auto& v : problems) out << to_string(v) << "\n";
    }
    return problems.empty() ? kOk : kInvalidInput;
}

// --- rolesets -----------------------------------------------------------------

int cmd_rolesets(const Options& opt, std::ostream& out, std::ostream& err)
{
    const Term term = model_term(parse_model(read_file(opt.model)));
    const RoleSetTable table = role_sets(term);
    std::vector<const NodeRoleSets*> rows;
    if (!opt.node.empty()) {
        const NodeRoleSets* row = table.find(opt.node);
        if (!row) {
            err << "error: no node " << opt.node << "\n";
            return kInvalidInput;
        }
        rows.push_back(row);
    } else {
        for (const auto& n : table.nodes) rows.push_back(&n);
    }
    for (const auto& w : table.warnings) err << "warning: " << w << "\n";

    if (opt.json) {
        json nodes = json::array();
        for (const auto* n : rows)
            nodes.push_back({{"path", n->path},
                             {"label", n->label},
                             {"kind", std::string(to_string(n->kind))},
                             {"sr", roles_json(n->sets.sr)},
                             {"tr", roles_json(n->sets.tr)},
                             {"pr", roles_json(n->sets.pr)}});
        out << json{{"nodes", nodes}}.dump(2) << "\n";
        return kOk;
    }
    for (const auto* n : rows)
        out << n->label << " (" << to_string(n->kind) << ") SR=" << format_roles(n->sets.sr)
            << " TR=" << format_roles(n->sets.tr) << " PR=" << format_roles(n->sets.pr) << "\n";
    return kOk;
}

// --- derive -------------------------------------------------------------------

int cmd_derive(const Options& opt, std::ostream& out)
{
    const ModelDocument doc = parse_model(read_file(opt.model));
    const Term term = model_term(doc);
    require_derivable(term);
    const RoleSetTable sets = role_sets(term);

    auto render = [&](const StateMachine& sm) {
        const StateMachine m = opt.flatten ? flatten(sm) : sm;
        return opt.format == "dot" ? emit_dot(m) : emit_fsm_json(m);
    };

    if (!opt.all) {
        if (std::find(doc.roles.begin(), doc.roles.end(), opt.role) == doc.roles.end()) throw UnknownRole(opt.role);
        const std::string text = render(derive_role(term, sets, opt.role));
        if (opt.output.empty() || opt.output == "-")
            out << text;
        else
            write_file(opt.output, text);
        return kOk;
    }

    const fs::path dir = opt.output.empty() ? fs::path("chordc-out") : fs::path(opt.output);
    fs::create_directories(dir);
    const std::string ext = opt.format == "dot" ? ".dot" : ".fsm.json";
    for (const auto& [role, sm] : derive_all(term, sets, doc.roles)) {
        const fs::path file = dir / (role + ext);
        write_file(file, render(sm));
        out << file.string() << "\n";
    }
    return kOk;
}

// --- check --------------------------------------------------------------------

Injection parse_injection(const std::string& text)
{
    if (text.empty()) return Injection::None;
    if (text == "drop-choicem") return Injection::DropChoicem;
    if (text == "drop-flowm") return Injection::DropFlowm;
    throw Error("unknown injection " + text);
}

json report_json(const CheckReport& r)
{
    auto traces = [](const std::vector<Trace>& ts) {
        json out = json::array();
        for (const auto& t : ts) out.push_back(trace_json(t));
        return out;
    };
    json deadlocks = json::array();
    for (const auto& d : r.deadlocks) {
        json roles = json::array();
        for (const auto& b : d.roles)
            roles.push_back({{"role", b.role}, {"state", b.state}, {"action", b.action}});
        deadlocks.push_back({{"events_done", d.events_done}, {"roles", roles}});
    }
    json diags = json::array();
    for (const auto& d : r.strict_barrier_diagnostics)
        diags.push_back({{"path", d.path}, {"witness", trace_json(d.witness)}});
    return {
        {"ok", r.ok()},
        {"equivalent", r.equivalent},
        {"oracle_traces", r.oracle_trace_count},
        {"system_traces", r.system_trace_count},
        {"configurations", r.configurations},
        {"missing_count", r.missing_count},
        {"missing_traces", traces(r.missing_traces)},
        {"extra_count", r.extra_count},
        {"extra_traces", traces(r.extra_traces)},
        {"deadlock_count", r.deadlock_count},
        {"deadlocks", deadlocks},
        {"complementarity_ok", r.complementarity_ok},
        {"complementarity_problems", r.complementarity_problems},
        {"coordination", {{"flowm_sends", r.counts.flowm_sends}, {"choicem_sends", r.counts.choicem_sends}}},
        {"strict_barrier_diagnostics", diags},
    };
}

void report_text(const CheckReport& r, std::ostream& out)
{
    out << "equivalent: " << (r.equivalent ? "yes" : "no") << " (" << r.oracle_trace_count << " intended, "
        << r.system_trace_count << " produced, " << r.configurations << " configurations)\n";
    for (const auto& t : r.missing_traces) out << "  missing: " << to_string(t) << "\n";
    if (r.missing_count > r.missing_traces.size())
        out << "  ... " << r.missing_count - r.missing_traces.size() << " more missing\n";
    for (const auto& t : r.extra_traces) out << "  extra: " << to_string(t) << "\n";
    if (r.extra_count > r.extra_traces.size())
        out << "  ... " << r.extra_count - r.extra_traces.size() << " more extra\n";
    out << "deadlocks: " << r.deadlock_count << "\n";
    for (const auto& d : r.deadlocks) out << "  deadlock: " << d.summary() << "\n";
    out << "complementarity: " << (r.complementarity_ok ? "ok" : "broken") << "\n";
    for (const auto& p : r.complementarity_problems) out << "  " << p << "\n";
    out << "coordination: flowm_sends=" << r.counts.flowm_sends << " choicem_sends=" << r.counts.choicem_sends
        << "\n";
    out << "strict-barrier diagnostics: " << r.strict_barrier_diagnostics.size() << "\n";
    for (const auto& d : r.strict_barrier_diagnostics)
        out << "  " << d.path << ": " << to_string(d.witness) << "\n";
    out << "result: " << (r.ok() ? "PASS" : "FAIL") << "\n";
}

int cmd_check(const Options& opt, std::ostream& out)
{
    const Term term = model_term(parse_model(read_file(opt.model)));
    const CheckReport report = check_realizability(term, {limits(opt), parse_injection(opt.inject)});
    if (opt.json)
        out << report_json(report).dump(2) << "\n";
    else
        report_text(report, out);
    return report.ok() ? kOk : kCheckFailed;
}

// --- trace --------------------------------------------------------------------

int cmd_trace(const Options& opt, std::ostream& out)
{
    const ModelDocument doc = parse_model(read_file(opt.model));
    const Term term = model_term(doc);
    TraceSet traces;
    if (opt.system) {
        require_derivable(term);
        traces = system_traces(derive_all(term, role_sets(term), doc.roles), term, limits(opt));
    } else {
        traces = oracle_traces(term, limits(opt));
    }
    if (opt.json) {
        json all = json::array();
        for (const auto& t : traces) all.push_back(trace_json(t));
        out << json{{"traces", all}}.dump(2) << "\n";
    } else {
        for (const auto& t : traces) out << to_string(t) << "\n";
    }
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"chordc: derive and check role state machines from choreographies"};
    app.require_subcommand(1);
    Options opt;

    auto* validate = app.add_subcommand("validate", "Check a model for structural problems");
    validate->add_option("model", opt.model, "Model document")->required();
    validate->add_flag("--json", opt.json, "Machine-readable output");

    auto* rolesets = app.add_subcommand("rolesets", "Print starting/terminating/participating roles");
    rolesets->add_option("model", opt.model, "Model document")->required();
    rolesets->add_option("--node", opt.node, "Node path or name");
    rolesets->add_flag("--json", opt.json, "Machine-readable output");

    auto* derive = app.add_subcommand("derive", "Derive role state machines");
    derive->add_option("model", opt.model, "Model document")->required();
    auto* role = derive->add_option("--role", opt.role, "Role to derive");
    auto* all = derive->add_flag("--all", opt.all, "Derive every role into a directory");
    role->excludes(all);
    derive->add_option("-o,--output", opt.output, "Output file (--role) or directory (--all)");
    derive->add_flag("--flatten", opt.flatten, "Inline composite states");
    derive->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"json", "dot"}));

    auto* check = app.add_subcommand("check", "Check realizability of the derived machines");
    check->add_option("model", opt.model, "Model document")->required();
    check->add_option("--loop-bound", opt.loop_bound, "Loop unrolling bound");
    check->add_option("--cap", opt.cap, "Exploration cap");
    check->add_flag("--json", opt.json, "Machine-readable output");
    check->add_option("--inject", opt.inject, "Fault injection (testing)")
        ->check(CLI::IsMember({"drop-choicem", "drop-flowm"}))
        ->group("");

    auto* trace = app.add_subcommand("trace", "List intended or produced traces");
    trace->add_option("model", opt.model, "Model document")->required();
    auto* oracle = trace->add_flag("--oracle", opt.oracle, "Intended traces");
    auto* system = trace->add_flag("--system", opt.system, "Traces of the composed machines");
    oracle->excludes(system);
    trace->add_option("--loop-bound", opt.loop_bound, "Loop unrolling bound");
    trace->add_option("--cap", opt.cap, "Exploration cap");
    trace->add_flag("--json", opt.json, "Machine-readable output");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        if (derive->parsed() && !opt.all && opt.role.empty())
            throw CLI::RequiredError("--role or --all");
        if (trace->parsed() && !opt.oracle && !opt.system) throw CLI::RequiredError("--oracle or --system");
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInvalidInput;
    }

    try {
        if (validate->parsed()) return cmd_validate(opt, out);
        if (rolesets->parsed()) return cmd_rolesets(opt, out, err);
        if (derive->parsed()) return cmd_derive(opt, out);
        if (check->parsed()) return cmd_check(opt, out);
        return cmd_trace(opt, out);
    } catch (const UnsupportedConstruct& e) {
        err << e.what() << "\n";
        return kUnsupported;
    } catch (const TooLarge& e) {
        err << e.what() << "\n";
        return kTooLarge;
    } catch (const InvalidModel& e) {
        err << "InvalidModel:\n";
        for (const auto& p : e.problems()) err << "  " << p << "\n";
        return kInvalidInput;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return kInvalidInput;
    } catch (const fs::filesystem_error& e) {
        err << e.what() << "\n";
        return kInvalidInput;
    }
}

}  // namespace chordc::cli
