// Command-line front end: plan, verify, analyze, replan, export-dot.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dpocl/analysis.hpp"
#include "dpocl/parser.hpp"
#include "dpocl/planner.hpp"
#include "dpocl/serialize.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoPlan = 1;     // exhaustion, budget, failed verification
constexpr int kExitDiagnostic = 2; // bad input

struct CommonOpts {
    std::string domain_path;
    std::string problem_path;
    std::string plan_path;
    std::string feedback_path;
    std::string out_path;
    std::string dot_path;
    std::string root;
    std::string strategy = "dfs";
    unsigned max_nodes = 0;  // 0: unset, fall back to env then default
    unsigned long long seed = 0;
    bool quiet = false;
};

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << content;
    return bool(out);
}

void print_diagnostics(const std::vector<dpocl::Diagnostic>& diags) {
    for (const auto& d : diags) std::cerr << d.to_string() << '\n';
}

std::optional<dpocl::Domain> load_domain(const CommonOpts& opts) {
    auto text = read_file(opts.domain_path);
    if (!text) {
        std::cerr << "error: cannot read domain file '" << opts.domain_path
                  << "'\n";
        return std::nullopt;
    }
    auto parsed = dpocl::parse_domain(*text, opts.domain_path);
    print_diagnostics(parsed.diagnostics);
    if (!parsed.ok()) return std::nullopt;
    return parsed.value;
}

std::optional<dpocl::Problem> load_problem(const CommonOpts& opts,
                                           const dpocl::Domain& domain) {
    auto text = read_file(opts.problem_path);
    if (!text) {
        std::cerr << "error: cannot read problem file '" << opts.problem_path
                  << "'\n";
        return std::nullopt;
    }
    auto parsed = dpocl::parse_problem(*text, domain, opts.problem_path);
    print_diagnostics(parsed.diagnostics);
    if (!parsed.ok()) return std::nullopt;
    return parsed.value;
}

std::optional<dpocl::PlanGraph> load_plan(const CommonOpts& opts,
                                          const dpocl::Domain& domain) {
    auto text = read_file(opts.plan_path);
    if (!text) {
        std::cerr << "error: cannot read plan file '" << opts.plan_path << "'\n";
        return std::nullopt;
    }
    try {
        return dpocl::deserialize_plan(*text, domain);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return std::nullopt;
    }
}

std::optional<dpocl::Feedback> load_feedback(const CommonOpts& opts,
                                             const dpocl::Domain& domain) {
    auto text = read_file(opts.feedback_path);
    if (!text) {
        std::cerr << "error: cannot read feedback file '" << opts.feedback_path
                  << "'\n";
        return std::nullopt;
    }
    auto parsed =
        dpocl::parse_feedback(*text, domain.predicates, opts.feedback_path);
    print_diagnostics(parsed.diagnostics);
    if (!parsed.ok()) return std::nullopt;
    return parsed.value;
}

dpocl::SearchConfig make_config(const CommonOpts& opts) {
    dpocl::SearchConfig config;
    config.strategy = opts.strategy == "best-first"
                          ? dpocl::Strategy::BestFirst
                          : dpocl::Strategy::DepthFirst;
    config.seed = opts.seed;
    if (opts.max_nodes > 0) {
        config.max_nodes = opts.max_nodes;
    } else if (const char* env = std::getenv("DPOCL_MAX_NODES")) {
        try {
            config.max_nodes = (std::uint32_t)std::stoul(env);
        } catch (...) {
            config.max_nodes = 10000;
        }
    }
    return config;
}

void describe_plan(const dpocl::PlanGraph& plan, bool quiet) {
    if (quiet) return;
    std::cout << "plan with " << plan.steps.size() << " steps, "
              << plan.causal_links.size() << " causal links, "
              << plan.decomp_links.size() << " decomposition links\n";
    for (const dpocl::Step& s : plan.steps) {
        if (s.is_null()) continue;
        std::cout << "  " << s.id << ": ";
        std::cout << s.operator_name << '(';
        for (std::size_t i = 0; i < s.args.size(); ++i) {
            if (i) std::cout << ' ';
            std::cout << plan.bindings.apply(s.args[i]).to_string();
        }
        std::cout << ')';
        if (s.scope) std::cout << "  [in " << *s.scope << ']';
        std::cout << '\n';
    }
}

int emit_outputs(const dpocl::PlanGraph& plan, const CommonOpts& opts) {
    if (!opts.out_path.empty() &&
        !write_file(opts.out_path, dpocl::serialize_plan(plan))) {
        std::cerr << "error: cannot write '" << opts.out_path << "'\n";
        return kExitDiagnostic;
    }
    if (!opts.dot_path.empty() &&
        !write_file(opts.dot_path, dpocl::export_dot(plan))) {
        std::cerr << "error: cannot write '" << opts.dot_path << "'\n";
        return kExitDiagnostic;
    }
    return kExitOk;
}

int report_search_failure(const dpocl::SearchResult& result) {
    if (result.outcome == dpocl::SearchOutcome::BudgetExceeded)
        std::cerr << "no plan: node budget exceeded after "
                  << result.nodes_expanded << " nodes\n";
    else
        std::cerr << "no plan: search space exhausted after "
                  << result.nodes_expanded << " nodes\n";
    return kExitNoPlan;
}

int cmd_plan(const CommonOpts& opts) {
    auto domain = load_domain(opts);
    if (!domain) return kExitDiagnostic;
    auto problem = load_problem(opts, *domain);
    if (!problem) return kExitDiagnostic;

    auto result = dpocl::plan(*domain, *problem, make_config(opts));
    if (result.outcome != dpocl::SearchOutcome::Solution)
        return report_search_failure(result);

    const dpocl::PlanGraph& solution = *result.solution;
    if (!opts.quiet)
        std::cout << "solution found after " << result.nodes_expanded
                  << " nodes\n";
    describe_plan(solution, opts.quiet);
    return emit_outputs(solution, opts);
}

int cmd_verify(const CommonOpts& opts) {
    auto domain = load_domain(opts);
    if (!domain) return kExitDiagnostic;
    auto plan = load_plan(opts, *domain);
    if (!plan) return kExitDiagnostic;
    dpocl::VerifyReport report = dpocl::verify_complete(*plan);
    if (report.complete()) {
        if (!opts.quiet) std::cout << "plan verifies complete\n";
        return kExitOk;
    }
    std::cout << report.to_string();
    return kExitNoPlan;
}

int cmd_analyze(const CommonOpts& opts) {
    auto domain = load_domain(opts);
    if (!domain) return kExitDiagnostic;
    auto plan = load_plan(opts, *domain);
    if (!plan) return kExitDiagnostic;
    auto feedback = load_feedback(opts, *domain);
    if (!feedback) return kExitDiagnostic;

    dpocl::FailureTrace trace = dpocl::propagate_feedback(*plan, *feedback);
    print_diagnostics(trace.diagnostics);
    if (dpocl::has_errors(trace.diagnostics)) return kExitDiagnostic;

    if (!opts.quiet) {
        std::cout << "failed steps:";
        for (const auto& id : trace.failed_steps) {
            const dpocl::Step* s = plan->find_step(id);
            std::cout << ' ' << id;
            if (s && !s->is_null()) std::cout << '[' << dpocl::step_label(*plan, id) << ']';
        }
        std::cout << '\n';
    }

    auto rec = dpocl::replanning_roots(*plan, trace);
    for (const auto& warning : rec.warnings)
        std::cout << "warning: " << warning << '\n';
    if (rec.roots.empty()) {
        std::cout << "no replanning required\n";
        return kExitOk;
    }
    for (const auto& root : rec.roots) {
        const dpocl::Step* s = plan->find_step(root.step);
        std::cout << "root " << root.step;
        if (s) std::cout << " " << dpocl::step_label(*plan, root.step);
        std::cout << "  # re-derive " << root.addresses.to_string() << '\n';
    }
    return kExitOk;
}

int cmd_replan(const CommonOpts& opts) {
    auto domain = load_domain(opts);
    if (!domain) return kExitDiagnostic;
    auto plan = load_plan(opts, *domain);
    if (!plan) return kExitDiagnostic;
    auto feedback = load_feedback(opts, *domain);
    if (!feedback) return kExitDiagnostic;

    dpocl::FailureTrace trace = dpocl::propagate_feedback(*plan, *feedback);
    print_diagnostics(trace.diagnostics);
    if (dpocl::has_errors(trace.diagnostics)) return kExitDiagnostic;

    dpocl::SearchResult result;
    try {
        result =
            dpocl::replan_subtree(*domain, *plan, opts.root, make_config(opts),
                                  &trace);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDiagnostic;
    }
    if (result.outcome != dpocl::SearchOutcome::Solution)
        return report_search_failure(result);
    if (!opts.quiet)
        std::cout << "replanned subtree under " << opts.root << " after "
                  << result.nodes_expanded << " nodes\n";
    describe_plan(*result.solution, opts.quiet);
    return emit_outputs(*result.solution, opts);
}

int cmd_export_dot(const CommonOpts& opts) {
    auto domain = load_domain(opts);
    if (!domain) return kExitDiagnostic;
    auto plan = load_plan(opts, *domain);
    if (!plan) return kExitDiagnostic;
    std::string dot = dpocl::export_dot(*plan);
    if (!opts.dot_path.empty() || !opts.out_path.empty()) {
        const std::string& path =
            opts.dot_path.empty() ? opts.out_path : opts.dot_path;
        if (!write_file(path, dot)) {
            std::cerr << "error: cannot write '" << path << "'\n";
            return kExitDiagnostic;
        }
    } else {
        std::cout << dot;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dpocl: a decompositional partial-order causal-link planner"};
    app.require_subcommand(1);

    CommonOpts opts;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--strategy", opts.strategy, "best-first or dfs")
            ->check(CLI::IsMember({"best-first", "dfs"}));
        cmd->add_option("--max-nodes", opts.max_nodes,
                        "search node budget (env DPOCL_MAX_NODES as fallback)");
        cmd->add_option("--seed", opts.seed, "random seed (reserved)");
        cmd->add_flag("--quiet", opts.quiet, "suppress progress output");
    };

    CLI::App* plan_cmd = app.add_subcommand("plan", "construct a plan");
    plan_cmd->add_option("--domain", opts.domain_path)->required();
    plan_cmd->add_option("--problem", opts.problem_path)->required();
    plan_cmd->add_option("--out", opts.out_path, "write the plan document here");
    plan_cmd->add_option("--dot", opts.dot_path, "write a DOT rendering here");
    add_common(plan_cmd);

    CLI::App* verify_cmd =
        app.add_subcommand("verify", "check a plan document for completeness");
    verify_cmd->add_option("--domain", opts.domain_path)->required();
    verify_cmd->add_option("--plan", opts.plan_path)->required();
    add_common(verify_cmd);

    CLI::App* analyze_cmd = app.add_subcommand(
        "analyze", "propagate execution feedback and list replanning roots");
    analyze_cmd->add_option("--domain", opts.domain_path)->required();
    analyze_cmd->add_option("--plan", opts.plan_path)->required();
    analyze_cmd->add_option("--feedback", opts.feedback_path)->required();
    add_common(analyze_cmd);

    CLI::App* replan_cmd =
        app.add_subcommand("replan", "rebuild the subtree under a root step");
    replan_cmd->add_option("--domain", opts.domain_path)->required();
    replan_cmd->add_option("--plan", opts.plan_path)->required();
    replan_cmd->add_option("--feedback", opts.feedback_path)->required();
    replan_cmd->add_option("--root", opts.root, "composite step id")->required();
    replan_cmd->add_option("--out", opts.out_path);
    replan_cmd->add_option("--dot", opts.dot_path);
    add_common(replan_cmd);

    CLI::App* dot_cmd =
        app.add_subcommand("export-dot", "render a plan document as DOT");
    dot_cmd->add_option("--domain", opts.domain_path)->required();
    dot_cmd->add_option("--plan", opts.plan_path)->required();
    dot_cmd->add_option("--out", opts.out_path);
    dot_cmd->add_option("--dot", opts.dot_path);
    add_common(dot_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitDiagnostic;
    }

    try {
        if (plan_cmd->parsed()) return cmd_plan(opts);
        if (verify_cmd->parsed()) return cmd_verify(opts);
        if (analyze_cmd->parsed()) return cmd_analyze(opts);
        if (replan_cmd->parsed()) return cmd_replan(opts);
        if (dot_cmd->parsed()) return cmd_export_dot(opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDiagnostic;
    }
    return kExitDiagnostic;
}
