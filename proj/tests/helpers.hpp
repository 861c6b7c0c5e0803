#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "dpocl/analysis.hpp"
#include "dpocl/parser.hpp"
#include "dpocl/planner.hpp"

namespace testing {

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline std::string fixture_path(const std::string& name) {
    return std::string(DPOCL_FIXTURE_DIR) + "/" + name;
}

inline dpocl::Domain load_domain(const std::string& name) {
    auto parsed = dpocl::parse_domain(slurp(fixture_path(name)), name);
    if (!parsed.ok()) {
        std::string msg = "fixture domain " + name + " failed to parse:";
        for (const auto& d : parsed.diagnostics) msg += "\n  " + d.to_string();
        throw std::runtime_error(msg);
    }
    return *parsed.value;
}

inline dpocl::Problem load_problem(const std::string& name,
                                   const dpocl::Domain& domain) {
    auto parsed = dpocl::parse_problem(slurp(fixture_path(name)), domain, name);
    if (!parsed.ok()) {
        std::string msg = "fixture problem " + name + " failed to parse:";
        for (const auto& d : parsed.diagnostics) msg += "\n  " + d.to_string();
        throw std::runtime_error(msg);
    }
    return *parsed.value;
}

inline dpocl::Feedback load_feedback(const std::string& name,
                                     const dpocl::Domain& domain) {
    auto parsed =
        dpocl::parse_feedback(slurp(fixture_path(name)), domain.predicates, name);
    if (!parsed.ok()) throw std::runtime_error("fixture feedback failed: " + name);
    return *parsed.value;
}

// Find the unique step instantiating `op` whose first bound argument is
// `first_arg`; empty id when absent.
inline dpocl::StepId find_step_named(const dpocl::PlanGraph& plan,
                                     const std::string& op,
                                     const std::string& first_arg) {
    for (const dpocl::Step& s : plan.steps) {
        if (s.operator_name != op) continue;
        if (first_arg.empty()) return s.id;
        if (!s.args.empty() &&
            plan.bindings.apply(s.args[0]) == dpocl::Term::constant(first_arg))
            return s.id;
    }
    return {};
}

inline dpocl::PlanGraph plan_discourse() {
    dpocl::Domain domain = load_domain("discourse.dom");
    dpocl::Problem problem = load_problem("discourse.prob", domain);
    auto result = dpocl::plan(domain, problem, {});
    if (result.outcome != dpocl::SearchOutcome::Solution)
        throw std::runtime_error("discourse fixture did not solve");
    return *result.solution;
}

}  // namespace testing
