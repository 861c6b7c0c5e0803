// Versioned plan documents and DOT rendering.
#pragma once

#include <string>

#include "dpocl/domain.hpp"
#include "dpocl/plan.hpp"

namespace dpocl {

// Structured-text document carrying all five plan components plus the
// flaw set and id counters, so mid-search snapshots resume faithfully.
std::string serialize_plan(const PlanGraph& plan);

// Throws std::runtime_error on version mismatch, dangling step ids or
// malformed content.
PlanGraph deserialize_plan(const std::string& text, const Domain& domain);

// Directed graph: one node per step labeled with its bound arguments,
// solid condition-labeled edges for causal links, dashed edges from each
// decomposed composite to its subplan boundary steps. Output is
// deterministic for equal plans.
std::string export_dot(const PlanGraph& plan);

}  // namespace dpocl
