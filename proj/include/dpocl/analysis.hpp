// Execution-feedback analysis over a completed plan: propagate failed
// and achieved conditions along causal and decomposition links, decide
// which subtrees need replanning, and split effects into those serving
// the goals and mere side effects.
#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dpocl/parser.hpp"
#include "dpocl/plan.hpp"
#include "dpocl/planner.hpp"

namespace dpocl {

struct FailureTrace {
    std::vector<CausalLink> failed_links;
    std::set<StepId> failed_steps;
    std::set<StepId> confirmed_steps;  // achieved-effect cut points
    // Each path runs from a failure origin toward the top-level final
    // step: the origin, then the composites ascended through their
    // subplan finals, then the final step itself when reached.
    std::vector<std::vector<StepId>> paths;
    // The ground conditions the feedback itself marked failed; replanning
    // may not rely on these, while derived failures stay re-derivable.
    std::vector<Literal> failed_conditions;
    std::vector<Diagnostic> diagnostics;
};

struct ReplanRoot {
    StepId step;
    Literal addresses;  // the failed condition this root can re-derive
};

struct ReplanRecommendation {
    std::vector<ReplanRoot> roots;  // most specific first
    std::vector<std::string> warnings;
};

struct EffectClassification {
    std::vector<std::pair<StepId, Literal>> intended;
    std::vector<std::pair<StepId, Literal>> side;
};

// Partition the effect instances of non-null steps: an effect is
// intended when it labels a causal link on some path, through causal
// links and decomposition boundaries, that reaches the top-level final
// step. Throws std::invalid_argument on an incomplete plan.
EffectClassification classify_effects(const PlanGraph& plan);

FailureTrace propagate_feedback(const PlanGraph& plan, const Feedback& feedback);

// Composite steps able to re-derive a distinct failed condition, walked
// along each failure path from most specific outward. Nested composites
// whose failed contribution is the same condition collapse onto the
// innermost one, and anything cut off by a confirmed step is dropped
// (surfaced as a warning instead).
ReplanRecommendation replanning_roots(const PlanGraph& plan,
                                      const FailureTrace& trace);

// Remove the subtree under `root`, restore its unexpanded flaw plus any
// orphaned open conditions, and resume search. Conditions the trace
// marked failed are banned from supporting new causal links.
SearchResult replan_subtree(const Domain& domain, const PlanGraph& plan,
                            const StepId& root, const SearchConfig& config,
                            const FailureTrace* trace = nullptr);

}  // namespace dpocl
