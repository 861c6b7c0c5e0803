// The refinement loop: systematic search over partial plans, resolving
// open conditions causally, expanding composite steps through their
// schemas, and protecting causal links from threats.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dpocl/domain.hpp"
#include "dpocl/plan.hpp"

namespace dpocl {

enum class Strategy { BestFirst, DepthFirst };
enum class FlawOrder { ThreatsFirst, Fifo };
enum class ReusePolicy { PreferReuse, PreferNew, Both };
enum class DedupMode { Default, On, Off };

struct SearchConfig {
    Strategy strategy = Strategy::DepthFirst;
    std::uint32_t max_nodes = 10000;
    FlawOrder flaw_order = FlawOrder::ThreatsFirst;
    ReusePolicy reuse_policy = ReusePolicy::PreferReuse;
    // Bound on non-null steps; refinements that would exceed it are not
    // generated, so exhaustion is decidable on finite domains.
    std::optional<std::uint32_t> max_steps;
    std::uint32_t max_depth = 16;  // decomposition nesting guard
    DedupMode dedup = DedupMode::Default;
    std::uint64_t seed = 0;  // reserved; search is deterministic
    // Ground conditions that may not label any causal link. Used when
    // replanning after feedback marked them unachievable.
    std::vector<Literal> banned_conditions;
};

struct SearchStats {
    std::uint64_t causal_reuse = 0;
    std::uint64_t causal_new = 0;
    std::uint64_t decompositions = 0;
    std::uint64_t promotions = 0;
    std::uint64_t demotions = 0;
    std::uint64_t separations = 0;
};

enum class SearchOutcome { Solution, Exhausted, BudgetExceeded };

struct SearchResult {
    SearchOutcome outcome = SearchOutcome::Exhausted;
    std::optional<PlanGraph> solution;
    std::uint64_t nodes_expanded = 0;
    SearchStats stats;
};

// Successors resolving one open condition: step reuse plus fresh steps
// from the operator library, each with the unifying bindings, the
// producer-before-consumer ordering and the new causal link. Candidate
// order follows the reuse policy; within fresh steps composite operators
// come before primitive ones so decompositional structure is explored
// first.
std::vector<PlanGraph> causal_refinements(const PlanGraph& plan,
                                          const OpenCondition& flaw,
                                          const Domain& domain,
                                          const SearchConfig& config = {});

// One successor per applicable schema of the flawed composite step.
std::vector<PlanGraph> decomposition_refinements(const PlanGraph& plan,
                                                 const UnexpandedComposite& flaw,
                                                 const Domain& domain,
                                                 const SearchConfig& config = {});

// Promotion, demotion, and one separation per binding pair whose
// non-codesignation defeats the threatening unifier.
std::vector<PlanGraph> threat_resolutions(const PlanGraph& plan,
                                          const Threat& flaw,
                                          const SearchConfig& config = {});

// Deterministic pick; never a backtrack point.
Flaw select_flaw(const PlanGraph& plan, const SearchConfig& config);

SearchResult plan(const Domain& domain, const Problem& problem,
                  const SearchConfig& config = {});

// Resume systematic search from an arbitrary (typically flawed) plan.
SearchResult search_from(const Domain& domain, PlanGraph root,
                         const SearchConfig& config = {});

}  // namespace dpocl
