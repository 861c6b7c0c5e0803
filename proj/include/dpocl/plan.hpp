// The plan representation: steps, ordering constraints, causal links,
// decomposition links and binding constraints, plus flaw bookkeeping,
// threat detection and the completed-plan verifier.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "dpocl/bindings.hpp"
#include "dpocl/domain.hpp"
#include "dpocl/terms.hpp"

namespace dpocl {

using StepId = std::string;

enum class StepKind { Primitive, Composite, NullInitial, NullFinal };

std::string to_string(StepKind kind);

struct Step {
    StepId id;
    std::string operator_name;  // empty for null steps
    std::vector<Term> args;
    std::vector<Literal> preconditions;
    std::vector<Literal> effects;
    StepKind kind = StepKind::Primitive;
    // Top-level steps have no scope; subplan steps carry the id of the
    // composite step whose decomposition created them.
    std::optional<StepId> scope;

    bool is_null() const {
        return kind == StepKind::NullInitial || kind == StepKind::NullFinal;
    }
    std::string display_name() const;
};

struct CausalLink {
    StepId producer;
    StepId consumer;
    Literal condition;

    bool operator==(const CausalLink& other) const;
    bool operator<(const CausalLink& other) const;
};

struct DecompLink {
    StepId parent;
    StepId sub_initial;
    StepId sub_final;

    bool operator==(const DecompLink& other) const = default;
};

// Strict precedence over steps. A decomposed composite is an interval:
// constraints on it resolve to its subplan boundary steps. Queries run
// against an incrementally maintained transitive closure, and edge
// insertion rejects cycles outright.
class OrderingSet {
public:
    void add_node(const StepId& id);
    // Replace the composite's single timeline point by the [initial,
    // final] interval of its subplan.
    void expand_interval(const StepId& composite, const StepId& sub_initial,
                         const StepId& sub_final);

    // False (and no change) when the edge would create a cycle.
    [[nodiscard]] bool add_before(const StepId& before, const StepId& after);
    // Document ingestion: record the edge even when it closes a cycle,
    // so the verifier can report the inconsistency.
    void add_edge_unchecked(const StepId& before, const StepId& after);
    bool entails_before(const StepId& a, const StepId& b) const;

    std::vector<std::pair<StepId, StepId>> base_edges() const;
    bool acyclic() const;

    bool operator==(const OrderingSet& other) const;

private:
    const StepId& start_node(const StepId& id) const;
    const StepId& end_node(const StepId& id) const;
    std::size_t index_of(const StepId& id) const;
    bool reaches(std::size_t from, std::size_t to) const;
    void close_over_edge(std::size_t from, std::size_t to);

    std::vector<StepId> nodes_;
    std::map<StepId, std::size_t> index_;
    std::map<StepId, std::pair<StepId, StepId>> intervals_;
    std::set<std::pair<std::size_t, std::size_t>> edges_;
    std::vector<std::vector<bool>> reach_;
};

struct OpenCondition {
    StepId step;
    Literal condition;
    bool operator==(const OpenCondition& other) const = default;
};

struct UnexpandedComposite {
    StepId step;
    bool operator==(const UnexpandedComposite& other) const = default;
};

struct Threat {
    StepId step;  // the threatening step
    CausalLink link;
    bool operator==(const Threat& other) const;
};

using Flaw = std::variant<OpenCondition, UnexpandedComposite, Threat>;

std::string to_string(const Flaw& flaw);

struct VerifyReport {
    std::vector<std::string> violations;
    bool complete() const { return violations.empty(); }
    std::string to_string() const;
};

struct PlanGraph {
    std::vector<Step> steps;  // insertion order
    OrderingSet ordering;
    std::vector<CausalLink> causal_links;
    std::vector<DecompLink> decomp_links;
    BindingSet bindings;
    std::vector<Flaw> flaws;  // insertion order drives FIFO flaw selection
    FreshIds fresh;

    const Step* find_step(const StepId& id) const;
    Step* find_step(const StepId& id);
    const DecompLink* decomposition_of(const StepId& parent) const;
    bool is_decomposed(const StepId& id) const;
    // Scope chain walk: true when `descendant` lies in the subtree rooted
    // at `ancestor` (inclusive of the root itself).
    bool within_subtree(const StepId& descendant, const StepId& ancestor) const;
    StepId top_initial() const;
    StepId top_final() const;

    std::string signature() const;  // canonical form for duplicate detection
};

// Two-step plan encoding the problem: the initial step's effects are the
// initial conditions, the final step's preconditions are the goals, and
// each goal contributes one open-condition flaw.
PlanGraph new_null_plan(const Problem& problem);

// True iff the ordering neither entails a before b nor c before a.
bool possibly_between(const PlanGraph& plan, const StepId& a, const StepId& b,
                      const StepId& c);

// Effects apply deletes before adds: a delete whose atom the same step
// re-adds (under current bindings) is inert, so it neither threatens a
// link nor supports a negative condition.
bool self_masked_delete(const PlanGraph& plan, const Step& step,
                        const Literal& applied_effect);

// Every (step, link) pair where the step may fall between the link's ends
// while one of its effects can unify with the negation of the condition.
std::vector<Threat> detect_threats(const PlanGraph& plan);

// Canonical flaw derivation: preconditions lacking an incoming causal
// link, composite steps lacking a decomposition, and detect_threats.
std::vector<Flaw> recompute_flaws(const PlanGraph& plan);

bool same_flaw_set(const std::vector<Flaw>& a, const std::vector<Flaw>& b);

VerifyReport verify_complete(const PlanGraph& plan);

// Drop non-null steps from which no causal link emanates, transitively.
// Requires a flaw-free plan; throws std::invalid_argument otherwise.
// Removing a composite removes its whole subtree.
PlanGraph remove_unused_steps(const PlanGraph& plan);

// Operator name with arguments resolved through the plan bindings,
// e.g. "inform(i l9)".
std::string step_label(const PlanGraph& plan, const StepId& id);

}  // namespace dpocl
