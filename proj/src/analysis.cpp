#include "dpocl/analysis.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace dpocl {

namespace {

std::vector<const CausalLink*> outgoing(const PlanGraph& plan, const StepId& id) {
    std::vector<const CausalLink*> out;
    for (const CausalLink& l : plan.causal_links)
        if (l.producer == id) out.push_back(&l);
    return out;
}

// The composite whose subplan final this is, if any.
std::optional<StepId> parent_of_final(const PlanGraph& plan, const StepId& id) {
    for (const DecompLink& d : plan.decomp_links)
        if (d.sub_final == id) return d.parent;
    return std::nullopt;
}

}  // namespace

EffectClassification classify_effects(const PlanGraph& plan) {
    VerifyReport report = verify_complete(plan);
    if (!report.complete())
        throw std::invalid_argument("classify_effects requires a complete plan:\n" +
                                    report.to_string());

    StepId top_final = plan.top_final();

    // Reachability over causal links: from a link, continue through its
    // consumer's own outgoing links; a subplan final hands over to its
    // parent composite.
    std::map<const CausalLink*, bool> reaches_goal;
    auto reaches = [&](auto&& self, const CausalLink* link,
                       std::set<const CausalLink*>& visiting) -> bool {
        auto it = reaches_goal.find(link);
        if (it != reaches_goal.end()) return it->second;
        if (!visiting.insert(link).second) return false;
        bool ok = false;
        if (link->consumer == top_final) {
            ok = true;
        } else {
            StepId carrier = link->consumer;
            if (auto parent = parent_of_final(plan, carrier)) carrier = *parent;
            for (const CausalLink* next : outgoing(plan, carrier))
                if (self(self, next, visiting)) {
                    ok = true;
                    break;
                }
        }
        visiting.erase(link);
        reaches_goal[link] = ok;
        return ok;
    };

    EffectClassification out;
    for (const Step& step : plan.steps) {
        if (step.is_null()) continue;
        for (const Literal& effect : step.effects) {
            Literal applied = plan.bindings.apply(effect);
            bool intended = false;
            for (const CausalLink* link : outgoing(plan, step.id)) {
                if (plan.bindings.apply(link->condition) != applied) continue;
                std::set<const CausalLink*> visiting;
                if (reaches(reaches, link, visiting)) {
                    intended = true;
                    break;
                }
            }
            (intended ? out.intended : out.side).emplace_back(step.id, applied);
        }
    }
    return out;
}

FailureTrace propagate_feedback(const PlanGraph& plan, const Feedback& feedback) {
    FailureTrace trace;

    // Confirmations first: they cut failure propagation.
    for (const FeedbackAssertion& a : feedback.assertions) {
        if (a.status != FeedbackAssertion::Status::Achieved) continue;
        bool matched = false;
        for (const Step& step : plan.steps) {
            if (a.locus && step.id != *a.locus) continue;
            for (const Literal& effect : step.effects)
                if (plan.bindings.apply(effect) == a.condition) {
                    trace.confirmed_steps.insert(step.id);
                    matched = true;
                }
        }
        if (!matched)
            trace.diagnostics.push_back(
                {Diagnostic::Severity::Error,
                 "achieved condition " + a.condition.to_string() +
                     " matches no effect in the plan",
                 a.span});
    }

    struct Seed {
        StepId producer;
        Literal condition;
    };
    std::vector<Seed> seeds;
    for (const FeedbackAssertion& a : feedback.assertions) {
        if (a.status != FeedbackAssertion::Status::Failed) continue;
        bool matched = false;
        for (const Step& step : plan.steps) {
            if (a.locus && step.id != *a.locus) continue;
            for (const Literal& effect : step.effects)
                if (plan.bindings.apply(effect) == a.condition) {
                    seeds.push_back({step.id, a.condition});
                    matched = true;
                    break;
                }
        }
        if (!matched)
            trace.diagnostics.push_back(
                {Diagnostic::Severity::Error,
                 "failed condition " + a.condition.to_string() +
                     " matches no effect in the plan",
                 a.span});
        else if (std::find(trace.failed_conditions.begin(),
                           trace.failed_conditions.end(),
                           a.condition) == trace.failed_conditions.end())
            trace.failed_conditions.push_back(a.condition);
    }

    std::set<CausalLink> failed_links;
    StepId top_final = plan.top_final();

    // Walk one failure forward. A step with a compromised incoming link
    // fails unless confirmed; subplan finals hand the failure to their
    // parent composite; confirmed steps stop the walk. Each seed keeps
    // its own visited set so overlapping failures still record full
    // paths.
    auto follow = [&](auto&& self, const CausalLink* link,
                      std::vector<StepId>& path,
                      std::set<const CausalLink*>& visited) -> void {
        if (!visited.insert(link).second) return;
        if (failed_links.insert(*link).second)
            trace.failed_links.push_back(*link);
        StepId next = link->consumer;
        if (trace.confirmed_steps.count(next)) return;
        if (next == top_final) {
            path.push_back(next);
            trace.paths.push_back(path);
            path.pop_back();
            return;
        }
        StepId carrier = next;
        if (auto parent = parent_of_final(plan, next)) {
            if (trace.confirmed_steps.count(*parent)) return;
            carrier = *parent;
            trace.failed_steps.insert(carrier);
            path.push_back(carrier);
        } else {
            trace.failed_steps.insert(next);
        }
        for (const CausalLink* out : outgoing(plan, carrier))
            self(self, out, path, visited);
        if (carrier != next) path.pop_back();
    };

    for (const Seed& seed : seeds) {
        const Step* producer = plan.find_step(seed.producer);
        if (!producer) continue;
        if (trace.confirmed_steps.count(seed.producer)) continue;
        if (!producer->is_null()) trace.failed_steps.insert(seed.producer);
        std::vector<StepId> path{seed.producer};
        std::set<const CausalLink*> visited;
        std::size_t paths_before = trace.paths.size();

        // Only links carrying the failed condition propagate from a seed;
        // everything downstream of a failed step propagates wholesale.
        for (const CausalLink* link : outgoing(plan, seed.producer)) {
            if (plan.bindings.apply(link->condition) != seed.condition) continue;
            follow(follow, link, path, visited);
        }
        if (trace.paths.size() == paths_before)
            trace.paths.push_back(path);  // cut before reaching the final
    }
    return trace;
}

ReplanRecommendation replanning_roots(const PlanGraph& plan,
                                      const FailureTrace& trace) {
    ReplanRecommendation rec;
    std::set<StepId> emitted;

    auto below_confirmed = [&](const StepId& id) {
        for (const StepId& confirmed : trace.confirmed_steps)
            if (plan.within_subtree(id, confirmed)) return true;
        return false;
    };

    for (const std::vector<StepId>& path : trace.paths) {
        bool reaches_final = !path.empty() && path.back() == plan.top_final();
        if (!reaches_final) {
            // The confirmation masked this failure; surface it instead of
            // recommending a repair.
            if (!path.empty())
                rec.warnings.push_back(
                    "failure at " + path.front() +
                    " is masked by an achieved condition; replan only if it "
                    "matters independently");
            continue;
        }
        // Candidate roots: composites on the path, each tagged with the
        // failed condition it hands upward. Runs of nested composites
        // handing up the same condition collapse onto the innermost,
        // which is the smallest subtree able to re-derive it.
        struct Candidate {
            StepId step;
            Literal condition;
        };
        std::vector<Candidate> candidates;
        for (const StepId& id : path) {
            const Step* step = plan.find_step(id);
            if (!step || step->kind != StepKind::Composite) continue;
            std::optional<Literal> handed;
            for (const CausalLink& link : trace.failed_links)
                if (link.producer == id) {
                    handed = plan.bindings.apply(link.condition);
                    break;
                }
            if (!handed) continue;
            candidates.push_back({id, *handed});
        }
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (i > 0 && candidates[i].condition == candidates[i - 1].condition)
                continue;
            const Candidate& c = candidates[i];
            if (below_confirmed(c.step)) continue;
            if (!emitted.insert(c.step).second) continue;
            rec.roots.push_back({c.step, c.condition});
        }
    }
    return rec;
}

SearchResult replan_subtree(const Domain& domain, const PlanGraph& plan,
                            const StepId& root, const SearchConfig& config,
                            const FailureTrace* trace) {
    const Step* root_step = plan.find_step(root);
    if (!root_step || root_step->kind != StepKind::Composite)
        throw std::invalid_argument("replan root must be a composite step");
    VerifyReport report = verify_complete(plan);
    if (!report.complete())
        throw std::invalid_argument("replan_subtree requires a complete plan:\n" +
                                    report.to_string());

    std::set<StepId> removed;
    for (const Step& step : plan.steps)
        if (step.id != root && plan.within_subtree(step.id, root))
            removed.insert(step.id);

    PlanGraph next = plan;
    next.steps.clear();
    for (const Step& s : plan.steps)
        if (!removed.count(s.id)) next.steps.push_back(s);
    next.causal_links.clear();
    for (const CausalLink& l : plan.causal_links)
        if (!removed.count(l.producer) && !removed.count(l.consumer))
            next.causal_links.push_back(l);
    next.decomp_links.clear();
    for (const DecompLink& d : plan.decomp_links)
        if (d.parent != root && !removed.count(d.parent))
            next.decomp_links.push_back(d);

    OrderingSet rebuilt;
    for (const Step& s : next.steps) rebuilt.add_node(s.id);
    for (const DecompLink& d : next.decomp_links)
        rebuilt.expand_interval(d.parent, d.sub_initial, d.sub_final);
    for (const auto& [a, b] : plan.ordering.base_edges()) {
        StepId from = a, to = b;
        // Edges that touched the removed boundary collapse back onto the
        // root composite, which is atomic again.
        if (removed.count(from)) from = root;
        if (removed.count(to)) to = root;
        if (from == to) continue;
        if (next.find_step(from) && next.find_step(to))
            (void)rebuilt.add_before(from, to);
    }
    next.ordering = std::move(rebuilt);
    next.flaws = recompute_flaws(next);

    SearchConfig cfg = config;
    if (trace)
        for (const Literal& condition : trace->failed_conditions)
            cfg.banned_conditions.push_back(condition);

    return search_from(domain, std::move(next), cfg);
}

}  // namespace dpocl
