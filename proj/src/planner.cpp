#include "dpocl/planner.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

namespace dpocl {

namespace {

std::size_t scope_depth(const PlanGraph& plan, const std::optional<StepId>& scope) {
    std::size_t depth = 0;
    std::optional<StepId> cur = scope;
    while (cur) {
        ++depth;
        const Step* s = plan.find_step(*cur);
        cur = s ? s->scope : std::nullopt;
    }
    return depth;
}

std::size_t non_null_steps(const PlanGraph& plan) {
    std::size_t n = 0;
    for (const Step& s : plan.steps)
        if (!s.is_null()) ++n;
    return n;
}

// Boundary nodes of the timeline region a new step joins: the subplan
// boundaries for a scoped step, the outer null pair otherwise.
std::pair<StepId, StepId> scope_bounds(const PlanGraph& plan,
                                       const std::optional<StepId>& scope) {
    if (scope) {
        const DecompLink* d = plan.decomposition_of(*scope);
        if (d) return {d->sub_initial, d->sub_final};
    }
    return {plan.top_initial(), plan.top_final()};
}

bool violates_ban(const PlanGraph& plan, const SearchConfig& config) {
    if (config.banned_conditions.empty()) return false;
    for (const CausalLink& link : plan.causal_links) {
        Literal cond = plan.bindings.apply(link.condition);
        for (const Literal& banned : config.banned_conditions)
            if (cond == banned) return true;
    }
    return false;
}

// Install a freshly instantiated step into a copy of the plan.
StepId install_step(PlanGraph& plan, const StepSkeleton& skel,
                    const std::optional<StepId>& scope) {
    Step step;
    step.id = "s-" + std::to_string(plan.fresh.next_step());
    step.operator_name = skel.operator_name;
    step.args = skel.args;
    step.preconditions = skel.preconditions;
    step.effects = skel.effects;
    step.kind = skel.composite ? StepKind::Composite : StepKind::Primitive;
    step.scope = scope;
    plan.ordering.add_node(step.id);
    auto [lo, hi] = scope_bounds(plan, scope);
    if (!lo.empty()) (void)plan.ordering.add_before(lo, step.id);
    if (!hi.empty()) (void)plan.ordering.add_before(step.id, hi);
    plan.steps.push_back(std::move(step));
    return plan.steps.back().id;
}

bool finish_successor(PlanGraph& successor, const SearchConfig& config) {
    if (!successor.bindings.consistent()) return false;
    if (!successor.ordering.acyclic()) return false;
    if (violates_ban(successor, config)) return false;
    // A binding that turns a link's negative producer effect into a
    // self-masked delete invalidates the link.
    for (const CausalLink& link : successor.causal_links) {
        Literal cond = successor.bindings.apply(link.condition);
        if (cond.positive) continue;
        const Step* producer = successor.find_step(link.producer);
        if (!producer) return false;
        bool asserts = false;
        for (const Literal& effect : producer->effects) {
            Literal applied = successor.bindings.apply(effect);
            if (self_masked_delete(successor, *producer, applied)) continue;
            if (applied == cond) asserts = true;
        }
        if (!asserts) return false;
    }
    successor.flaws = recompute_flaws(successor);
    return true;
}

}  // namespace

std::vector<PlanGraph> causal_refinements(const PlanGraph& plan,
                                          const OpenCondition& flaw,
                                          const Domain& domain,
                                          const SearchConfig& config) {
    std::vector<PlanGraph> reuse, fresh;
    Literal goal = plan.bindings.apply(flaw.condition);

    for (const Step& producer : plan.steps) {
        if (producer.id == flaw.step) continue;
        for (const Literal& effect : producer.effects) {
            std::optional<BindingSet> unified;
            try {
                unified = unify(plan.bindings.apply(effect), goal, plan.bindings);
            } catch (const ArityMismatchError&) {
                continue;
            }
            if (!unified) continue;
            PlanGraph successor = plan;
            successor.bindings = std::move(*unified);
            if (!successor.ordering.add_before(producer.id, flaw.step)) continue;
            successor.causal_links.push_back(
                {producer.id, flaw.step, flaw.condition});
            if (finish_successor(successor, config))
                reuse.push_back(std::move(successor));
        }
    }

    // New establishers join the consumer's scope, so a subplan's
    // conditions are met by steps inside that subplan.
    const Step* consumer = plan.find_step(flaw.step);
    std::optional<StepId> scope = consumer ? consumer->scope : std::nullopt;

    std::vector<std::string> op_order;
    for (const std::string& name : domain.operator_order)
        if (domain.operators.at(name).composite) op_order.push_back(name);
    for (const std::string& name : domain.operator_order)
        if (!domain.operators.at(name).composite) op_order.push_back(name);

    for (const std::string& op_name : op_order) {
        const Operator& op = domain.operators.at(op_name);
        if (config.max_steps && non_null_steps(plan) + 1 > *config.max_steps)
            break;
        if (op.composite && scope_depth(plan, scope) + 1 > config.max_depth)
            continue;
        for (std::size_t ei = 0; ei < op.effects.size(); ++ei) {
            PlanGraph successor = plan;
            StepSkeleton skel = instantiate_step(op, successor.fresh);
            std::optional<BindingSet> unified;
            try {
                unified = unify(skel.effects[ei], goal, successor.bindings);
            } catch (const ArityMismatchError&) {
                continue;
            }
            if (!unified) continue;
            successor.bindings = std::move(*unified);
            StepId id = install_step(successor, skel, scope);
            if (!successor.ordering.add_before(id, flaw.step)) continue;
            successor.causal_links.push_back({id, flaw.step, flaw.condition});
            if (finish_successor(successor, config))
                fresh.push_back(std::move(successor));
        }
    }

    std::vector<PlanGraph> out;
    if (config.reuse_policy == ReusePolicy::PreferNew) {
        out = std::move(fresh);
        for (auto& p : reuse) out.push_back(std::move(p));
    } else {
        out = std::move(reuse);
        for (auto& p : fresh) out.push_back(std::move(p));
    }
    return out;
}

std::vector<PlanGraph> decomposition_refinements(const PlanGraph& plan,
                                                 const UnexpandedComposite& flaw,
                                                 const Domain& domain,
                                                 const SearchConfig& config) {
    std::vector<PlanGraph> out;
    const Step* parent = plan.find_step(flaw.step);
    if (!parent || parent->kind != StepKind::Composite) return out;
    const Operator* parent_op = domain.find_operator(parent->operator_name);
    const auto* schemas = domain.schemas_for(parent->operator_name);
    if (!parent_op || !schemas)
        throw std::invalid_argument("composite operator '" +
                                    parent->operator_name +
                                    "' has no decomposition schemas");
    if (scope_depth(plan, parent->scope) + 1 > config.max_depth) return out;

    for (const DecompSchema& schema : *schemas) {
        PlanGraph successor = plan;
        BindingSet bindings = successor.bindings;

        // Environment: parent formals map to the step's argument terms;
        // any other schema variable gets one fresh instance.
        std::map<std::string, Term> env;
        for (std::size_t i = 0;
             i < parent_op->params.size() && i < parent->args.size(); ++i)
            env.insert_or_assign(parent_op->params[i], parent->args[i]);
        auto map_term = [&](const Term& t) -> Term {
            if (!t.is_variable()) return t;
            auto it = env.find(t.name());
            if (it != env.end()) return it->second;
            Term fresh_var = Term::variable(t.name(), successor.fresh.next_var());
            env.insert_or_assign(t.name(), fresh_var);
            return fresh_var;
        };
        auto map_literal = [&](const Literal& lit) {
            Literal out_lit = lit;
            for (Term& t : out_lit.args) t = map_term(t);
            return out_lit;
        };

        // Applicability: each constraint must unify with an effect of a
        // step necessarily preceding the composite.
        bool applicable = true;
        for (const Literal& raw : schema.applicability) {
            Literal constraint = map_literal(raw);
            bool satisfied = false;
            for (const Step& other : successor.steps) {
                if (other.id == parent->id) continue;
                if (!successor.ordering.entails_before(other.id, parent->id))
                    continue;
                for (const Literal& effect : other.effects) {
                    std::optional<BindingSet> u;
                    try {
                        u = unify(bindings.apply(effect),
                                  bindings.apply(constraint), bindings);
                    } catch (const ArityMismatchError&) {
                        continue;
                    }
                    if (u) {
                        bindings = std::move(*u);
                        satisfied = true;
                        break;
                    }
                }
                if (satisfied) break;
            }
            if (!satisfied) {
                applicable = false;
                break;
            }
        }
        if (!applicable) continue;
        if (config.max_steps &&
            non_null_steps(plan) + schema.substeps.size() > *config.max_steps)
            continue;

        // Subplan boundary: the initial step re-asserts the parent's
        // preconditions, the final step awaits the parent's effects.
        Step sub_init;
        sub_init.id = "s-" + std::to_string(successor.fresh.next_step());
        sub_init.kind = StepKind::NullInitial;
        sub_init.scope = parent->id;
        sub_init.effects = parent->preconditions;
        Step sub_fin;
        sub_fin.id = "s-" + std::to_string(successor.fresh.next_step());
        sub_fin.kind = StepKind::NullFinal;
        sub_fin.scope = parent->id;
        sub_fin.preconditions = parent->effects;

        successor.ordering.add_node(sub_init.id);
        successor.ordering.add_node(sub_fin.id);
        successor.ordering.expand_interval(parent->id, sub_init.id, sub_fin.id);
        successor.decomp_links.push_back({parent->id, sub_init.id, sub_fin.id});
        successor.steps.push_back(sub_init);
        successor.steps.push_back(sub_fin);

        std::map<std::string, StepId> local_ids;
        local_ids["init"] = sub_init.id;
        local_ids["final"] = sub_fin.id;

        bool viable = true;
        for (const DecompSchema::Substep& sub : schema.substeps) {
            const Operator* op = domain.find_operator(sub.operator_name);
            if (!op) {
                viable = false;
                break;
            }
            std::vector<Term> args;
            for (const Term& t : sub.args) args.push_back(map_term(t));
            StepSkeleton skel = instantiate_step(*op, args);
            local_ids[sub.local_id] = install_step(successor, skel, parent->id);
        }
        if (!viable) continue;

        for (const auto& [a, b] : schema.sub_orderings)
            if (!successor.ordering.add_before(local_ids[a], local_ids[b])) {
                viable = false;
                break;
            }
        if (!viable) continue;

        for (const DecompSchema::SubBinding& sb : schema.sub_bindings) {
            Term l = map_term(sb.left);
            Term r = map_term(sb.right);
            std::optional<BindingSet> next =
                sb.codesignate ? bindings.with_codesignation(l, r)
                               : bindings.with_noncodesignation(l, r);
            if (!next) {
                viable = false;
                break;
            }
            bindings = std::move(*next);
        }
        if (!viable) continue;

        for (const DecompSchema::SubLink& sl : schema.sub_links) {
            Literal condition = map_literal(sl.condition);
            StepId producer = local_ids.at(sl.producer);
            StepId consumer = local_ids.at(sl.consumer);
            // Commit the unifier against both endpoints. An endpoint
            // literal that already coincides under the current bindings
            // wins over one that merely unifies, so the link lands on the
            // condition the schema actually wrote.
            const Step* prod = successor.find_step(producer);
            const Step* cons = successor.find_step(consumer);
            auto bind_against = [&](const std::vector<Literal>& lits) {
                for (const Literal& lit : lits)
                    if (bindings.apply(lit) == bindings.apply(condition))
                        return true;
                for (const Literal& lit : lits) {
                    std::optional<BindingSet> u;
                    try {
                        u = unify(bindings.apply(lit), bindings.apply(condition),
                                  bindings);
                    } catch (const ArityMismatchError&) {
                        continue;
                    }
                    if (u) {
                        bindings = std::move(*u);
                        return true;
                    }
                }
                return false;
            };
            if (!bind_against(prod->effects) ||
                !bind_against(cons->preconditions)) {
                viable = false;
                break;
            }
            if (!successor.ordering.add_before(producer, consumer) &&
                !successor.ordering.entails_before(producer, consumer)) {
                viable = false;
                break;
            }
            successor.causal_links.push_back({producer, consumer, condition});
        }
        if (!viable) continue;

        successor.bindings = std::move(bindings);
        if (finish_successor(successor, config))
            out.push_back(std::move(successor));
    }
    return out;
}

std::vector<PlanGraph> threat_resolutions(const PlanGraph& plan,
                                          const Threat& flaw,
                                          const SearchConfig& config) {
    std::vector<PlanGraph> out;

    {  // promotion: the threat runs after the protected interval
        PlanGraph successor = plan;
        if (successor.ordering.add_before(flaw.link.consumer, flaw.step) &&
            finish_successor(successor, config))
            out.push_back(std::move(successor));
    }
    {  // demotion: the threat runs before the producer establishes it
        PlanGraph successor = plan;
        if (successor.ordering.add_before(flaw.step, flaw.link.producer) &&
            finish_successor(successor, config))
            out.push_back(std::move(successor));
    }

    // Separation: one successor per argument pair whose forced merge the
    // threatening unifier needs.
    const Step* threat_step = plan.find_step(flaw.step);
    if (threat_step) {
        Literal negated = plan.bindings.apply(flaw.link.condition).negated();
        for (const Literal& effect : threat_step->effects) {
            Literal applied = plan.bindings.apply(effect);
            bool unifiable = false;
            try {
                unifiable = unify(applied, negated, plan.bindings).has_value();
            } catch (const ArityMismatchError&) {
                continue;
            }
            if (!unifiable) continue;
            for (std::size_t i = 0; i < applied.args.size(); ++i) {
                if (plan.bindings.codesignates(applied.args[i], negated.args[i]))
                    continue;
                PlanGraph successor = plan;
                auto next = successor.bindings.with_noncodesignation(
                    applied.args[i], negated.args[i]);
                if (!next) continue;
                successor.bindings = std::move(*next);
                if (finish_successor(successor, config))
                    out.push_back(std::move(successor));
            }
        }
    }
    return out;
}

Flaw select_flaw(const PlanGraph& plan, const SearchConfig& config) {
    if (plan.flaws.empty())
        throw std::invalid_argument("select_flaw on a flaw-free plan");
    if (config.flaw_order == FlawOrder::Fifo) return plan.flaws.front();
    for (const Flaw& f : plan.flaws)
        if (std::holds_alternative<Threat>(f)) return f;
    for (const Flaw& f : plan.flaws)
        if (std::holds_alternative<OpenCondition>(f)) return f;
    return plan.flaws.front();
}

namespace {

// Delete-relaxed reachability over ground atoms: a fixpoint treating each
// operator as a rule from its positive preconditions to its effects,
// seeded with the initial state. An open condition that unifies with no
// reachable atom can never be supported, so the node is a dead end. The
// relaxation ignores deletes and negative preconditions, which keeps the
// prune sound for completeness.
class Reachability {
public:
    Reachability(const Domain& domain, const PlanGraph& root) {
        std::set<Term> pool;
        auto note = [&](const Literal& lit) {
            for (const Term& t : lit.args)
                if (t.is_constant()) pool.insert(t);
        };
        for (const auto& [_, op] : domain.operators) {
            for (const Literal& l : op.preconditions) note(l);
            for (const Literal& l : op.effects) note(l);
        }
        for (const Step& s : root.steps) {
            for (const Literal& l : s.preconditions)
                note(root.bindings.apply(l));
            for (const Literal& l : s.effects) note(root.bindings.apply(l));
        }
        for (const auto& cls : root.bindings.classes()) note({"", cls, true});
        pool_.assign(pool.begin(), pool.end());
        // The universe is never empty; unconstrained parameters need at
        // least one value to range over.
        if (pool_.empty()) pool_.push_back(Term::constant("any"));

        const Step* init = root.find_step(root.top_initial());
        if (init)
            for (const Literal& l : init->effects)
                if (l.positive) insert(root.bindings.apply(l));

        std::size_t budget = 2'000'000;
        bool grew = true;
        while (grew && enabled_) {
            grew = false;
            for (const auto& [_, op] : domain.operators) {
                std::map<std::string, Term> env;
                grew |= apply_rule(op, 0, env, budget);
                if (!enabled_) return;
            }
        }
    }

    bool enabled() const { return enabled_; }

    // Does any reachable atom unify with this (applied) condition?
    bool supportable(const Literal& goal) const {
        if (!goal.positive) return true;
        auto it = atoms_.find(goal.predicate);
        if (it == atoms_.end()) return false;
        for (const Literal& atom : it->second) {
            if (atom.args.size() != goal.args.size()) continue;
            bool ok = true;
            BindingSet scratch;
            for (std::size_t i = 0; i < atom.args.size() && ok; ++i) {
                auto next = scratch.with_codesignation(atom.args[i], goal.args[i]);
                if (!next)
                    ok = false;
                else
                    scratch = std::move(*next);
            }
            if (ok) return true;
        }
        return false;
    }

private:
    void insert(const Literal& atom) {
        auto& list = atoms_[atom.predicate];
        for (const Literal& existing : list)
            if (existing == atom) return;
        list.push_back(atom);
        ++size_;
        if (size_ > 100000) enabled_ = false;
    }

    bool ground_effects(const Operator& op, std::map<std::string, Term>& env,
                        std::size_t& budget) {
        // Parameters unconstrained by any precondition range over the pool.
        std::vector<std::string> free_params;
        for (const std::string& p : op.params)
            if (!env.count(p)) free_params.push_back(p);
        bool grew = false;
        auto emit = [&](auto&& self, std::size_t idx) -> void {
            if (!enabled_) return;
            if (idx == free_params.size()) {
                for (const Literal& eff : op.effects) {
                    if (!eff.positive) continue;
                    Literal ground = eff;
                    bool all_ground = true;
                    for (Term& t : ground.args) {
                        if (!t.is_variable()) continue;
                        auto it = env.find(t.name());
                        if (it != env.end())
                            t = it->second;
                        else
                            all_ground = false;
                    }
                    if (!all_ground) continue;
                    std::size_t before = size_;
                    insert(ground);
                    grew |= size_ != before;
                }
                return;
            }
            for (const Term& c : pool_) {
                env.insert_or_assign(free_params[idx], c);
                self(self, idx + 1);
            }
            env.erase(free_params[idx]);
        };
        if (free_params.size() > 4) {
            // Grounding would explode; disable pruning instead.
            enabled_ = false;
            return false;
        }
        if (budget == 0) {
            enabled_ = false;
            return false;
        }
        --budget;
        emit(emit, 0);
        return grew;
    }

    bool apply_rule(const Operator& op, std::size_t pre_index,
                    std::map<std::string, Term>& env, std::size_t& budget) {
        // Join the positive preconditions most-selective first.
        std::vector<const Literal*> ordered;
        for (const Literal& pre : op.preconditions)
            if (pre.positive) ordered.push_back(&pre);
        std::stable_sort(ordered.begin(), ordered.end(),
                         [&](const Literal* a, const Literal* b) {
                             auto count = [&](const Literal* l) {
                                 auto it = atoms_.find(l->predicate);
                                 return it == atoms_.end() ? std::size_t{0}
                                                           : it->second.size();
                             };
                             return count(a) < count(b);
                         });
        (void)pre_index;
        return join(op, ordered, 0, env, budget);
    }

    bool join(const Operator& op, const std::vector<const Literal*>& ordered,
              std::size_t pre_index, std::map<std::string, Term>& env,
              std::size_t& budget) {
        if (!enabled_) return false;
        if (budget == 0) {
            enabled_ = false;
            return false;
        }
        if (pre_index == ordered.size())
            return ground_effects(op, env, budget);

        const Literal& pre = *ordered[pre_index];
        auto it = atoms_.find(pre.predicate);
        if (it == atoms_.end()) return false;
        bool grew = false;
        // Index by size; insertions during iteration extend the vector.
        for (std::size_t a = 0; a < it->second.size(); ++a) {
            Literal atom = it->second[a];
            if (atom.args.size() != pre.args.size()) continue;
            --budget;
            if (budget == 0) {
                enabled_ = false;
                return grew;
            }
            std::vector<std::pair<std::string, bool>> bound;
            bool ok = true;
            for (std::size_t i = 0; i < pre.args.size() && ok; ++i) {
                const Term& t = pre.args[i];
                if (t.is_constant()) {
                    ok = t == atom.args[i];
                } else {
                    auto found = env.find(t.name());
                    if (found == env.end()) {
                        env.insert_or_assign(t.name(), atom.args[i]);
                        bound.push_back({t.name(), true});
                    } else {
                        ok = found->second == atom.args[i];
                    }
                }
            }
            if (ok) grew |= join(op, ordered, pre_index + 1, env, budget);
            for (const auto& [name, _] : bound) env.erase(name);
        }
        return grew;
    }

    std::map<std::string, std::vector<Literal>> atoms_;
    std::vector<Term> pool_;
    std::size_t size_ = 0;
    bool enabled_ = true;
};

// Variables range over the problem's finite object pool, so a plan whose
// non-codesignations rule out every value has no executable grounding.
// Free classes with no exclusion always ground; the constrained ones are
// checked exactly by enumeration when few, by per-class domain
// nonemptiness otherwise.
bool groundable_over(const PlanGraph& plan, const std::vector<Term>& pool) {
    if (pool.empty()) return true;
    auto noncodes = plan.bindings.noncodesignations();
    if (noncodes.empty()) return true;

    std::set<Term> constrained;
    for (const auto& [a, b] : noncodes) {
        Term ra = plan.bindings.representative(a);
        Term rb = plan.bindings.representative(b);
        if (ra.is_variable()) constrained.insert(ra);
        if (rb.is_variable()) constrained.insert(rb);
    }
    if (constrained.empty()) return true;
    std::vector<Term> vars(constrained.begin(), constrained.end());

    auto violates = [&](const std::map<Term, Term>& assignment) {
        for (const auto& [a, b] : noncodes) {
            Term ra = plan.bindings.representative(a);
            Term rb = plan.bindings.representative(b);
            auto value = [&](const Term& t) {
                if (t.is_constant()) return t;
                auto it = assignment.find(t);
                return it == assignment.end() ? t : it->second;
            };
            if (value(ra) == value(rb)) return true;
        }
        return false;
    };

    if (vars.size() <= 6) {
        std::vector<std::size_t> pick(vars.size(), 0);
        for (;;) {
            std::map<Term, Term> assignment;
            for (std::size_t i = 0; i < vars.size(); ++i)
                assignment.insert_or_assign(vars[i], pool[pick[i]]);
            if (!violates(assignment)) return true;
            std::size_t i = 0;
            while (i < vars.size() && ++pick[i] == pool.size()) pick[i++] = 0;
            if (i == vars.size()) return false;
        }
    }

    // Cheap fallback: each constrained class must keep one allowed value.
    for (const Term& v : vars) {
        bool has_value = false;
        for (const Term& c : pool)
            if (!plan.bindings.forbidden(v, c)) has_value = true;
        if (!has_value) return false;
    }
    return true;
}

struct Node {
    PlanGraph plan;
    std::uint64_t id;
    std::size_t f;  // non-null steps + flaws
};

std::size_t f_value(const PlanGraph& plan) {
    return non_null_steps(plan) + plan.flaws.size();
}

std::vector<PlanGraph> expand(const PlanGraph& plan, const Domain& domain,
                              const SearchConfig& config, SearchStats& stats,
                              const Reachability* reach) {
    Flaw flaw = select_flaw(plan, config);
    if (reach && reach->enabled()) {
        if (const auto* oc = std::get_if<OpenCondition>(&flaw)) {
            if (!reach->supportable(plan.bindings.apply(oc->condition)))
                return {};
        }
    }
    if (const auto* threat = std::get_if<Threat>(&flaw)) {
        auto successors = threat_resolutions(plan, *threat, config);
        for (const PlanGraph& s : successors) {
            if (s.ordering.entails_before(threat->link.consumer, threat->step))
                ++stats.promotions;
            else if (s.ordering.entails_before(threat->step,
                                               threat->link.producer))
                ++stats.demotions;
            else
                ++stats.separations;
        }
        return successors;
    }
    if (const auto* oc = std::get_if<OpenCondition>(&flaw)) {
        auto successors = causal_refinements(plan, *oc, domain, config);
        for (const PlanGraph& s : successors)
            (s.steps.size() == plan.steps.size() ? stats.causal_reuse
                                                 : stats.causal_new)++;
        return successors;
    }
    const auto& uc = std::get<UnexpandedComposite>(flaw);
    auto successors = decomposition_refinements(plan, uc, domain, config);
    stats.decompositions += successors.size();
    return successors;
}

}  // namespace

SearchResult search_from(const Domain& domain, PlanGraph root,
                         const SearchConfig& config) {
    SearchResult result;
    Reachability reach(domain, root);
    bool dedup = config.dedup == DedupMode::On ||
                 (config.dedup == DedupMode::Default &&
                  config.strategy == Strategy::BestFirst);

    std::uint64_t next_id = 0;
    std::set<std::string> seen;

    std::set<Term> pool_terms;
    for (const auto& [_, op] : domain.operators) {
        for (const Literal& l : op.preconditions)
            for (const Term& t : l.args)
                if (t.is_constant()) pool_terms.insert(t);
        for (const Literal& l : op.effects)
            for (const Term& t : l.args)
                if (t.is_constant()) pool_terms.insert(t);
    }
    for (const Step& s : root.steps) {
        for (const Literal& l : s.preconditions)
            for (const Term& t : l.args)
                if (t.is_constant()) pool_terms.insert(t);
        for (const Literal& l : s.effects)
            for (const Term& t : l.args)
                if (t.is_constant()) pool_terms.insert(t);
    }
    std::vector<Term> pool(pool_terms.begin(), pool_terms.end());

    auto finished = [&](const PlanGraph& plan) -> std::optional<PlanGraph> {
        if (!plan.flaws.empty()) return std::nullopt;
        if (!groundable_over(plan, pool)) return std::nullopt;
        return remove_unused_steps(plan);
    };

    if (config.strategy == Strategy::DepthFirst) {
        std::vector<Node> stack;
        stack.push_back({std::move(root), next_id++, 0});
        while (!stack.empty()) {
            Node node = std::move(stack.back());
            stack.pop_back();
            if (dedup && !seen.insert(node.plan.signature()).second) continue;
            if (node.plan.flaws.empty()) {
                if (auto solution = finished(node.plan)) {
                    result.outcome = SearchOutcome::Solution;
                    result.solution = std::move(solution);
                    return result;
                }
                continue;  // flaw-free but not groundable: dead end
            }
            if (++result.nodes_expanded >= config.max_nodes) {
                result.outcome = SearchOutcome::BudgetExceeded;
                return result;
            }
            auto successors = expand(node.plan, domain, config, result.stats, &reach);
            for (auto it = successors.rbegin(); it != successors.rend(); ++it)
                stack.push_back({std::move(*it), next_id++, 0});
        }
        result.outcome = SearchOutcome::Exhausted;
        return result;
    }

    auto worse = [](const Node& a, const Node& b) {
        if (a.f != b.f) return a.f > b.f;
        return a.id > b.id;  // FIFO among equals
    };
    std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);
    std::size_t root_f = f_value(root);
    open.push({std::move(root), next_id++, root_f});
    while (!open.empty()) {
        Node node = open.top();
        open.pop();
        if (dedup && !seen.insert(node.plan.signature()).second) continue;
        if (node.plan.flaws.empty()) {
            if (auto solution = finished(node.plan)) {
                result.outcome = SearchOutcome::Solution;
                result.solution = std::move(solution);
                return result;
            }
            continue;  // flaw-free but not groundable: dead end
        }
        if (++result.nodes_expanded >= config.max_nodes) {
            result.outcome = SearchOutcome::BudgetExceeded;
            return result;
        }
        auto successors = expand(node.plan, domain, config, result.stats, &reach);
        for (auto& s : successors) {
            std::size_t f = f_value(s);
            open.push({std::move(s), next_id++, f});
        }
    }
    result.outcome = SearchOutcome::Exhausted;
    return result;
}

SearchResult plan(const Domain& domain, const Problem& problem,
                  const SearchConfig& config) {
    return search_from(domain, new_null_plan(problem), config);
}

}  // namespace dpocl
