// Test-only reference implementations, kept deliberately independent of
// the library's own algorithms: exhaustive ground substitution for
// unification, pairwise closure for binding consistency, linearization
// execution for plan soundness, forward sequence enumeration for
// bounded solvability, and link-graph reachability for effect
// classification.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dpocl/bindings.hpp"
#include "dpocl/domain.hpp"
#include "dpocl/plan.hpp"
#include "dpocl/terms.hpp"

namespace oracle {

using namespace dpocl;

// ---------------------------------------------------------------- grounding

using Substitution = std::map<Term, Term>;  // variable -> constant

inline Literal substitute(const Literal& lit, const Substitution& sigma) {
    Literal out = lit;
    for (Term& t : out.args) {
        if (!t.is_variable()) continue;
        auto it = sigma.find(t);
        if (it != sigma.end()) t = it->second;
    }
    return out;
}

inline std::vector<Term> collect_variables(const std::vector<Literal>& lits) {
    std::set<Term> vars;
    for (const Literal& lit : lits)
        for (const Term& t : lit.args)
            if (t.is_variable()) vars.insert(t);
    return {vars.begin(), vars.end()};
}

// Every total assignment of the given variables to the constant pool.
inline std::vector<Substitution> all_substitutions(
    const std::vector<Term>& vars, const std::vector<Term>& constants) {
    std::vector<Substitution> out{{}};
    for (const Term& v : vars) {
        std::vector<Substitution> next;
        for (const Substitution& sigma : out)
            for (const Term& c : constants) {
                Substitution extended = sigma;
                extended.insert_or_assign(v, c);
                next.push_back(std::move(extended));
            }
        out = std::move(next);
    }
    return out;
}

// Constraints only bind sigma through the terms it actually grounds;
// class members sigma leaves unassigned are free to comply later.
inline bool sigma_respects(const Substitution& sigma, const BindingSet& bindings) {
    auto image = [&](const Term& t) -> std::optional<Term> {
        if (t.is_constant()) return t;
        auto it = sigma.find(t);
        if (it != sigma.end()) return it->second;
        return std::nullopt;
    };
    for (const auto& cls : bindings.classes()) {
        std::optional<Term> fixed;
        for (const Term& member : cls) {
            auto value = image(member);
            if (!value) continue;
            if (fixed && !(*fixed == *value)) return false;
            fixed = value;
        }
    }
    for (const auto& [a, b] : bindings.noncodesignations()) {
        auto va = image(a);
        auto vb = image(b);
        if (va && vb && *va == *vb) return false;
    }
    return true;
}

// Ground-truth unifiability: some total grounding over the pool makes the
// literals identical while respecting the prior constraints.
inline bool unifiable_by_enumeration(const Literal& a, const Literal& b,
                                     const BindingSet& prior,
                                     const std::vector<Term>& constants) {
    if (a.predicate != b.predicate || a.positive != b.positive ||
        a.args.size() != b.args.size())
        return false;
    std::vector<Term> vars = collect_variables({a, b});
    for (const auto& cls : prior.classes())
        for (const Term& t : cls)
            if (t.is_variable()) vars.push_back(t);
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    for (const Substitution& sigma : all_substitutions(vars, constants)) {
        if (!sigma_respects(sigma, prior)) continue;
        if (substitute(a, sigma) == substitute(b, sigma)) return true;
    }
    return false;
}

// -------------------------------------------------- binding-set consistency

// Naive closure over an explicit constraint list.
struct NaiveConstraints {
    std::vector<std::pair<Term, Term>> equals;
    std::vector<std::pair<Term, Term>> differs;

    bool consistent() const {
        std::vector<Term> terms;
        auto note = [&](const Term& t) { terms.push_back(t); };
        for (const auto& [a, b] : equals) {
            note(a);
            note(b);
        }
        for (const auto& [a, b] : differs) {
            note(a);
            note(b);
        }
        std::sort(terms.begin(), terms.end());
        terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
        std::map<Term, std::size_t> cls;
        for (std::size_t i = 0; i < terms.size(); ++i) cls[terms[i]] = i;
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& [a, b] : equals) {
                std::size_t ca = cls[a], cb = cls[b];
                if (ca == cb) continue;
                for (auto& [t, c] : cls)
                    if (c == cb) c = ca;
                changed = true;
            }
        }
        std::map<std::size_t, Term> constant_of;
        for (const Term& t : terms) {
            if (!t.is_constant()) continue;
            auto [it, inserted] = constant_of.emplace(cls[t], t);
            if (!inserted && !(it->second == t)) return false;
        }
        for (const auto& [a, b] : differs)
            if (cls[a] == cls[b]) return false;
        return true;
    }
};

// ------------------------------------------------------------ plan execution

// All total orders of the given ids consistent with the ordering.
inline void all_linearizations(
    const PlanGraph& plan, std::vector<StepId> remaining,
    std::vector<StepId>& prefix,
    const std::function<void(const std::vector<StepId>&)>& visit) {
    if (remaining.empty()) {
        visit(prefix);
        return;
    }
    for (std::size_t i = 0; i < remaining.size(); ++i) {
        const StepId& candidate = remaining[i];
        bool minimal = true;
        for (const StepId& other : remaining)
            if (other != candidate &&
                plan.ordering.entails_before(other, candidate))
                minimal = false;
        if (!minimal) continue;
        std::vector<StepId> rest;
        for (const StepId& other : remaining)
            if (other != candidate) rest.push_back(other);
        prefix.push_back(candidate);
        all_linearizations(plan, rest, prefix, visit);
        prefix.pop_back();
    }
}

struct ExecutionCheck {
    bool ok = true;
    std::string message;
};

// Simulate forward execution of the primitive steps for one grounding:
// preconditions must hold when a step runs, and the goals at the end.
// Null and composite steps carry no executable content. Deletes apply
// before adds, so a step adding and deleting the same atom nets the add.
inline ExecutionCheck execute_linearization(const PlanGraph& plan,
                                            const std::vector<StepId>& order,
                                            const Substitution& sigma) {
    auto ground = [&](const Literal& lit) {
        return substitute(plan.bindings.apply(lit), sigma);
    };
    std::set<std::string> state;
    const Step* init = plan.find_step(plan.top_initial());
    for (const Literal& l : init->effects) state.insert(ground(l).to_string());
    for (const StepId& id : order) {
        const Step* step = plan.find_step(id);
        for (const Literal& pre : step->preconditions) {
            Literal g = ground(pre);
            bool holds = g.positive ? state.count(g.to_string()) > 0
                                    : state.count(g.negated().to_string()) == 0;
            if (!holds)
                return {false, "precondition " + g.to_string() +
                                   " does not hold before " + id};
        }
        for (const Literal& eff : step->effects) {
            Literal g = ground(eff);
            if (!g.positive) state.erase(g.negated().to_string());
        }
        for (const Literal& eff : step->effects) {
            Literal g = ground(eff);
            if (g.positive) state.insert(g.to_string());
        }
    }
    const Step* fin = plan.find_step(plan.top_final());
    for (const Literal& goal : fin->preconditions) {
        Literal g = ground(goal);
        if (!state.count(g.to_string()))
            return {false, "goal " + g.to_string() + " does not hold at the end"};
    }
    return {true, ""};
}

// Exhaustive check over every linearization of the primitive steps and
// every grounding of leftover variables.
inline ExecutionCheck execute_all_linearizations(
    const PlanGraph& plan, const std::vector<Term>& constants) {
    std::vector<StepId> primitives;
    std::vector<Literal> involved;
    for (const Step& s : plan.steps) {
        if (s.kind != StepKind::Primitive) continue;
        primitives.push_back(s.id);
        for (const Literal& l : s.preconditions)
            involved.push_back(plan.bindings.apply(l));
        for (const Literal& l : s.effects)
            involved.push_back(plan.bindings.apply(l));
    }
    const Step* fin = plan.find_step(plan.top_final());
    for (const Literal& l : fin->preconditions)
        involved.push_back(plan.bindings.apply(l));

    std::vector<Term> vars = collect_variables(involved);
    std::vector<Term> pool = constants;
    if (pool.empty()) pool.push_back(Term::constant("filler"));
    std::vector<Substitution> sigmas = all_substitutions(vars, pool);

    // Leftover variables must admit at least one grounding; a plan whose
    // constraints exclude every object is not executable.
    bool some_grounding = false;
    for (const Substitution& sigma : sigmas)
        if (sigma_respects(sigma, plan.bindings)) some_grounding = true;
    if (!some_grounding)
        return {false, "bindings admit no grounding over the object pool"};

    ExecutionCheck result;
    std::vector<StepId> prefix;
    all_linearizations(plan, primitives, prefix,
                       [&](const std::vector<StepId>& order) {
                           if (!result.ok) return;
                           for (const Substitution& sigma : sigmas) {
                               if (!sigma_respects(sigma, plan.bindings)) continue;
                               ExecutionCheck one =
                                   execute_linearization(plan, order, sigma);
                               if (!one.ok) {
                                   result = one;
                                   return;
                               }
                           }
                       });
    return result;
}

// ------------------------------------------------- bounded forward planning

struct GroundAction {
    std::string name;
    std::vector<Literal> preconditions;
    std::vector<Literal> effects;
};

inline std::vector<GroundAction> ground_actions(const Domain& domain,
                                                const std::vector<Term>& pool) {
    std::vector<GroundAction> out;
    for (const std::string& name : domain.operator_order) {
        const Operator& op = domain.operators.at(name);
        if (op.composite) continue;
        std::vector<Term> params;
        for (const std::string& p : op.params)
            params.push_back(Term::variable(p, 0));
        for (const Substitution& sigma : all_substitutions(params, pool)) {
            GroundAction action;
            action.name = name;
            StepSkeleton skel = instantiate_step(op, [&] {
                std::vector<Term> args;
                for (const Term& p : params) args.push_back(sigma.at(p));
                return args;
            }());
            action.preconditions = skel.preconditions;
            action.effects = skel.effects;
            out.push_back(std::move(action));
        }
    }
    return out;
}

// Does any executable sequence of at most `bound` ground actions reach
// the goal? Plain depth-first over states.
inline bool solvable_by_enumeration(const Domain& domain, const Problem& problem,
                                    const std::vector<Term>& pool,
                                    std::size_t bound) {
    std::vector<GroundAction> actions = ground_actions(domain, pool);
    auto goal_holds = [&](const std::set<std::string>& state) {
        for (const Literal& g : problem.goal)
            if (!state.count(g.to_string())) return false;
        return true;
    };
    std::set<std::pair<std::string, std::size_t>> seen;
    std::function<bool(std::set<std::string>, std::size_t)> go =
        [&](std::set<std::string> state, std::size_t depth) {
            if (goal_holds(state)) return true;
            if (depth == bound) return false;
            std::string key;
            for (const auto& s : state) key += s + "|";
            if (!seen.insert({key, depth}).second) return false;
            for (const GroundAction& action : actions) {
                bool applicable = true;
                for (const Literal& pre : action.preconditions) {
                    bool holds = pre.positive
                                     ? state.count(pre.to_string()) > 0
                                     : state.count(pre.negated().to_string()) == 0;
                    if (!holds) {
                        applicable = false;
                        break;
                    }
                }
                if (!applicable) continue;
                std::set<std::string> next = state;
                for (const Literal& eff : action.effects)
                    if (!eff.positive) next.erase(eff.negated().to_string());
                for (const Literal& eff : action.effects)
                    if (eff.positive) next.insert(eff.to_string());
                if (go(std::move(next), depth + 1)) return true;
            }
            return false;
        };
    std::set<std::string> initial;
    for (const Literal& l : problem.initial) initial.insert(l.to_string());
    return go(std::move(initial), 0);
}

// ------------------------------------------------ threat linearization truth

// A step really threatens a link iff some linearization puts it strictly
// between the ends while some grounding makes one of its effects the
// exact negation of the condition.
inline bool threat_by_enumeration(const PlanGraph& plan, const StepId& threat,
                                  const CausalLink& link,
                                  const std::vector<Term>& constants) {
    std::vector<StepId> ids;
    for (const Step& s : plan.steps) ids.push_back(s.id);
    bool found = false;
    std::vector<StepId> prefix;
    all_linearizations(plan, ids, prefix, [&](const std::vector<StepId>& order) {
        if (found) return;
        auto pos = [&](const StepId& id) {
            return std::find(order.begin(), order.end(), id) - order.begin();
        };
        if (!(pos(link.producer) < pos(threat) && pos(threat) < pos(link.consumer)))
            return;
        const Step* step = plan.find_step(threat);
        Literal negated = plan.bindings.apply(link.condition).negated();
        std::vector<Literal> involved{negated};
        for (const Literal& e : step->effects)
            involved.push_back(plan.bindings.apply(e));
        std::vector<Term> vars = collect_variables(involved);
        for (const Substitution& sigma : all_substitutions(vars, constants)) {
            if (!sigma_respects(sigma, plan.bindings)) continue;
            for (const Literal& e : step->effects) {
                Literal eg = substitute(plan.bindings.apply(e), sigma);
                if (eg != substitute(negated, sigma)) continue;
                // A delete the same step re-adds nets the add.
                bool masked = false;
                if (!eg.positive)
                    for (const Literal& other : step->effects)
                        if (other.positive &&
                            substitute(plan.bindings.apply(other), sigma) ==
                                eg.negated())
                            masked = true;
                if (!masked) found = true;
            }
        }
    });
    return found;
}

// ------------------------------------------------ effect classification truth

// Breadth-first over causal links; a subplan final hands over to its
// parent composite.
inline bool effect_reaches_goal(const PlanGraph& plan, const StepId& producer,
                                const Literal& effect) {
    StepId top_final = plan.top_final();
    std::set<std::pair<StepId, StepId>> visited;
    std::vector<CausalLink> frontier;
    for (const CausalLink& l : plan.causal_links)
        if (l.producer == producer &&
            plan.bindings.apply(l.condition) == plan.bindings.apply(effect))
            frontier.push_back(l);
    while (!frontier.empty()) {
        CausalLink link = frontier.back();
        frontier.pop_back();
        if (!visited.insert({link.producer, link.consumer}).second) continue;
        if (link.consumer == top_final) return true;
        StepId carrier = link.consumer;
        for (const DecompLink& d : plan.decomp_links)
            if (d.sub_final == carrier) carrier = d.parent;
        for (const CausalLink& l : plan.causal_links)
            if (l.producer == carrier) frontier.push_back(l);
    }
    return false;
}

}  // namespace oracle
