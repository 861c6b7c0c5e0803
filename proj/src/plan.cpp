#include "dpocl/plan.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dpocl {

std::string to_string(StepKind kind) {
    switch (kind) {
        case StepKind::Primitive: return "primitive";
        case StepKind::Composite: return "composite";
        case StepKind::NullInitial: return "null-initial";
        case StepKind::NullFinal: return "null-final";
    }
    return "?";
}

std::string Step::display_name() const {
    if (kind == StepKind::NullInitial) return scope ? "init[" + *scope + "]" : "init";
    if (kind == StepKind::NullFinal) return scope ? "final[" + *scope + "]" : "goal";
    std::ostringstream os;
    os << operator_name << '(';
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) os << ' ';
        os << args[i].to_string();
    }
    os << ')';
    return os.str();
}

bool CausalLink::operator==(const CausalLink& other) const {
    return producer == other.producer && consumer == other.consumer &&
           condition == other.condition;
}

bool CausalLink::operator<(const CausalLink& other) const {
    if (producer != other.producer) return producer < other.producer;
    if (consumer != other.consumer) return consumer < other.consumer;
    return condition < other.condition;
}

bool Threat::operator==(const Threat& other) const {
    return step == other.step && link == other.link;
}

std::string to_string(const Flaw& flaw) {
    if (const auto* oc = std::get_if<OpenCondition>(&flaw))
        return "open-condition " + oc->condition.to_string() + " @ " + oc->step;
    if (const auto* uc = std::get_if<UnexpandedComposite>(&flaw))
        return "unexpanded-composite @ " + uc->step;
    const auto& t = std::get<Threat>(flaw);
    return "threat " + t.step + " vs " + t.link.producer + "->" +
           t.link.consumer + " [" + t.link.condition.to_string() + "]";
}

std::string VerifyReport::to_string() const {
    std::ostringstream os;
    for (const auto& v : violations) os << v << '\n';
    return os.str();
}

// ---------------------------------------------------------------- ordering

void OrderingSet::add_node(const StepId& id) {
    if (index_.count(id)) return;
    index_[id] = nodes_.size();
    nodes_.push_back(id);
    for (auto& row : reach_) row.push_back(false);
    reach_.emplace_back(nodes_.size(), false);
}

const StepId& OrderingSet::start_node(const StepId& id) const {
    auto it = intervals_.find(id);
    return it == intervals_.end() ? id : start_node(it->second.first);
}

const StepId& OrderingSet::end_node(const StepId& id) const {
    auto it = intervals_.find(id);
    return it == intervals_.end() ? id : end_node(it->second.second);
}

std::size_t OrderingSet::index_of(const StepId& id) const {
    auto it = index_.find(id);
    if (it == index_.end())
        throw std::out_of_range("unknown step in ordering: " + id);
    return it->second;
}

bool OrderingSet::reaches(std::size_t from, std::size_t to) const {
    return reach_[from][to];
}

void OrderingSet::close_over_edge(std::size_t from, std::size_t to) {
    // reach(x, y) for all x reaching `from` and y reached from `to`.
    std::vector<std::size_t> sources{from}, sinks{to};
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (reach_[i][from]) sources.push_back(i);
        if (reach_[to][i]) sinks.push_back(i);
    }
    for (std::size_t s : sources)
        for (std::size_t t : sinks) reach_[s][t] = true;
}

void OrderingSet::expand_interval(const StepId& composite,
                                  const StepId& sub_initial,
                                  const StepId& sub_final) {
    add_node(sub_initial);
    add_node(sub_final);
    std::size_t comp = index_of(composite);
    std::size_t init = index_of(sub_initial);
    std::size_t fin = index_of(sub_final);

    // Rewire base edges touching the composite onto the boundary pair,
    // then rebuild the closure.
    std::set<std::pair<std::size_t, std::size_t>> rewired;
    for (const auto& [a, b] : edges_) {
        std::size_t na = (b == comp) ? a : (a == comp ? fin : a);
        std::size_t nb = (b == comp) ? init : b;
        if (a == comp && b == comp) continue;
        rewired.insert({na, nb});
    }
    rewired.insert({init, fin});
    edges_ = std::move(rewired);
    intervals_[composite] = {sub_initial, sub_final};

    reach_.assign(nodes_.size(), std::vector<bool>(nodes_.size(), false));
    for (const auto& [a, b] : edges_) reach_[a][b] = true;
    for (std::size_t k = 0; k < nodes_.size(); ++k)
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (reach_[i][k])
                for (std::size_t j = 0; j < nodes_.size(); ++j)
                    if (reach_[k][j]) reach_[i][j] = true;
}

bool OrderingSet::add_before(const StepId& before, const StepId& after) {
    std::size_t from = index_of(end_node(before));
    std::size_t to = index_of(start_node(after));
    if (from == to) return false;
    if (reaches(to, from)) return false;
    if (edges_.insert({from, to}).second) close_over_edge(from, to);
    return true;
}

void OrderingSet::add_edge_unchecked(const StepId& before, const StepId& after) {
    std::size_t from = index_of(end_node(before));
    std::size_t to = index_of(start_node(after));
    if (edges_.insert({from, to}).second) {
        reach_[from][to] = true;
        close_over_edge(from, to);
    }
}

bool OrderingSet::entails_before(const StepId& a, const StepId& b) const {
    if (!index_.count(a) || !index_.count(b)) return false;
    std::size_t from = index_of(end_node(a));
    std::size_t to = index_of(start_node(b));
    if (from == to) return false;
    return reaches(from, to);
}

std::vector<std::pair<StepId, StepId>> OrderingSet::base_edges() const {
    std::vector<std::pair<StepId, StepId>> out;
    for (const auto& [a, b] : edges_) out.emplace_back(nodes_[a], nodes_[b]);
    std::sort(out.begin(), out.end());
    return out;
}

bool OrderingSet::acyclic() const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (reach_[i][i]) return false;
    return true;
}

bool OrderingSet::operator==(const OrderingSet& other) const {
    return base_edges() == other.base_edges() && intervals_ == other.intervals_;
}

// -------------------------------------------------------------- plan graph

const Step* PlanGraph::find_step(const StepId& id) const {
    for (const Step& s : steps)
        if (s.id == id) return &s;
    return nullptr;
}

Step* PlanGraph::find_step(const StepId& id) {
    for (Step& s : steps)
        if (s.id == id) return &s;
    return nullptr;
}

const DecompLink* PlanGraph::decomposition_of(const StepId& parent) const {
    for (const DecompLink& d : decomp_links)
        if (d.parent == parent) return &d;
    return nullptr;
}

bool PlanGraph::is_decomposed(const StepId& id) const {
    return decomposition_of(id) != nullptr;
}

bool PlanGraph::within_subtree(const StepId& descendant,
                               const StepId& ancestor) const {
    StepId cur = descendant;
    for (;;) {
        if (cur == ancestor) return true;
        const Step* s = find_step(cur);
        if (!s || !s->scope) return false;
        cur = *s->scope;
    }
}

StepId PlanGraph::top_initial() const {
    for (const Step& s : steps)
        if (s.kind == StepKind::NullInitial && !s.scope) return s.id;
    return {};
}

StepId PlanGraph::top_final() const {
    for (const Step& s : steps)
        if (s.kind == StepKind::NullFinal && !s.scope) return s.id;
    return {};
}

// Canonical form: steps and variables are renamed by structural position,
// so plans reached through different refinement orders collapse onto one
// signature and duplicate detection prunes the permutations.
std::string PlanGraph::signature() const {
    // Blinded literal text: variables anonymized, constants kept.
    auto blinded = [&](const Literal& lit) {
        Literal applied = bindings.apply(lit);
        std::ostringstream os;
        if (!applied.positive) os << '!';
        os << applied.predicate;
        for (const Term& t : applied.args)
            os << ' ' << (t.is_variable() ? std::string("_") : t.to_string());
        return os.str();
    };

    std::map<StepId, std::vector<std::string>> out_conds, in_conds;
    for (const CausalLink& l : causal_links) {
        out_conds[l.producer].push_back(blinded(l.condition));
        in_conds[l.consumer].push_back(blinded(l.condition));
    }
    for (auto& [_, v] : out_conds) std::sort(v.begin(), v.end());
    for (auto& [_, v] : in_conds) std::sort(v.begin(), v.end());

    auto scope_ops = [&](const Step& s) {
        std::string path;
        std::optional<StepId> cur = s.scope;
        while (cur) {
            const Step* parent = find_step(*cur);
            if (!parent) break;
            path += parent->operator_name + "/";
            cur = parent->scope;
        }
        return path;
    };

    std::vector<std::size_t> order(steps.size());
    for (std::size_t i = 0; i < steps.size(); ++i) order[i] = i;
    std::vector<std::string> keys(steps.size());
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const Step& s = steps[i];
        std::ostringstream key;
        key << to_string(s.kind) << '|' << s.operator_name << '|';
        for (const Term& a : s.args) {
            Term applied = bindings.apply(a);
            key << (applied.is_variable() ? std::string("_")
                                          : applied.to_string())
                << ' ';
        }
        key << '|' << scope_ops(s) << '|';
        for (const auto& c : out_conds[s.id]) key << c << ',';
        key << '|';
        for (const auto& c : in_conds[s.id]) key << c << ',';
        keys[i] = key.str();
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });

    std::map<StepId, std::size_t> canonical;
    for (std::size_t rank = 0; rank < order.size(); ++rank)
        canonical.insert_or_assign(steps[order[rank]].id, rank);

    // Canonical variable names in first-appearance order over the
    // canonically ordered steps.
    std::map<Term, std::size_t> var_names;
    auto var_name = [&](const Term& t) -> std::string {
        Term rep = bindings.apply(t);
        if (!rep.is_variable()) return rep.to_string();
        auto [it, inserted] = var_names.emplace(rep, var_names.size());
        return "?v" + std::to_string(it->second);
    };
    auto canon_literal = [&](const Literal& lit) {
        Literal applied = bindings.apply(lit);
        std::ostringstream os;
        if (!applied.positive) os << '!';
        os << applied.predicate;
        for (const Term& t : applied.args) os << ' ' << var_name(t);
        return os.str();
    };

    std::ostringstream os;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const Step& s = steps[order[rank]];
        os << to_string(s.kind) << ':' << s.operator_name;
        for (const Term& a : s.args) os << ' ' << var_name(a);
        os << '@' << (s.scope ? (int)canonical.at(*s.scope) : -1) << ';';
    }
    os << '|';
    std::vector<std::string> links;
    for (const CausalLink& l : causal_links) {
        std::ostringstream link;
        link << canonical.at(l.producer) << '>' << canonical.at(l.consumer)
             << ':' << canon_literal(l.condition);
        links.push_back(link.str());
    }
    std::sort(links.begin(), links.end());
    for (const auto& l : links) os << l << ';';
    os << '|';
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (const auto& [a, b] : ordering.base_edges())
        edges.emplace_back(canonical.at(a), canonical.at(b));
    std::sort(edges.begin(), edges.end());
    for (const auto& [a, b] : edges) os << a << '<' << b << ';';
    os << '|';
    std::vector<std::string> noncodes;
    for (const auto& [a, b] : bindings.noncodesignations()) {
        std::string na = var_name(a);
        std::string nb = var_name(b);
        if (nb < na) std::swap(na, nb);
        noncodes.push_back(na + "!" + nb);
    }
    std::sort(noncodes.begin(), noncodes.end());
    for (const auto& n : noncodes) os << n << ';';
    return os.str();
}

PlanGraph new_null_plan(const Problem& problem) {
    PlanGraph plan;
    Step init;
    init.id = "s-" + std::to_string(plan.fresh.next_step());
    init.kind = StepKind::NullInitial;
    init.effects = problem.initial;
    Step fin;
    fin.id = "s-" + std::to_string(plan.fresh.next_step());
    fin.kind = StepKind::NullFinal;
    fin.preconditions = problem.goal;
    plan.ordering.add_node(init.id);
    plan.ordering.add_node(fin.id);
    (void)plan.ordering.add_before(init.id, fin.id);
    for (const Literal& goal : problem.goal)
        plan.flaws.push_back(OpenCondition{fin.id, goal});
    plan.steps.push_back(std::move(init));
    plan.steps.push_back(std::move(fin));
    return plan;
}

bool possibly_between(const PlanGraph& plan, const StepId& a, const StepId& b,
                      const StepId& c) {
    return !plan.ordering.entails_before(a, b) &&
           !plan.ordering.entails_before(c, a);
}

bool self_masked_delete(const PlanGraph& plan, const Step& step,
                        const Literal& applied_effect) {
    if (applied_effect.positive) return false;
    Literal atom = applied_effect.negated();
    for (const Literal& other : step.effects)
        if (other.positive && plan.bindings.apply(other) == atom) return true;
    return false;
}

std::vector<Threat> detect_threats(const PlanGraph& plan) {
    std::vector<Threat> out;
    for (const CausalLink& link : plan.causal_links) {
        Literal negated = plan.bindings.apply(link.condition).negated();
        for (const Step& step : plan.steps) {
            if (step.id == link.producer || step.id == link.consumer) continue;
            if (step.kind == StepKind::NullFinal) continue;
            // A decomposed composite's effects are realized by its subplan
            // steps, which are threat candidates themselves.
            if (step.kind == StepKind::Composite && plan.is_decomposed(step.id))
                continue;
            if (!possibly_between(plan, step.id, link.producer, link.consumer))
                continue;
            for (const Literal& effect : step.effects) {
                Literal applied = plan.bindings.apply(effect);
                if (self_masked_delete(plan, step, applied)) continue;
                bool clash = false;
                try {
                    clash = unify(applied, negated, plan.bindings).has_value();
                } catch (const ArityMismatchError&) {
                    clash = false;
                }
                if (clash) {
                    out.push_back(Threat{step.id, link});
                    break;
                }
            }
        }
    }
    return out;
}

namespace {

bool supported(const PlanGraph& plan, const StepId& step, const Literal& pre) {
    for (const CausalLink& link : plan.causal_links)
        if (link.consumer == step &&
            plan.bindings.apply(link.condition) == plan.bindings.apply(pre))
            return true;
    return false;
}

}  // namespace

std::vector<Flaw> recompute_flaws(const PlanGraph& plan) {
    std::vector<Flaw> out;
    for (const Step& step : plan.steps) {
        for (const Literal& pre : step.preconditions)
            if (!supported(plan, step.id, pre))
                out.push_back(OpenCondition{step.id, pre});
        if (step.kind == StepKind::Composite && !plan.is_decomposed(step.id))
            out.push_back(UnexpandedComposite{step.id});
    }
    for (const Threat& t : detect_threats(plan)) out.push_back(t);
    return out;
}

bool same_flaw_set(const std::vector<Flaw>& a, const std::vector<Flaw>& b) {
    auto key = [](const Flaw& f) { return to_string(f); };
    std::multiset<std::string> ka, kb;
    for (const Flaw& f : a) ka.insert(key(f));
    for (const Flaw& f : b) kb.insert(key(f));
    return ka == kb;
}

VerifyReport verify_complete(const PlanGraph& plan) {
    VerifyReport report;
    if (!plan.bindings.consistent())
        report.violations.push_back("bindings inconsistent");
    if (!plan.ordering.acyclic())
        report.violations.push_back("ordering inconsistent: cycle present");

    for (const Step& step : plan.steps)
        for (const Literal& pre : step.preconditions)
            if (!supported(plan, step.id, pre))
                report.violations.push_back("unsupported precondition " +
                                            pre.to_string() + " of step " +
                                            step.id + " (" +
                                            step_label(plan, step.id) + ")");

    // Causal-link producers must actually assert their condition and
    // must be ordered before their consumers.
    for (const CausalLink& link : plan.causal_links) {
        const Step* producer = plan.find_step(link.producer);
        const Step* consumer = plan.find_step(link.consumer);
        if (!producer || !consumer) {
            report.violations.push_back("causal link references missing step");
            continue;
        }
        bool asserts = false;
        for (const Literal& effect : producer->effects) {
            Literal applied = plan.bindings.apply(effect);
            if (self_masked_delete(plan, *producer, applied)) continue;
            if (applied == plan.bindings.apply(link.condition)) asserts = true;
        }
        if (!asserts)
            report.violations.push_back(
                "link condition " + link.condition.to_string() +
                " is not an effect of its producer " + link.producer);
        if (!plan.ordering.entails_before(link.producer, link.consumer) &&
            link.producer != link.consumer)
            report.violations.push_back("link producer " + link.producer +
                                        " not ordered before consumer " +
                                        link.consumer);
    }

    for (const Threat& t : detect_threats(plan))
        report.violations.push_back("threat: step " + t.step +
                                    " may undo " + t.link.condition.to_string() +
                                    " between " + t.link.producer + " and " +
                                    t.link.consumer);

    for (const Step& step : plan.steps) {
        if (step.kind != StepKind::Composite) continue;
        const DecompLink* d = plan.decomposition_of(step.id);
        if (!d) {
            report.violations.push_back("composite step " + step.id + " (" +
                                        step_label(plan, step.id) +
                                        ") is not decomposed");
            continue;
        }
        const Step* init = plan.find_step(d->sub_initial);
        const Step* fin = plan.find_step(d->sub_final);
        if (!init || !fin) {
            report.violations.push_back("decomposition of " + step.id +
                                        " references missing boundary steps");
            continue;
        }
        auto same_set = [&](const std::vector<Literal>& a,
                            const std::vector<Literal>& b) {
            std::multiset<std::string> sa, sb;
            for (const Literal& l : a) sa.insert(plan.bindings.apply(l).to_string());
            for (const Literal& l : b) sb.insert(plan.bindings.apply(l).to_string());
            return sa == sb;
        };
        if (!same_set(init->effects, step.preconditions))
            report.violations.push_back(
                "subplan initial effects of " + step.id +
                " differ from parent preconditions");
        if (!same_set(fin->preconditions, step.effects))
            report.violations.push_back(
                "subplan final preconditions of " + step.id +
                " differ from parent effects");
    }
    return report;
}

std::string step_label(const PlanGraph& plan, const StepId& id) {
    const Step* step = plan.find_step(id);
    if (!step) return id;
    if (step->is_null()) return step->display_name();
    std::ostringstream os;
    os << step->operator_name << '(';
    for (std::size_t i = 0; i < step->args.size(); ++i) {
        if (i) os << ' ';
        os << plan.bindings.apply(step->args[i]).to_string();
    }
    os << ')';
    return os.str();
}

PlanGraph remove_unused_steps(const PlanGraph& plan) {
    if (!plan.flaws.empty())
        throw std::invalid_argument(
            "remove_unused_steps requires a flaw-free plan");

    PlanGraph out = plan;
    for (;;) {
        std::set<StepId> removable;
        for (const Step& step : out.steps) {
            if (step.is_null()) continue;
            bool has_outgoing = false;
            for (const CausalLink& link : out.causal_links)
                if (link.producer == step.id) has_outgoing = true;
            if (has_outgoing) continue;
            if (step.kind == StepKind::Composite) {
                // A composite goes together with its whole subtree, and only
                // when nothing inside feeds a consumer outside.
                bool feeds_outside = false;
                for (const CausalLink& link : out.causal_links)
                    if (out.within_subtree(link.producer, step.id) &&
                        !out.within_subtree(link.consumer, step.id))
                        feeds_outside = true;
                if (feeds_outside) continue;
                removable.insert(step.id);
                for (const Step& other : out.steps)
                    if (other.id != step.id &&
                        out.within_subtree(other.id, step.id))
                        removable.insert(other.id);
            } else {
                removable.insert(step.id);
            }
        }
        if (removable.empty()) break;

        PlanGraph next = out;
        next.steps.clear();
        for (const Step& s : out.steps)
            if (!removable.count(s.id)) next.steps.push_back(s);
        next.causal_links.clear();
        for (const CausalLink& l : out.causal_links)
            if (!removable.count(l.producer) && !removable.count(l.consumer))
                next.causal_links.push_back(l);
        next.decomp_links.clear();
        for (const DecompLink& d : out.decomp_links)
            if (!removable.count(d.parent)) next.decomp_links.push_back(d);

        // Rebuild the ordering over surviving steps from surviving edges.
        OrderingSet rebuilt;
        for (const Step& s : next.steps) rebuilt.add_node(s.id);
        for (const DecompLink& d : next.decomp_links)
            rebuilt.expand_interval(d.parent, d.sub_initial, d.sub_final);
        for (const auto& [a, b] : out.ordering.base_edges())
            if (next.find_step(a) && next.find_step(b))
                (void)rebuilt.add_before(a, b);
        next.ordering = std::move(rebuilt);
        out = std::move(next);
    }

    VerifyReport check = verify_complete(out);
    if (!check.complete())
        throw std::runtime_error(
            "step removal broke plan invariants:\n" + check.to_string());
    return out;
}

}  // namespace dpocl
