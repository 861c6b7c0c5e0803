#include "dpocl/domain.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace dpocl {

std::string Diagnostic::to_string() const {
    std::ostringstream os;
    os << span.file << ':' << span.line << ':' << span.column << ": "
       << (severity == Severity::Error ? "error: " : "warning: ") << message;
    return os.str();
}

bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) {
        return d.severity == Diagnostic::Severity::Error;
    });
}

const Operator* Domain::find_operator(const std::string& name) const {
    auto it = operators.find(name);
    return it == operators.end() ? nullptr : &it->second;
}

const std::vector<DecompSchema>* Domain::schemas_for(
    const std::string& name) const {
    auto it = schemas.find(name);
    return it == schemas.end() ? nullptr : &it->second;
}

namespace {

void check_params_cover(const Operator& op, std::vector<Diagnostic>& out) {
    std::set<std::string> declared(op.params.begin(), op.params.end());
    auto scan = [&](const std::vector<Literal>& lits, const char* where) {
        for (const Literal& lit : lits)
            for (const Term& t : lit.args)
                if (t.is_variable() && !declared.count(t.name())) {
                    out.push_back({Diagnostic::Severity::Error,
                                   "operator '" + op.name + "' uses variable ?" +
                                       t.name() + " in " + where +
                                       " but not in :parameters",
                                   op.span});
                }
    };
    scan(op.preconditions, "precondition");
    scan(op.effects, "effect");
}

bool schema_orderings_acyclic(const DecompSchema& schema) {
    // Plain DFS over the local-id graph.
    std::map<std::string, std::vector<std::string>> next;
    for (const auto& [a, b] : schema.sub_orderings) next[a].push_back(b);
    std::map<std::string, int> state;  // 0 new, 1 open, 2 done
    std::vector<std::string> stack;
    auto visit = [&](auto&& self, const std::string& id) -> bool {
        int& st = state[id];
        if (st == 1) return false;
        if (st == 2) return true;
        st = 1;
        for (const std::string& succ : next[id])
            if (!self(self, succ)) return false;
        st = 2;
        return true;
    };
    for (const auto& [a, _] : next)
        if (!visit(visit, a)) return false;
    return true;
}

// A schema-local view of a substep's instantiated content, reusing the
// parent operator's parameter names so sub-link conditions can unify.
StepSkeleton schema_view(const Domain& domain,
                         const DecompSchema::Substep& sub) {
    const Operator* op = domain.find_operator(sub.operator_name);
    StepSkeleton view;
    view.operator_name = sub.operator_name;
    if (!op) return view;
    std::map<std::string, Term> env;
    for (std::size_t i = 0; i < op->params.size() && i < sub.args.size(); ++i)
        env.insert_or_assign(op->params[i], sub.args[i]);
    auto remap = [&](const Literal& lit) {
        Literal out = lit;
        for (Term& t : out.args)
            if (t.is_variable()) {
                auto it = env.find(t.name());
                if (it != env.end()) t = it->second;
            }
        return out;
    };
    for (const Literal& p : op->preconditions) view.preconditions.push_back(remap(p));
    for (const Literal& e : op->effects) view.effects.push_back(remap(e));
    return view;
}

void check_schema(const Domain& domain, const DecompSchema& schema,
                  std::vector<Diagnostic>& out) {
    const Operator* parent = domain.find_operator(schema.for_operator);
    if (!parent) {
        out.push_back({Diagnostic::Severity::Error,
                       "decomposition for undeclared operator '" +
                           schema.for_operator + "'",
                       schema.span});
        return;
    }
    if (!parent->composite)
        out.push_back({Diagnostic::Severity::Error,
                       "decomposition declared for primitive operator '" +
                           schema.for_operator + "'",
                       schema.span});

    std::set<std::string> ids;
    for (const auto& sub : schema.substeps) {
        if (sub.local_id == "init" || sub.local_id == "final")
            out.push_back({Diagnostic::Severity::Error,
                           "substep id '" + sub.local_id +
                               "' is reserved for the subplan boundary",
                           schema.span});
        if (!ids.insert(sub.local_id).second)
            out.push_back({Diagnostic::Severity::Error,
                           "duplicate substep id '" + sub.local_id + "' in " +
                               schema.for_operator + "/" + schema.key,
                           schema.span});
        const Operator* op = domain.find_operator(sub.operator_name);
        if (!op) {
            out.push_back({Diagnostic::Severity::Error,
                           "substep '" + sub.local_id +
                               "' references undeclared operator '" +
                               sub.operator_name + "'",
                           schema.span});
            continue;
        }
        if (op->params.size() != sub.args.size())
            out.push_back({Diagnostic::Severity::Error,
                           "substep '" + sub.local_id + "' passes " +
                               std::to_string(sub.args.size()) +
                               " arguments to '" + sub.operator_name +
                               "' which takes " +
                               std::to_string(op->params.size()),
                           schema.span});
    }

    auto known = [&](const std::string& id, bool producer) {
        if (producer && id == "init") return true;
        if (!producer && id == "final") return true;
        return ids.count(id) > 0;
    };
    for (const auto& [a, b] : schema.sub_orderings)
        if (!ids.count(a) || !ids.count(b))
            out.push_back({Diagnostic::Severity::Error,
                           "ordering references unknown substep '" +
                               (ids.count(a) ? b : a) + "'",
                           schema.span});
    if (!schema_orderings_acyclic(schema))
        out.push_back({Diagnostic::Severity::Error,
                       "schema orderings for " + schema.for_operator + "/" +
                           schema.key + " contain a cycle",
                       schema.span});

    // Each sub-link condition must unify with some effect of its producer
    // and some precondition of its consumer.
    for (const auto& link : schema.sub_links) {
        if (!known(link.producer, true) || !known(link.consumer, false)) {
            out.push_back({Diagnostic::Severity::Error,
                           "link references unknown substep '" +
                               (known(link.producer, true) ? link.consumer
                                                           : link.producer) +
                               "'",
                           schema.span});
            continue;
        }
        auto effects_of = [&](const std::string& id) -> std::vector<Literal> {
            if (id == "init") return parent->preconditions;
            for (const auto& sub : schema.substeps)
                if (sub.local_id == id)
                    return schema_view(domain, sub).effects;
            return {};
        };
        auto preconditions_of = [&](const std::string& id) -> std::vector<Literal> {
            if (id == "final") return parent->effects;
            for (const auto& sub : schema.substeps)
                if (sub.local_id == id)
                    return schema_view(domain, sub).preconditions;
            return {};
        };
        auto unifies_with_some = [&](const std::vector<Literal>& lits) {
            for (const Literal& lit : lits) {
                try {
                    if (unify(link.condition, lit, BindingSet{})) return true;
                } catch (const ArityMismatchError&) {
                    return false;
                }
            }
            return false;
        };
        if (!unifies_with_some(effects_of(link.producer)))
            out.push_back({Diagnostic::Severity::Error,
                           "link condition " + link.condition.to_string() +
                               " unifies with no effect of substep '" +
                               link.producer + "'",
                           schema.span});
        if (!unifies_with_some(preconditions_of(link.consumer)))
            out.push_back({Diagnostic::Severity::Error,
                           "link condition " + link.condition.to_string() +
                               " unifies with no precondition of substep '" +
                               link.consumer + "'",
                           schema.span});
    }
}

}  // namespace

std::vector<Diagnostic> validate_domain(const Domain& domain) {
    std::vector<Diagnostic> out;
    for (const auto& [name, op] : domain.operators) {
        check_params_cover(op, out);
        if (op.composite) {
            const auto* ss = domain.schemas_for(name);
            if (!ss || ss->empty())
                out.push_back({Diagnostic::Severity::Error,
                               "composite operator '" + name +
                                   "' has no decomposition",
                               op.span});
        }
    }
    for (const auto& [name, list] : domain.schemas)
        for (const DecompSchema& schema : list) check_schema(domain, schema, out);
    return out;
}

StepSkeleton instantiate_step(const Operator& op, FreshIds& fresh) {
    StepSkeleton skel;
    skel.operator_name = op.name;
    skel.composite = op.composite;
    std::map<std::string, Term> env;
    for (const std::string& p : op.params) {
        Term v = Term::variable(p, fresh.next_var());
        env.insert_or_assign(p, v);
        skel.args.push_back(v);
    }
    auto subst = [&](const std::vector<Literal>& lits) {
        std::vector<Literal> out;
        for (const Literal& lit : lits) {
            Literal copy = lit;
            for (Term& t : copy.args)
                if (t.is_variable()) {
                    auto it = env.find(t.name());
                    if (it != env.end()) t = it->second;
                }
            out.push_back(std::move(copy));
        }
        return out;
    };
    skel.preconditions = subst(op.preconditions);
    skel.effects = subst(op.effects);
    return skel;
}

StepSkeleton instantiate_step(const Operator& op,
                              const std::vector<Term>& actual_args) {
    StepSkeleton skel;
    skel.operator_name = op.name;
    skel.composite = op.composite;
    skel.args = actual_args;
    std::map<std::string, Term> env;
    for (std::size_t i = 0; i < op.params.size() && i < actual_args.size(); ++i)
        env.insert_or_assign(op.params[i], actual_args[i]);
    auto subst = [&](const std::vector<Literal>& lits) {
        std::vector<Literal> out;
        for (const Literal& lit : lits) {
            Literal copy = lit;
            for (Term& t : copy.args)
                if (t.is_variable()) {
                    auto it = env.find(t.name());
                    if (it != env.end()) t = it->second;
                }
            out.push_back(std::move(copy));
        }
        return out;
    };
    skel.preconditions = subst(op.preconditions);
    skel.effects = subst(op.effects);
    return skel;
}

}  // namespace dpocl
