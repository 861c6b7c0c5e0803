// Action operators, decomposition schemas and the domain/problem
// containers handed to the planner.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dpocl/bindings.hpp"
#include "dpocl/terms.hpp"

namespace dpocl {

struct SourceSpan {
    std::string file;
    int line = 1;    // 1-based
    int column = 1;  // 1-based
    int length = 0;
};

struct Diagnostic {
    enum class Severity { Error, Warning };
    Severity severity = Severity::Error;
    std::string message;
    SourceSpan span;

    std::string to_string() const;
};

bool has_errors(const std::vector<Diagnostic>& diags);

// Causal signature of an action: what it needs and what it makes true.
// Composite operators are placeholders expanded by decomposition; only
// primitive ones are directly executable.
struct Operator {
    std::string name;
    std::vector<std::string> params;  // variable names, in order
    std::vector<Literal> preconditions;
    std::vector<Literal> effects;
    bool composite = false;
    SourceSpan span;
};

// One-layer expansion of a composite operator: the substeps, plus the
// orderings, bindings and causal links the schema imposes on them.
// Local ids "init" and "final" name the subplan's boundary steps.
struct DecompSchema {
    struct Substep {
        std::string local_id;
        std::string operator_name;
        std::vector<Term> args;  // over parent params / schema locals / constants
    };
    struct SubBinding {
        Term left;
        Term right;
        bool codesignate = true;  // false encodes (not (= l r))
    };
    struct SubLink {
        std::string producer;  // local id, or "init"
        std::string consumer;  // local id, or "final"
        Literal condition;
    };

    std::string for_operator;
    std::string key;
    std::vector<Literal> applicability;
    std::vector<Substep> substeps;
    std::vector<std::pair<std::string, std::string>> sub_orderings;
    std::vector<SubBinding> sub_bindings;
    std::vector<SubLink> sub_links;
    SourceSpan span;
};

struct Domain {
    std::string name;
    std::map<std::string, std::size_t> predicates;  // name -> arity
    std::vector<std::string> operator_order;        // declaration order
    std::map<std::string, Operator> operators;
    std::map<std::string, std::vector<DecompSchema>> schemas;

    const Operator* find_operator(const std::string& name) const;
    const std::vector<DecompSchema>* schemas_for(const std::string& name) const;
};

struct Problem {
    std::string name;
    std::string domain_name;
    std::vector<Literal> initial;  // ground
    std::vector<Literal> goal;
};

// Structural validation of the type invariants: parameter coverage,
// composite/schema pairing, schema references, local-id uniqueness,
// schema ordering acyclicity, and sub-link unifiability.
std::vector<Diagnostic> validate_domain(const Domain& domain);

// Fresh-variable source shared by a plan; suffixes never repeat.
class FreshIds {
public:
    std::uint32_t next_var() { return ++var_counter_; }
    std::uint32_t next_step() { return ++step_counter_; }
    std::uint32_t var_counter() const { return var_counter_; }
    std::uint32_t step_counter() const { return step_counter_; }
    void restore(std::uint32_t vars, std::uint32_t steps) {
        var_counter_ = vars;
        step_counter_ = steps;
    }

private:
    std::uint32_t var_counter_ = 0;
    std::uint32_t step_counter_ = 0;
};

// A step's instantiated content before it joins a plan.
struct StepSkeleton {
    std::string operator_name;
    std::vector<Term> args;
    std::vector<Literal> preconditions;
    std::vector<Literal> effects;
    bool composite = false;
};

// Instantiate an operator with fresh variables. Two instantiations never
// share a variable.
StepSkeleton instantiate_step(const Operator& op, FreshIds& fresh);

// Instantiate with some parameters pre-bound (used by decomposition,
// where substep arguments come from the schema environment).
StepSkeleton instantiate_step(const Operator& op,
                              const std::vector<Term>& actual_args);

}  // namespace dpocl
