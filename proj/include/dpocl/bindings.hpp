// Codesignation / non-codesignation constraints over variables and
// constants, with most-general unification of literals on top.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dpocl/terms.hpp"

namespace dpocl {

// Thrown when two literals share a predicate at different arities; this
// is malformed input, distinct from ordinary unification failure.
struct ArityMismatchError : std::invalid_argument {
    explicit ArityMismatchError(const std::string& what)
        : std::invalid_argument(what) {}
};

// Equivalence classes over terms plus a set of pairs forbidden from
// co-referring. A class never holds two distinct constants, and no
// forbidden pair may fall inside one class. Extension is monotone: a
// consistent extension never drops a previously added constraint.
class BindingSet {
public:
    BindingSet() = default;

    // Merge the classes of x and y. Returns the extended set, or absent
    // when the merge would put two constants in one class or violate a
    // non-codesignation. The receiver is left untouched.
    std::optional<BindingSet> with_codesignation(const Term& x,
                                                 const Term& y) const;

    // Record that x and y must never co-refer. Absent when they already
    // co-designate (including x == y).
    std::optional<BindingSet> with_noncodesignation(const Term& x,
                                                    const Term& y) const;

    bool codesignates(const Term& x, const Term& y) const;
    bool forbidden(const Term& x, const Term& y) const;

    // Class representative: the constant when the class has one,
    // otherwise the least member. Terms never seen are their own
    // representative.
    Term representative(const Term& t) const;

    // True iff both invariants hold. Maintained incrementally, so this
    // only fails on sets produced by deserialization of bad input.
    bool consistent() const;

    // Substitute each variable by its representative.
    Literal apply(const Literal& lit) const;
    Term apply(const Term& t) const;

    // All codesignation classes with more than one member, each sorted.
    std::vector<std::vector<Term>> classes() const;
    std::vector<std::pair<Term, Term>> noncodesignations() const;

    bool operator==(const BindingSet& other) const;
    bool operator!=(const BindingSet& other) const { return !(*this == other); }

private:
    Term find(const Term& t) const;

    // Union-find parent map; absent keys are singleton roots.
    std::map<Term, Term> parent_;
    std::set<std::pair<Term, Term>> noncodes_;  // stored root pairs, ordered
};

// Most-general unifier of a and b as an extension of the given set.
// Absent when predicates/polarity/arity differ in a way plain terms
// cannot fix, or when the required merges are inconsistent. Throws
// ArityMismatchError when a and b share a predicate at two arities.
std::optional<BindingSet> unify(const Literal& a, const Literal& b,
                                const BindingSet& bindings);

// Term-level variant used by threat separation.
std::optional<BindingSet> unify_terms(const Term& a, const Term& b,
                                      const BindingSet& bindings);

std::optional<BindingSet> add_noncodesignation(const BindingSet& bindings,
                                               const Term& x, const Term& y);

bool consistent(const BindingSet& bindings);

Literal apply(const BindingSet& bindings, const Literal& lit);

}  // namespace dpocl
