#include "dpocl/bindings.hpp"

#include <algorithm>
#include <sstream>

namespace dpocl {

Term BindingSet::find(const Term& t) const {
    Term cur = t;
    for (;;) {
        auto it = parent_.find(cur);
        if (it == parent_.end()) return cur;
        cur = it->second;
    }
}

namespace {
// Roots are ordered so that a constant, when present, leads its class.
bool root_precedes(const Term& a, const Term& b) {
    if (a.is_constant() != b.is_constant()) return a.is_constant();
    return a < b;
}

std::pair<Term, Term> ordered_pair(const Term& a, const Term& b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}
}  // namespace

std::optional<BindingSet> BindingSet::with_codesignation(const Term& x,
                                                         const Term& y) const {
    Term rx = find(x);
    Term ry = find(y);
    if (rx == ry) return *this;
    if (rx.is_constant() && ry.is_constant()) return std::nullopt;

    Term root = root_precedes(rx, ry) ? rx : ry;
    Term child = root_precedes(rx, ry) ? ry : rx;

    BindingSet next = *this;
    next.parent_.insert_or_assign(child, root);

    // Re-root stored non-codesignation pairs and reject a self-pair.
    std::set<std::pair<Term, Term>> rebased;
    for (const auto& [a, b] : next.noncodes_) {
        Term ra = next.find(a);
        Term rb = next.find(b);
        if (ra == rb) return std::nullopt;
        rebased.insert(ordered_pair(ra, rb));
    }
    next.noncodes_ = std::move(rebased);
    return next;
}

std::optional<BindingSet> BindingSet::with_noncodesignation(
    const Term& x, const Term& y) const {
    Term rx = find(x);
    Term ry = find(y);
    if (rx == ry) return std::nullopt;
    BindingSet next = *this;
    next.noncodes_.insert(ordered_pair(rx, ry));
    return next;
}

bool BindingSet::codesignates(const Term& x, const Term& y) const {
    return find(x) == find(y);
}

bool BindingSet::forbidden(const Term& x, const Term& y) const {
    return noncodes_.count(ordered_pair(find(x), find(y))) > 0;
}

Term BindingSet::representative(const Term& t) const { return find(t); }

bool BindingSet::consistent() const {
    // Constant-vs-constant conflicts are impossible to record through the
    // public extension API; walk everything anyway for deserialized sets.
    std::map<Term, Term> root_constant;
    for (const auto& [child, _] : parent_) {
        Term root = find(child);
        if (child.is_constant()) {
            auto [it, inserted] = root_constant.emplace(root, child);
            if (!inserted && !(it->second == child)) return false;
        }
        if (root.is_constant()) {
            auto [it, inserted] = root_constant.emplace(root, root);
            if (!inserted && !(it->second == root)) return false;
        }
    }
    for (const auto& [a, b] : noncodes_)
        if (find(a) == find(b)) return false;
    return true;
}

Term BindingSet::apply(const Term& t) const {
    return t.is_variable() ? find(t) : t;
}

Literal BindingSet::apply(const Literal& lit) const {
    Literal out = lit;
    for (Term& t : out.args) t = apply(t);
    return out;
}

std::vector<std::vector<Term>> BindingSet::classes() const {
    std::map<Term, std::vector<Term>> by_root;
    for (const auto& [child, _] : parent_) by_root[find(child)].push_back(child);
    std::vector<std::vector<Term>> out;
    for (auto& [root, members] : by_root) {
        members.push_back(root);
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()),
                      members.end());
        if (members.size() > 1) out.push_back(std::move(members));
    }
    return out;
}

std::vector<std::pair<Term, Term>> BindingSet::noncodesignations() const {
    return {noncodes_.begin(), noncodes_.end()};
}

bool BindingSet::operator==(const BindingSet& other) const {
    if (classes() != other.classes()) return false;
    auto mine = noncodesignations();
    auto theirs = other.noncodesignations();
    // Pairs are stored at roots; roots coincide once classes match.
    return std::set<std::pair<Term, Term>>(mine.begin(), mine.end()) ==
           std::set<std::pair<Term, Term>>(theirs.begin(), theirs.end());
}

std::optional<BindingSet> unify_terms(const Term& a, const Term& b,
                                      const BindingSet& bindings) {
    return bindings.with_codesignation(a, b);
}

std::optional<BindingSet> unify(const Literal& a, const Literal& b,
                                const BindingSet& bindings) {
    if (a.predicate != b.predicate || a.positive != b.positive)
        return std::nullopt;
    if (a.args.size() != b.args.size()) {
        std::ostringstream os;
        os << "predicate '" << a.predicate << "' used at arity "
           << a.args.size() << " and " << b.args.size();
        throw ArityMismatchError(os.str());
    }
    BindingSet acc = bindings;
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        auto next = acc.with_codesignation(a.args[i], b.args[i]);
        if (!next) return std::nullopt;
        acc = std::move(*next);
    }
    return acc;
}

std::optional<BindingSet> add_noncodesignation(const BindingSet& bindings,
                                               const Term& x, const Term& y) {
    return bindings.with_noncodesignation(x, y);
}

bool consistent(const BindingSet& bindings) { return bindings.consistent(); }

Literal apply(const BindingSet& bindings, const Literal& lit) {
    return bindings.apply(lit);
}

}  // namespace dpocl
