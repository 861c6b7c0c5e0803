#include "dpocl/terms.hpp"

#include <sstream>
#include <tuple>

namespace dpocl {

Term Term::constant(std::string name) {
    return Term(true, std::move(name), 0);
}

Term Term::variable(std::string name, std::uint32_t suffix) {
    return Term(false, std::move(name), suffix);
}

std::string Term::to_string() const {
    if (constant_) return name_;
    std::ostringstream os;
    os << '?' << name_;
    if (suffix_ != 0) os << '#' << suffix_;
    return os.str();
}

bool Term::operator==(const Term& other) const {
    if (constant_ != other.constant_) return false;
    if (constant_) return name_ == other.name_;
    return name_ == other.name_ && suffix_ == other.suffix_;
}

bool Term::operator<(const Term& other) const {
    return std::tie(constant_, name_, suffix_) <
           std::tie(other.constant_, other.name_, other.suffix_);
}

Literal Literal::negated() const {
    Literal flipped = *this;
    flipped.positive = !positive;
    return flipped;
}

std::string Literal::to_string() const {
    std::ostringstream os;
    if (!positive) os << "(not ";
    os << '(' << predicate;
    for (const Term& t : args) os << ' ' << t.to_string();
    os << ')';
    if (!positive) os << ')';
    return os.str();
}

bool Literal::operator==(const Literal& other) const {
    return positive == other.positive && predicate == other.predicate &&
           args == other.args;
}

bool Literal::operator<(const Literal& other) const {
    return std::tie(positive, predicate, args) <
           std::tie(other.positive, other.predicate, other.args);
}

Literal make_literal(std::string predicate, std::vector<Term> args,
                     bool positive) {
    return Literal{std::move(predicate), std::move(args), positive};
}

bool is_ground(const Literal& lit) {
    for (const Term& t : lit.args)
        if (t.is_variable()) return false;
    return true;
}

}  // namespace dpocl
