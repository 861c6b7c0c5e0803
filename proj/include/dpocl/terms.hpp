// First-order terms and literals: the currency of preconditions,
// effects, goals and causal-link conditions.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dpocl {

// A term is either a constant symbol or a variable. Variables carry a
// numeric suffix so that step instantiation can mint fresh copies that
// never capture one another. Structured ground arguments such as
// "(causes i u)" are interned at parse time as ordinary constants whose
// name is the canonical printed form.
class Term {
public:
    static Term constant(std::string name);
    static Term variable(std::string name, std::uint32_t suffix);

    bool is_constant() const { return constant_; }
    bool is_variable() const { return !constant_; }
    const std::string& name() const { return name_; }
    std::uint32_t suffix() const { return suffix_; }

    std::string to_string() const;

    bool operator==(const Term& other) const;
    bool operator!=(const Term& other) const { return !(*this == other); }
    bool operator<(const Term& other) const;

private:
    Term(bool constant, std::string name, std::uint32_t suffix)
        : constant_(constant), name_(std::move(name)), suffix_(suffix) {}

    bool constant_;
    std::string name_;
    std::uint32_t suffix_;  // meaningful for variables only
};

// A literal: predicate applied to terms, with a polarity. Negation is
// structural, so negating twice restores the original.
struct Literal {
    std::string predicate;
    std::vector<Term> args;
    bool positive = true;

    Literal negated() const;
    std::string to_string() const;

    bool operator==(const Literal& other) const;
    bool operator!=(const Literal& other) const { return !(*this == other); }
    bool operator<(const Literal& other) const;
};

Literal make_literal(std::string predicate, std::vector<Term> args,
                     bool positive = true);

bool is_ground(const Literal& lit);

}  // namespace dpocl
