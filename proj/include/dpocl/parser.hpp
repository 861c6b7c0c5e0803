// Text formats: s-expression domain/problem/feedback files with spanned
// diagnostics. Parsing is total; failures surface as diagnostics rather
// than aborts.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dpocl/domain.hpp"
#include "dpocl/terms.hpp"

namespace dpocl {

struct FeedbackAssertion {
    enum class Status { Achieved, Failed };
    Status status = Status::Failed;
    Literal condition;  // ground
    std::optional<std::string> locus;  // producing step id
    SourceSpan span;
};

struct Feedback {
    std::vector<FeedbackAssertion> assertions;
};

template <typename T>
struct ParseResult {
    std::optional<T> value;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return value.has_value() && !has_errors(diagnostics); }
};

ParseResult<Domain> parse_domain(const std::string& text,
                                 const std::string& filename = "<domain>");

ParseResult<Problem> parse_problem(const std::string& text, const Domain& domain,
                                   const std::string& filename = "<problem>");

ParseResult<Feedback> parse_feedback(const std::string& text,
                                     const std::map<std::string, std::size_t>& predicates,
                                     const std::string& filename = "<feedback>");

// Parse one literal in canonical text form, e.g. "(bel n l3)" or
// "(not (bel ?p l3))". Used by plan deserialization.
ParseResult<Literal> parse_literal_text(const std::string& text);

// Parse one term in canonical text form: "n", "?p#3", "(causes i u)".
ParseResult<Term> parse_term_text(const std::string& text);

std::string pretty_print(const Domain& domain);
std::string pretty_print(const Problem& problem);

}  // namespace dpocl
