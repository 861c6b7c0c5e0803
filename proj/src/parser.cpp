#include "dpocl/parser.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace dpocl {

namespace {

// ------------------------------------------------------------ s-expressions

struct Sexp {
    enum class Kind { Symbol, List };
    Kind kind = Kind::Symbol;
    std::string symbol;
    std::vector<Sexp> items;
    SourceSpan span;

    bool is_symbol(const std::string& s) const {
        return kind == Kind::Symbol && symbol == s;
    }
    bool head_is(const std::string& s) const {
        return kind == Kind::List && !items.empty() && items[0].is_symbol(s);
    }
};

class Lexer {
public:
    Lexer(const std::string& text, std::string filename)
        : text_(text), filename_(std::move(filename)) {}

    struct Token {
        enum class Kind { LParen, RParen, Symbol, End };
        Kind kind;
        std::string symbol;
        SourceSpan span;
    };

    Token next() {
        skip_space();
        SourceSpan span{filename_, line_, column_, 1};
        if (pos_ >= text_.size()) return {Token::Kind::End, "", span};
        char c = text_[pos_];
        if (c == '(') {
            advance();
            return {Token::Kind::LParen, "(", span};
        }
        if (c == ')') {
            advance();
            return {Token::Kind::RParen, ")", span};
        }
        std::string sym;
        while (pos_ < text_.size() && !std::isspace((unsigned char)text_[pos_]) &&
               text_[pos_] != '(' && text_[pos_] != ')' && text_[pos_] != ';') {
            sym.push_back((char)std::tolower((unsigned char)text_[pos_]));
            advance();
        }
        span.length = (int)sym.size();
        return {Token::Kind::Symbol, sym, span};
    }

private:
    void skip_space() {
        for (;;) {
            while (pos_ < text_.size() &&
                   std::isspace((unsigned char)text_[pos_]))
                advance();
            if (pos_ < text_.size() && text_[pos_] == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
                continue;
            }
            break;
        }
    }
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    const std::string& text_;
    std::string filename_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

class Reader {
public:
    Reader(const std::string& text, const std::string& filename,
           std::vector<Diagnostic>& diags)
        : lexer_(text, filename), diags_(diags) {
        tok_ = lexer_.next();
    }

    std::vector<Sexp> read_all() {
        std::vector<Sexp> out;
        while (tok_.kind != Lexer::Token::Kind::End) {
            if (tok_.kind == Lexer::Token::Kind::RParen) {
                error("unbalanced ')'", tok_.span);
                tok_ = lexer_.next();
                continue;
            }
            out.push_back(read());
        }
        return out;
    }

private:
    Sexp read() {
        if (tok_.kind == Lexer::Token::Kind::Symbol) {
            Sexp s;
            s.kind = Sexp::Kind::Symbol;
            s.symbol = tok_.symbol;
            s.span = tok_.span;
            tok_ = lexer_.next();
            return s;
        }
        // LParen
        Sexp list;
        list.kind = Sexp::Kind::List;
        list.span = tok_.span;
        tok_ = lexer_.next();
        while (tok_.kind != Lexer::Token::Kind::RParen) {
            if (tok_.kind == Lexer::Token::Kind::End) {
                error("unbalanced '(': missing ')'", list.span);
                return list;
            }
            list.items.push_back(read());
        }
        tok_ = lexer_.next();
        return list;
    }

    void error(const std::string& msg, const SourceSpan& span) {
        diags_.push_back({Diagnostic::Severity::Error, msg, span});
    }

    Lexer lexer_;
    Lexer::Token tok_;
    std::vector<Diagnostic>& diags_;
};

std::string sexp_to_canonical(const Sexp& s) {
    if (s.kind == Sexp::Kind::Symbol) return s.symbol;
    std::string out = "(";
    for (std::size_t i = 0; i < s.items.size(); ++i) {
        if (i) out += ' ';
        out += sexp_to_canonical(s.items[i]);
    }
    out += ')';
    return out;
}

// ------------------------------------------------------------ term/literal

struct ParserCtx {
    std::vector<Diagnostic>& diags;
    std::map<std::string, std::size_t>* arities = nullptr;  // may grow
    bool enforce_known_predicates = false;

    void error(const std::string& msg, const SourceSpan& span) {
        diags.push_back({Diagnostic::Severity::Error, msg, span});
    }
    void warn(const std::string& msg, const SourceSpan& span) {
        diags.push_back({Diagnostic::Severity::Warning, msg, span});
    }
};

bool sexp_contains_variable(const Sexp& s) {
    if (s.kind == Sexp::Kind::Symbol) return !s.symbol.empty() && s.symbol[0] == '?';
    return std::any_of(s.items.begin(), s.items.end(), sexp_contains_variable);
}

std::optional<Term> parse_term(const Sexp& s, ParserCtx& ctx) {
    if (s.kind == Sexp::Kind::Symbol) {
        if (s.symbol.empty()) return std::nullopt;
        if (s.symbol[0] == '?') {
            std::string body = s.symbol.substr(1);
            if (body.empty()) {
                ctx.error("empty variable name", s.span);
                return std::nullopt;
            }
            // A '#n' tail restores a suffixed variable (serialized form).
            auto hash = body.find('#');
            std::uint32_t suffix = 0;
            if (hash != std::string::npos) {
                try {
                    suffix = (std::uint32_t)std::stoul(body.substr(hash + 1));
                } catch (...) {
                    ctx.error("bad variable suffix in '" + s.symbol + "'", s.span);
                    return std::nullopt;
                }
                body = body.substr(0, hash);
            }
            return Term::variable(body, suffix);
        }
        return Term::constant(s.symbol);
    }
    // Structured ground argument, reified as an interned constant.
    if (sexp_contains_variable(s)) {
        ctx.error("structured term " + sexp_to_canonical(s) +
                      " may not contain variables",
                  s.span);
        return std::nullopt;
    }
    if (s.items.empty()) {
        ctx.error("empty structured term", s.span);
        return std::nullopt;
    }
    return Term::constant(sexp_to_canonical(s));
}

std::optional<Literal> parse_literal(const Sexp& s, ParserCtx& ctx) {
    if (s.kind != Sexp::Kind::List || s.items.empty()) {
        ctx.error("expected a literal", s.span);
        return std::nullopt;
    }
    if (s.items[0].is_symbol("not")) {
        if (s.items.size() != 2) {
            ctx.error("(not ...) takes exactly one literal", s.span);
            return std::nullopt;
        }
        auto inner = parse_literal(s.items[1], ctx);
        if (!inner) return std::nullopt;
        return inner->negated();
    }
    if (s.items[0].kind != Sexp::Kind::Symbol) {
        ctx.error("literal must start with a predicate symbol", s.span);
        return std::nullopt;
    }
    Literal lit;
    lit.predicate = s.items[0].symbol;
    for (std::size_t i = 1; i < s.items.size(); ++i) {
        auto t = parse_term(s.items[i], ctx);
        if (!t) return std::nullopt;
        lit.args.push_back(std::move(*t));
    }
    if (ctx.arities) {
        auto it = ctx.arities->find(lit.predicate);
        if (it == ctx.arities->end()) {
            if (ctx.enforce_known_predicates) {
                ctx.error("undeclared predicate '" + lit.predicate + "'", s.span);
                return std::nullopt;
            }
            (*ctx.arities)[lit.predicate] = lit.args.size();
        } else if (it->second != lit.args.size()) {
            ctx.error("predicate '" + lit.predicate + "' declared with arity " +
                          std::to_string(it->second) + " but used with " +
                          std::to_string(lit.args.size()) + " arguments",
                      s.span);
            return std::nullopt;
        }
    }
    return lit;
}

// (and LIT...) or a single literal.
std::vector<Literal> parse_condition_list(const Sexp& s, ParserCtx& ctx) {
    std::vector<Literal> out;
    if (s.head_is("and")) {
        for (std::size_t i = 1; i < s.items.size(); ++i)
            if (auto lit = parse_literal(s.items[i], ctx)) out.push_back(*lit);
        return out;
    }
    if (auto lit = parse_literal(s, ctx)) out.push_back(*lit);
    return out;
}

// ------------------------------------------------------------ domain parse

void parse_action(const Sexp& form, Domain& domain, ParserCtx& ctx) {
    Operator op;
    op.span = form.span;
    std::size_t i = 1;
    if (i >= form.items.size() ||
        form.items[i].kind != Sexp::Kind::Symbol) {
        ctx.error(":action requires a name", form.span);
        return;
    }
    op.name = form.items[i++].symbol;
    while (i < form.items.size()) {
        const Sexp& kw = form.items[i];
        if (kw.kind != Sexp::Kind::Symbol || kw.symbol.empty() ||
            kw.symbol[0] != ':') {
            ctx.error("expected a keyword in action '" + op.name + "'", kw.span);
            return;
        }
        if (i + 1 >= form.items.size()) {
            ctx.error("keyword " + kw.symbol + " missing its argument", kw.span);
            return;
        }
        const Sexp& arg = form.items[i + 1];
        if (kw.symbol == ":parameters") {
            if (arg.kind != Sexp::Kind::List) {
                ctx.error(":parameters expects a list", arg.span);
            } else {
                for (const Sexp& p : arg.items) {
                    if (p.kind != Sexp::Kind::Symbol || p.symbol.empty() ||
                        p.symbol[0] != '?')
                        ctx.error("parameter must be a variable", p.span);
                    else
                        op.params.push_back(p.symbol.substr(1));
                }
            }
        } else if (kw.symbol == ":composite") {
            if (arg.is_symbol("true"))
                op.composite = true;
            else if (arg.is_symbol("false"))
                op.composite = false;
            else
                ctx.error(":composite expects true or false", arg.span);
        } else if (kw.symbol == ":precondition") {
            op.preconditions = parse_condition_list(arg, ctx);
        } else if (kw.symbol == ":effect") {
            op.effects = parse_condition_list(arg, ctx);
        } else {
            ctx.error("unknown action keyword " + kw.symbol, kw.span);
        }
        i += 2;
    }
    if (domain.operators.count(op.name)) {
        ctx.error("duplicate operator '" + op.name + "'", form.span);
        return;
    }
    domain.operator_order.push_back(op.name);
    domain.operators[op.name] = std::move(op);
}

void parse_decomposition(const Sexp& form, Domain& domain, ParserCtx& ctx) {
    DecompSchema schema;
    schema.span = form.span;
    std::size_t i = 1;
    if (i >= form.items.size() || form.items[i].kind != Sexp::Kind::Symbol) {
        ctx.error(":decomposition requires an operator name", form.span);
        return;
    }
    schema.for_operator = form.items[i++].symbol;
    while (i < form.items.size()) {
        const Sexp& kw = form.items[i];
        if (kw.kind != Sexp::Kind::Symbol || kw.symbol.empty() ||
            kw.symbol[0] != ':') {
            ctx.error("expected a keyword in decomposition of '" +
                          schema.for_operator + "'",
                      kw.span);
            return;
        }
        if (i + 1 >= form.items.size()) {
            ctx.error("keyword " + kw.symbol + " missing its argument", kw.span);
            return;
        }
        const Sexp& arg = form.items[i + 1];
        if (kw.symbol == ":key") {
            if (arg.kind == Sexp::Kind::Symbol)
                schema.key = arg.symbol;
            else
                ctx.error(":key expects a symbol", arg.span);
        } else if (kw.symbol == ":constraints") {
            schema.applicability = parse_condition_list(arg, ctx);
        } else if (kw.symbol == ":steps") {
            if (arg.kind != Sexp::Kind::List) {
                ctx.error(":steps expects a list", arg.span);
            } else {
                for (const Sexp& entry : arg.items) {
                    if (entry.kind != Sexp::Kind::List || entry.items.size() != 2 ||
                        entry.items[0].kind != Sexp::Kind::Symbol ||
                        entry.items[1].kind != Sexp::Kind::List ||
                        entry.items[1].items.empty() ||
                        entry.items[1].items[0].kind != Sexp::Kind::Symbol) {
                        ctx.error("step entry must be (id (operator term...))",
                                  entry.span);
                        continue;
                    }
                    DecompSchema::Substep sub;
                    sub.local_id = entry.items[0].symbol;
                    sub.operator_name = entry.items[1].items[0].symbol;
                    bool bad = false;
                    for (std::size_t k = 1; k < entry.items[1].items.size(); ++k) {
                        auto t = parse_term(entry.items[1].items[k], ctx);
                        if (!t) {
                            bad = true;
                            break;
                        }
                        sub.args.push_back(*t);
                    }
                    if (!bad) schema.substeps.push_back(std::move(sub));
                }
            }
        } else if (kw.symbol == ":orderings") {
            if (arg.kind != Sexp::Kind::List) {
                ctx.error(":orderings expects a list", arg.span);
            } else {
                for (const Sexp& entry : arg.items) {
                    if (entry.kind != Sexp::Kind::List || entry.items.size() != 2 ||
                        entry.items[0].kind != Sexp::Kind::Symbol ||
                        entry.items[1].kind != Sexp::Kind::Symbol) {
                        ctx.error("ordering entry must be (id id)", entry.span);
                        continue;
                    }
                    schema.sub_orderings.emplace_back(entry.items[0].symbol,
                                                      entry.items[1].symbol);
                }
            }
        } else if (kw.symbol == ":bindings") {
            if (arg.kind != Sexp::Kind::List) {
                ctx.error(":bindings expects a list", arg.span);
            } else {
                for (const Sexp& entry : arg.items) {
                    bool negated = entry.head_is("not");
                    const Sexp* eq = &entry;
                    if (negated) {
                        if (entry.items.size() != 2) {
                            ctx.error("binding must be (= t t) or (not (= t t))",
                                      entry.span);
                            continue;
                        }
                        eq = &entry.items[1];
                    }
                    if (!eq->head_is("=") || eq->items.size() != 3) {
                        ctx.error("binding must be (= t t) or (not (= t t))",
                                  entry.span);
                        continue;
                    }
                    auto l = parse_term(eq->items[1], ctx);
                    auto r = parse_term(eq->items[2], ctx);
                    if (l && r)
                        schema.sub_bindings.push_back({*l, *r, !negated});
                }
            }
        } else if (kw.symbol == ":links") {
            if (arg.kind != Sexp::Kind::List) {
                ctx.error(":links expects a list", arg.span);
            } else {
                for (const Sexp& entry : arg.items) {
                    if (entry.kind != Sexp::Kind::List ||
                        entry.items.size() != 3 ||
                        entry.items[0].kind != Sexp::Kind::Symbol ||
                        entry.items[1].kind != Sexp::Kind::Symbol) {
                        ctx.error("link entry must be (producer consumer LIT)",
                                  entry.span);
                        continue;
                    }
                    auto lit = parse_literal(entry.items[2], ctx);
                    if (!lit) continue;
                    schema.sub_links.push_back(
                        {entry.items[0].symbol, entry.items[1].symbol, *lit});
                }
            }
        } else {
            ctx.error("unknown decomposition keyword " + kw.symbol, kw.span);
        }
        i += 2;
    }
    if (schema.key.empty())
        schema.key = "schema-" +
                     std::to_string(domain.schemas[schema.for_operator].size() + 1);
    domain.schemas[schema.for_operator].push_back(std::move(schema));
}

}  // namespace

ParseResult<Domain> parse_domain(const std::string& text,
                                 const std::string& filename) {
    ParseResult<Domain> result;
    Reader reader(text, filename, result.diagnostics);
    std::vector<Sexp> forms = reader.read_all();

    Domain domain;
    ParserCtx ctx{result.diagnostics, &domain.predicates, false};

    const Sexp* define = nullptr;
    for (const Sexp& f : forms)
        if (f.head_is("define")) define = &f;
    if (!define) {
        ctx.error("no (define (domain ...)) form found",
                  SourceSpan{filename, 1, 1, 0});
        return result;
    }
    if (define->items.size() < 2 || !define->items[1].head_is("domain") ||
        define->items[1].items.size() != 2 ||
        define->items[1].items[1].kind != Sexp::Kind::Symbol) {
        ctx.error("expected (define (domain NAME) ...)", define->span);
        return result;
    }
    domain.name = define->items[1].items[1].symbol;

    for (std::size_t i = 2; i < define->items.size(); ++i) {
        const Sexp& section = define->items[i];
        if (section.head_is(":predicates")) {
            for (std::size_t k = 1; k < section.items.size(); ++k) {
                const Sexp& p = section.items[k];
                if (p.kind != Sexp::Kind::List || p.items.size() != 2 ||
                    p.items[0].kind != Sexp::Kind::Symbol ||
                    p.items[1].kind != Sexp::Kind::Symbol) {
                    ctx.error("predicate entry must be (name ARITY)", p.span);
                    continue;
                }
                try {
                    std::size_t arity = std::stoul(p.items[1].symbol);
                    auto [it, inserted] =
                        domain.predicates.emplace(p.items[0].symbol, arity);
                    if (!inserted && it->second != arity)
                        ctx.error("predicate '" + p.items[0].symbol +
                                      "' declared at two arities",
                                  p.span);
                } catch (...) {
                    ctx.error("predicate arity must be an integer", p.span);
                }
            }
            ctx.enforce_known_predicates = true;
        } else if (section.head_is(":action")) {
            parse_action(section, domain, ctx);
        } else if (section.head_is(":decomposition")) {
            parse_decomposition(section, domain, ctx);
        } else {
            ctx.error("unknown domain section", section.span);
        }
    }

    for (const Diagnostic& d : validate_domain(domain))
        result.diagnostics.push_back(d);
    if (!has_errors(result.diagnostics)) result.value = std::move(domain);
    return result;
}

ParseResult<Problem> parse_problem(const std::string& text, const Domain& domain,
                                   const std::string& filename) {
    ParseResult<Problem> result;
    Reader reader(text, filename, result.diagnostics);
    std::vector<Sexp> forms = reader.read_all();

    Problem problem;
    auto arities = domain.predicates;  // copy; problems may not extend it
    ParserCtx ctx{result.diagnostics, &arities, true};

    const Sexp* define = nullptr;
    for (const Sexp& f : forms)
        if (f.head_is("define")) define = &f;
    if (!define || define->items.size() < 2 ||
        !define->items[1].head_is("problem") ||
        define->items[1].items.size() != 2) {
        ctx.error("expected (define (problem NAME) ...)",
                  SourceSpan{filename, 1, 1, 0});
        return result;
    }
    problem.name = define->items[1].items[1].symbol;

    for (std::size_t i = 2; i < define->items.size(); ++i) {
        const Sexp& section = define->items[i];
        if (section.head_is(":domain")) {
            if (section.items.size() == 2 &&
                section.items[1].kind == Sexp::Kind::Symbol) {
                problem.domain_name = section.items[1].symbol;
                if (problem.domain_name != domain.name)
                    ctx.error("problem references domain '" +
                                  problem.domain_name + "' but '" +
                                  domain.name + "' was loaded",
                              section.span);
            } else {
                ctx.error(":domain expects a name", section.span);
            }
        } else if (section.head_is(":init")) {
            for (std::size_t k = 1; k < section.items.size(); ++k) {
                auto lit = parse_literal(section.items[k], ctx);
                if (!lit) continue;
                if (!is_ground(*lit)) {
                    ctx.error("initial condition " + lit->to_string() +
                                  " contains variables",
                              section.items[k].span);
                    continue;
                }
                if (!lit->positive) {
                    ctx.error("initial conditions must be positive",
                              section.items[k].span);
                    continue;
                }
                problem.initial.push_back(std::move(*lit));
            }
        } else if (section.head_is(":goal")) {
            if (section.items.size() != 2) {
                ctx.error(":goal expects one (and ...) form or literal",
                          section.span);
            } else {
                problem.goal = parse_condition_list(section.items[1], ctx);
            }
        } else {
            ctx.error("unknown problem section", section.span);
        }
    }
    if (!has_errors(result.diagnostics)) result.value = std::move(problem);
    return result;
}

ParseResult<Feedback> parse_feedback(
    const std::string& text, const std::map<std::string, std::size_t>& predicates,
    const std::string& filename) {
    ParseResult<Feedback> result;
    Reader reader(text, filename, result.diagnostics);
    std::vector<Sexp> forms = reader.read_all();

    Feedback fb;
    auto arities = predicates;
    ParserCtx ctx{result.diagnostics, &arities, !predicates.empty()};

    // Accept either a single wrapping list of entries or bare entries.
    std::vector<const Sexp*> entries;
    if (forms.size() == 1 && forms[0].kind == Sexp::Kind::List &&
        !forms[0].items.empty() && forms[0].items[0].kind == Sexp::Kind::List) {
        for (const Sexp& e : forms[0].items) entries.push_back(&e);
    } else {
        for (const Sexp& e : forms) entries.push_back(&e);
    }

    for (const Sexp* entry : entries) {
        if (entry->kind != Sexp::Kind::List || entry->items.size() < 2 ||
            entry->items[0].kind != Sexp::Kind::Symbol) {
            ctx.error("feedback entry must be (achieved|failed LIT [:at STEP])",
                      entry->span);
            continue;
        }
        FeedbackAssertion a;
        a.span = entry->span;
        const std::string& head = entry->items[0].symbol;
        if (head == "achieved")
            a.status = FeedbackAssertion::Status::Achieved;
        else if (head == "failed")
            a.status = FeedbackAssertion::Status::Failed;
        else {
            ctx.error("feedback entry must start with achieved or failed",
                      entry->span);
            continue;
        }
        auto lit = parse_literal(entry->items[1], ctx);
        if (!lit) continue;
        if (!is_ground(*lit)) {
            ctx.error("feedback condition must be ground", entry->span);
            continue;
        }
        a.condition = std::move(*lit);
        std::size_t k = 2;
        while (k < entry->items.size()) {
            if (entry->items[k].is_symbol(":at") && k + 1 < entry->items.size() &&
                entry->items[k + 1].kind == Sexp::Kind::Symbol) {
                a.locus = entry->items[k + 1].symbol;
                k += 2;
            } else {
                ctx.error("unexpected token in feedback entry",
                          entry->items[k].span);
                break;
            }
        }
        fb.assertions.push_back(std::move(a));
    }
    if (!has_errors(result.diagnostics)) result.value = std::move(fb);
    return result;
}

ParseResult<Literal> parse_literal_text(const std::string& text) {
    ParseResult<Literal> result;
    Reader reader(text, "<literal>", result.diagnostics);
    std::vector<Sexp> forms = reader.read_all();
    ParserCtx ctx{result.diagnostics, nullptr, false};
    if (forms.size() != 1) {
        ctx.error("expected exactly one literal", SourceSpan{"<literal>", 1, 1, 0});
        return result;
    }
    auto lit = parse_literal(forms[0], ctx);
    if (lit && !has_errors(result.diagnostics)) result.value = std::move(*lit);
    return result;
}

ParseResult<Term> parse_term_text(const std::string& text) {
    ParseResult<Term> result;
    Reader reader(text, "<term>", result.diagnostics);
    std::vector<Sexp> forms = reader.read_all();
    ParserCtx ctx{result.diagnostics, nullptr, false};
    if (forms.size() != 1) {
        ctx.error("expected exactly one term", SourceSpan{"<term>", 1, 1, 0});
        return result;
    }
    auto term = parse_term(forms[0], ctx);
    if (term && !has_errors(result.diagnostics)) result.value = std::move(*term);
    return result;
}

namespace {

void print_literals(std::ostringstream& os, const std::vector<Literal>& lits) {
    os << "(and";
    for (const Literal& l : lits) os << ' ' << l.to_string();
    os << ')';
}

}  // namespace

std::string pretty_print(const Domain& domain) {
    std::ostringstream os;
    os << "(define (domain " << domain.name << ")\n  (:predicates";
    for (const auto& [name, arity] : domain.predicates)
        os << " (" << name << ' ' << arity << ')';
    os << ")\n";
    for (const std::string& name : domain.operator_order) {
        const Operator& op = domain.operators.at(name);
        os << "  (:action " << op.name << "\n    :parameters (";
        for (std::size_t i = 0; i < op.params.size(); ++i)
            os << (i ? " ?" : "?") << op.params[i];
        os << ")\n    :composite " << (op.composite ? "true" : "false") << '\n';
        os << "    :precondition ";
        print_literals(os, op.preconditions);
        os << "\n    :effect ";
        print_literals(os, op.effects);
        os << ")\n";
    }
    for (const auto& [opname, list] : domain.schemas) {
        for (const DecompSchema& schema : list) {
            os << "  (:decomposition " << schema.for_operator << " :key "
               << schema.key << '\n';
            if (!schema.applicability.empty()) {
                os << "    :constraints ";
                print_literals(os, schema.applicability);
                os << '\n';
            }
            os << "    :steps (";
            for (const auto& sub : schema.substeps) {
                os << '(' << sub.local_id << " (" << sub.operator_name;
                for (const Term& t : sub.args) os << ' ' << t.to_string();
                os << "))";
            }
            os << ")\n";
            if (!schema.sub_orderings.empty()) {
                os << "    :orderings (";
                for (const auto& [a, b] : schema.sub_orderings)
                    os << '(' << a << ' ' << b << ')';
                os << ")\n";
            }
            if (!schema.sub_bindings.empty()) {
                os << "    :bindings (";
                for (const auto& b : schema.sub_bindings) {
                    if (b.codesignate)
                        os << "(= " << b.left.to_string() << ' '
                           << b.right.to_string() << ')';
                    else
                        os << "(not (= " << b.left.to_string() << ' '
                           << b.right.to_string() << "))";
                }
                os << ")\n";
            }
            if (!schema.sub_links.empty()) {
                os << "    :links (";
                for (const auto& l : schema.sub_links)
                    os << '(' << l.producer << ' ' << l.consumer << ' '
                       << l.condition.to_string() << ')';
                os << ")\n";
            }
            os << "  )\n";
        }
    }
    os << ")\n";
    return os.str();
}

std::string pretty_print(const Problem& problem) {
    std::ostringstream os;
    os << "(define (problem " << problem.name << ")\n  (:domain "
       << problem.domain_name << ")\n  (:init";
    for (const Literal& l : problem.initial) os << ' ' << l.to_string();
    os << ")\n  (:goal ";
    print_literals(os, problem.goal);
    os << "))\n";
    return os.str();
}

}  // namespace dpocl
