#include "dpocl/serialize.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "dpocl/parser.hpp"

namespace dpocl {

namespace {

using nlohmann::json;
constexpr int kFormatVersion = 1;

json term_to_json(const Term& t) { return t.to_string(); }

Term term_from_json(const json& j) {
    if (!j.is_string()) throw std::runtime_error("term must be a string");
    auto parsed = parse_term_text(j.get<std::string>());
    if (!parsed.value)
        throw std::runtime_error("bad term '" + j.get<std::string>() + "'");
    return *parsed.value;
}

json literal_to_json(const Literal& l) { return l.to_string(); }

Literal literal_from_json(const json& j, const Domain& domain) {
    if (!j.is_string()) throw std::runtime_error("literal must be a string");
    auto parsed = parse_literal_text(j.get<std::string>());
    if (!parsed.value)
        throw std::runtime_error("bad literal '" + j.get<std::string>() + "'");
    auto it = domain.predicates.find(parsed.value->predicate);
    if (it != domain.predicates.end() &&
        it->second != parsed.value->args.size())
        throw std::runtime_error("literal '" + j.get<std::string>() +
                                 "' does not match declared arity");
    return *parsed.value;
}

json literals_to_json(const std::vector<Literal>& lits) {
    json arr = json::array();
    for (const Literal& l : lits) arr.push_back(literal_to_json(l));
    return arr;
}

std::vector<Literal> literals_from_json(const json& arr, const Domain& domain) {
    std::vector<Literal> out;
    for (const json& j : arr) out.push_back(literal_from_json(j, domain));
    return out;
}

StepKind kind_from_string(const std::string& s) {
    if (s == "primitive") return StepKind::Primitive;
    if (s == "composite") return StepKind::Composite;
    if (s == "null-initial") return StepKind::NullInitial;
    if (s == "null-final") return StepKind::NullFinal;
    throw std::runtime_error("unknown step kind '" + s + "'");
}

}  // namespace

std::string serialize_plan(const PlanGraph& plan) {
    json doc;
    doc["format"] = "dpocl-plan";
    doc["version"] = kFormatVersion;

    json steps = json::array();
    for (const Step& s : plan.steps) {
        json step;
        step["id"] = s.id;
        step["kind"] = to_string(s.kind);
        if (!s.operator_name.empty()) step["operator"] = s.operator_name;
        json args = json::array();
        for (const Term& t : s.args) args.push_back(term_to_json(t));
        step["args"] = args;
        step["preconditions"] = literals_to_json(s.preconditions);
        step["effects"] = literals_to_json(s.effects);
        if (s.scope) step["scope"] = *s.scope;
        steps.push_back(std::move(step));
    }
    doc["steps"] = steps;

    json orderings = json::array();
    for (const auto& [a, b] : plan.ordering.base_edges())
        orderings.push_back(json::array({a, b}));
    doc["orderings"] = orderings;

    json links = json::array();
    for (const CausalLink& l : plan.causal_links) {
        json link;
        link["producer"] = l.producer;
        link["consumer"] = l.consumer;
        link["condition"] = literal_to_json(l.condition);
        links.push_back(std::move(link));
    }
    doc["causal_links"] = links;

    json dlinks = json::array();
    for (const DecompLink& d : plan.decomp_links) {
        json link;
        link["parent"] = d.parent;
        link["initial"] = d.sub_initial;
        link["final"] = d.sub_final;
        dlinks.push_back(std::move(link));
    }
    doc["decomposition_links"] = dlinks;

    json codes = json::array();
    for (const auto& cls : plan.bindings.classes()) {
        json group = json::array();
        for (const Term& t : cls) group.push_back(term_to_json(t));
        codes.push_back(std::move(group));
    }
    json noncodes = json::array();
    for (const auto& [a, b] : plan.bindings.noncodesignations())
        noncodes.push_back(json::array({term_to_json(a), term_to_json(b)}));
    doc["bindings"] = {{"codesignations", codes},
                       {"noncodesignations", noncodes}};

    json flaws = json::array();
    for (const Flaw& f : plan.flaws) {
        json entry;
        if (const auto* oc = std::get_if<OpenCondition>(&f)) {
            entry["type"] = "open-condition";
            entry["step"] = oc->step;
            entry["condition"] = literal_to_json(oc->condition);
        } else if (const auto* uc = std::get_if<UnexpandedComposite>(&f)) {
            entry["type"] = "unexpanded-composite";
            entry["step"] = uc->step;
        } else {
            const auto& t = std::get<Threat>(f);
            entry["type"] = "threat";
            entry["step"] = t.step;
            entry["link"] = {{"producer", t.link.producer},
                             {"consumer", t.link.consumer},
                             {"condition", literal_to_json(t.link.condition)}};
        }
        flaws.push_back(std::move(entry));
    }
    doc["flaws"] = flaws;

    doc["counters"] = {{"steps", plan.fresh.step_counter()},
                       {"variables", plan.fresh.var_counter()}};
    return doc.dump(2) + "\n";
}

PlanGraph deserialize_plan(const std::string& text, const Domain& domain) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("plan document is not valid JSON: ") +
                                 e.what());
    }
    if (doc.value("format", "") != "dpocl-plan")
        throw std::runtime_error("not a plan document");
    if (doc.value("version", -1) != kFormatVersion)
        throw std::runtime_error("unsupported plan format version " +
                                 std::to_string(doc.value("version", -1)));

    PlanGraph plan;
    std::set<StepId> ids;
    for (const json& j : doc.at("steps")) {
        Step s;
        s.id = j.at("id").get<std::string>();
        s.kind = kind_from_string(j.at("kind").get<std::string>());
        s.operator_name = j.value("operator", "");
        if (!s.operator_name.empty() && !domain.find_operator(s.operator_name))
            throw std::runtime_error("step " + s.id +
                                     " references unknown operator '" +
                                     s.operator_name + "'");
        for (const json& a : j.at("args")) s.args.push_back(term_from_json(a));
        s.preconditions = literals_from_json(j.at("preconditions"), domain);
        s.effects = literals_from_json(j.at("effects"), domain);
        if (j.contains("scope")) s.scope = j.at("scope").get<std::string>();
        ids.insert(s.id);
        plan.steps.push_back(std::move(s));
    }
    auto require_id = [&](const std::string& id, const char* what) {
        if (!ids.count(id))
            throw std::runtime_error(std::string(what) +
                                     " references dangling step id '" + id + "'");
    };
    for (const Step& s : plan.steps)
        if (s.scope) require_id(*s.scope, "step scope");

    for (const Step& s : plan.steps) plan.ordering.add_node(s.id);
    for (const json& j : doc.at("decomposition_links")) {
        DecompLink d;
        d.parent = j.at("parent").get<std::string>();
        d.sub_initial = j.at("initial").get<std::string>();
        d.sub_final = j.at("final").get<std::string>();
        require_id(d.parent, "decomposition link");
        require_id(d.sub_initial, "decomposition link");
        require_id(d.sub_final, "decomposition link");
        plan.ordering.expand_interval(d.parent, d.sub_initial, d.sub_final);
        plan.decomp_links.push_back(std::move(d));
    }
    for (const json& j : doc.at("orderings")) {
        std::string a = j.at(0).get<std::string>();
        std::string b = j.at(1).get<std::string>();
        require_id(a, "ordering");
        require_id(b, "ordering");
        // Contradictory documents load; the verifier reports the cycle.
        plan.ordering.add_edge_unchecked(a, b);
    }
    for (const json& j : doc.at("causal_links")) {
        CausalLink l;
        l.producer = j.at("producer").get<std::string>();
        l.consumer = j.at("consumer").get<std::string>();
        l.condition = literal_from_json(j.at("condition"), domain);
        require_id(l.producer, "causal link");
        require_id(l.consumer, "causal link");
        plan.causal_links.push_back(std::move(l));
    }

    const json& bindings = doc.at("bindings");
    for (const json& group : bindings.at("codesignations")) {
        if (group.size() < 2) continue;
        Term first = term_from_json(group.at(0));
        for (std::size_t i = 1; i < group.size(); ++i) {
            auto next =
                plan.bindings.with_codesignation(first, term_from_json(group.at(i)));
            if (!next)
                throw std::runtime_error("inconsistent codesignations in document");
            plan.bindings = std::move(*next);
        }
    }
    for (const json& pair : bindings.at("noncodesignations")) {
        auto next = plan.bindings.with_noncodesignation(
            term_from_json(pair.at(0)), term_from_json(pair.at(1)));
        if (!next)
            throw std::runtime_error("inconsistent noncodesignations in document");
        plan.bindings = std::move(*next);
    }

    for (const json& j : doc.at("flaws")) {
        std::string type = j.at("type").get<std::string>();
        if (type == "open-condition") {
            OpenCondition oc;
            oc.step = j.at("step").get<std::string>();
            require_id(oc.step, "flaw");
            oc.condition = literal_from_json(j.at("condition"), domain);
            plan.flaws.push_back(std::move(oc));
        } else if (type == "unexpanded-composite") {
            UnexpandedComposite uc;
            uc.step = j.at("step").get<std::string>();
            require_id(uc.step, "flaw");
            plan.flaws.push_back(std::move(uc));
        } else if (type == "threat") {
            Threat t;
            t.step = j.at("step").get<std::string>();
            require_id(t.step, "flaw");
            t.link.producer = j.at("link").at("producer").get<std::string>();
            t.link.consumer = j.at("link").at("consumer").get<std::string>();
            t.link.condition =
                literal_from_json(j.at("link").at("condition"), domain);
            plan.flaws.push_back(std::move(t));
        } else {
            throw std::runtime_error("unknown flaw type '" + type + "'");
        }
    }

    const json& counters = doc.at("counters");
    plan.fresh.restore(counters.at("variables").get<std::uint32_t>(),
                       counters.at("steps").get<std::uint32_t>());
    return plan;
}

std::string export_dot(const PlanGraph& plan) {
    // Sort by numeric step index so output is stable run to run.
    auto step_number = [](const StepId& id) {
        auto dash = id.rfind('-');
        try {
            return std::stoul(id.substr(dash + 1));
        } catch (...) {
            return 0ul;
        }
    };
    std::vector<const Step*> steps;
    for (const Step& s : plan.steps) steps.push_back(&s);
    std::sort(steps.begin(), steps.end(), [&](const Step* a, const Step* b) {
        return step_number(a->id) < step_number(b->id);
    });

    std::ostringstream os;
    os << "digraph plan {\n";
    os << "  rankdir=LR;\n";
    for (const Step* s : steps) {
        std::string label;
        if (s->kind == StepKind::NullInitial)
            label = s->scope ? "init" : "initial";
        else if (s->kind == StepKind::NullFinal)
            label = s->scope ? "final" : "goal";
        else {
            std::ostringstream name;
            name << s->operator_name << '(';
            for (std::size_t i = 0; i < s->args.size(); ++i) {
                if (i) name << ' ';
                name << plan.bindings.apply(s->args[i]).to_string();
            }
            name << ')';
            label = name.str();
        }
        os << "  \"" << s->id << "\" [label=\"" << s->id << ": " << label
           << "\"";
        if (s->kind == StepKind::Composite) os << " shape=box";
        if (s->is_null()) os << " shape=plaintext";
        os << "];\n";
    }

    std::vector<std::string> edges;
    for (const CausalLink& l : plan.causal_links) {
        std::ostringstream e;
        e << "  \"" << l.producer << "\" -> \"" << l.consumer << "\" [label=\""
          << plan.bindings.apply(l.condition).to_string() << "\"];\n";
        edges.push_back(e.str());
    }
    std::sort(edges.begin(), edges.end());
    for (const std::string& e : edges) os << e;

    edges.clear();
    for (const DecompLink& d : plan.decomp_links) {
        std::ostringstream e;
        e << "  \"" << d.parent << "\" -> \"" << d.sub_initial
          << "\" [style=dashed];\n";
        e << "  \"" << d.parent << "\" -> \"" << d.sub_final
          << "\" [style=dashed];\n";
        edges.push_back(e.str());
    }
    std::sort(edges.begin(), edges.end());
    for (const std::string& e : edges) os << e;

    os << "}\n";
    return os.str();
}

}  // namespace dpocl
