#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "dpocl/analysis.hpp"
#include "dpocl/planner.hpp"
#include "helpers.hpp"
#include "oracles.hpp"
#include "toygen.hpp"

using namespace dpocl;

namespace {

Term C(const std::string& n) { return Term::constant(n); }

Feedback feedback_of(const PlanGraph&, std::vector<FeedbackAssertion> entries) {
    Feedback fb;
    fb.assertions = std::move(entries);
    return fb;
}

FeedbackAssertion failed(const Literal& lit) {
    FeedbackAssertion a;
    a.status = FeedbackAssertion::Status::Failed;
    a.condition = lit;
    return a;
}

FeedbackAssertion achieved(const Literal& lit) {
    FeedbackAssertion a;
    a.status = FeedbackAssertion::Status::Achieved;
    a.condition = lit;
    return a;
}

Literal bel(const std::string& p, const std::string& l) {
    return make_literal("bel", {C(p), C(l)});
}

std::vector<StepId> root_ids(const ReplanRecommendation& rec) {
    std::vector<StepId> out;
    for (const auto& r : rec.roots) out.push_back(r.step);
    return out;
}

}  // namespace

TEST_CASE("classify_effects flags exactly the non-contributing effects") {
    Domain domain = testing::load_domain("side_effects.dom");
    Problem problem = testing::load_problem("side_effects.prob", domain);
    auto result = plan(domain, problem, {});
    REQUIRE(result.outcome == SearchOutcome::Solution);
    const PlanGraph& solution = *result.solution;

    EffectClassification split = classify_effects(solution);
    REQUIRE(split.side.size() == 2);
    std::multiset<std::string> side_names;
    for (const auto& [step, lit] : split.side) side_names.insert(lit.to_string());
    CHECK(side_names.count("(aside-one)") == 1);
    CHECK(side_names.count("(aside-two)") == 1);

    // The detail facts all contribute through the summarizing step.
    for (const auto& [step, lit] : split.intended)
        CHECK((lit.to_string() != "(aside-one)" &&
               lit.to_string() != "(aside-two)"));
}

TEST_CASE("a plan whose every effect feeds the goal has no side effects") {
    Domain domain = testing::load_domain("two_consumers.dom");
    Problem problem = testing::load_problem("two_consumers.prob", domain);
    SearchConfig config;
    config.strategy = Strategy::BestFirst;
    auto result = plan(domain, problem, config);
    REQUIRE(result.outcome == SearchOutcome::Solution);
    EffectClassification split = classify_effects(*result.solution);
    CHECK(split.side.empty());
    CHECK(split.intended.size() == 3);
}

TEST_CASE("classify_effects rejects incomplete plans") {
    Domain domain = testing::load_domain("discourse.dom");
    Problem problem = testing::load_problem("discourse.prob", domain);
    PlanGraph incomplete = new_null_plan(problem);
    CHECK_THROWS_AS((void)classify_effects(incomplete), std::invalid_argument);
}

namespace {

void check_classification_against_oracle(const PlanGraph& solution) {
    EffectClassification split = classify_effects(solution);
    for (const auto& [step, lit] : split.intended)
        CHECK(oracle::effect_reaches_goal(solution, step, lit));
    for (const auto& [step, lit] : split.side)
        CHECK_FALSE(oracle::effect_reaches_goal(solution, step, lit));
    // Exhaustive over non-null steps.
    std::size_t effect_instances = 0;
    for (const Step& s : solution.steps)
        if (!s.is_null()) effect_instances += s.effects.size();
    CHECK(split.intended.size() + split.side.size() == effect_instances);
}

}  // namespace

TEST_CASE("classification agrees with the reachability oracle") {
    for (const char* pair : {"discourse", "side_effects", "blocks"}) {
        Domain domain = testing::load_domain(std::string(pair) + ".dom");
        Problem problem =
            testing::load_problem(std::string(pair) + ".prob", domain);
        auto result = plan(domain, problem, {});
        REQUIRE(result.outcome == SearchOutcome::Solution);
        check_classification_against_oracle(*result.solution);
    }
}

TEST_CASE("classification matches the oracle on random solved instances") {
    int checked = 0;
    for (std::uint32_t i = 0; i < 80 && checked < 25; ++i) {
        toygen::ToyInstance toy = toygen::make_toy(i);
        SearchConfig config;
        config.max_steps = 6;
        config.dedup = DedupMode::On;
        auto result = plan(toy.domain, toy.problem, config);
        if (result.outcome != SearchOutcome::Solution) continue;
        check_classification_against_oracle(*result.solution);
        ++checked;
    }
    CHECK(checked >= 10);
}

TEST_CASE("failed evidence propagates up the argument chain") {
    PlanGraph plan = testing::plan_discourse();
    Feedback fb = feedback_of(plan, {failed(bel("i", "l9"))});
    FailureTrace trace = propagate_feedback(plan, fb);
    CHECK(trace.diagnostics.empty());

    StepId inf_i = testing::find_step_named(plan, "inform", "i");
    StepId ctb_i = testing::find_step_named(plan, "cause-to-believe", "i");
    StepId sup_u = testing::find_step_named(plan, "support", "u");
    StepId ctb_u = testing::find_step_named(plan, "cause-to-believe", "u");
    StepId sup_n = testing::find_step_named(plan, "support", "n");
    StepId ctb_n = testing::find_step_named(plan, "cause-to-believe", "n");

    for (const StepId& id : {inf_i, ctb_i, sup_u, ctb_u, sup_n, ctb_n})
        CHECK(trace.failed_steps.count(id));
    CHECK(trace.confirmed_steps.empty());

    // Some recorded path passes Inform(I), CTB(I), Support(U), CTB(N) in
    // that order.
    bool chain_found = false;
    for (const auto& path : trace.paths) {
        std::vector<StepId> want{inf_i, ctb_i, sup_u, ctb_n};
        std::size_t at = 0;
        for (const StepId& id : path)
            if (at < want.size() && id == want[at]) ++at;
        if (at == want.size()) chain_found = true;
    }
    CHECK(chain_found);
}

TEST_CASE("failed initial-state rule seeds from the initial step") {
    PlanGraph plan = testing::plan_discourse();
    Feedback fb = feedback_of(plan, {failed(bel("(causes i u)", "l8"))});
    FailureTrace trace = propagate_feedback(plan, fb);
    CHECK(trace.diagnostics.empty());

    CHECK(trace.failed_steps.count(
        testing::find_step_named(plan, "support", "u")));
    CHECK(trace.failed_steps.count(
        testing::find_step_named(plan, "cause-to-believe", "n")));
    CHECK_FALSE(trace.failed_steps.count(
        testing::find_step_named(plan, "cause-to-believe", "i")));
    CHECK_FALSE(trace.failed_steps.count(
        testing::find_step_named(plan, "inform", "i")));
    // The initial step itself is not a failed action.
    CHECK_FALSE(trace.failed_steps.count(plan.top_initial()));
}

TEST_CASE("an achieved effect cuts propagation at its producer") {
    PlanGraph plan = testing::plan_discourse();
    Feedback fb = feedback_of(
        plan, {failed(bel("i", "l9")), achieved(bel("u", "l4"))});
    FailureTrace trace = propagate_feedback(plan, fb);

    StepId ctb_u = testing::find_step_named(plan, "cause-to-believe", "u");
    StepId sup_n = testing::find_step_named(plan, "support", "n");
    StepId ctb_n = testing::find_step_named(plan, "cause-to-believe", "n");

    CHECK(trace.confirmed_steps.count(ctb_u));
    CHECK_FALSE(trace.failed_steps.count(ctb_u));
    CHECK_FALSE(trace.failed_steps.count(sup_n));
    CHECK_FALSE(trace.failed_steps.count(ctb_n));
    // Below the cut the failure is still recorded.
    CHECK(trace.failed_steps.count(
        testing::find_step_named(plan, "cause-to-believe", "i")));
}

TEST_CASE("empty feedback yields an empty trace") {
    PlanGraph plan = testing::plan_discourse();
    FailureTrace trace = propagate_feedback(plan, {});
    CHECK(trace.failed_steps.empty());
    CHECK(trace.failed_links.empty());
    CHECK(trace.confirmed_steps.empty());
    CHECK(trace.paths.empty());
}

TEST_CASE("unmatched feedback conditions are diagnosed, not dropped") {
    PlanGraph plan = testing::plan_discourse();
    Feedback fb = feedback_of(plan, {failed(bel("z", "l1"))});
    FailureTrace trace = propagate_feedback(plan, fb);
    REQUIRE_FALSE(trace.diagnostics.empty());
    CHECK(trace.failed_steps.empty());
}

TEST_CASE("a locus restricts which producer a condition refers to") {
    PlanGraph plan = testing::plan_discourse();
    StepId inf_i = testing::find_step_named(plan, "inform", "i");
    FeedbackAssertion a = failed(bel("i", "l9"));
    a.locus = inf_i;
    FailureTrace trace = propagate_feedback(plan, feedback_of(plan, {a}));
    CHECK(trace.failed_steps.count(inf_i));

    FeedbackAssertion bad = failed(bel("i", "l9"));
    bad.locus = plan.top_final();
    FailureTrace none = propagate_feedback(plan, feedback_of(plan, {bad}));
    CHECK_FALSE(none.diagnostics.empty());
}

TEST_CASE("failure propagation is monotone in the feedback") {
    PlanGraph plan = testing::plan_discourse();
    Feedback base = feedback_of(plan, {failed(bel("i", "l9"))});
    FailureTrace small = propagate_feedback(plan, base);

    Feedback more = base;
    more.assertions.push_back(failed(bel("(causes u n)", "l7")));
    FailureTrace bigger = propagate_feedback(plan, more);
    for (const StepId& id : small.failed_steps)
        CHECK(bigger.failed_steps.count(id));

    Feedback confirmed = base;
    confirmed.assertions.push_back(achieved(bel("u", "l4")));
    FailureTrace smaller = propagate_feedback(plan, confirmed);
    for (const StepId& id : smaller.failed_steps)
        CHECK(small.failed_steps.count(id));
}

TEST_CASE("roots after failed evidence, most specific first") {
    PlanGraph plan = testing::plan_discourse();
    Feedback fb = feedback_of(plan, {failed(bel("i", "l9"))});
    ReplanRecommendation rec = replanning_roots(plan, propagate_feedback(plan, fb));

    std::vector<StepId> expected{
        testing::find_step_named(plan, "cause-to-believe", "i"),
        testing::find_step_named(plan, "support", "u"),
        testing::find_step_named(plan, "support", "n")};
    CHECK(root_ids(rec) == expected);
    // Rationales name the condition each root would re-derive.
    REQUIRE(rec.roots.size() == 3);
    CHECK(rec.roots[0].addresses == bel("i", "l9"));
    CHECK(rec.roots[1].addresses == bel("u", "l4"));
    CHECK(rec.roots[2].addresses == bel("n", "l3"));
}

TEST_CASE("roots after a failed rule exclude the evidence subtree") {
    PlanGraph plan = testing::plan_discourse();
    Feedback fb = feedback_of(plan, {failed(bel("(causes i u)", "l8"))});
    ReplanRecommendation rec = replanning_roots(plan, propagate_feedback(plan, fb));

    auto ids = root_ids(rec);
    StepId sup_u = testing::find_step_named(plan, "support", "u");
    StepId ctb_i = testing::find_step_named(plan, "cause-to-believe", "i");
    CHECK(std::count(ids.begin(), ids.end(), sup_u) == 1);
    CHECK(std::count(ids.begin(), ids.end(), ctb_i) == 0);
}

TEST_CASE("a confirmed claim above the failure mutes replanning") {
    PlanGraph plan = testing::plan_discourse();
    Feedback fb = feedback_of(
        plan, {failed(bel("i", "l9")), achieved(bel("u", "l4"))});
    ReplanRecommendation rec = replanning_roots(plan, propagate_feedback(plan, fb));
    CHECK(rec.roots.empty());
    CHECK_FALSE(rec.warnings.empty());
}

TEST_CASE("confirmed claim plus failed rule above it still replans above") {
    PlanGraph plan = testing::plan_discourse();
    Feedback fb = feedback_of(
        plan, {achieved(bel("u", "l4")), failed(bel("(causes u n)", "l7"))});
    ReplanRecommendation rec = replanning_roots(plan, propagate_feedback(plan, fb));
    auto ids = root_ids(rec);
    REQUIRE(ids.size() == 1);
    CHECK(ids[0] == testing::find_step_named(plan, "support", "n"));
}

TEST_CASE("two independent failures merge root lists in path order") {
    PlanGraph plan = testing::plan_discourse();
    Feedback fb = feedback_of(
        plan, {failed(bel("i", "l9")), failed(bel("(causes u n)", "l7"))});
    ReplanRecommendation rec = replanning_roots(plan, propagate_feedback(plan, fb));
    std::vector<StepId> expected{
        testing::find_step_named(plan, "cause-to-believe", "i"),
        testing::find_step_named(plan, "support", "u"),
        testing::find_step_named(plan, "support", "n")};
    CHECK(root_ids(rec) == expected);
}

TEST_CASE("roots dominate a failure and are composite") {
    PlanGraph plan = testing::plan_discourse();
    for (const Literal& seed :
         {bel("i", "l9"), bel("(causes i u)", "l8"), bel("(causes u n)", "l7")}) {
        FailureTrace trace =
            propagate_feedback(plan, feedback_of(plan, {failed(seed)}));
        ReplanRecommendation rec = replanning_roots(plan, trace);
        for (const auto& root : rec.roots) {
            const Step* step = plan.find_step(root.step);
            REQUIRE(step);
            CHECK(step->kind == StepKind::Composite);
            bool dominates = false;
            for (const StepId& failed_id : trace.failed_steps)
                if (plan.within_subtree(failed_id, root.step)) dominates = true;
            CHECK(dominates);
        }
    }
}

TEST_CASE("trace paths run origin, composites ascended, then the final") {
    PlanGraph plan = testing::plan_discourse();
    for (auto entries :
         {std::vector<FeedbackAssertion>{failed(bel("i", "l9"))},
          std::vector<FeedbackAssertion>{failed(bel("(causes i u)", "l8"))},
          std::vector<FeedbackAssertion>{failed(bel("i", "l9")),
                                         failed(bel("(causes u n)", "l7"))}}) {
        FailureTrace trace = propagate_feedback(plan, feedback_of(plan, entries));
        for (const auto& path : trace.paths) {
            REQUIRE_FALSE(path.empty());
            for (std::size_t i = 1; i + 1 < path.size(); ++i) {
                const Step* step = plan.find_step(path[i]);
                REQUIRE(step);
                CHECK(step->kind == StepKind::Composite);
            }
        }
        // Confirmed and failed step sets never overlap.
        for (const StepId& id : trace.confirmed_steps)
            CHECK_FALSE(trace.failed_steps.count(id));
    }
}

TEST_CASE("replanning a support subtree finds the alternative evidence") {
    Domain domain = testing::load_domain("discourse.dom");
    PlanGraph plan = testing::plan_discourse();
    Feedback fb = feedback_of(plan, {failed(bel("i", "l9"))});
    FailureTrace trace = propagate_feedback(plan, fb);

    StepId sup_u = testing::find_step_named(plan, "support", "u");
    SearchResult result = replan_subtree(domain, plan, sup_u, {}, &trace);
    REQUIRE(result.outcome == SearchOutcome::Solution);
    const PlanGraph& repaired = *result.solution;
    CHECK(verify_complete(repaired).complete());

    // The failed evidence no longer appears on any causal link.
    for (const CausalLink& link : repaired.causal_links)
        CHECK(repaired.bindings.apply(link.condition) != bel("i", "l9"));
    // The alternative line of evidence does.
    CHECK_FALSE(testing::find_step_named(repaired, "inform", "j").empty());
    // Steps from the removed subtree are gone.
    CHECK(testing::find_step_named(repaired, "inform", "i").empty());
}

TEST_CASE("replanning with no alternative route exhausts") {
    Domain domain = testing::load_domain("discourse.dom");
    PlanGraph plan = testing::plan_discourse();
    Feedback fb = feedback_of(plan, {failed(bel("i", "l9"))});
    FailureTrace trace = propagate_feedback(plan, fb);

    // The evidence claim itself has no other derivation at that strength.
    StepId ctb_i = testing::find_step_named(plan, "cause-to-believe", "i");
    SearchConfig config;
    config.max_nodes = 2000;
    SearchResult result = replan_subtree(domain, plan, ctb_i, config, &trace);
    CHECK(result.outcome == SearchOutcome::Exhausted);
}

TEST_CASE("replanning without a trace rebuilds the same structure") {
    Domain domain = testing::load_domain("discourse.dom");
    PlanGraph plan = testing::plan_discourse();
    StepId sup_u = testing::find_step_named(plan, "support", "u");
    SearchResult result = replan_subtree(domain, plan, sup_u, {});
    REQUIRE(result.outcome == SearchOutcome::Solution);
    CHECK(verify_complete(*result.solution).complete());
    CHECK_FALSE(testing::find_step_named(*result.solution, "inform", "i").empty());
}

TEST_CASE("replan rejects non-composite roots and incomplete plans") {
    Domain domain = testing::load_domain("discourse.dom");
    PlanGraph plan = testing::plan_discourse();
    StepId inf_i = testing::find_step_named(plan, "inform", "i");
    CHECK_THROWS_AS((void)replan_subtree(domain, plan, inf_i, {}),
                    std::invalid_argument);

    Problem problem = testing::load_problem("discourse.prob", domain);
    PlanGraph unfinished = new_null_plan(problem);
    CHECK_THROWS_AS(
        (void)replan_subtree(domain, unfinished, "s-1", {}),
        std::invalid_argument);
}
