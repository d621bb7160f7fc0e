#include "crosswalk/chain_rules.hpp"
#include "crosswalk/datalog.hpp"
#include "crosswalk/error.hpp"
#include "support/synthetic.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

namespace crosswalk::datalog {
namespace {

Term v(const std::string& name) { return Term::variable(name); }
Term c(const std::string& name) { return Term::constant(name); }

Rule transitive(const std::string& predicate) {
    return {"TR", {{v("A"), c(predicate), v("B")}, {v("B"), c(predicate), v("C")}}, {v("A"), c(predicate), v("C")}};
}

const RuleFile& rce2() {
    static const RuleFile rules = parse_rule_file(
        "rule RCE2-1: ?A ?p ?B , ?B OWL:equivalentClass ?C => ?A ?p ?C\n"
        "rule RCE2-2: ?A ?p ?B , ?B SKOS:exactMatch ?C => ?A ?p ?C\n");
    return rules;
}

const std::set<Triple> kHodgkinFacts = {
    {"DOID:8567", "SKOS:exactMatch", "NCIT:C9357"},
    {"HP:0012189", "OWL:equivalentClass", "DOID:8567"},
    {"MONDO:0009348", "SKOS:closeMatch", "HP:0012189"},
};

TEST(ValidateRule, RangeRestriction) {
    EXPECT_FALSE(validate_rule(rce2().rules[0]).has_value());

    const Rule unbound{"bad", {{v("A"), v("p"), v("B")}}, {v("A"), v("p"), v("D")}};
    const auto violation = validate_rule(unbound);
    ASSERT_TRUE(violation.has_value());
    EXPECT_EQ(violation->variable, "D");
    EXPECT_NE(violation->message().find("?D"), std::string::npos);

    const Rule constant_head{"const", {{v("A"), c("P:p"), v("B")}}, {c("X:1"), c("P:q"), c("X:2")}};
    EXPECT_FALSE(validate_rule(constant_head).has_value());

    const Rule empty_body{"empty", {}, {c("X:1"), c("P:q"), c("X:2")}};
    EXPECT_TRUE(validate_rule(empty_body).has_value());

    try {
        require_valid({rce2().rules[0], unbound});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::RangeRestriction);
    }
    EXPECT_THROW(seminaive_eval(std::set<Triple>{}, {unbound}), Error);
}

TEST(NaiveEval, OneTransitivityStep) {
    const std::set<Triple> facts = {{"a", "E", "b"}, {"b", "E", "c"}};
    const std::set<Triple> expected = {{"a", "E", "b"}, {"b", "E", "c"}, {"a", "E", "c"}};
    EXPECT_EQ(naive_eval(facts, {transitive("E")}), expected);
    EXPECT_EQ(naive_eval(facts, {}), facts);
}

// Hand closure: RCE2-1 gives MONDO-close-DOID; RCE2-2 with p bound to
// equivalentClass gives HP-equivalentClass-NCIT; both rules then give
// MONDO-close-NCIT. Nothing else fires.
TEST(NaiveEval, RceClosureOfTheWorkedExample) {
    auto expected = kHodgkinFacts;
    expected.insert({"MONDO:0009348", "SKOS:closeMatch", "DOID:8567"});
    expected.insert({"HP:0012189", "OWL:equivalentClass", "NCIT:C9357"});
    expected.insert({"MONDO:0009348", "SKOS:closeMatch", "NCIT:C9357"});
    EXPECT_EQ(naive_eval(kHodgkinFacts, rce2().rules), expected);
}

TEST(SeminaiveEval, MatchesNaiveOnRandomInstances) {
    std::mt19937_64 rng(4242);
    for (int i = 0; i < 300; ++i) {
        const auto instance = testing::random_instance(rng, default_rules());
        const auto semi = seminaive_eval(std::span<const Triple>(instance.facts), instance.rules);
        const auto naive = naive_eval(std::set<Triple>(instance.facts.begin(), instance.facts.end()), instance.rules);
        ASSERT_EQ(semi.facts().triples(), naive) << "instance " << i;
    }
}

TEST(SeminaiveEval, LinearChainOfFour) {
    const auto chain = testing::linear_chain(4, "E");
    const auto ev = seminaive_eval(std::span<const Triple>(chain), {transitive("E")});
    EXPECT_EQ(ev.facts().size(), 6u);
    EXPECT_EQ(ev.facts().initial_count(), 3u);
    EXPECT_EQ(ev.trace_count(), 3u);
}

TEST(SeminaiveEval, CollapsesDuplicateInputs) {
    const std::vector<Triple> facts = {{"a", "E", "b"}, {"a", "E", "b"}, {"b", "E", "c"}};
    const auto ev = seminaive_eval(std::span<const Triple>(facts), {transitive("E")});
    EXPECT_EQ(ev.facts().initial_count(), 2u);
    EXPECT_EQ(ev.facts().size(), 3u);
}

TEST(SeminaiveEval, EmptyInputs) {
    const auto none = seminaive_eval(std::set<Triple>{}, rce2().rules);
    EXPECT_EQ(none.facts().size(), 0u);
    EXPECT_EQ(none.facts().round_count(), 0u);
    const auto no_rules = seminaive_eval(kHodgkinFacts, {});
    EXPECT_EQ(no_rules.facts().triples(), kHodgkinFacts);
    EXPECT_EQ(no_rules.trace_count(), 0u);
}

// Both rules derive MONDO-close-NCIT in round 2; the trace belongs to the
// rule that comes first in the file.
TEST(Trace, FirstRuleInFileOrderWinsTies) {
    const Triple target{"MONDO:0009348", "SKOS:closeMatch", "NCIT:C9357"};
    const auto ev = seminaive_eval(kHodgkinFacts, rce2().rules);
    const auto trace = ev.trace(target);
    ASSERT_TRUE(trace.has_value());
    EXPECT_EQ(trace->rule_id, "RCE2-1");
    EXPECT_EQ(trace->premises, (std::vector<Triple>{{"MONDO:0009348", "SKOS:closeMatch", "HP:0012189"},
                                                    {"HP:0012189", "OWL:equivalentClass", "NCIT:C9357"}}));

    const auto reversed = seminaive_eval(kHodgkinFacts, {rce2().rules[1], rce2().rules[0]});
    const auto other = reversed.trace(target);
    ASSERT_TRUE(other.has_value());
    EXPECT_EQ(other->rule_id, "RCE2-2");
    EXPECT_EQ(other->premises, (std::vector<Triple>{{"MONDO:0009348", "SKOS:closeMatch", "DOID:8567"},
                                                    {"DOID:8567", "SKOS:exactMatch", "NCIT:C9357"}}));
    EXPECT_EQ(reversed.facts().triples(), ev.facts().triples());
}

TEST(Trace, AssertedFactsHaveNone) {
    const auto ev = seminaive_eval(kHodgkinFacts, rce2().rules);
    for (const auto& t : kHodgkinFacts) EXPECT_FALSE(ev.trace(t).has_value());
    EXPECT_FALSE(ev.trace(Triple{"X:1", "Y:2", "Z:3"}).has_value());
}

// Every trace replays, cites earlier facts, and there is exactly one per
// inferred fact.
TEST(TraceProperty, SoundAndUnique) {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 200; ++i) {
        const auto instance = testing::random_instance(rng, default_rules());
        const auto ev = seminaive_eval(std::span<const Triple>(instance.facts), instance.rules);
        const auto& store = ev.facts();
        EXPECT_EQ(ev.trace_count(), store.size() - store.initial_count());
        EXPECT_EQ(ev.trace_map().size(), ev.trace_count());
        for (FactId id = static_cast<FactId>(store.initial_count()); id < store.size(); ++id) {
            const auto trace = ev.trace(id);
            const auto& rule = ev.rules()[ev.rule_of(id)];
            ASSERT_TRUE(replays(rule, trace.premises, trace.conclusion)) << trace.conclusion.str();
            for (auto p : ev.premises_of(id)) {
                ASSERT_LT(store.round_of(p), store.round_of(id));
            }
            // At least one premise comes from the previous round's delta.
            const auto premises = ev.premises_of(id);
            EXPECT_TRUE(std::any_of(premises.begin(), premises.end(),
                                    [&](FactId p) { return store.round_of(p) + 1 == store.round_of(id); }));
        }
    }
}

TEST(Replays, RejectsInconsistentBindings) {
    const auto& rule = rce2().rules[0];
    const std::vector<Triple> premises = {{"a", "P:p", "b"}, {"b", "OWL:equivalentClass", "c"}};
    EXPECT_TRUE(replays(rule, premises, {"a", "P:p", "c"}));
    EXPECT_FALSE(replays(rule, premises, {"a", "P:q", "c"}));
    EXPECT_FALSE(replays(rule, {{"a", "P:p", "b"}, {"x", "OWL:equivalentClass", "c"}}, {"a", "P:p", "c"}));
    EXPECT_FALSE(replays(rule, {premises[0]}, {"a", "P:p", "c"}));
}

TEST(FactStore, DeltasPartitionTheDerivedFacts) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        const auto instance = testing::random_instance(rng, default_rules());
        const auto ev = seminaive_eval(std::span<const Triple>(instance.facts), instance.rules);
        const auto& store = ev.facts();
        FactId next = static_cast<FactId>(store.initial_count());
        for (std::size_t r = 1; r <= store.round_count(); ++r) {
            const auto [begin, end] = store.delta_range(r);
            ASSERT_EQ(begin, next);
            ASSERT_LT(begin, end) << "empty delta in round " << r;
            ASSERT_EQ(store.delta(r).size(), end - begin);
            for (FactId id = begin; id < end; ++id) ASSERT_EQ(store.round_of(id), r);
            next = end;
        }
        ASSERT_EQ(next, store.size());
        for (FactId id = 0; id < store.size(); ++id) ASSERT_EQ(store.find(store.triple(id)), id);
    }
}

TEST(Determinism, SameInputSameStoreAndTraces) {
    std::mt19937_64 rng(6);
    for (int i = 0; i < 50; ++i) {
        auto instance = testing::random_instance(rng, default_rules());
        const auto a = seminaive_eval(std::span<const Triple>(instance.facts), instance.rules);
        const auto b = seminaive_eval(std::span<const Triple>(instance.facts), instance.rules);
        ASSERT_EQ(a.facts().size(), b.facts().size());
        for (FactId id = 0; id < a.facts().size(); ++id) ASSERT_EQ(a.facts().triple(id), b.facts().triple(id));
        ASSERT_EQ(a.trace_map(), b.trace_map());

        // Input order changes ids but not the closure.
        std::shuffle(instance.facts.begin(), instance.facts.end(), rng);
        const auto c = seminaive_eval(std::span<const Triple>(instance.facts), instance.rules);
        ASSERT_EQ(c.facts().triples(), a.facts().triples());
    }
}

TEST(Explain, AssertedFactIsALeaf) {
    const auto ev = seminaive_eval(kHodgkinFacts, rce2().rules);
    const auto node = explain({"DOID:8567", "SKOS:exactMatch", "NCIT:C9357"}, ev);
    EXPECT_TRUE(node.asserted);
    EXPECT_TRUE(node.premises.empty());
    EXPECT_EQ(node.depth(), 0u);
    try {
        explain({"X:1", "Y:2", "Z:3"}, ev);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownFact);
    }
}

TEST(Explain, WorkedExampleTree) {
    const auto ev = seminaive_eval(kHodgkinFacts, rce2().rules);
    const auto root = explain({"MONDO:0009348", "SKOS:closeMatch", "NCIT:C9357"}, ev);
    EXPECT_FALSE(root.asserted);
    EXPECT_EQ(root.rule_id, "RCE2-1");
    EXPECT_EQ(root.round, 2u);
    ASSERT_EQ(root.premises.size(), 2u);
    EXPECT_TRUE(root.premises[0].asserted);
    EXPECT_EQ(root.premises[1].rule_id, "RCE2-2");
    EXPECT_EQ(root.depth(), 2u);

    std::set<Triple> leaves;
    std::function<void(const ExplanationNode&)> walk = [&](const ExplanationNode& n) {
        if (n.asserted) leaves.insert(n.fact);
        for (const auto& p : n.premises) walk(p);
    };
    walk(root);
    EXPECT_EQ(leaves, kHodgkinFacts);
}

TEST(ExplainProperty, DepthBoundedByRounds) {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 100; ++i) {
        const auto instance = testing::random_instance(rng, default_rules());
        const auto ev = seminaive_eval(std::span<const Triple>(instance.facts), instance.rules);
        const auto& store = ev.facts();
        for (FactId id = 0; id < store.size(); ++id) {
            const auto node = explain(store.triple(id), ev);
            ASSERT_LE(node.depth(), store.round_of(id));
            ASSERT_LE(node.depth(), store.round_count());
        }
    }
}

} // namespace
} // namespace crosswalk::datalog
