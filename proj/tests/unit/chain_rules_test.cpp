#include "crosswalk/chain_rules.hpp"
#include "crosswalk/error.hpp"
#include "support/fixtures.hpp"

#include <gtest/gtest.h>

namespace crosswalk {
namespace {

using datalog::Atom;
using datalog::Term;
using datalog::Triple;

ErrorCode rule_error(std::string_view text) {
    try {
        parse_rule_file(text);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected a rule error for: " << text;
    return ErrorCode::ContractViolation;
}

TEST(ParseRuleFile, ReadsRce21) {
    const auto file = parse_rule_file("rule RCE2-1: ?A ?p ?B , ?B OWL:equivalentClass ?C => ?A ?p ?C\n");
    ASSERT_EQ(file.rules.size(), 1u);
    const auto& rule = file.rules[0];
    EXPECT_EQ(rule.id, "RCE2-1");
    ASSERT_EQ(rule.body.size(), 2u);
    EXPECT_EQ(rule.body[0], (Atom{Term::variable("A"), Term::variable("p"), Term::variable("B")}));
    EXPECT_EQ(rule.body[1], (Atom{Term::variable("B"), Term::constant("OWL:equivalentClass"), Term::variable("C")}));
    EXPECT_EQ(rule.head, (Atom{Term::variable("A"), Term::variable("p"), Term::variable("C")}));
}

TEST(ParseRuleFile, EmptyAndCommentOnlyFiles) {
    EXPECT_TRUE(parse_rule_file("").rules.empty());
    EXPECT_TRUE(parse_rule_file("# nothing here\n\n   \n").rules.empty());
}

TEST(ParseRuleFile, RangeRestrictionNamesTheVariable) {
    try {
        parse_rule_file("rule bad: ?A ?p ?B => ?A ?p ?C\n", "bad.rules");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::RangeRestriction);
        const std::string message = e.what();
        EXPECT_NE(message.find("?C"), std::string::npos) << message;
        EXPECT_NE(message.find("bad.rules:1"), std::string::npos) << message;
    }
}

TEST(ParseRuleFile, SyntaxErrors) {
    EXPECT_EQ(rule_error("rule : ?A ?p ?B => ?A ?p ?B"), ErrorCode::RuleSyntax);
    EXPECT_EQ(rule_error("rule x ?A ?p ?B => ?A ?p ?B"), ErrorCode::RuleSyntax);
    EXPECT_EQ(rule_error("rule x: ?A ?p => ?A ?p ?B"), ErrorCode::RuleSyntax);
    EXPECT_EQ(rule_error("rule x: ?A ?p ?B"), ErrorCode::RuleSyntax);
    EXPECT_EQ(rule_error("rule x: => ?A ?p ?B"), ErrorCode::RuleSyntax);
    EXPECT_EQ(rule_error("rule x: ?A notacurie ?B => ?A ?p ?B"), ErrorCode::RuleSyntax);
    EXPECT_EQ(rule_error("rule x: ?A ?p ?B => ?A ?p ?B ?C"), ErrorCode::RuleSyntax);
    EXPECT_EQ(rule_error("fact a b c"), ErrorCode::RuleSyntax);
    EXPECT_EQ(rule_error("rule x: ?A ?p ?B => ?A ?p ?B\nrule x: ?A ?p ?B => ?B ?p ?A\n"), ErrorCode::DuplicateRule);
    try {
        parse_rule_file("# header\n\nrule y: ?A ?p => ?A ?p ?A\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(SerializeRule, RoundTripsTheDefaultFile) {
    const auto& rules = default_rules();
    const auto reparsed = parse_rule_file(serialize_rule_file(rules));
    EXPECT_EQ(reparsed.rules, rules.rules);
    EXPECT_EQ(serialize_rule(rules.rules[0]), "rule " + rules.rules[0].id + ": " +
                                                  rules.rules[0].body[0].str() + " , " + rules.rules[0].body[1].str() +
                                                  " => " + rules.rules[0].head.str());
}

TEST(DefaultRules, MatchTheBundledFile) {
    const auto& rules = default_rules();
    EXPECT_EQ(rules.rules.size(), 19u);
    EXPECT_EQ(parse_rule_file(default_rules_text()).rules, rules.rules);
    EXPECT_EQ(parse_rule_file(testing::read_fixture("../../rules/sssom_chain.rules")).rules, rules.rules);
    for (const auto& rule : rules.rules) EXPECT_FALSE(datalog::validate_rule(rule).has_value()) << rule.id;
}

TEST(DefaultRules, ContainExactMatchChain) {
    const Atom b0{Term::variable("A"), Term::variable("p"), Term::variable("B")};
    const Atom b1{Term::variable("B"), Term::constant("SKOS:exactMatch"), Term::variable("C")};
    const Atom head{Term::variable("A"), Term::variable("p"), Term::variable("C")};
    const auto& rules = default_rules().rules;
    EXPECT_TRUE(std::any_of(rules.begin(), rules.end(), [&](const datalog::Rule& r) {
        return r.body == std::vector<Atom>{b0, b1} && r.head == head;
    }));
}

TEST(DefaultRules, BroadMatchIsTransitive) {
    const std::set<Triple> facts = {{"X:x", "SKOS:broadMatch", "X:y"}, {"X:y", "SKOS:broadMatch", "X:z"}};
    EXPECT_TRUE(datalog::naive_eval(facts, default_rules().rules).count({"X:x", "SKOS:broadMatch", "X:z"}));
}

// broadMatch followed by narrowMatch says nothing about how a relates to c.
TEST(DefaultRules, NoDirectFactFromBroadThenNarrow) {
    const std::set<Triple> facts = {{"X:a", "SKOS:broadMatch", "X:b"}, {"X:b", "SKOS:narrowMatch", "X:c"}};
    for (const auto& t : datalog::naive_eval(facts, default_rules().rules)) {
        EXPECT_FALSE(t.subject == "X:a" && t.object == "X:c") << t.str();
        EXPECT_FALSE(t.subject == "X:c" && t.object == "X:a") << t.str();
    }
}

TEST(SelectRules, KeepsFileOrder) {
    const auto picked = select_rules(default_rules(), {"RCE2-2", "RCE2-1", "no-such-rule"});
    ASSERT_EQ(picked.rules.size(), 2u);
    EXPECT_EQ(picked.rules[0].id, "RCE2-1");
    EXPECT_EQ(picked.rules[1].id, "RCE2-2");
}

TEST(MappingBridge, ProjectsAndStamps) {
    Mapping m;
    m.subject_id = {"DOID", "8567"};
    m.predicate_id = {"SKOS", "exactMatch"};
    m.object_id = {"NCIT", "C9357"};
    m.confidence = 0.9;
    auto other = m;
    other.confidence = 0.1;
    const auto fact = mapping_to_fact(m);
    EXPECT_EQ(fact, (Triple{"DOID:8567", "SKOS:exactMatch", "NCIT:C9357"}));
    EXPECT_EQ(mapping_to_fact(other), fact);

    const std::map<std::string, std::string> labels = {{"MONDO:0009348", "classic Hodgkin lymphoma"}};
    const auto inferred = fact_to_mapping(Triple{"MONDO:0009348", "SKOS:closeMatch", "NCIT:C9357"},
                                          StampDescriptor{"urn:inferred", "my-tool", 0.7, &labels});
    EXPECT_EQ(inferred.mapping_justification->str(), "SEMAPV:MappingChaining");
    EXPECT_EQ(inferred.mapping_tool, "my-tool");
    EXPECT_EQ(inferred.mapping_set_id, "urn:inferred");
    EXPECT_EQ(inferred.subject_label, "classic Hodgkin lymphoma");
    EXPECT_FALSE(inferred.object_label.has_value());
    EXPECT_EQ(inferred.confidence, 0.7);
    EXPECT_EQ(mapping_to_fact(fact_to_mapping(fact, {})), fact);

    EXPECT_THROW(fact_to_mapping(Triple{"nocolon", "SKOS:closeMatch", "NCIT:C9357"}, {}), Error);
    const Atom open{Term::variable("A"), Term::constant("SKOS:closeMatch"), Term::constant("NCIT:C9357")};
    try {
        fact_to_mapping(open, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ContractViolation);
    }
}

} // namespace
} // namespace crosswalk
